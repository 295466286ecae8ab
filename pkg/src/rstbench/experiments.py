"""Declarative cross-corpus and cross-genre experiments.

An :class:`ExperimentConfig` names its training sources, optional base-model
sources, test targets and training regime. :func:`run` trains one model per
seed, parses every target and returns a :class:`ScoreReport` of raw match
counts and scores; means and degradation deltas are folds over those rows.
"""

from __future__ import annotations

import csv
import logging
import multiprocessing
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

from .depconv import to_dependencies
from .errors import (
    InfeasibleBudget,
    InvalidConfig,
    InventoryMismatch,
    LeakageError,
    MissingDocument,
    UnknownGenre,
)
from .metrics import DocCounts, ScoreTriple, aggregate, parseval
from .parser import FeatureConfig, TrainConfig, parse, save_model, stratified_dev, train, warm_start
from .parser.model import LABEL_SPACES
from .parser.stacking import stack_features_from_parser, stack_features_from_tagger, window_label_tagger
from .relmap import collapse_fn
from .treebank import ConstituentTree, CorpusHandle, write_rs3, write_rsd
from .trees import binarize, debinarize, relabel

log = logging.getLogger(__name__)

REGIMES = ("plain", "concat", "flair-label", "sr-label", "sr-graph", "warm-start")
BASE_REGIMES = ("flair-label", "sr-label", "sr-graph", "warm-start")
DEV_POLICIES = ("partition", "stratified", "none")
GROWING_GENRES = ("conversation", "speech", "textbook", "vlog")
GENRE_ALIASES = {"how-to": "whow", "whow": "how-to", "travel": "voyage", "voyage": "travel"}
TEST_PARTITIONS = ("dev", "test")
MICRO, MACRO = "micro_avg", "macro_avg"


def _tuple(value):
    if value is None:
        return None
    if isinstance(value, str):
        return (value,)
    return tuple(value)


@dataclass(frozen=True)
class Source:
    """A document selection from one named corpus, collapsed with ``scheme``."""

    corpus: str
    partitions: tuple[str, ...] | None = ("train",)
    genres: tuple[str, ...] | None = None
    doc_ids: tuple[str, ...] | None = None
    scheme: str | None = None

    def __post_init__(self):
        for name in ("partitions", "genres", "doc_ids"):
            object.__setattr__(self, name, _tuple(getattr(self, name)))
        if self.scheme not in LABEL_SPACES:
            raise InvalidConfig(f"unknown relation scheme {self.scheme!r}")

    @property
    def label_space(self) -> str:
        return LABEL_SPACES[self.scheme]

    def _corpus(self, corpora: Mapping[str, CorpusHandle]) -> CorpusHandle:
        try:
            return corpora[self.corpus]
        except KeyError:
            raise InvalidConfig(f"corpus {self.corpus!r} is not loaded") from None

    def trees(self, corpora: Mapping[str, CorpusHandle]) -> list[ConstituentTree]:
        corpus = self._corpus(corpora)
        if self.doc_ids is not None:
            missing = [d for d in self.doc_ids if d not in corpus]
            if missing:
                raise MissingDocument(f"{self.corpus}: unknown documents {missing[:5]}")
            return [corpus[d].tree for d in self.doc_ids]
        return corpus.trees(self.partitions, self.genres)

    def keys(self, corpora) -> set[tuple[str, str]]:
        return {(self.corpus, t.doc_id) for t in self.trees(corpora)}

    def with_partitions(self, partitions) -> Source:
        return Source(self.corpus, partitions, self.genres, None, self.scheme)

    def to_dict(self) -> dict:
        # partitions=None means "every partition" and must survive a round trip
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()
                if v is not None or k == "partitions"}


@dataclass(frozen=True)
class Target(Source):
    name: str = ""

    def __post_init__(self):
        super().__post_init__()
        if not self.name:
            object.__setattr__(self, "name", "+".join(self.genres or ()) or self.corpus)


def _source_from_dict(d: Mapping, cls=Source):
    allowed = {f.name for f in fields(cls)}
    unknown = set(d) - allowed
    if unknown:
        raise InvalidConfig(f"unknown source keys {sorted(unknown)}")
    return cls(**d)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    train: tuple[Source, ...]
    targets: tuple[Target, ...]
    regime: str = "plain"
    base: tuple[Source, ...] = ()
    dev_policy: str = "partition"
    runs: int = 3
    seeds: tuple[int, ...] = (1, 2, 3)
    epochs: int = 20
    patience: int | None = 5
    organizational: bool = True
    # memorization checks deliberately test on training documents
    allow_overlap: bool = False

    def __post_init__(self):
        for name in ("train", "targets", "base", "seeds"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.regime not in REGIMES:
            raise InvalidConfig(f"regime must be one of {REGIMES}")
        if self.dev_policy not in DEV_POLICIES:
            raise InvalidConfig(f"dev_policy must be one of {DEV_POLICIES}")
        if not self.train:
            raise InvalidConfig(f"{self.name}: no training sources")
        if len(self.seeds) != self.runs:
            raise InvalidConfig(f"{self.name}: {self.runs} runs need {self.runs} seeds, got {len(self.seeds)}")
        if self.regime in BASE_REGIMES and not self.base:
            raise InvalidConfig(f"regime {self.regime} needs base sources")
        spaces = {s.label_space for s in (*self.train, *self.targets)}
        if len(spaces) > 1:
            raise InventoryMismatch(f"{self.name}: sources and targets span label spaces {sorted(spaces)}")
        if self.regime == "warm-start" and {s.label_space for s in self.base} != spaces:
            raise InventoryMismatch(f"{self.name}: warm-start base must use the {self.label_space} labels")
        names = [t.name for t in self.targets]
        if len(set(names)) != len(names) or {MICRO, MACRO} & set(names):
            raise InvalidConfig(f"{self.name}: target names must be unique and not reserved")

    @property
    def label_space(self) -> str:
        return self.train[0].label_space

    @property
    def stacking(self) -> str | None:
        return {"flair-label": "label", "sr-label": "label", "sr-graph": "graph"}.get(self.regime)

    @property
    def features(self) -> FeatureConfig:
        return FeatureConfig(organizational=self.organizational, stacking=self.stacking)

    def dev_sources(self) -> tuple[Source, ...]:
        if self.dev_policy != "partition":
            return ()
        return tuple(s.with_partitions(("dev",)) for s in self.train if s.doc_ids is None)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "regime": self.regime,
            "runs": self.runs,
            "seeds": list(self.seeds),
            "epochs": self.epochs,
            "patience": self.patience,
            "dev_policy": self.dev_policy,
            "organizational": self.organizational,
            "train": [s.to_dict() for s in self.train],
            "targets": [t.to_dict() for t in self.targets],
        }
        if self.base:
            out["base"] = [s.to_dict() for s in self.base]
        if self.allow_overlap:
            out["allow_overlap"] = True
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> ExperimentConfig:
        d = dict(d)
        d.pop("corpora", None)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidConfig(f"unknown config keys {sorted(unknown)}")
        d["train"] = tuple(_source_from_dict(s) for s in d.get("train", ()))
        d["targets"] = tuple(_source_from_dict(t, Target) for t in d.get("targets", ()))
        d["base"] = tuple(_source_from_dict(s) for s in d.get("base", ()) or ())
        if "seeds" not in d and "runs" in d:
            d["seeds"] = tuple(range(1, d["runs"] + 1))
        if "runs" not in d and "seeds" in d:
            d["runs"] = len(d["seeds"])
        return cls(**d)


def dump_configs(configs: Sequence[ExperimentConfig], corpora_paths: Mapping[str, str] | None = None) -> str:
    docs = []
    for cfg in configs:
        d = cfg.to_dict()
        if corpora_paths:
            d["corpora"] = dict(corpora_paths)
        docs.append(d)
    return yaml.safe_dump_all(docs, sort_keys=False)


def load_configs(text: str) -> tuple[list[ExperimentConfig], dict[str, str]]:
    """Parse one or more YAML documents; returns the configs and any ``corpora`` paths."""
    configs, paths = [], {}
    for doc in yaml.safe_load_all(text):
        if doc is None:
            continue
        if not isinstance(doc, Mapping):
            raise InvalidConfig("each config document must be a mapping")
        paths.update(doc.get("corpora") or {})
        configs.append(ExperimentConfig.from_dict(doc))
    return configs, paths


# --------------------------------------------------------------------------
# leakage and materialization

def check_leakage(config: ExperimentConfig, corpora: Mapping[str, CorpusHandle]) -> None:
    """Raise when a test document is also used for training, dev or a base model."""
    if config.allow_overlap:
        return
    held = set()
    for src in (*config.train, *config.dev_sources(), *config.base):
        held |= src.keys(corpora)
    for target in config.targets:
        overlap = held & target.keys(corpora)
        if overlap:
            raise LeakageError(f"{config.name}: target {target.name} shares {len(overlap)} documents "
                               f"with training, e.g. {sorted(overlap)[0]}")


def _collect(sources: Iterable[Source], corpora) -> list[ConstituentTree]:
    seen, out = set(), []
    for src in sources:
        fn = collapse_fn(src.scheme)
        for tree in src.trees(corpora):
            key = (src.corpus, tree.doc_id)
            if key not in seen:
                seen.add(key)
                out.append(relabel(tree, fn))
    return out


@dataclass
class Materialized:
    train: list[ConstituentTree]
    dev: list[ConstituentTree]
    base: list[ConstituentTree]
    targets: dict[str, list[ConstituentTree]]


def materialize(config: ExperimentConfig, corpora: Mapping[str, CorpusHandle]) -> Materialized:
    check_leakage(config, corpora)
    train_trees = _collect(config.train, corpora)
    if config.dev_policy == "stratified":
        train_trees, dev = stratified_dev(train_trees)
    else:
        dev = _collect(config.dev_sources(), corpora)
    targets = {t.name: _collect([t], corpora) for t in config.targets}
    return Materialized(train_trees, dev, _collect(config.base, corpora), targets)


# --------------------------------------------------------------------------
# reports

ROW_FIELDS = ("experiment", "regime", "seed", "target", "docs", "matched_S", "matched_N", "matched_R",
              "gold_units", "pred_units", "S", "N", "R")


@dataclass(frozen=True)
class RunRow:
    experiment: str
    regime: str
    seed: int
    target: str
    docs: int
    matched_S: int
    matched_N: int
    matched_R: int
    gold_units: int
    pred_units: int
    S: float
    N: float
    R: float

    @property
    def scores(self) -> ScoreTriple:
        return ScoreTriple(self.S, self.N, self.R)

    def counts(self) -> DocCounts:
        return DocCounts(self.target, self.target, self.matched_S, self.matched_N, self.matched_R,
                         self.gold_units, self.pred_units)


@dataclass(frozen=True)
class MeanRow:
    experiment: str
    target: str
    runs: int
    S: float
    N: float
    R: float


@dataclass(frozen=True)
class DegradationRow:
    experiment: str
    target: str
    baseline: ScoreTriple
    score: ScoreTriple
    delta: ScoreTriple


def _row(experiment, regime, seed, target, counts: Sequence[DocCounts], docs: int) -> RunRow:
    s = aggregate(counts)
    total = [sum(getattr(c, f) for c in counts) for f in ROW_FIELDS[5:10]]
    return RunRow(experiment, regime, seed, target, docs, *total, s.S, s.N, s.R)


def _aggregate_rows(experiment, regime, seed, rows: Sequence[RunRow]) -> list[RunRow]:
    counts = [r.counts() for r in rows]
    docs = sum(r.docs for r in rows)
    micro = _row(experiment, regime, seed, MICRO, counts, docs)
    m = ScoreTriple(*(statistics.fmean(getattr(r, k) for r in rows) for k in "SNR"))
    macro = RunRow(experiment, regime, seed, MACRO, docs, *[getattr(micro, f) for f in ROW_FIELDS[5:10]],
                   m.S, m.N, m.R)
    return [micro, macro]


@dataclass
class ScoreReport:
    rows: list[RunRow] = field(default_factory=list)

    def experiments(self) -> list[str]:
        return list(dict.fromkeys(r.experiment for r in self.rows))

    def means(self) -> list[MeanRow]:
        groups: dict[tuple[str, str], list[RunRow]] = {}
        for r in self.rows:
            groups.setdefault((r.experiment, r.target), []).append(r)
        return [MeanRow(exp, target, len(rs), *(statistics.fmean(getattr(r, k) for r in rs) for k in "SNR"))
                for (exp, target), rs in groups.items()]

    def mean(self, target: str, experiment: str | None = None) -> ScoreTriple:
        for m in self.means():
            if m.target == target and (experiment is None or m.experiment == experiment):
                return ScoreTriple(m.S, m.N, m.R)
        raise KeyError(target)

    def pooled(self, name: str = "suite") -> ScoreReport:
        """Micro and macro rows per seed across every per-target row of every experiment."""
        by_seed: dict[int, list[RunRow]] = {}
        for r in self.rows:
            if r.target not in (MICRO, MACRO):
                by_seed.setdefault(r.seed, []).append(r)
        rows = []
        for seed, rs in sorted(by_seed.items()):
            rows.extend(_aggregate_rows(name, "mixed", seed, rs))
        return ScoreReport(rows)

    def degradation(self, baseline: ScoreReport) -> list[DegradationRow]:
        """baseline mean minus this report's mean, per target present in both (negative = improvement)."""
        base = {m.target: ScoreTriple(m.S, m.N, m.R) for m in baseline.means()}
        out = []
        for m in self.means():
            if m.target in base and m.target not in (MICRO, MACRO):
                b, own = base[m.target], ScoreTriple(m.S, m.N, m.R)
                out.append(DegradationRow(m.experiment, m.target, b, own,
                                          ScoreTriple(b.S - own.S, b.N - own.N, b.R - own.R)))
        return out

    def extend(self, other: ScoreReport) -> ScoreReport:
        self.rows.extend(other.rows)
        return self

    # CSV
    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(ROW_FIELDS)
            for r in self.rows:
                w.writerow([getattr(r, f) for f in ROW_FIELDS])
        return path

    @classmethod
    def read_csv(cls, path: str | Path) -> ScoreReport:
        rows = []
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                vals = []
                for f in ROW_FIELDS:
                    v = rec[f]
                    if f in ("S", "N", "R"):
                        v = float(v)
                    elif f not in ("experiment", "regime", "target"):
                        v = int(v)
                    vals.append(v)
                rows.append(RunRow(*vals))
        return cls(rows)


def write_means_csv(report: ScoreReport, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(("experiment", "target", "runs", "S", "N", "R"))
        for m in report.means():
            w.writerow((m.experiment, m.target, m.runs, m.S, m.N, m.R))
    return path


def write_degradation_csv(rows: Sequence[DegradationRow], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(("experiment", "target", "baseline_S", "baseline_N", "baseline_R",
                    "S", "N", "R", "delta_S", "delta_N", "delta_R"))
        for r in rows:
            w.writerow((r.experiment, r.target, *r.baseline.as_tuple(), *r.score.as_tuple(), *r.delta.as_tuple()))
    return path


# --------------------------------------------------------------------------
# running

def _annotations(config: ExperimentConfig, data: Materialized, seed: int):
    if config.regime == "flair-label":
        tagger = window_label_tagger([to_dependencies(t) for t in data.base], scheme=None, seed=seed)
        docs = [*data.train, *data.dev, *(t for ts in data.targets.values() for t in ts)]
        return stack_features_from_tagger(tagger, docs)
    if config.regime in ("sr-label", "sr-graph"):
        base = _base_model(config, data, seed)
        docs = [*data.train, *data.dev, *(t for ts in data.targets.values() for t in ts)]
        return stack_features_from_parser(base, docs, config.stacking)
    return None


def _base_model(config: ExperimentConfig, data: Materialized, seed: int):
    base_train, base_dev = stratified_dev(data.base)
    tc = TrainConfig(config.epochs, config.patience, None, FeatureConfig(config.organizational),
                     space=config.base[0].label_space)
    return train(base_train, tc, seed, base_dev or None)


def run_seed(config: ExperimentConfig, corpora: Mapping[str, CorpusHandle], seed: int,
             out_dir: str | Path | None = None) -> list[RunRow]:
    """Train and evaluate one run; optionally persist model, parses and rows."""
    data = materialize(config, corpora)
    annotations = _annotations(config, data, seed)
    tc = TrainConfig(config.epochs, config.patience, None, config.features, space=config.label_space)
    dev = data.dev or None
    if config.regime == "warm-start":
        model = warm_start(_base_model(config, data, seed), data.train, tc, seed, dev)
    else:
        model = train(data.train, tc, seed, dev, annotations)

    run_dir = None
    if out_dir is not None:
        run_dir = Path(out_dir) / "runs" / config.name / str(seed)
        (run_dir / "parses").mkdir(parents=True, exist_ok=True)
        save_model(model, run_dir / "model.bin")

    rows = []
    for target in config.targets:
        counts = []
        for tree in data.targets[target.name]:
            ann = annotations.get(tree.doc_id) if annotations else None
            pred = parse(model, tree.edus, ann, tree.doc_id, tree.genre)
            counts.append(parseval(binarize(tree), pred))
            if run_dir is not None:
                nary = debinarize(pred)
                (run_dir / "parses" / f"{tree.doc_id}.rs3").write_bytes(write_rs3(nary))
                (run_dir / "parses" / f"{tree.doc_id}.rsd").write_text(
                    write_rsd(to_dependencies(nary)), encoding="utf-8")
        if not counts:
            log.warning("%s: target %s has no documents", config.name, target.name)
            continue
        rows.append(_row(config.name, config.regime, seed, target.name, counts, len(counts)))
    if len(rows) > 1:
        rows.extend(_aggregate_rows(config.name, config.regime, seed, rows))
    if run_dir is not None:
        ScoreReport(rows).write_csv(run_dir / "report.csv")
    return rows


_SHARED: tuple | None = None


def _run_shared(seed: int) -> list[RunRow]:
    config, corpora, out_dir = _SHARED
    return run_seed(config, corpora, seed, out_dir)


def run(config: ExperimentConfig, corpora: Mapping[str, CorpusHandle], out_dir: str | Path | None = None,
        jobs: int = 1, baseline: ScoreReport | None = None, plot: bool = True) -> ScoreReport:
    """Run every seed of ``config`` and fold the rows into a report.

    With ``out_dir``, files go under ``out_dir/runs/<name>/``: one directory per
    seed plus ``report.csv``, ``means.csv``, ``degradation.csv`` (when a
    baseline is given) and PNG figures.
    """
    global _SHARED
    check_leakage(config, corpora)
    if jobs > 1 and len(config.seeds) > 1:
        _SHARED = (config, corpora, out_dir)
        try:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
                results = list(pool.map(_run_shared, config.seeds))
        finally:
            _SHARED = None
    else:
        results = [run_seed(config, corpora, seed, out_dir) for seed in config.seeds]
    report = ScoreReport([r for rows in results for r in rows])
    if out_dir is not None:
        write_report(report, Path(out_dir) / "runs" / config.name, baseline, plot)
    return report


def write_report(report: ScoreReport, directory: str | Path, baseline: ScoreReport | None = None,
                 plot: bool = True) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    report.write_csv(directory / "report.csv")
    write_means_csv(report, directory / "means.csv")
    deg = report.degradation(baseline) if baseline is not None else []
    if deg:
        write_degradation_csv(deg, directory / "degradation.csv")
    if plot and report.rows:
        from .plotting import plot_degradation, plot_scores

        plot_scores(report.means(), directory / "scores.png")
        if deg:
            plot_degradation(deg, directory / "degradation.png")
    return directory


def run_many(configs: Sequence[ExperimentConfig], corpora, out_dir=None, jobs: int = 1,
             baseline: ScoreReport | None = None, plot: bool = True) -> ScoreReport:
    report = ScoreReport()
    for cfg in configs:
        report.extend(run(cfg, corpora, out_dir, jobs, baseline, plot))
    return report


# --------------------------------------------------------------------------
# builders

def resolve_genre(corpus: CorpusHandle, genre: str) -> str:
    genres = corpus.genres
    if genre in genres:
        return genre
    alias = GENRE_ALIASES.get(genre)
    if alias in genres:
        return alias
    raise UnknownGenre(f"{corpus.name} has no genre {genre!r} (available: {', '.join(genres)})")


def _is_growing(genre: str) -> bool:
    return genre in GROWING_GENRES


def build_ova(corpus: CorpusHandle, held_out: str, scheme: str | None = "gum", runs: int = 3,
              seeds: Sequence[int] | None = None, **kwargs) -> ExperimentConfig:
    """Train on every other genre's train documents; test on the held-out genre's dev+test."""
    genre = resolve_genre(corpus, held_out)
    others = tuple(g for g in corpus.genres if g != genre)
    cfg = ExperimentConfig(
        name=f"ova-{genre}",
        train=(Source(corpus.name, ("train",), others, scheme=scheme),),
        targets=(Target(corpus.name, TEST_PARTITIONS, (genre,), scheme=scheme, name=genre),),
        runs=runs, seeds=tuple(seeds or range(1, runs + 1)), **kwargs)
    check_leakage(cfg, {corpus.name: corpus})
    return cfg


def build_all_large(corpus: CorpusHandle, scheme: str | None = "gum", runs: int = 3,
                    seeds: Sequence[int] | None = None, **kwargs) -> ExperimentConfig:
    """Train on the non-growing genres; one target per growing genre."""
    large = tuple(g for g in corpus.genres if not _is_growing(g))
    growing = [g for g in corpus.genres if _is_growing(g)]
    if not growing:
        log.warning("%s has no growing genres; all-large has no targets", corpus.name)
    cfg = ExperimentConfig(
        name="all-large",
        train=(Source(corpus.name, ("train",), large, scheme=scheme),),
        targets=tuple(Target(corpus.name, TEST_PARTITIONS, (g,), scheme=scheme, name=g) for g in growing),
        runs=runs, seeds=tuple(seeds or range(1, runs + 1)), **kwargs)
    check_leakage(cfg, {corpus.name: corpus})
    return cfg


def build_baseline(corpus: CorpusHandle, scheme: str | None = "gum", runs: int = 5,
                   seeds: Sequence[int] | None = None, **kwargs) -> ExperimentConfig:
    """In-distribution reference: all train documents, one target per genre.

    Targets use the same dev+test documents as the OVA targets, so dev for
    early stopping is a stratified slice of train.
    """
    kwargs.setdefault("dev_policy", "stratified")
    cfg = ExperimentConfig(
        name="baseline",
        train=(Source(corpus.name, ("train",), scheme=scheme),),
        targets=tuple(Target(corpus.name, TEST_PARTITIONS, (g,), scheme=scheme, name=g) for g in corpus.genres),
        runs=runs, seeds=tuple(seeds or range(1, runs + 1)), **kwargs)
    check_leakage(cfg, {corpus.name: corpus})
    return cfg


CohortRow = tuple[str, "int | Sequence[str]"]


def select_cohort(corpus: CorpusHandle, rows: Sequence[CohortRow]) -> list[str]:
    """Doc ids for (genre, count) rows, first ``count`` ids per genre in sorted order.

    A row may list explicit doc ids instead of a count.
    """
    chosen = []
    for genre, spec in rows:
        genre = resolve_genre(corpus, genre)
        if isinstance(spec, int):
            ids = sorted(d.doc_id for d in corpus.docs(genres=[genre]))
            if spec > len(ids):
                raise InfeasibleBudget(f"{genre} has {len(ids)} documents, {spec} requested")
            chosen.extend(ids[:spec])
        else:
            missing = [d for d in spec if d not in corpus]
            if missing:
                raise MissingDocument(f"unknown documents {missing[:5]}")
            chosen.extend(spec)
    return chosen


def build_fixed_cohorts(corpus: CorpusHandle, spec: Mapping[str, Sequence[CohortRow]], tolerance: int = 1,
                        test_genres: Sequence[str] | None = None, scheme: str | None = "gum",
                        runs: int = 5, seeds: Sequence[int] | None = None, **kwargs) -> list[ExperimentConfig]:
    """Equal-budget training cohorts, all tested on the same out-of-cohort genres.

    Cohorts draw documents from every partition. Raises InfeasibleBudget when
    the EDU totals differ by more than ``tolerance``.
    """
    selections = {name: select_cohort(corpus, rows) for name, rows in spec.items()}
    totals = {name: sum(len(corpus[d].tree.edus) for d in ids) for name, ids in selections.items()}
    if totals and max(totals.values()) - min(totals.values()) > tolerance:
        raise InfeasibleBudget(f"cohort EDU totals {totals} differ by more than {tolerance}")
    used = {resolve_genre(corpus, g) for rows in spec.values() for g, _ in rows}
    if test_genres is None:
        test_genres = [g for g in corpus.genres if g not in used]
    else:
        test_genres = [resolve_genre(corpus, g) for g in test_genres]
    # no dev slice, so each cohort trains on exactly its EDU budget
    kwargs.setdefault("dev_policy", "none")
    configs = []
    for name, ids in selections.items():
        cfg = ExperimentConfig(
            name=name,
            train=(Source(corpus.name, None, doc_ids=tuple(ids), scheme=scheme),),
            targets=tuple(Target(corpus.name, TEST_PARTITIONS, (g,), scheme=scheme, name=g) for g in test_genres),
            runs=runs, seeds=tuple(seeds or range(1, runs + 1)), **kwargs)
        check_leakage(cfg, {corpus.name: corpus})
        configs.append(cfg)
    return configs


def cohort_totals(configs: Sequence[ExperimentConfig], corpora) -> dict[str, tuple[int, int]]:
    """(documents, EDUs) of each config's training selection."""
    out = {}
    for cfg in configs:
        trees = _collect(cfg.train, corpora)
        out[cfg.name] = (len(trees), sum(len(t.edus) for t in trees))
    return out


def train_size(config: ExperimentConfig, corpora) -> tuple[int, int]:
    return cohort_totals([config], corpora)[config.name]
