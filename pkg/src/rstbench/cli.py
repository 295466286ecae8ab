"""Command line entry point: ``rstbench <subcommand> ...``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import analysis, experiments
from .depconv import to_dependencies
from .errors import EmptyCorpus, RstError, UnknownLabel
from .metrics import Boundaries, aggregate, edu_boundaries, parseval, seg_f1_corpus
from .parser import FeatureConfig, TrainConfig, load_model, parse, save_model, stratified_dev, train
from .relmap import SCHEMES, collapse_fn, corpus_relation_labels, detect_scheme, load_table, mapping_mismatch_rate, to_class
from .treebank import (
    ConstituentTree,
    Document,
    load_corpus,
    parse_rsd,
    read_rs3,
    write_rs3,
    write_rsd,
)
from .trees import binarize, corpus_stats, debinarize, nuclearity_distribution, relabel, to_brackets

log = logging.getLogger("rstbench")


# --------------------------------------------------------------------------
# input helpers

def load_trees(path: str | Path, lenient: bool = False) -> list[ConstituentTree]:
    """Trees from a corpus directory (with manifest.tsv), a directory of .rs3 files, or one file."""
    path = Path(path)
    if path.is_dir():
        if (path / "manifest.tsv").exists():
            return load_corpus(path, lenient=lenient).trees()
        return [read_rs3(p, lenient=lenient) for p in sorted(path.rglob("*.rs3"))]
    return [read_rs3(path, lenient=lenient)]


def load_documents(path: str | Path) -> list[Document]:
    """Dependency documents from .rsd files, converting .rs3 inputs on the fly."""
    path = Path(path)
    if path.is_dir():
        rsd = sorted(path.rglob("*.rsd"))
        if rsd and not (path / "manifest.tsv").exists():
            return [parse_rsd(p.read_bytes(), p.stem) for p in rsd]
        return [to_dependencies(t) for t in load_trees(path)]
    if path.suffix == ".rsd":
        return [parse_rsd(path.read_bytes(), path.stem)]
    return [to_dependencies(read_rs3(path))]


def _with_genres(docs: list[Document], reference: list) -> list[Document]:
    genres = {d.doc_id: d.genre for d in reference}
    return [Document(d.doc_id, d.edus, d.arcs, d.genre or genres.get(d.doc_id, "")) for d in docs]


def resolve_scheme(name: str, trees) -> str | None:
    if name == "auto":
        try:
            return detect_scheme(corpus_relation_labels(trees))
        except UnknownLabel:
            return None
    return None if name == "fine" else name


def _corpus_args(values: Sequence[str]) -> dict[str, str]:
    out = {}
    for v in values or ():
        name, sep, path = v.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--corpus expects NAME=PATH, got {v!r}")
        out[name] = path
    return out


@contextlib.contextmanager
def _out_stream(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        yield fh


# --------------------------------------------------------------------------
# subcommands

def cmd_convert(args) -> int:
    trees = load_trees(args.input, args.lenient)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    fn = collapse_fn(args.relabel) if args.relabel else None
    for tree in trees:
        if fn:
            tree = relabel(tree, fn)
        if args.to == "brackets":
            (out / f"{tree.doc_id}.txt").write_text(to_brackets(binarize(tree).root) + "\n", encoding="utf-8")
        else:
            (out / f"{tree.doc_id}.rs3").write_bytes(write_rs3(tree))
    return 0


def cmd_depconvert(args) -> int:
    trees = load_trees(args.input, args.lenient)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for tree in trees:
        (out / f"{tree.doc_id}.rsd").write_text(write_rsd(to_dependencies(tree)), encoding="utf-8")
    return 0


def score_counts(gold_trees, pred_trees, scheme, include_root=False):
    pred = {t.doc_id: t for t in pred_trees}
    counts = []
    for g in gold_trees:
        if g.doc_id not in pred:
            raise RstError(f"no prediction for {g.doc_id}")
        p = pred[g.doc_id]
        p = ConstituentTree(p.doc_id, p.edus, p.root, g.genre, p.relations)
        counts.append(parseval(binarize(g), binarize(p), include_root, scheme))
    return counts


def cmd_score(args) -> int:
    gold = load_trees(args.gold)
    pred = load_trees(args.pred)
    scheme = resolve_scheme(args.scheme, gold)
    counts = score_counts(gold, pred, scheme, args.include_root)
    total = aggregate(counts, args.mode)
    with _out_stream(args.output) as fh:
        w = csv.writer(fh)
        w.writerow(("doc_id", "genre", "matched_S", "matched_N", "matched_R", "gold_units", "pred_units",
                    "S", "N", "R"))
        for c in counts:
            w.writerow((c.doc_id, c.genre, c.matched_S, c.matched_N, c.matched_R, c.gold_units, c.pred_units,
                        *(f"{x:.2f}" for x in c.score().as_tuple())))
        w.writerow((f"{args.mode}_avg", "", "", "", "", "", "", *(f"{x:.2f}" for x in total.as_tuple())))
    return 0


def _segmentations(path) -> dict[str, Boundaries]:
    path = Path(path)
    files = sorted(path.rglob("*")) if path.is_dir() else [path]
    out = {}
    for p in files:
        if p.suffix == ".rs3":
            out[p.stem] = edu_boundaries(e.text for e in read_rs3(p).edus)
        elif p.suffix == ".txt":
            lines = [l for l in p.read_text(encoding="utf-8").splitlines() if l.strip()]
            out[p.stem] = edu_boundaries(lines)
    return out


def cmd_seg_score(args) -> int:
    gold, pred = _segmentations(args.gold), _segmentations(args.pred)
    missing = sorted(gold.keys() - pred.keys())
    if missing:
        raise RstError(f"no predicted segmentation for {missing[:5]}")
    s = seg_f1_corpus((gold[k], pred[k]) for k in sorted(gold))
    w = csv.writer(sys.stdout)
    w.writerow(("P", "R", "F1"))
    w.writerow(tuple(f"{x:.2f}" for x in (s.P, s.R, s.F1)))
    return 0


def cmd_stats(args) -> int:
    path = Path(args.corpus)
    if (path / "manifest.tsv").exists():
        corpus = load_corpus(path)
        groups = [("all", corpus.trees(args.partition))]
        if args.by_genre:
            groups += [(g, corpus.trees(args.partition, [g])) for g in corpus.genres]
    else:
        groups = [("all", load_trees(path))]
    with _out_stream(args.output) as fh:
        w = csv.writer(fh)
        w.writerow(("group", "docs", "tokens", "edus", "relation_instances", "labels", "NS", "SN", "NN"))
        for name, trees in groups:
            st = corpus_stats(trees)
            try:
                dist = nuclearity_distribution(trees)
            except EmptyCorpus:
                dist = {"NS": 0.0, "SN": 0.0, "NN": 0.0}
            w.writerow((name, *st.as_row().values(), *(f"{100 * dist[k]:.2f}" for k in ("NS", "SN", "NN"))))
    return 0


def cmd_map(args) -> int:
    w = csv.writer(sys.stdout)
    if args.table:
        w.writerow(("gum_relation", "gum_class", "rstdt_class"))
        for r in load_table().rows:
            w.writerow((r.gum_relation, r.gum_class, r.rstdt_class))
        return 0
    if args.mismatch:
        rate = mapping_mismatch_rate(corpus_relation_labels(load_trees(args.mismatch)))
        print(f"{100 * rate:.2f}")
        return 0
    w.writerow(("label", args.scheme))
    for label in args.labels:
        w.writerow((label, to_class(label, args.scheme)))
    return 0


def _train_config(args, features=None) -> TrainConfig:
    scheme = None if args.scheme == "fine" else args.scheme
    return TrainConfig(epochs=args.epochs, patience=args.patience, scheme=scheme,
                       features=features or FeatureConfig(organizational=not args.no_organizational))


def cmd_train(args) -> int:
    path = Path(args.corpus)
    corpus = load_corpus(path) if (path / "manifest.tsv").exists() else None
    if corpus is not None:
        trees = corpus.trees(args.partitions, args.genres)
        dev = corpus.trees(["dev"], args.genres) if args.dev_policy == "partition" else []
    else:
        trees, dev = load_trees(path), []
    if args.dev_policy == "stratified":
        trees, dev = stratified_dev(trees)
    model = train(trees, _train_config(args), args.seed, dev or None)
    save_model(model, args.output)
    w = csv.writer(sys.stdout)
    keys = sorted({k for h in model.history for k in h})
    w.writerow(keys)
    for h in model.history:
        w.writerow([h.get(k, "") for k in keys])
    return 0


def cmd_parse(args) -> int:
    model = load_model(args.model)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for tree in load_trees(args.input):
        pred = debinarize(parse(model, tree.edus, doc_id=tree.doc_id, genre=tree.genre))
        (out / f"{tree.doc_id}.rs3").write_bytes(write_rs3(pred))
        (out / f"{tree.doc_id}.rsd").write_text(write_rsd(to_dependencies(pred)), encoding="utf-8")
    return 0


def _load_corpora(paths: dict[str, str]):
    return {name: load_corpus(p, name=name) for name, p in paths.items()}


def cmd_experiment_run(args) -> int:
    configs, paths = experiments.load_configs(Path(args.config).read_text(encoding="utf-8"))
    paths.update(_corpus_args(args.corpus))
    corpora = _load_corpora(paths)
    baseline = experiments.ScoreReport.read_csv(args.baseline) if args.baseline else None
    report = experiments.run_many(configs, corpora, args.out, args.jobs, baseline, plot=not args.no_plot)
    out = Path(args.out)
    report.write_csv(out / "report.csv")
    experiments.write_means_csv(report, out / "means.csv")
    w = csv.writer(sys.stdout)
    w.writerow(("experiment", "target", "runs", "S", "N", "R"))
    for m in report.means():
        w.writerow((m.experiment, m.target, m.runs, f"{m.S:.2f}", f"{m.N:.2f}", f"{m.R:.2f}"))
    return 0


def cmd_experiment_build(args) -> int:
    paths = _corpus_args(args.corpus)
    if len(paths) != 1:
        raise RstError("build needs exactly one --corpus NAME=PATH")
    corpora = _load_corpora(paths)
    corpus = next(iter(corpora.values()))
    common = {"scheme": None if args.scheme == "fine" else args.scheme, "runs": args.runs}
    if args.kind == "ova":
        genres = args.genre or [g for g in corpus.genres if g not in experiments.GROWING_GENRES]
        configs = [experiments.build_ova(corpus, g, **common) for g in genres]
    elif args.kind == "all-large":
        configs = [experiments.build_all_large(corpus, **common)]
    elif args.kind == "baseline":
        configs = [experiments.build_baseline(corpus, **common)]
    else:
        from .reference import FIXED_COHORTS, cohort_spec

        spec = {name: cohort_spec(name) for name in FIXED_COHORTS}
        configs = experiments.build_fixed_cohorts(corpus, spec, args.tolerance, **common)
    text = experiments.dump_configs(configs, paths)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    gold_trees = load_trees(args.gold) if Path(args.gold).suffix != ".rsd" else []
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    scheme = None if args.scheme == "fine" else args.scheme
    if args.scheme == "auto":
        scheme = resolve_scheme("auto", gold_trees) if gold_trees else None

    if args.what == "branching":
        result = analysis.branching_report(gold_trees, load_trees(args.pred))
        with _out_stream(out / "branching.csv" if out else None) as fh:
            w = csv.writer(fh)
            w.writerow(("category", "F1"))
            for k, v in result.items():
                w.writerow((k, f"{v:.2f}"))
        if out and args.plot:
            from .plotting import plot_branching
            plot_branching(result, out / "branching.png")
        return 0

    gold = _with_genres(load_documents(args.gold), gold_trees)
    pred = load_documents(args.pred)
    if args.what == "cdu":
        acc = analysis.cdu_accuracy(gold, pred)
        with _out_stream(out / "cdu.csv" if out else None) as fh:
            w = csv.writer(fh)
            w.writerow(("documents", "cdu_accuracy"))
            w.writerow((len(gold), f"{acc:.3f}"))
    elif args.what == "confusion":
        conf = analysis.confusion(gold, pred, scheme, args.filter)
        if out:
            conf.write_csv(out / "confusion.csv")
            acc = analysis.per_class_accuracy(gold, pred, scheme)
            with (out / "class_accuracy.csv").open("w", newline="", encoding="utf-8") as fh:
                cw = csv.writer(fh)
                cw.writerow(("class", "accuracy"))
                for k, v in acc.items():
                    cw.writerow((k, f"{v:.3f}"))
            if args.plot:
                from .plotting import plot_confusion
                plot_confusion(conf, out / "confusion.png")
        else:
            w = csv.writer(sys.stdout)
            w.writerow(["gold\\pred", *conf.classes])
            for c, row in zip(conf.classes, conf.matrix().tolist()):
                w.writerow([c, *row])
    else:
        table = analysis.error_table(gold, pred, scheme, args.denominator)
        res = analysis.chi2_residuals(table)
        if out:
            res.write_csv(out / "residuals.csv")
            if args.plot:
                from .plotting import plot_residuals
                plot_residuals(res, out / "residuals.png")
        w = csv.writer(sys.stdout)
        w.writerow(("genre", "class", "residual"))
        for genre, (cls, r) in res.max_abs().items():
            w.writerow((genre, cls, f"{r:.2f}"))
    return 0


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rstbench", description="RST treebank tools, parser and experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    scheme_choices = ["auto", *SCHEMES]

    s = sub.add_parser("convert", help="normalize rs3 files or write bracketed binary trees")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--to", choices=["rs3", "brackets"], default="rs3")
    s.add_argument("--relabel", choices=[x for x in SCHEMES if x != "fine"])
    s.add_argument("--lenient", action="store_true")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("depconvert", help="convert rs3 trees to rsd dependencies")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--lenient", action="store_true")
    s.set_defaults(func=cmd_depconvert)

    s = sub.add_parser("score", help="original Parseval S/N/R")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--mode", choices=["micro", "macro"], default="micro")
    s.add_argument("--scheme", choices=scheme_choices, default="auto")
    s.add_argument("--include-root", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("seg-score", help="EDU boundary P/R/F1")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.set_defaults(func=cmd_seg_score)

    s = sub.add_parser("stats", help="corpus statistics as CSV")
    s.add_argument("corpus")
    s.add_argument("--by-genre", action="store_true")
    s.add_argument("--partition", action="append")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("map", help="relation mapping lookups")
    s.add_argument("labels", nargs="*")
    s.add_argument("--scheme", choices=[x for x in SCHEMES if x != "fine"], default="gum2rstdt")
    s.add_argument("--table", action="store_true", help="print the shipped mapping table")
    s.add_argument("--mismatch", metavar="CORPUS", help="instance-weighted mismatch rate of a GUM corpus")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("train", help="train a parser model")
    s.add_argument("corpus")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--scheme", choices=list(SCHEMES), default="fine")
    s.add_argument("--partitions", action="append", default=None)
    s.add_argument("--genres", action="append", default=None)
    s.add_argument("--dev-policy", choices=list(experiments.DEV_POLICIES), default="partition")
    s.add_argument("--epochs", type=int, default=20)
    s.add_argument("--patience", type=int)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--no-organizational", action="store_true")
    s.set_defaults(func=cmd_train, partitions_default=["train"])

    s = sub.add_parser("parse", help="parse the EDUs of rs3 inputs")
    s.add_argument("input")
    s.add_argument("--model", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("experiment", help="build or run experiment configs")
    esub = s.add_subparsers(dest="action", required=True, metavar="ACTION")
    r = esub.add_parser("run")
    r.add_argument("config")
    r.add_argument("--corpus", action="append", default=[], metavar="NAME=PATH")
    r.add_argument("--out", required=True)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--baseline", help="report.csv of a baseline run for degradation")
    r.add_argument("--no-plot", action="store_true")
    r.set_defaults(func=cmd_experiment_run)
    b = esub.add_parser("build")
    b.add_argument("kind", choices=["ova", "all-large", "baseline", "cohorts"])
    b.add_argument("--corpus", action="append", default=[], metavar="NAME=PATH")
    b.add_argument("--genre", action="append")
    b.add_argument("--scheme", choices=list(SCHEMES), default="gum")
    b.add_argument("--runs", type=int, default=3)
    b.add_argument("--tolerance", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_experiment_build)

    s = sub.add_parser("analyze", help="error analysis over gold and predicted parses")
    s.add_argument("what", choices=["confusion", "residuals", "cdu", "branching"])
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--scheme", choices=scheme_choices, default="auto")
    s.add_argument("--filter", choices=list(analysis.FILTERS), default="correct-attachment")
    s.add_argument("--denominator", choices=list(analysis.DENOMINATORS), default="errors")
    s.add_argument("--out")
    s.add_argument("--plot", action="store_true", help="also render PNG figures into --out")
    s.set_defaults(func=cmd_analyze)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "partitions", "unset") is None and hasattr(args, "partitions_default"):
        args.partitions = args.partitions_default
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (RstError, OSError) as exc:
        print(f"rstbench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
