"""One test group per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

import random
import statistics
import time

import numpy as np
import pytest

from conftest import FIXTURES, random_trees
from oracles import brute_parseval
from rstbench.analysis import cdu_accuracy, chi2_residuals, confusion
from rstbench.depconv import to_dependencies
from rstbench.experiments import (
    ScoreReport,
    build_all_large,
    build_baseline,
    build_fixed_cohorts,
    build_ova,
    check_leakage,
    run,
    select_cohort,
    train_size,
)
from rstbench.metrics import aggregate, parseval
from rstbench.parser import TrainConfig, oracle, parse_tree, replay, train
from rstbench.parser.model import dumps_model
from rstbench.reference import (
    ALL_LARGE_TRAIN_SIZE,
    CORPUS_TOTALS,
    FIXED_COHORTS,
    GUM_GENRES,
    MAPPING_MISMATCH_RATE,
    NS_SHARE,
    OVA_TRAIN_SIZES,
    cohort_spec,
)
from rstbench.relmap import corpus_relation_labels, mapping_checksum, mapping_mismatch_rate
from rstbench.synthetic import random_corpus, random_tree
from rstbench.treebank import ConstituentTree, parse_rs3, parse_rsd, read_rs3, write_rs3, write_rsd
from rstbench.trees import NN, NS, SN, BinaryTree, binarize, combine, debinarize, nuclearity_distribution

acceptance = pytest.mark.acceptance

NS_TOLERANCE = 0.2
MISMATCH_TOLERANCE = 0.5
TABLE_SHA256 = "0fb3f5b8002c6a4c511fabdcefabadc974173406986ee16c3a85f160d47bfedd"


def perturb(node, rng):
    """Randomly flip nuclearity or labels and rotate some subtrees."""
    if node.is_leaf:
        return node
    left, right = perturb(node.left, rng), perturb(node.right, rng)
    cat = rng.choice((NS, SN, NN)) if rng.random() < 0.3 else node.category
    label = "other" if rng.random() < 0.3 else node.label
    if not right.is_leaf and rng.random() < 0.2:
        return combine(combine(left, right.left, cat, label), right.right, right.category, right.label)
    return combine(left, right, cat, label)


# ---------------------------------------------------------------- criterion 1

@acceptance(1)
def test_metric_identity_and_ordering():
    start = time.perf_counter()
    rng = random.Random(1)
    trees = random_trees(200, 30, seed=101)
    for t in trees:
        b = binarize(t)
        assert parseval(b, b).score().as_tuple() == (100.0, 100.0, 100.0)
        pred = BinaryTree(b.doc_id, b.edus, perturb(b.root, rng))
        s = parseval(b, pred).score()
        assert s.R <= s.N <= s.S
    assert time.perf_counter() - start < 5.0


# ---------------------------------------------------------------- criterion 2

@acceptance(2)
def test_scorer_equals_brute_force():
    golds = random_trees(100, 12, seed=202)
    rng = random.Random(3)
    for g in golds:
        other = random_tree(rng, len(g.edus), g.doc_id)
        pred = ConstituentTree(g.doc_id, g.edus, other.root, g.genre, other.relations)
        gb, pb = binarize(g), binarize(pred)
        for include_root in (False, True):
            c = parseval(gb, pb, include_root)
            assert (c.matched_S, c.matched_N, c.matched_R, c.gold_units, c.pred_units) == \
                brute_parseval(gb, pb, include_root=include_root)


# ---------------------------------------------------------------- criterion 3

def _round_trip_failures(trees):
    failures = []
    for t in trees:
        b = binarize(t)
        if replay(b.edus, oracle(b)).root != b.root or debinarize(b) != t:
            failures.append(t.doc_id)
    return failures


@acceptance(3)
def test_oracle_round_trip_synthetic_and_fixtures(fixture_trees):
    assert _round_trip_failures(random_trees(300, 40, seed=303, organizational=True)) == []
    assert _round_trip_failures(fixture_trees.values()) == []


@acceptance(3)
@pytest.mark.parametrize("name", ["gum", "rstdt"])
def test_oracle_round_trip_corpus(name, request):
    corpus = request.getfixturevalue(name)
    assert _round_trip_failures(corpus.trees()) == []


# ---------------------------------------------------------------- criterion 4

@acceptance(4)
def test_dependency_properties(fixture_trees):
    from oracles import oracle_arcs

    for t in random_trees(200, 30, seed=404):
        doc = to_dependencies(t)
        heads = doc.heads()
        n = len(t.edus)
        assert len(doc.arcs) == n
        assert sum(h == 0 for h in heads.values()) == 1
        for d in heads:
            x, steps = d, 0
            while x:
                x, steps = heads[x], steps + 1
                assert steps <= n
        assert {(a.dependent, a.head, a.label) for a in doc.arcs} == oracle_arcs(t)
    ns = to_dependencies(fixture_trees["ns_elaboration"])
    assert {(a.dependent, a.head) for a in ns.arcs} == {(1, 0), (2, 1)}


# ---------------------------------------------------------------- criterion 5

def _format_failures(trees):
    failures = []
    for t in trees:
        if parse_rs3(write_rs3(t), t.doc_id, t.genre) != t:
            failures.append(f"{t.doc_id}.rs3")
        doc = to_dependencies(t)
        if parse_rsd(write_rsd(doc), doc.doc_id, doc.genre) != doc:
            failures.append(f"{t.doc_id}.rsd")
    return failures


@acceptance(5)
def test_format_round_trips_fixtures():
    trees = [read_rs3(p) for p in sorted(FIXTURES.glob("*.rs3"))]
    assert len(trees) >= 5
    assert _format_failures(trees) == []
    assert _format_failures(random_trees(100, 25, seed=505)) == []


@acceptance(5)
@pytest.mark.parametrize("name", ["gum", "rstdt"])
def test_format_round_trips_corpus(name, request):
    corpus = request.getfixturevalue(name)
    from rstbench.treebank import apply_bounds
    assert _format_failures([apply_bounds(t, None, None) for t in corpus.trees()]) == []


# ---------------------------------------------------------------- criterion 6

@acceptance(6)
def test_mapping_table_checksum():
    from rstbench.relmap import load_table

    assert len(load_table().rows) == 32
    assert mapping_checksum() == TABLE_SHA256


@acceptance(6)
def test_mapping_mismatch_rate_gum(gum):
    rate = 100 * mapping_mismatch_rate(corpus_relation_labels(gum.trees()))
    assert abs(rate - MAPPING_MISMATCH_RATE) <= MISMATCH_TOLERANCE, rate


# ---------------------------------------------------------------- criterion 7

@acceptance(7)
def test_gum_totals_and_genres(gum):
    totals = CORPUS_TOTALS["gum"]
    assert gum.count() == (totals["docs"], totals["edus"])
    for genre, (docs, _tokens, edus) in GUM_GENRES.items():
        assert gum.count(genres=[genre]) == (docs, edus), genre


@acceptance(7)
@pytest.mark.parametrize("name", ["gum", "rstdt"])
def test_ns_share(name, request):
    corpus = request.getfixturevalue(name)
    share = 100 * nuclearity_distribution(corpus.trees())[NS]
    assert abs(share - NS_SHARE[name]) <= NS_TOLERANCE, share


@acceptance(7)
def test_ova_cohort_sizes(gum):
    sizes = {g: train_size(build_ova(gum, g), {"gum": gum}) for g in OVA_TRAIN_SIZES}
    assert sizes == OVA_TRAIN_SIZES
    assert train_size(build_all_large(gum), {"gum": gum}) == ALL_LARGE_TRAIN_SIZE


@acceptance(7)
def test_fixed_cohort_totals(gum):
    totals = {}
    for name in FIXED_COHORTS:
        ids = select_cohort(gum, cohort_spec(name))
        totals[name] = (len(ids), sum(len(gum[d].tree.edus) for d in ids))
    assert totals == {name: total for name, (_, total) in FIXED_COHORTS.items()}


# ---------------------------------------------------------------- criterion 8

def _learner_check(trees):
    cfg = TrainConfig(epochs=20)
    start = time.perf_counter()
    model = train(trees, cfg, seed=1)
    elapsed = time.perf_counter() - start
    score = aggregate([parseval(binarize(t), parse_tree(model, t)) for t in trees]).S
    again = train(trees, cfg, seed=1)
    return score, elapsed, dumps_model(model) == dumps_model(again)


@acceptance(8)
def test_learner_sanity_synthetic():
    trees = random_corpus(seed=8, genres={"a": (20, 0, 0)}, edus=(3, 15)).trees()
    score, elapsed, same = _learner_check(trees)
    assert score >= 95.0 and elapsed < 120 and same


@acceptance(8)
def test_learner_sanity_gum(gum):
    trees = sorted(gum.trees(["train"]), key=lambda t: t.doc_id)[:20]
    score, elapsed, same = _learner_check(trees)
    assert score >= 95.0, score
    assert elapsed < 120 and same


# ---------------------------------------------------------------- criterion 9

TOY_GENRES = {"academic": (3, 1, 1), "news": (3, 1, 1), "whow": (3, 1, 1), "vlog": (2, 1, 1)}


@acceptance(9)
def test_generated_configs_have_no_leakage():
    corpus = random_corpus(seed=9, genres=TOY_GENRES, edus=(3, 8), name="gum")
    corpora = {"gum": corpus}
    configs = [build_ova(corpus, g) for g in corpus.genres]
    configs += [build_all_large(corpus), build_baseline(corpus)]
    configs += build_fixed_cohorts(corpus, {"A": [("news", 2)], "B": [("academic", 2)]}, tolerance=10**6)
    for cfg in configs:
        check_leakage(cfg, corpora)


@acceptance(9)
def test_generated_gum_configs_have_no_leakage(gum):
    configs = [build_ova(gum, g) for g in gum.genres] + [build_all_large(gum), build_baseline(gum)]
    for cfg in configs:
        check_leakage(cfg, {"gum": gum})


@acceptance(9)
def test_degradation_means_recompute(tmp_path):
    corpus = random_corpus(seed=19, genres=TOY_GENRES, edus=(3, 8), name="gum")
    corpora = {"gum": corpus}
    base = run(build_baseline(corpus, runs=3, epochs=3), corpora, tmp_path)
    run(build_ova(corpus, "news", runs=3, epochs=3), corpora, tmp_path, baseline=base)
    import csv

    ova_rows = ScoreReport.read_csv(tmp_path / "runs" / "ova-news" / "report.csv").rows
    base_rows = ScoreReport.read_csv(tmp_path / "runs" / "baseline" / "report.csv").rows
    with (tmp_path / "runs" / "ova-news" / "degradation.csv").open() as fh:
        (deg,) = list(csv.DictReader(fh))
    assert deg["target"] == "news"
    for k in "SNR":
        ova_mean = statistics.fmean(getattr(r, k) for r in ova_rows if r.target == "news")
        base_mean = statistics.fmean(getattr(r, k) for r in base_rows if r.target == "news")
        assert len([r for r in ova_rows if r.target == "news"]) == 3
        assert float(deg[k]) == ova_mean
        assert float(deg[f"baseline_{k}"]) == base_mean
        assert float(deg[f"delta_{k}"]) == base_mean - ova_mean


# ---------------------------------------------------------------- criterion 10

@acceptance(10)
def test_analysis_correctness():
    res = chi2_residuals(np.array([[10, 0], [0, 10]]))
    assert np.all(np.abs(np.abs(res.residuals) - np.sqrt(5)) <= 1e-9)
    docs = [to_dependencies(t) for t in random_trees(50, 20, seed=1010)]
    m = confusion(docs, docs, filter="all").matrix()
    assert np.array_equal(m, np.diag(np.diag(m)))
    assert cdu_accuracy(docs, docs) == 1.0
