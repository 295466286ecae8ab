import pytest

from oracles import brute_parseval
from rstbench.errors import EmptyInput, LeafMismatch, TokenCountMismatch
from rstbench.metrics import Boundaries, DocCounts, aggregate, edu_boundaries, parseval, seg_f1, units
from rstbench.treebank import Edu
from rstbench.trees import NN, NS, SN, BinaryTree, bleaf, combine

E = lambda n: tuple(Edu(i, f"w{i}") for i in range(1, n + 1))  # noqa: E731


def bt(root, n, genre=""):
    return BinaryTree("d", E(n), root, genre)


def test_identity(fixture_trees):
    from rstbench.trees import binarize
    t = binarize(fixture_trees["nested"])
    assert parseval(t, t).score().as_tuple() == (100.0, 100.0, 100.0)


def test_three_edu_disjoint_spans():
    gold = bt(combine(combine(bleaf(1), bleaf(2), NS, "elab"), bleaf(3), NS, "eval"), 3)
    pred = bt(combine(bleaf(1), combine(bleaf(2), bleaf(3), NS, "elab"), NS, "eval"), 3)
    c = parseval(gold, pred)
    assert (c.gold_units, c.pred_units) == (1, 1)
    assert c.score().S == 0.0


def test_four_edu_category_only_difference():
    gold = bt(combine(combine(bleaf(1), bleaf(2), NS, "a"), combine(bleaf(3), bleaf(4), NS, "b"), NN, "j"), 4)
    pred = bt(combine(combine(combine(bleaf(1), bleaf(2), SN, "a"), bleaf(3), NS, "c"), bleaf(4), NS, "b"), 4)
    s = parseval(gold, pred).score()
    assert (s.S, s.N, s.R) == (50.0, 0.0, 0.0)


def test_relation_requires_category():
    gold = bt(combine(combine(bleaf(1), bleaf(2), NS, "a"), bleaf(3), NS, "b"), 3)
    pred = bt(combine(combine(bleaf(1), bleaf(2), SN, "a"), bleaf(3), NS, "b"), 3)
    s = parseval(gold, pred).score()
    assert s.S == 100.0 and s.N == 0.0 and s.R == 0.0


def test_include_root():
    gold = bt(combine(bleaf(1), bleaf(2), NS, "a"), 2)
    pred = bt(combine(bleaf(1), bleaf(2), SN, "b"), 2)
    assert parseval(gold, pred).gold_units == 0
    c = parseval(gold, pred, include_root=True)
    assert (c.matched_S, c.matched_N, c.matched_R) == (1, 0, 0)


def test_scheme_collapses_labels():
    gold = bt(combine(combine(bleaf(1), bleaf(2), NS, "elaboration-additional"), bleaf(3), NS, "x"), 3)
    pred = bt(combine(combine(bleaf(1), bleaf(2), NS, "elaboration-attribute"), bleaf(3), NS, "x"), 3)
    assert parseval(gold, pred).score().R == 0.0
    assert parseval(gold, pred, scheme="gum").score().R == 100.0
    assert units(gold, scheme="gum") == [(1, 2, NS, "Elaboration")]


def test_leaf_mismatch():
    with pytest.raises(LeafMismatch):
        parseval(bt(combine(bleaf(1), bleaf(2), NS, "a"), 2), bt(bleaf(1), 1))


def test_matches_oracle_on_fixture_pair():
    gold = bt(combine(combine(bleaf(1), bleaf(2), NS, "a"), combine(bleaf(3), bleaf(4), NS, "b"), NN, "j"), 4)
    pred = bt(combine(bleaf(1), combine(bleaf(2), combine(bleaf(3), bleaf(4), NS, "b"), SN, "a"), NS, "c"), 4)
    c = parseval(gold, pred)
    assert (c.matched_S, c.matched_N, c.matched_R, c.gold_units, c.pred_units) == brute_parseval(gold, pred)


def _counts(genre, m, g):
    return DocCounts("d", genre, m, m, m, g, g)


def test_micro_single_document_equals_document_score():
    c = _counts("x", 3, 4)
    assert aggregate([c]) == c.score()


def test_macro_two_genres():
    counts = [_counts("a", 10, 10), _counts("b", 0, 2)]
    assert aggregate(counts, "macro").S == 50.0
    assert aggregate(counts, "micro").S == pytest.approx(100 * 20 / 24)


def test_aggregate_empty():
    with pytest.raises(EmptyInput):
        aggregate([])


def test_segmentation_identity_and_missing_boundary():
    texts = ["a b", "c", "d e f", "g"]
    gold = edu_boundaries(texts)
    assert gold == Boundaries(7, frozenset({2, 3, 6}))
    assert seg_f1(gold, gold).F1 == 100.0
    pred = edu_boundaries(["a b c", "d e f", "g"])
    s = seg_f1(gold, pred)
    assert s.P == 100.0 and s.R == pytest.approx(200 / 3)
    assert s.F1 == pytest.approx(2 * s.P * s.R / (s.P + s.R), abs=1e-6)


def test_segmentation_token_mismatch():
    with pytest.raises(TokenCountMismatch):
        seg_f1(edu_boundaries(["a b"]), edu_boundaries(["a"]))
