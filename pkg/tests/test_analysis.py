import math

import numpy as np
import pytest

from conftest import random_trees
from rstbench.analysis import (
    align,
    branching_report,
    cdu_accuracy,
    chi2_residuals,
    confusion,
    error_table,
    per_class_accuracy,
    residual_margin_check,
)
from rstbench.depconv import to_dependencies
from rstbench.errors import DocMismatch, ZeroMargin
from rstbench.treebank import Arc, Document, Edu
from rstbench.trees import binarize


def doc(doc_id, arcs, genre="g"):
    edus = tuple(Edu(i, f"w{i}") for i in range(1, len(arcs) + 1))
    return Document(doc_id, edus, tuple(Arc(d, h, lab) for d, h, lab in arcs), genre)


GOLD = doc("a", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 1, "causal-cause"),
                 (4, 3, "elaboration-additional")])


def test_confusion_identity_is_diagonal():
    docs = [to_dependencies(t) for t in random_trees(30, 12, seed=8)]
    conf = confusion(docs, docs, scheme="gum")
    m = conf.matrix()
    assert m.sum() == sum(len(d.edus) for d in docs)
    assert np.count_nonzero(m - np.diag(np.diag(m))) == 0
    assert set(per_class_accuracy(docs, docs, "gum").values()) == {1.0}


def test_one_label_swap_moves_one_count():
    pred = doc("a", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 1, "context-circumstance"),
                     (4, 3, "elaboration-additional")])
    conf = confusion([GOLD], [pred], scheme="gum")
    assert conf.off_diagonal() == 1
    assert conf.counts[("Causal", "Context")] == 1


def test_filter_drops_wrong_heads():
    pred = doc("a", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 2, "context-circumstance"),
                     (4, 3, "elaboration-additional")])
    assert ("Causal", "Context") not in confusion([GOLD], [pred], "gum").counts
    assert confusion([GOLD], [pred], "gum", filter="all").counts[("Causal", "Context")] == 1


def test_class_accuracy_half_heads_wrong():
    gold = doc("s", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 1, "elaboration-additional"),
                     (4, 1, "elaboration-additional"), (5, 1, "elaboration-additional")])
    pred = doc("s", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 2, "elaboration-additional"),
                     (4, 1, "elaboration-additional"), (5, 4, "elaboration-additional")])
    assert per_class_accuracy([gold], [pred], "gum")["Elaboration"] == 0.5


def test_error_table_denominators():
    pred = doc("a", [(1, 0, "root"), (2, 1, "elaboration-additional"), (3, 1, "context-circumstance"),
                     (4, 3, "elaboration-additional")])
    assert error_table([GOLD], [pred], "gum") == {"g": {"Causal": 1}}
    assert error_table([GOLD], [pred], "gum", "all") == {"g": {"Causal": 1, "Elaboration": 2, "root": 1}}


def test_chi2_closed_form():
    res = chi2_residuals(np.array([[10, 0], [0, 10]]))
    assert np.allclose(res.expected, 5.0)
    assert np.allclose(np.abs(res.residuals), math.sqrt(5), atol=1e-9)
    assert res.residuals[0, 0] > 0 > res.residuals[0, 1]


def test_chi2_uniform_and_margins():
    res = chi2_residuals({"x": {"A": 3, "B": 3}, "y": {"A": 3, "B": 3}})
    assert np.allclose(res.residuals, 0.0)
    rng = np.random.default_rng(0)
    res = chi2_residuals(rng.integers(1, 50, size=(6, 9)))
    assert residual_margin_check(res) < 1e-6


def test_chi2_zero_margin():
    with pytest.raises(ZeroMargin):
        chi2_residuals(np.array([[1, 0], [2, 0]]))


def test_max_abs():
    res = chi2_residuals({"r1": {"A": 10, "B": 1}, "r2": {"A": 1, "B": 10}})
    cls, value = res.max_abs()["r1"]
    assert abs(value) == pytest.approx(np.max(np.abs(res.residuals[0])))


def test_cdu_accuracy():
    other = doc("b", [(1, 2, "elaboration-additional"), (2, 0, "root")])
    wrong = doc("b", [(1, 0, "root"), (2, 1, "elaboration-additional")])
    assert cdu_accuracy([GOLD, other], [GOLD, other]) == 1.0
    assert cdu_accuracy([GOLD, other], [GOLD, wrong]) == 0.5


def test_align_mismatch():
    with pytest.raises(DocMismatch):
        align([GOLD], [doc("b", [(1, 0, "root")])])
    with pytest.raises(DocMismatch):
        align([GOLD], [doc("a", [(1, 0, "root")])])


def test_branching_report(fixture_trees):
    t = binarize(fixture_trees["nested"])
    rep = branching_report([t], [t])
    assert set(rep) <= {"NS", "SN", "NN"} and set(rep.values()) == {100.0}
