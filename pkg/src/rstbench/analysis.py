"""Error analysis over dependency conversions and binary trees."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .depconv import cdu, to_dependencies
from .errors import DocMismatch, ZeroMargin
from .metrics import f1
from .relmap import collapse_fn
from .treebank import ConstituentTree, Document
from .trees import CATEGORIES, BinaryTree, binarize

FILTERS = ("correct-attachment", "all")
DENOMINATORS = ("errors", "all")


def _as_doc(x) -> Document:
    if isinstance(x, Document):
        return x
    return to_dependencies(x)


def align(gold_docs: Iterable, pred_docs: Iterable) -> list[tuple[Document, Document]]:
    """Pair documents by id; both sides must hold the same ids and EDU counts."""
    gold = {d.doc_id: _as_doc(d) for d in gold_docs}
    pred = {d.doc_id: _as_doc(d) for d in pred_docs}
    if gold.keys() != pred.keys():
        diff = sorted(gold.keys() ^ pred.keys())
        raise DocMismatch(f"documents present on one side only: {diff[:5]}")
    pairs = []
    for doc_id in sorted(gold):
        g, p = gold[doc_id], pred[doc_id]
        if len(g.edus) != len(p.edus):
            raise DocMismatch(f"{doc_id}: {len(g.edus)} gold EDUs vs {len(p.edus)} predicted")
        pairs.append((g, p))
    return pairs


def _instances(pairs, scheme):
    """(genre, gold class, pred class, head correct) for every EDU."""
    fn = collapse_fn(scheme)
    for g, p in pairs:
        gh, gl, ph, pl = g.heads(), g.labels(), p.heads(), p.labels()
        for i in range(1, len(g.edus) + 1):
            yield g.genre, fn(gl[i]), fn(pl[i]), gh[i] == ph[i]


@dataclass(frozen=True)
class Confusion:
    classes: tuple[str, ...]
    counts: Mapping[tuple[str, str], int]

    def matrix(self) -> np.ndarray:
        idx = {c: i for i, c in enumerate(self.classes)}
        m = np.zeros((len(self.classes), len(self.classes)), dtype=int)
        for (g, p), n in self.counts.items():
            m[idx[g], idx[p]] += n
        return m

    def row_sums(self) -> dict[str, int]:
        return dict(zip(self.classes, self.matrix().sum(axis=1).tolist()))

    def off_diagonal(self) -> int:
        return sum(n for (g, p), n in self.counts.items() if g != p)

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        m = self.matrix()
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["gold\\pred", *self.classes])
            for c, row in zip(self.classes, m.tolist()):
                w.writerow([c, *row])
        return path


def confusion(gold_docs: Iterable, pred_docs: Iterable, scheme: str | None = None,
              filter: str = "correct-attachment") -> Confusion:
    """Gold class by predicted class counts over EDU attachments.

    With the ``correct-attachment`` filter only EDUs whose predicted head is
    the gold head are counted.
    """
    if filter not in FILTERS:
        raise ValueError(f"filter must be one of {FILTERS}")
    counts: Counter = Counter()
    seen = set()
    for _, gc, pc, head_ok in _instances(align(gold_docs, pred_docs), scheme):
        seen.update((gc, pc))
        if filter == "all" or head_ok:
            counts[(gc, pc)] += 1
    return Confusion(tuple(sorted(seen)), dict(counts))


def per_class_accuracy(gold_docs: Iterable, pred_docs: Iterable, scheme: str | None = None) -> dict[str, float]:
    """Share of each gold class whose head and class are both predicted correctly."""
    total: Counter = Counter()
    correct: Counter = Counter()
    for _, gc, pc, head_ok in _instances(align(gold_docs, pred_docs), scheme):
        total[gc] += 1
        correct[gc] += head_ok and gc == pc
    return {c: correct[c] / total[c] for c in sorted(total)}


def error_table(gold_docs: Iterable, pred_docs: Iterable, scheme: str | None = None,
                denominator: str = "errors") -> dict[str, dict[str, int]]:
    """Genre by gold class counts.

    ``errors`` counts instances with a wrong head or wrong class; ``all``
    counts every instance.
    """
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}")
    table: dict[str, Counter] = defaultdict(Counter)
    for genre, gc, pc, head_ok in _instances(align(gold_docs, pred_docs), scheme):
        if denominator == "all" or not (head_ok and gc == pc):
            table[genre][gc] += 1
    return {g: dict(sorted(c.items())) for g, c in sorted(table.items())}


@dataclass(frozen=True)
class Residuals:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    observed: np.ndarray
    expected: np.ndarray
    residuals: np.ndarray

    def max_abs(self) -> dict[str, tuple[str, float]]:
        """Per row: the column with the largest |residual| and its signed value."""
        out = {}
        for i, row in enumerate(self.rows):
            j = int(np.argmax(np.abs(self.residuals[i])))
            out[row] = (self.cols[j], float(self.residuals[i, j]))
        return out

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["row", *self.cols, "max_class", "max_residual"])
            maxes = self.max_abs()
            for i, row in enumerate(self.rows):
                w.writerow([row, *self.residuals[i].tolist(), *maxes[row]])
        return path


def chi2_residuals(table: Mapping[str, Mapping[str, float]] | np.ndarray,
                   rows: Sequence[str] | None = None, cols: Sequence[str] | None = None) -> Residuals:
    """Pearson residuals (O - E) / sqrt(E) of a contingency table."""
    if isinstance(table, Mapping):
        rows = list(rows or table)
        cols = list(cols or sorted({c for r in table.values() for c in r}))
        obs = np.array([[float(table[r].get(c, 0)) for c in cols] for r in rows])
    else:
        obs = np.asarray(table, dtype=float)
        rows = list(rows or (str(i) for i in range(obs.shape[0])))
        cols = list(cols or (str(j) for j in range(obs.shape[1])))
    if obs.ndim != 2 or obs.size == 0:
        raise ZeroMargin("empty table")
    if (obs < 0).any():
        raise ValueError("counts must be nonnegative")
    row_tot, col_tot = obs.sum(axis=1), obs.sum(axis=0)
    if (row_tot == 0).any() or (col_tot == 0).any():
        raise ZeroMargin("every row and column needs a nonzero total")
    expected = np.outer(row_tot, col_tot) / obs.sum()
    res = (obs - expected) / np.sqrt(expected)
    return Residuals(tuple(rows), tuple(cols), obs, expected, res)


def cdu_accuracy(gold_docs: Iterable, pred_docs: Iterable) -> float:
    """Share of documents whose predicted root EDU is the gold one."""
    pairs = align(gold_docs, pred_docs)
    if not pairs:
        return 0.0
    return sum(cdu(g) == cdu(p) for g, p in pairs) / len(pairs)


def _binary(t) -> BinaryTree:
    return binarize(t) if isinstance(t, ConstituentTree) else t


def branching_report(gold_trees: Iterable, pred_trees: Iterable, include_root: bool = False) -> dict[str, float]:
    """F1 per nuclearity category over internal nodes, counting span and category matches.

    Categories absent from gold are left out.
    """
    gold = {t.doc_id: _binary(t) for t in gold_trees}
    pred = {t.doc_id: _binary(t) for t in pred_trees}
    if gold.keys() != pred.keys():
        raise DocMismatch("gold and predicted tree sets differ")
    g_n: Counter = Counter()
    p_n: Counter = Counter()
    m_n: Counter = Counter()
    for doc_id, gt in gold.items():
        n = len(gt.edus)

        def units(tree):
            return {(x.start, x.end, x.category) for x in tree.root.internal_nodes()
                    if include_root or not (x.start == 1 and x.end == n)}

        gu, pu = units(gt), units(pred[doc_id])
        for u in gu:
            g_n[u[2]] += 1
        for u in pu:
            p_n[u[2]] += 1
        for u in gu & pu:
            m_n[u[2]] += 1
    return {c: f1(m_n[c], g_n[c], p_n[c]) for c in CATEGORIES if g_n[c]}


def residual_margin_check(res: Residuals) -> float:
    """Largest |sum_j residual * sqrt(E)| over rows (zero up to rounding)."""
    return float(np.max(np.abs((res.residuals * np.sqrt(res.expected)).sum(axis=1))))


__all__ = [
    "align", "Confusion", "confusion", "per_class_accuracy", "error_table", "Residuals",
    "chi2_residuals", "cdu_accuracy", "branching_report", "residual_margin_check",
]
