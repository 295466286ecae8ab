"""Original-Parseval S/N/R scoring and EDU segmentation scoring."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import EmptyInput, LeafMismatch, TokenCountMismatch
from .relmap import collapse_fn
from .trees import BinaryTree


@dataclass(frozen=True)
class ScoreTriple:
    S: float
    N: float
    R: float

    def as_tuple(self) -> tuple[float, float, float]:
        return self.S, self.N, self.R


@dataclass(frozen=True)
class DocCounts:
    doc_id: str
    genre: str
    matched_S: int
    matched_N: int
    matched_R: int
    gold_units: int
    pred_units: int

    def score(self) -> ScoreTriple:
        return aggregate([self])


Unit = tuple[int, int, str, str]


def _label_fn(scheme) -> Callable[[str], str]:
    if callable(scheme):
        return scheme
    return collapse_fn(scheme)


def units(tree: BinaryTree, include_root: bool = False, scheme=None) -> list[Unit]:
    """(start, end, category, label) for every scored internal node."""
    fn = _label_fn(scheme)
    n = len(tree.edus)
    out = []
    for node in tree.root.internal_nodes():
        if not include_root and node.start == 1 and node.end == n:
            continue
        out.append((node.start, node.end, node.category, fn(node.label)))
    return out


def parseval(gold: BinaryTree, pred: BinaryTree, include_root: bool = False, scheme=None) -> DocCounts:
    """Per-document match counts.

    A unit matches at S on its span, at N on span and nuclearity, and at R on
    span, nuclearity and (collapsed) label. ``scheme`` is a relmap scheme name
    or a callable applied to both sides; ``None`` compares labels verbatim.
    """
    if len(gold.edus) != len(pred.edus):
        raise LeafMismatch(f"{gold.doc_id}: gold has {len(gold.edus)} EDUs, prediction {len(pred.edus)}")
    fn = _label_fn(scheme)
    g = units(gold, include_root, fn)
    p = units(pred, include_root, fn)
    spans = {u[:2] for u in g} & {u[:2] for u in p}
    nuc = {u[:3] for u in g} & {u[:3] for u in p}
    rel = set(g) & set(p)
    return DocCounts(gold.doc_id, gold.genre, len(spans), len(nuc), len(rel), len(g), len(p))


def f1(matched: int, gold: int, pred: int) -> float:
    if gold + pred == 0:
        return 100.0
    return 200.0 * matched / (gold + pred)


def _micro(counts: Sequence[DocCounts]) -> ScoreTriple:
    g = sum(c.gold_units for c in counts)
    p = sum(c.pred_units for c in counts)
    return ScoreTriple(
        f1(sum(c.matched_S for c in counts), g, p),
        f1(sum(c.matched_N for c in counts), g, p),
        f1(sum(c.matched_R for c in counts), g, p),
    )


def by_genre(counts: Iterable[DocCounts]) -> dict[str, ScoreTriple]:
    groups = defaultdict(list)
    for c in counts:
        groups[c.genre].append(c)
    return {genre: _micro(groups[genre]) for genre in sorted(groups)}


def aggregate(counts: Iterable[DocCounts], mode: str = "micro") -> ScoreTriple:
    """Pool document counts. ``macro`` averages per-genre micro scores unweighted."""
    counts = list(counts)
    if not counts:
        raise EmptyInput("nothing to aggregate")
    if mode == "micro":
        return _micro(counts)
    if mode in ("macro", "macro-by-genre"):
        per = list(by_genre(counts).values())
        return ScoreTriple(*(sum(s.as_tuple()[i] for s in per) / len(per) for i in range(3)))
    raise ValueError(f"unknown aggregation mode {mode!r}")


# --------------------------------------------------------------------------
# segmentation

@dataclass(frozen=True)
class Boundaries:
    n_tokens: int
    starts: frozenset[int]


@dataclass(frozen=True)
class SegScore:
    P: float
    R: float
    F1: float


def edu_boundaries(texts: Iterable[str]) -> Boundaries:
    """Token indices (0-based, whitespace tokens) that open an EDU, minus the first token."""
    starts, pos = set(), 0
    for text in texts:
        if pos > 0:
            starts.add(pos)
        pos += len(text.split())
    return Boundaries(pos, frozenset(starts))


def _prf(tp: int, n_gold: int, n_pred: int) -> SegScore:
    p = 100.0 * tp / n_pred if n_pred else 100.0
    r = 100.0 * tp / n_gold if n_gold else 100.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return SegScore(p, r, f)


def seg_f1(gold: Boundaries, pred: Boundaries) -> SegScore:
    if gold.n_tokens != pred.n_tokens:
        raise TokenCountMismatch(f"gold has {gold.n_tokens} tokens, prediction {pred.n_tokens}")
    return _prf(len(gold.starts & pred.starts), len(gold.starts), len(pred.starts))


def seg_f1_corpus(pairs: Iterable[tuple[Boundaries, Boundaries]]) -> SegScore:
    """Micro-averaged boundary scores over document pairs."""
    tp = ng = np_ = 0
    for gold, pred in pairs:
        if gold.n_tokens != pred.n_tokens:
            raise TokenCountMismatch(f"gold has {gold.n_tokens} tokens, prediction {pred.n_tokens}")
        tp += len(gold.starts & pred.starts)
        ng += len(gold.starts)
        np_ += len(pred.starts)
    return _prf(tp, ng, np_)
