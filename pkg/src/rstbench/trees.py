"""Binary trees, (de)binarization and corpus statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator

from .errors import EmptyCorpus, InvalidTree
from .treebank import (
    MULTINUC,
    NUCLEUS,
    SPAN,
    ConstituentTree,
    Edu,
    Node,
    nucleus,
    satellite,
    span_node,
)

NS, SN, NN = "NS", "SN", "NN"
CATEGORIES = (NS, SN, NN)


@dataclass(frozen=True)
class BinaryNode:
    """Leaf when ``left``/``right`` are None. For NS/SN the label is the
    satellite's relation, for NN the shared multinuclear relation.

    ``artificial`` marks nodes introduced by binarization; it is bookkeeping
    for :func:`debinarize` and does not take part in equality.
    """

    start: int
    end: int
    category: str | None = None
    label: str | None = None
    left: BinaryNode | None = None
    right: BinaryNode | None = None
    artificial: bool | None = field(default=None, compare=False)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    def internal_nodes(self) -> Iterator[BinaryNode]:
        stack = [self]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self) -> Iterator[int]:
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node.start
            else:
                stack.append(node.right)
                stack.append(node.left)


def bleaf(index: int) -> BinaryNode:
    return BinaryNode(index, index)


def combine(left: BinaryNode, right: BinaryNode, category: str, label: str,
            artificial: bool | None = None) -> BinaryNode:
    if left.end + 1 != right.start:
        raise InvalidTree(f"cannot combine {left.span} and {right.span}")
    if category not in CATEGORIES:
        raise InvalidTree(f"unknown nuclearity {category!r}")
    return BinaryNode(left.start, right.end, category, label, left, right, artificial)


@dataclass(frozen=True)
class BinaryTree:
    doc_id: str
    edus: tuple[Edu, ...]
    root: BinaryNode
    genre: str = ""

    def __post_init__(self):
        if list(self.root.leaves()) != list(range(1, len(self.edus) + 1)):
            raise InvalidTree(f"{self.doc_id}: leaves do not match the EDU sequence")

    def __len__(self):
        return len(self.edus)


def binarize(tree: ConstituentTree, left_branching: bool = False) -> BinaryTree:
    """Binary form of ``tree``.

    Multinuclear nodes become NN chains (right-branching unless
    ``left_branching``); satellites bind to their nucleus closest-first, with
    a right satellite winning a distance tie.
    """

    def conv(node: Node) -> BinaryNode:
        if node.is_leaf:
            return bleaf(node.edu)
        kids = [conv(c) for c in node.children]
        if node.kind == MULTINUC:
            label = node.children[0].relation
            if left_branching:
                cur = kids[0]
                for k in kids[1:]:
                    cur = combine(cur, k, NN, label, True)
            else:
                cur = kids[-1]
                for k in reversed(kids[:-1]):
                    cur = combine(k, cur, NN, label, True)
            return replace(cur, artificial=False)
        p = next(i for i, c in enumerate(node.children) if c.role == NUCLEUS)
        order = sorted((i for i in range(len(kids)) if i != p), key=lambda i: (abs(i - p), i < p))
        cur = kids[p]
        for i in order:
            label = node.children[i].relation
            cur = combine(cur, kids[i], NS, label, True) if i > p else combine(kids[i], cur, SN, label, True)
        return replace(cur, artificial=False)

    return BinaryTree(tree.doc_id, tree.edus, conv(tree.root), tree.genre)


def _mergeable(child: BinaryNode) -> bool:
    return child.artificial is True


def debinarize(btree: BinaryTree, relations: frozenset = frozenset()) -> ConstituentTree:
    """Inverse of :func:`binarize`.

    Nodes flagged as binarization artifacts are folded back into their
    parent. For trees without flags (parser output), adjacent NN nodes with the
    same label merge into one multinuclear node and satellite attachments stay
    nested.
    """

    def nn_members(node: BinaryNode, label: str) -> list[BinaryNode]:
        out = []
        for child in (node.left, node.right):
            if (child.category == NN and child.label == label
                    and (child.artificial is True or child.artificial is None)):
                out.extend(nn_members(child, label))
            else:
                out.append(child)
        return out

    def sat_parts(node: BinaryNode) -> tuple[BinaryNode, list[tuple[BinaryNode, str]]]:
        """Core nucleus plus the satellites folded into this node."""
        nuc, sat = (node.left, node.right) if node.category == NS else (node.right, node.left)
        if nuc.category in (NS, SN) and _mergeable(nuc):
            core, sats = sat_parts(nuc)
        else:
            core, sats = nuc, []
        return core, sats + [(sat, node.label)]

    def conv(node: BinaryNode) -> Node:
        if node.is_leaf:
            return Node(edu=node.start)
        if node.category == NN:
            kids = [nucleus(conv(m), node.label) for m in nn_members(node, node.label)]
        else:
            core, sats = sat_parts(node)
            kids = [nucleus(conv(core))] + [satellite(conv(s), lab) for s, lab in sats]
            kids.sort(key=lambda n: n.start)
        return span_node(kids)

    root = conv(btree.root)
    return ConstituentTree(btree.doc_id, btree.edus, root, btree.genre, relations)


def relabel(tree, fn: Callable[[str], str]):
    """Apply ``fn`` to every relation label of a binary or constituent tree."""
    if isinstance(tree, BinaryTree):
        def conv(node):
            if node.is_leaf:
                return node
            return replace(node, label=fn(node.label), left=conv(node.left), right=conv(node.right))
        return replace(tree, root=conv(tree.root))

    def conv_n(node):
        if node.is_leaf:
            rel = node.relation
        else:
            node = replace(node, children=tuple(conv_n(c) for c in node.children))
            rel = node.relation
        if rel is not None and rel != SPAN:
            node = replace(node, relation=fn(rel))
        return node
    return ConstituentTree(tree.doc_id, tree.edus, conv_n(tree.root), tree.genre)


def nuclearity_counts(tree: ConstituentTree) -> Counter:
    counts = Counter()
    for node in tree.root.internal_nodes():
        if node.kind == MULTINUC:
            counts[NN] += len(node.children) - 1
            continue
        nuc = node.nuclei[0]
        for sat in node.satellites:
            counts[NS if sat.start > nuc.start else SN] += 1
    return counts


def nuclearity_distribution(trees: Iterable[ConstituentTree]) -> dict[str, float]:
    """Proportions of NS / SN / NN relation instances.

    Each satellite counts once in the direction of its attachment; a
    multinuclear node with k nuclei counts k-1 NN instances, matching the
    number of binary NN nodes it yields.
    """
    counts = Counter()
    for tree in trees:
        counts.update(nuclearity_counts(tree))
    total = sum(counts.values())
    if total == 0:
        raise EmptyCorpus("no relation instances to count")
    return {c: counts[c] / total for c in CATEGORIES}


@dataclass(frozen=True)
class CorpusStats:
    docs: int
    tokens: int
    edus: int
    relation_instances: int
    label_count: int

    def as_row(self) -> dict:
        return {"docs": self.docs, "tokens": self.tokens, "edus": self.edus,
                "relation_instances": self.relation_instances, "label_count": self.label_count}


def corpus_stats(trees: Iterable[ConstituentTree]) -> CorpusStats:
    docs = tokens = edus = instances = 0
    labels = set()
    for tree in trees:
        docs += 1
        edus += len(tree.edus)
        tokens += sum(len(e.tokens) for e in tree.edus)
        for _, child in tree.relation_instances():
            instances += 1
            labels.add(child.relation)
    return CorpusStats(docs, tokens, edus, instances, len(labels))


def to_brackets(node: BinaryNode) -> str:
    """Compact one-line rendering, e.g. ``(NS:elaboration 1 (NN:joint 2 3))``."""
    if node.is_leaf:
        return str(node.start)
    return f"({node.category}:{node.label} {to_brackets(node.left)} {to_brackets(node.right)})"


def head_edu(node: BinaryNode) -> int:
    """EDU reached by following nuclei down from ``node`` (leftmost for NN)."""
    while not node.is_leaf:
        node = node.right if node.category == SN else node.left
    return node.start


__all__ = [
    "NS", "SN", "NN", "CATEGORIES", "BinaryNode", "BinaryTree", "bleaf", "combine", "binarize",
    "debinarize", "relabel", "nuclearity_counts", "nuclearity_distribution", "CorpusStats",
    "corpus_stats", "to_brackets", "head_edu",
]
