"""Constituent to dependency conversion.

Heads propagate up through nuclei; a multinuclear node is headed by its
leftmost nucleus. Satellite heads attach to the head of their nucleus with the
satellite's relation, and every further nucleus of a multinuclear node attaches
to the leftmost one with the shared relation.
"""

from __future__ import annotations

from .errors import NoRoot
from .relmap import ROOT
from .treebank import MULTINUC, Arc, ConstituentTree, Document, Node
from .trees import BinaryTree, debinarize


def _convert(root: Node) -> tuple[list[Arc], int]:
    arcs: list[Arc] = []

    def head(node: Node) -> int:
        if node.is_leaf:
            return node.edu
        child_heads = [head(c) for c in node.children]
        if node.kind == MULTINUC:
            first = child_heads[0]
            for child, h in zip(node.children[1:], child_heads[1:]):
                arcs.append(Arc(h, first, child.relation))
            return first
        nuc_i = next(i for i, c in enumerate(node.children) if c.relation == "span")
        nuc_head = child_heads[nuc_i]
        for i, (child, h) in enumerate(zip(node.children, child_heads)):
            if i != nuc_i:
                arcs.append(Arc(h, nuc_head, child.relation))
        return nuc_head

    top = head(root)
    arcs.append(Arc(top, 0, ROOT))
    arcs.sort(key=lambda a: a.dependent)
    return arcs, top


def to_dependencies(tree: BinaryTree | ConstituentTree) -> Document:
    """Dependency form of a binary or n-ary tree.

    Binary input is debinarized first, so NN chains attach every nucleus to
    the chain's first head.
    """
    if isinstance(tree, BinaryTree):
        tree = debinarize(tree)
    arcs, _ = _convert(tree.root)
    return Document(tree.doc_id, tree.edus, tuple(arcs), tree.genre)


def cdu(doc: Document) -> int:
    """The central discourse unit: the EDU attached to the artificial root."""
    for arc in doc.arcs:
        if arc.head == 0:
            return arc.dependent
    raise NoRoot(f"{doc.doc_id}: no root arc")
