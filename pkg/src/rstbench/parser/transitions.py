"""Shift-reduce transition system over EDUs, with a static gold oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import IllegalTransition, NonTerminalEnd
from ..treebank import Edu
from ..trees import CATEGORIES, SN, BinaryNode, BinaryTree, bleaf, combine

SHIFT_ID = "SHIFT"


@dataclass(frozen=True, order=True)
class Transition:
    """``Shift`` when ``category`` is None, otherwise ``Reduce(category, label)``."""

    category: str | None = None
    label: str | None = None

    @property
    def is_shift(self) -> bool:
        return self.category is None

    @property
    def id(self) -> str:
        return SHIFT_ID if self.is_shift else f"REDUCE-{self.category}-{self.label}"

    @classmethod
    def from_id(cls, action_id: str) -> Transition:
        if action_id == SHIFT_ID:
            return SHIFT
        _, category, label = action_id.split("-", 2)
        return cls(category, label)

    def __str__(self):
        return self.id


SHIFT = Transition()


def Reduce(category: str, label: str) -> Transition:
    if category not in CATEGORIES:
        raise ValueError(f"unknown nuclearity {category!r}")
    return Transition(category, label)


@dataclass
class ParserState:
    edus: Sequence[Edu]
    stack: list[BinaryNode] = field(default_factory=list)
    heads: list[int] = field(default_factory=list)
    next_edu: int = 1
    history: list[Transition] = field(default_factory=list)

    @property
    def queue(self) -> range:
        return range(self.next_edu, len(self.edus) + 1)

    @property
    def terminal(self) -> bool:
        return len(self.stack) == 1 and self.next_edu > len(self.edus)

    def can_shift(self) -> bool:
        return self.next_edu <= len(self.edus)

    def can_reduce(self) -> bool:
        return len(self.stack) >= 2

    def legal(self, t: Transition) -> bool:
        return self.can_shift() if t.is_shift else self.can_reduce()

    def apply(self, t: Transition) -> None:
        if t.is_shift:
            if not self.can_shift():
                raise IllegalTransition(f"Shift with an empty queue after {len(self.history)} steps")
            self.stack.append(bleaf(self.next_edu))
            self.heads.append(self.next_edu)
            self.next_edu += 1
        else:
            if not self.can_reduce():
                raise IllegalTransition(f"{t} with stack depth {len(self.stack)}")
            right, left = self.stack.pop(), self.stack.pop()
            rh, lh = self.heads.pop(), self.heads.pop()
            self.stack.append(combine(left, right, t.category, t.label))
            self.heads.append(rh if t.category == SN else lh)
        self.history.append(t)


def oracle(gold: BinaryTree) -> list[Transition]:
    """Static oracle: Reduce the top two stack items when they are gold siblings, else Shift."""
    parents = {}
    for node in gold.root.internal_nodes():
        parents[(node.left.span, node.right.span)] = node
    state = ParserState(gold.edus)
    seq = []
    while not state.terminal:
        t = SHIFT
        if state.can_reduce():
            node = parents.get((state.stack[-2].span, state.stack[-1].span))
            if node is not None:
                t = Transition(node.category, node.label)
        state.apply(t)
        seq.append(t)
    return seq


def replay(edus: Sequence[Edu], seq: Sequence[Transition], doc_id: str = "", genre: str = "") -> BinaryTree:
    state = ParserState(edus)
    for t in seq:
        state.apply(t)
    if not state.terminal:
        raise NonTerminalEnd(f"stack depth {len(state.stack)}, {len(state.queue)} EDUs unread")
    return BinaryTree(doc_id, tuple(edus), state.stack[0], genre)


__all__ = ["Transition", "SHIFT", "Reduce", "ParserState", "oracle", "replay"]
