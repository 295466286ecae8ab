"""Random valid RST trees and corpora, for tests and demos.

EDU texts carry a cue word tied to the EDU's attachment so that a learner has
something to pick up; the remaining words are random filler.
"""

from __future__ import annotations

import random

from .treebank import (
    MULTINUC,
    RST,
    CorpusHandle,
    ConstituentTree,
    Edu,
    Node,
    corpus_from_trees,
    leaf,
    nucleus,
    satellite,
    span_node,
    used_relations,
)

SATELLITE_RELATIONS = (
    "elaboration-additional", "attribution-positive", "causal-cause", "context-background",
    "purpose-goal", "contingency-condition", "explanation-evidence", "evaluation-comment",
)
MULTINUC_RELATIONS = ("joint-list", "joint-sequence", "adversative-contrast")
CUES = {
    "elaboration-additional": "which", "attribution-positive": "said", "causal-cause": "because",
    "context-background": "when", "purpose-goal": "to", "contingency-condition": "if",
    "explanation-evidence": "indeed", "evaluation-comment": "nicely",
    "joint-list": "and", "joint-sequence": "then", "adversative-contrast": "but",
}
FILLER = tuple(f"w{i}" for i in range(200))


def random_node(rng: random.Random, start: int, end: int, multinuc_p: float = 0.25, max_children: int = 4) -> Node:
    """A random canonical subtree over EDUs start..end (role and relation unset)."""
    if start == end:
        return leaf(start)
    n = end - start + 1
    k = rng.randint(2, min(max_children, n))
    cuts = sorted(rng.sample(range(start + 1, end + 1), k - 1))
    bounds = list(zip([start, *cuts], [*[c - 1 for c in cuts], end]))
    parts = [random_node(rng, a, b, multinuc_p, max_children) for a, b in bounds]
    if rng.random() < multinuc_p:
        rel = rng.choice(MULTINUC_RELATIONS)
        return span_node([nucleus(p, rel) for p in parts])
    nuc = rng.randrange(k)
    kids = [nucleus(p) if i == nuc else satellite(p, rng.choice(SATELLITE_RELATIONS)) for i, p in enumerate(parts)]
    return span_node(kids)


def _cue_for(root: Node, n: int) -> dict[int, str]:
    """Cue word per EDU: the relation of the highest constituent it starts."""
    cues: dict[int, str] = {}

    def walk(node: Node):
        if node.relation and node.relation != "span" and node.start not in cues:
            cues[node.start] = CUES.get(node.relation, "")
        for child in node.children:
            walk(child)

    walk(root)
    return cues


def random_tree(rng: random.Random, n_edus: int, doc_id: str = "doc", genre: str = "",
                multinuc_p: float = 0.25, organizational: bool = False) -> ConstituentTree:
    root = random_node(rng, 1, n_edus, multinuc_p)
    cues = _cue_for(root, n_edus)
    edus = []
    sent = para = 0
    for i in range(1, n_edus + 1):
        words = [cues[i]] if cues.get(i) else []
        words += [rng.choice(FILLER) for _ in range(rng.randint(1, 6))]
        if organizational:
            if i == 1 or rng.random() < 0.4:
                sent += 1
                if i == 1 or rng.random() < 0.3:
                    para += 1
            edus.append(Edu(i, " ".join(words), sent, para))
        else:
            edus.append(Edu(i, " ".join(words)))
    relations = frozenset(
        (r, RST) for r in SATELLITE_RELATIONS) | frozenset((r, MULTINUC) for r in MULTINUC_RELATIONS)
    return ConstituentTree(doc_id, tuple(edus), root, genre, relations | frozenset(used_relations(root)))


def random_corpus(seed: int = 0, genres: dict[str, tuple[int, int, int]] | None = None,
                  edus: tuple[int, int] = (3, 15), name: str = "synthetic",
                  organizational: bool = False) -> CorpusHandle:
    """A corpus with ``genres`` mapping genre -> (train, dev, test) document counts."""
    rng = random.Random(seed)
    genres = genres or {"alpha": (4, 1, 1), "beta": (4, 1, 1), "gamma": (4, 1, 1)}
    entries = []
    for genre, sizes in sorted(genres.items()):
        for partition, count in zip(("train", "dev", "test"), sizes):
            for j in range(count):
                doc_id = f"{name}_{genre}_{partition}_{j:02d}"
                tree = random_tree(rng, rng.randint(*edus), doc_id, genre, organizational=organizational)
                entries.append((tree, partition))
    return corpus_from_trees(name, entries)
