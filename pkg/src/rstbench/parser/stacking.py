"""Per-EDU annotations used as stacked features.

Two sources are supported: a windowed label tagger over raw EDU text, and the
dependency conversion of a parse produced by a model trained on another corpus.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..depconv import to_dependencies
from ..errors import EmptyTrainSet
from ..relmap import ROOT, collapse_fn
from ..treebank import Document, Edu
from .features import Annotation
from .model import Model, parse
from .perceptron import AveragedPerceptron

DIST_BUCKETS = ((1, "1"), (2, "2"), (5, "3-5"), (10, "6-10"))


def distance_bucket(d: int) -> str:
    if d <= 0:
        return "0"
    for hi, name in DIST_BUCKETS:
        if d <= hi:
            return name
    return ">10"


def _words(edu: Edu | None) -> list[str]:
    return [t.lower() for t in edu.tokens] if edu is not None else []


def window_features(edus: Sequence[Edu], i: int) -> list[str]:
    """Features of the window (i-1, i, i+1) around 0-based EDU ``i``."""
    prev = edus[i - 1] if i > 0 else None
    nxt = edus[i + 1] if i + 1 < len(edus) else None
    feats = []
    for name, edu in (("L", prev), ("M", edus[i]), ("R", nxt)):
        words = _words(edu)
        if not words:
            feats.append(f"{name}=<none>")
            continue
        feats.append(f"{name}_first={words[0]}")
        feats.append(f"{name}_last={words[-1]}")
        if name == "M":
            feats.extend(f"M_w={w}" for w in sorted(set(words)))
    return feats


@dataclass
class WindowLabelTagger:
    weights: dict[str, dict[str, float]]
    labels: list[str]
    majority: str

    def tag_edus(self, edus: Sequence[Edu]) -> list[str]:
        perc = AveragedPerceptron()
        perc.weights = self.weights
        out = []
        for i in range(len(edus)):
            feats = window_features(edus, i)
            if not any(f in self.weights for f in feats):
                out.append(self.majority)
            else:
                out.append(perc.predict(feats, self.labels))
        return out

    def tag(self, doc) -> list[str]:
        return self.tag_edus(doc.edus)


def window_label_tagger(train_docs: Iterable[Document], scheme: str | None = "gum",
                        epochs: int = 5, seed: int = 1) -> WindowLabelTagger:
    """Train a tagger predicting each EDU's dependency label from its window.

    ``train_docs`` are dependency documents; labels are collapsed with ``scheme``.
    """
    fn = collapse_fn(scheme)
    instances = []
    for doc in train_docs:
        labels = doc.labels()
        for i in range(len(doc.edus)):
            instances.append((window_features(doc.edus, i), fn(labels[i + 1])))
    if not instances:
        raise EmptyTrainSet("no EDUs to train the tagger on")
    counts = Counter(label for _, label in instances)
    majority = min(counts, key=lambda l: (-counts[l], l))
    labels = sorted(counts)
    perc = AveragedPerceptron()
    rng = random.Random(seed)
    for _ in range(epochs):
        rng.shuffle(instances)
        for feats, gold in instances:
            if len(labels) > 1:
                perc.update(gold, perc.predict(feats, labels), feats)
            perc.tick()
    return WindowLabelTagger(perc.averaged(), labels, majority)


def annotations_from_dependencies(doc: Document, mode: str) -> list[Annotation]:
    if mode == "label":
        labels = doc.labels()
        return [labels[i] for i in range(1, len(doc.edus) + 1)]
    if mode != "graph":
        raise ValueError(f"unknown stacking mode {mode!r}")
    out: list[Annotation] = []
    for dep, head in sorted(doc.heads().items()):
        if head == 0:
            out.append((ROOT, "0"))
        else:
            out.append(("left" if head < dep else "right", distance_bucket(abs(dep - head))))
    return out


def stack_features_from_parser(base_model: Model, docs: Iterable, mode: str) -> dict[str, list[Annotation]]:
    """Annotate each document's EDUs from the dependency form of ``base_model``'s parse.

    ``docs`` only need ``doc_id`` and ``edus``; gold structure is never read.
    """
    out = {}
    for doc in docs:
        tree = parse(base_model, doc.edus, doc_id=doc.doc_id)
        out[doc.doc_id] = annotations_from_dependencies(to_dependencies(tree), mode)
    return out


def stack_features_from_tagger(tagger: WindowLabelTagger, docs: Iterable) -> dict[str, list[Annotation]]:
    return {doc.doc_id: tagger.tag(doc) for doc in docs}
