"""Averaged multiclass perceptron over sparse binary features."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable

BIAS = "__bias__"


class AveragedPerceptron:
    """Weights are ``feature -> {class: weight}``.

    Averaging uses the lazy timestamp trick: each (feature, class) weight
    remembers when it last changed so the running total can be brought up to
    date on the next update.
    """

    def __init__(self, weights: dict[str, dict[str, float]] | None = None):
        self.weights: dict[str, dict[str, float]] = {f: dict(w) for f, w in (weights or {}).items()}
        self._totals: dict[tuple[str, str], float] = defaultdict(float)
        self._stamps: dict[tuple[str, str], int] = defaultdict(int)
        self.i = 0

    def scores(self, features: Iterable[str], classes: Iterable[str]) -> dict[str, float]:
        scores = dict.fromkeys(classes, 0.0)
        for feat in (BIAS, *features):
            weights = self.weights.get(feat)
            if not weights:
                continue
            for cls, w in weights.items():
                if cls in scores:
                    scores[cls] += w
        return scores

    def predict(self, features: Iterable[str], classes: Iterable[str]) -> str:
        """Highest-scoring class; ties go to the lexicographically smallest id."""
        scores = self.scores(features, classes)
        return min(scores, key=lambda c: (-scores[c], c))

    def tick(self):
        self.i += 1

    def update(self, truth: str, guess: str, features: Iterable[str]):
        if truth == guess:
            return
        for feat in (BIAS, *features):
            weights = self.weights.setdefault(feat, {})
            for cls, delta in ((truth, 1.0), (guess, -1.0)):
                key = (feat, cls)
                w = weights.get(cls, 0.0)
                self._totals[key] += (self.i - self._stamps[key]) * w
                self._stamps[key] = self.i
                weights[cls] = w + delta

    def averaged(self) -> dict[str, dict[str, float]]:
        """Averaged weights (zero entries dropped); the live weights are untouched."""
        out: dict[str, dict[str, float]] = {}
        steps = max(self.i, 1)
        for feat in sorted(self.weights):
            row = {}
            for cls in sorted(self.weights[feat]):
                key = (feat, cls)
                w = self.weights[feat][cls]
                total = self._totals.get(key, 0.0) + (self.i - self._stamps.get(key, 0)) * w
                avg = total / steps
                if avg:
                    row[cls] = avg
            if row:
                out[feat] = row
        return out
