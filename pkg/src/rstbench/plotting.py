"""PNG figures written next to the CSV reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

METRICS = ("S", "N", "R")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    # fixed metadata keeps the bytes stable across runs
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def _bars(ax, names: Sequence[str], values: np.ndarray, ylabel: str):
    x = np.arange(len(names))
    width = 0.8 / len(METRICS)
    for k, metric in enumerate(METRICS):
        ax.bar(x + (k - 1) * width, values[:, k], width, label=metric)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel(ylabel)
    ax.legend()


def plot_scores(means, path) -> Path:
    """Grouped S/N/R bars, one group per (experiment, target)."""
    names = [f"{m.experiment}:{m.target}" for m in means]
    values = np.array([[m.S, m.N, m.R] for m in means]).reshape(-1, 3)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names) + 2), 4))
    _bars(ax, names, values, "F1")
    ax.set_ylim(0, 100)
    return _save(fig, path)


def plot_degradation(rows, path) -> Path:
    """Baseline minus held-out scores per target; below zero means the held-out model did better."""
    names = [r.target for r in rows]
    values = np.array([r.delta.as_tuple() for r in rows]).reshape(-1, 3)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names) + 2), 4))
    _bars(ax, names, values, "degradation (F1 points)")
    ax.axhline(0, color="black", linewidth=0.8)
    return _save(fig, path)


def plot_confusion(conf, path, normalize: bool = True) -> Path:
    m = conf.matrix().astype(float)
    if normalize:
        sums = m.sum(axis=1, keepdims=True)
        m = np.divide(m, sums, out=np.zeros_like(m), where=sums > 0)
    n = len(conf.classes)
    fig, ax = plt.subplots(figsize=(max(5, 0.45 * n + 2), max(4, 0.45 * n + 1.5)))
    im = ax.imshow(m, cmap="Blues", vmin=0)
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(conf.classes, rotation=90)
    ax.set_yticklabels(conf.classes)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_residuals(res, path) -> Path:
    r = res.residuals
    lim = float(np.max(np.abs(r))) or 1.0
    fig, ax = plt.subplots(figsize=(max(5, 0.45 * len(res.cols) + 2), max(3, 0.4 * len(res.rows) + 1.5)))
    im = ax.imshow(r, cmap="RdBu_r", vmin=-lim, vmax=lim)
    ax.set_xticks(range(len(res.cols)))
    ax.set_yticks(range(len(res.rows)))
    ax.set_xticklabels(res.cols, rotation=90)
    ax.set_yticklabels(res.rows)
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_branching(report: dict[str, float], path) -> Path:
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.bar(list(report), list(report.values()))
    ax.set_ylim(0, 100)
    ax.set_ylabel("F1")
    return _save(fig, path)
