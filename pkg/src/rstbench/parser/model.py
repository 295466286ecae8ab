"""Trainable greedy shift-reduce parser with an averaged linear scorer."""

from __future__ import annotations

import gzip
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..errors import EmptyTrainSet, InventoryMismatch, ModelConfigMismatch
from ..metrics import aggregate, parseval
from ..relmap import collapse_fn
from ..treebank import ConstituentTree, Edu
from ..trees import NS, BinaryTree, binarize, relabel
from .features import Annotation, FeatureConfig, extract_features
from .perceptron import AveragedPerceptron
from .transitions import SHIFT, ParserState, Transition, oracle

log = logging.getLogger(__name__)

MODEL_FORMAT = "rstbench-model"
MODEL_VERSION = 1

# label space a collapse scheme produces
LABEL_SPACES = {None: "fine", "fine": "fine", "gum": "gum", "rstdt": "rstdt", "gum2rstdt": "rstdt"}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    patience: int | None = None
    scheme: str | None = None
    features: FeatureConfig = field(default_factory=FeatureConfig)
    left_branching: bool = False
    # set when trees arrive already collapsed into a shared label space
    space: str | None = None

    @property
    def label_space(self) -> str:
        return self.space or LABEL_SPACES[self.scheme]


@dataclass
class Model:
    features: FeatureConfig
    label_space: str
    actions: list[str]
    weights: dict[str, dict[str, float]]
    history: list[dict] = field(default_factory=list)

    @classmethod
    def empty(cls, config: TrainConfig) -> Model:
        return cls(config.features, config.label_space, [SHIFT.id], {})

    @property
    def reduce_actions(self) -> list[str]:
        return [a for a in self.actions if a != SHIFT.id]


def _prepare(tree, scheme, left_branching) -> BinaryTree:
    if isinstance(tree, ConstituentTree):
        tree = binarize(tree, left_branching=left_branching)
    if scheme not in (None, "fine"):
        tree = relabel(tree, collapse_fn(scheme))
    return tree


def stratified_dev(trees: Sequence, every: int = 10) -> tuple[list, list]:
    """Split off every ``every``-th document after sorting by EDU count."""
    ordered = sorted(trees, key=lambda t: (len(t.edus), t.doc_id))
    dev = [t for i, t in enumerate(ordered) if i % every == every - 1]
    dev_ids = {t.doc_id for t in dev}
    return [t for t in trees if t.doc_id not in dev_ids], dev


def train(trees: Sequence, config: TrainConfig = TrainConfig(), seed: int = 1,
          dev: Sequence | None = None,
          annotations: Mapping[str, Sequence[Annotation]] | None = None) -> Model:
    """Train from scratch. See :func:`warm_start` for the arguments."""
    return warm_start(Model.empty(config), trees, config, seed, dev, annotations)


def warm_start(pretrained: Model, trees: Sequence, config: TrainConfig = TrainConfig(), seed: int = 1,
               dev: Sequence | None = None,
               annotations: Mapping[str, Sequence[Annotation]] | None = None) -> Model:
    """Continue training ``pretrained`` on ``trees``.

    ``trees`` are constituent or binary gold trees; their labels are collapsed
    with ``config.scheme``. When ``dev`` is given, the epoch with the best dev
    micro S is returned (earliest on ties) and ``patience`` epochs without
    improvement stop training.
    """
    if not trees:
        raise EmptyTrainSet("no training documents")
    if pretrained.label_space != config.label_space:
        raise InventoryMismatch(
            f"pretrained labels are {pretrained.label_space!r}, training data is {config.label_space!r}")
    if pretrained.features != config.features:
        raise ModelConfigMismatch("pretrained model uses a different feature configuration")

    data = [_prepare(t, config.scheme, config.left_branching) for t in trees]
    seqs = [oracle(t) for t in data]
    actions = sorted(set(pretrained.actions) | {t.id for seq in seqs for t in seq})
    reduce_ids = [a for a in actions if a != SHIFT.id]
    shift_only = [SHIFT.id]
    dev_data = [_prepare(t, config.scheme, config.left_branching) for t in dev] if dev else []

    perc = AveragedPerceptron(pretrained.weights)
    rng = random.Random(seed)
    order = list(range(len(data)))
    best, best_score, since_best = None, None, 0
    history = list(pretrained.history)
    for epoch in range(1, config.epochs + 1):
        rng.shuffle(order)
        mistakes = steps = 0
        for idx in order:
            tree, seq = data[idx], seqs[idx]
            ann = annotations.get(tree.doc_id) if annotations else None
            state = ParserState(tree.edus)
            for gold in seq:
                if not state.can_reduce():
                    candidates = shift_only
                elif not state.can_shift():
                    candidates = reduce_ids
                else:
                    candidates = actions
                if len(candidates) > 1:
                    feats = extract_features(state, config.features, ann)
                    guess = perc.predict(feats, candidates)
                    if guess != gold.id:
                        mistakes += 1
                        perc.update(gold.id, guess, feats)
                perc.tick()
                steps += 1
                state.apply(gold)
        model = Model(config.features, config.label_space, actions, perc.averaged())
        entry = {"epoch": epoch, "train_accuracy": 1 - mistakes / max(steps, 1)}
        if dev_data:
            counts = [parseval(g, parse(model, g.edus, annotations.get(g.doc_id) if annotations else None))
                      for g in dev_data]
            entry["dev_S"] = aggregate(counts).S
            score = entry["dev_S"]
            if best is None or score > best_score:
                best, best_score, since_best = model, score, 0
            else:
                since_best += 1
        else:
            best = model
        history.append(entry)
        log.info("epoch %d: %s", epoch, entry)
        if config.patience is not None and dev_data and since_best >= config.patience:
            break
    best.history = history
    return best


def parse(model: Model, edus: Sequence[Edu], annotations: Sequence[Annotation] | None = None,
          doc_id: str = "", genre: str = "") -> BinaryTree:
    """Greedy decoding; Shift is forced below two stack items and Reduce on an empty queue."""
    perc = AveragedPerceptron()
    perc.weights = model.weights
    reduce_ids = model.reduce_actions or [Transition(NS, "span").id]
    all_ids = sorted([SHIFT.id, *reduce_ids])
    state = ParserState(edus)
    while not state.terminal:
        if not state.can_reduce():
            action = SHIFT.id
        else:
            candidates = all_ids if state.can_shift() else reduce_ids
            feats = extract_features(state, model.features, annotations)
            action = perc.predict(feats, candidates)
        state.apply(Transition.from_id(action))
    return BinaryTree(doc_id, tuple(edus), state.stack[0], genre)


def parse_tree(model: Model, tree, annotations=None) -> BinaryTree:
    """Parse the EDUs of a gold tree (gold segmentation)."""
    return parse(model, tree.edus, annotations, tree.doc_id, tree.genre)


# --------------------------------------------------------------------------
# persistence

def _payload(model: Model) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_config": model.features.to_dict(),
        "feature_hash": model.features.digest(),
        "label_space": model.label_space,
        "actions": model.actions,
        "history": model.history,
        "weights": model.weights,
    }


def dumps_model(model: Model) -> bytes:
    blob = json.dumps(_payload(model), sort_keys=True, separators=(",", ":")).encode("utf-8")
    return gzip.compress(blob, mtime=0)


def save_model(model: Model, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(dumps_model(model))
    return path


def loads_model(data: bytes, features: FeatureConfig | None = None) -> Model:
    payload = json.loads(gzip.decompress(data))
    if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_VERSION:
        raise ModelConfigMismatch("not a model file of a supported version")
    stored = FeatureConfig(**payload["feature_config"])
    if stored.digest() != payload["feature_hash"]:
        raise ModelConfigMismatch("feature config does not match its stored hash")
    if features is not None and features.digest() != payload["feature_hash"]:
        raise ModelConfigMismatch("model was trained with a different feature config")
    return Model(stored, payload["label_space"], payload["actions"], payload["weights"], payload["history"])


def load_model(path: str | Path, features: FeatureConfig | None = None) -> Model:
    return loads_model(Path(path).read_bytes(), features)


__all__ = [
    "TrainConfig", "Model", "train", "warm_start", "parse", "parse_tree", "stratified_dev",
    "save_model", "load_model", "dumps_model", "loads_model",
]
