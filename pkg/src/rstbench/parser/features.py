"""Sparse binary features for parser states."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from .transitions import ParserState

STACKING_MODES = (None, "label", "graph")


@dataclass(frozen=True)
class FeatureConfig:
    organizational: bool = True
    stacking: str | None = None
    conjunctions: bool = True

    def __post_init__(self):
        if self.stacking not in STACKING_MODES:
            raise ValueError(f"stacking must be one of {STACKING_MODES}")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# Per-EDU stacking annotation: a label (label mode) or (direction, distance bucket).
Annotation = str | tuple[str, str]


def token_bucket(n: int) -> str:
    if n <= 1:
        return str(n)
    for lo, hi in ((2, 3), (4, 7), (8, 15), (16, 31)):
        if n <= hi:
            return f"{lo}-{hi}"
    return "32+"


def edu_bucket(n: int) -> str:
    if n <= 2:
        return str(n)
    for lo, hi in ((3, 4), (5, 8), (9, 16)):
        if n <= hi:
            return f"{lo}-{hi}"
    return "17+"


def _tokens(state: ParserState, start: int, end: int) -> tuple[str, str, int]:
    first = state.edus[start - 1].tokens
    last = state.edus[end - 1].tokens
    n = sum(len(state.edus[i - 1].tokens) for i in range(start, end + 1))
    return (first[0].lower() if first else "", last[-1].lower() if last else "", n)


def extract_features(state: ParserState, config: FeatureConfig = FeatureConfig(),
                     annotations: Sequence[Annotation] | None = None) -> list[str]:
    """Features over the top two stack items (s0, s1) and the queue front (q0).

    Missing positions and unavailable information contribute nothing.
    """
    feats: list[str] = []
    items = []
    if state.stack:
        items.append(("s0", state.stack[-1], state.heads[-1]))
    if len(state.stack) > 1:
        items.append(("s1", state.stack[-2], state.heads[-2]))
    q0 = state.next_edu if state.can_shift() else None

    parts: dict[str, dict[str, str]] = {}
    for name, node, head in items:
        first, last, n = _tokens(state, node.start, node.end)
        head_first = state.edus[head - 1].tokens[:1]
        p = {
            "first": first,
            "last": last,
            "len": token_bucket(n),
            "edus": edu_bucket(node.end - node.start + 1),
            "cat": node.category or "leaf",
            "hfirst": head_first[0].lower() if head_first else "",
        }
        parts[name] = p
        feats.extend(f"{name}_{k}={v}" for k, v in p.items())
    if q0 is not None:
        first, last, n = _tokens(state, q0, q0)
        parts["q0"] = {"first": first, "last": last}
        feats.extend((f"q0_first={first}", f"q0_last={last}", f"q0_len={token_bucket(n)}"))

    if config.organizational:
        feats.extend(_organizational(state, items, q0))
    if config.stacking and annotations is not None:
        feats.extend(_stacking(config.stacking, annotations, items, q0))
    if config.conjunctions and "s0" in parts:
        s0 = parts["s0"]
        if "s1" in parts:
            s1 = parts["s1"]
            feats.append(f"s1_last+s0_first={s1['last']}|{s0['first']}")
            feats.append(f"s1_cat+s0_cat={s1['cat']}|{s0['cat']}")
            feats.append(f"s1_edus+s0_edus={s1['edus']}|{s0['edus']}")
            feats.append(f"s1_hfirst+s0_hfirst={s1['hfirst']}|{s0['hfirst']}")
            feats.append(f"s0_first+q={s0['first']}|{'q' if q0 is not None else '-'}")
        if "q0" in parts:
            feats.append(f"s0_last+q0_first={s0['last']}|{parts['q0']['first']}")
    return feats


def _organizational(state: ParserState, items, q0) -> list[str]:
    edus = state.edus
    feats = []
    has_sent = edus and edus[0].sentence_id is not None
    has_para = edus and edus[0].paragraph_id is not None
    if not (has_sent or has_para):
        return feats

    def starts_para(i: int) -> bool:
        return i == 1 or edus[i - 1].paragraph_id != edus[i - 2].paragraph_id

    def starts_sent(i: int) -> bool:
        return i == 1 or edus[i - 1].sentence_id != edus[i - 2].sentence_id

    spans = {name: (node.start, node.end) for name, node, _ in items}
    if q0 is not None:
        spans["q0"] = (q0, q0)
    for name, (a, b) in spans.items():
        if has_para:
            feats.append(f"{name}_startpara={int(starts_para(a))}")
            feats.append(f"{name}_onepara={int(edus[a - 1].paragraph_id == edus[b - 1].paragraph_id)}")
        if has_sent:
            feats.append(f"{name}_startsent={int(starts_sent(a))}")
            feats.append(f"{name}_onesent={int(edus[a - 1].sentence_id == edus[b - 1].sentence_id)}")
    for left, right in (("s1", "s0"), ("s0", "q0")):
        if left in spans and right in spans:
            i, j = spans[left][1], spans[right][0]
            if has_sent:
                feats.append(f"{left}{right}_samesent={int(edus[i - 1].sentence_id == edus[j - 1].sentence_id)}")
            if has_para:
                feats.append(f"{left}{right}_samepara={int(edus[i - 1].paragraph_id == edus[j - 1].paragraph_id)}")
    return feats


def _stacking(mode: str, annotations: Sequence[Annotation], items, q0) -> list[str]:
    feats = []
    heads = [(name, head) for name, _, head in items]
    if q0 is not None:
        heads.append(("q0", q0))
    for name, edu in heads:
        ann = annotations[edu - 1]
        if ann is None:
            continue
        if mode == "label":
            feats.append(f"{name}_deplab={ann}")
        else:
            direction, dist = ann
            feats.append(f"{name}_depdir={direction}")
            feats.append(f"{name}_depdist={dist}")
    return feats


def annotations_for(mapping: Mapping[str, Sequence[Annotation]] | None, doc_id: str):
    if mapping is None:
        return None
    return mapping.get(doc_id)
