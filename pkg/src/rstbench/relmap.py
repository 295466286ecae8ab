"""Relation inventories and coarse-class collapsing for GUM V8 and RST-DT.

The tables live in ``rstbench/data`` as tab-separated files so they can be
audited and checksummed independently of the code.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable

from .errors import UnknownLabel

SCHEMES = ("gum", "rstdt", "gum2rstdt", "fine")
MAPPING_FILE = "gum8_rstdt.tsv"
ROOT = "root"


@dataclass(frozen=True)
class MappingRow:
    gum_relation: str
    gum_class: str
    rstdt_class: str


def _read_table(name: str) -> list[list[str]]:
    text = resources.files("rstbench.data").joinpath(name).read_text(encoding="utf-8")
    return [line.split("\t") for line in text.splitlines() if line.strip() and not line.startswith("#")]


def mapping_checksum() -> str:
    data = resources.files("rstbench.data").joinpath(MAPPING_FILE).read_bytes()
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class MappingTable:
    rows: tuple[MappingRow, ...]
    rstdt_fine_to_class: dict[str, str]
    class_alignment: dict[str, str]

    @property
    def gum_classes(self) -> list[str]:
        return sorted({r.gum_class for r in self.rows})

    @property
    def rstdt_classes(self) -> list[str]:
        return sorted(set(self.rstdt_fine_to_class.values()))

    def row(self, gum_relation: str) -> MappingRow:
        key = normalize(gum_relation)
        for r in self.rows:
            if r.gum_relation == key:
                return r
        raise UnknownLabel(f"not a GUM V8 relation: {gum_relation!r}")


@lru_cache(maxsize=None)
def load_table() -> MappingTable:
    rows = tuple(MappingRow(*cols) for cols in _read_table(MAPPING_FILE))
    fine = {k: v for k, v in _read_table("rstdt_classes.tsv")}
    align = {k: v for k, v in _read_table("gum_class_alignment.tsv")}
    return MappingTable(rows, fine, align)


def normalize(label: str) -> str:
    """Lowercase and drop the ``_r``/``_m`` kind suffixes some rs3 exports append."""
    key = label.strip().lower()
    if key.endswith(("_r", "_m")):
        key = key[:-2]
    return key


@lru_cache(maxsize=None)
def _lookups():
    table = load_table()
    gum = {r.gum_relation: r.gum_class for r in table.rows}
    gum.update({c.lower(): c for c in table.gum_classes})
    rstdt = dict(table.rstdt_fine_to_class)
    rstdt.update({c.lower(): c for c in table.rstdt_classes})
    gum2rstdt = {r.gum_relation: r.rstdt_class for r in table.rows}
    gum2rstdt.update({c.lower(): c for c in table.rstdt_classes})
    return {"gum": gum, "rstdt": rstdt, "gum2rstdt": gum2rstdt}


def to_class(label: str, scheme: str) -> str:
    """Coarse class of ``label`` under ``scheme`` (``gum`` or ``rstdt``).

    Class names are accepted and returned unchanged, so collapsing is
    idempotent. The document-root pseudo label maps to itself.
    """
    if scheme == "fine":
        return label
    try:
        table = _lookups()[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}") from None
    key = normalize(label)
    if key == ROOT:
        return ROOT
    try:
        return table[key]
    except KeyError:
        raise UnknownLabel(f"{label!r} is not a {scheme} relation") from None


def gum_to_rstdt(gum_relation: str) -> str:
    """RST-DT class for a GUM relation (RST-DT class names pass through)."""
    return to_class(gum_relation, "gum2rstdt")


def collapse_fn(scheme: str | None) -> Callable[[str], str]:
    if scheme in (None, "fine"):
        return lambda label: label
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    return lambda label: to_class(label, scheme)


def detect_scheme(labels: Iterable[str]) -> str:
    """Pick the first scheme (gum, then rstdt) that knows every label."""
    labels = {normalize(l) for l in labels} - {ROOT}
    lookups = _lookups()
    for scheme in ("gum", "rstdt"):
        if labels <= lookups[scheme].keys():
            return scheme
    unknown = sorted(labels - lookups["gum"].keys() - lookups["rstdt"].keys())
    raise UnknownLabel(f"labels fit neither scheme: {unknown[:10]}")


def is_mismatch(gum_relation: str) -> bool:
    """True when the relation's RST-DT target differs from its class's usual counterpart."""
    table = load_table()
    row = table.row(gum_relation)
    return row.rstdt_class != table.class_alignment[row.gum_class]


def mapping_mismatch_rate(labels: Iterable[str]) -> float:
    """Instance-weighted share of GUM relation instances whose mapping diverges.

    ``labels`` is one entry per relation instance; use
    :func:`corpus_relation_labels` to collect them from a corpus.
    """
    labels = list(labels)
    if not labels:
        return 0.0
    return sum(is_mismatch(l) for l in labels) / len(labels)


def corpus_relation_labels(trees) -> list[str]:
    return [child.relation for tree in trees for _, child in tree.relation_instances()]
