"""RST treebank I/O: ``.rs3`` constituent trees, ``.rsd`` dependencies, corpora.

The in-memory tree is a canonical n-ary form. Every internal :class:`Node`
is either

* a *span* node: exactly one nucleus child (relation ``"span"``) plus one or
  more satellite children, each carrying its own relation, or
* a *multinuclear* node: two or more nucleus children sharing one relation.

Node identity is structural; rs3 element ids are not retained.
"""

from __future__ import annotations

import logging
import os
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    BadColumnCount,
    CycleDetected,
    DanglingParentId,
    DuplicateDocId,
    EmptySegment,
    HeadOutOfRange,
    InvalidTree,
    MalformedRs3,
    MalformedXml,
    MissingDocument,
    MultipleRoots,
    NonProjectiveSpan,
    UnknownRelation,
)

log = logging.getLogger(__name__)

NUCLEUS = "N"
SATELLITE = "S"
SPAN = "span"
RST = "rst"
MULTINUC = "multinuc"
PARTITIONS = ("train", "dev", "test")


@dataclass(frozen=True)
class Edu:
    index: int
    text: str
    sentence_id: int | None = None
    paragraph_id: int | None = None

    @property
    def tokens(self) -> list[str]:
        return self.text.split()


@dataclass(frozen=True)
class Node:
    """A constituent. Leaves have ``edu`` set and no children.

    ``role`` and ``relation`` describe the edge to the parent; the root keeps
    the defaults (nucleus, no relation).
    """

    edu: int | None = None
    children: tuple[Node, ...] = ()
    role: str = NUCLEUS
    relation: str | None = None
    start: int = field(init=False, compare=False, repr=False)
    end: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.edu is not None:
            if self.children:
                raise InvalidTree("a leaf cannot have children")
            object.__setattr__(self, "start", self.edu)
            object.__setattr__(self, "end", self.edu)
        else:
            if not self.children:
                raise InvalidTree("an internal node needs children")
            object.__setattr__(self, "start", self.children[0].start)
            object.__setattr__(self, "end", self.children[-1].end)

    @property
    def is_leaf(self) -> bool:
        return self.edu is not None

    @property
    def nuclei(self) -> list[Node]:
        return [c for c in self.children if c.role == NUCLEUS]

    @property
    def satellites(self) -> list[Node]:
        return [c for c in self.children if c.role == SATELLITE]

    @property
    def kind(self) -> str:
        if self.is_leaf:
            return "leaf"
        return MULTINUC if len(self.nuclei) > 1 else SPAN

    def leaves(self) -> Iterator[int]:
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node.edu
            else:
                stack.extend(reversed(node.children))

    def internal_nodes(self) -> Iterator[Node]:
        stack = [self]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack.extend(reversed(node.children))


def leaf(index: int, role: str = NUCLEUS, relation: str | None = None) -> Node:
    return Node(edu=index, role=role, relation=relation)


def span_node(children: Sequence[Node], role: str = NUCLEUS, relation: str | None = None) -> Node:
    return Node(children=tuple(children), role=role, relation=relation)


def nucleus(node: Node, relation: str = SPAN) -> Node:
    return replace(node, role=NUCLEUS, relation=relation)


def satellite(node: Node, relation: str) -> Node:
    return replace(node, role=SATELLITE, relation=relation)


@dataclass(frozen=True)
class ConstituentTree:
    doc_id: str
    edus: tuple[Edu, ...]
    root: Node
    genre: str = ""
    relations: frozenset[tuple[str, str]] = field(default=frozenset(), compare=False)

    def __post_init__(self):
        validate_tree(self)

    def __len__(self):
        return len(self.edus)

    def relation_instances(self) -> Iterator[tuple[Node, Node]]:
        """(parent, child) pairs for every non-span attachment."""
        for node in self.root.internal_nodes():
            for child in node.children:
                if child.relation != SPAN:
                    yield node, child


def validate_tree(tree: ConstituentTree) -> None:
    n = len(tree.edus)
    for i, edu in enumerate(tree.edus, 1):
        if edu.index != i:
            raise InvalidTree(f"{tree.doc_id}: EDU indices must be contiguous 1..n")
        if not edu.text.strip():
            raise EmptySegment(f"{tree.doc_id}: EDU {i} has no text")
    if list(tree.root.leaves()) != list(range(1, n + 1)):
        raise NonProjectiveSpan(f"{tree.doc_id}: leaves do not match the EDU sequence")
    names = {name for name, _ in tree.relations}
    for node in tree.root.internal_nodes():
        if len(node.children) < 2:
            raise InvalidTree(f"{tree.doc_id}: unary node at {node.start}-{node.end}")
        for a, b in zip(node.children, node.children[1:]):
            if a.end + 1 != b.start:
                raise NonProjectiveSpan(f"{tree.doc_id}: non-contiguous children at {node.start}-{node.end}")
        nuclei = node.nuclei
        if not nuclei:
            raise InvalidTree(f"{tree.doc_id}: node {node.start}-{node.end} has no nucleus")
        if len(nuclei) > 1:
            if node.satellites:
                raise InvalidTree(f"{tree.doc_id}: mixed multinuclear node at {node.start}-{node.end}")
            if len({c.relation for c in nuclei}) != 1 or nuclei[0].relation in (None, SPAN):
                raise InvalidTree(f"{tree.doc_id}: multinuclear children must share one relation")
        else:
            if nuclei[0].relation != SPAN:
                raise InvalidTree(f"{tree.doc_id}: lone nucleus must carry 'span'")
        for child in node.children:
            if child.role == SATELLITE and child.relation in (None, SPAN):
                raise InvalidTree(f"{tree.doc_id}: satellite without relation")
            if names and child.relation != SPAN and child.relation not in names:
                raise UnknownRelation(f"{tree.doc_id}: relation {child.relation!r} not in inventory")


def used_relations(root: Node) -> set[tuple[str, str]]:
    out = set()
    for node in root.internal_nodes():
        for child in node.children:
            if child.relation == SPAN:
                continue
            out.add((child.relation, RST if child.role == SATELLITE else MULTINUC))
    return out


# --------------------------------------------------------------------------
# rs3

def parse_rs3(data: bytes | str, doc_id: str = "", genre: str = "", lenient: bool = False) -> ConstituentTree:
    """Parse rs3 XML into a validated :class:`ConstituentTree`.

    With ``lenient`` set, segments without text are dropped (with a warning)
    instead of raising :class:`EmptySegment`.
    """
    try:
        xml_root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(f"{doc_id}: {exc}") from exc
    header_rels: dict[str, set[str]] = {}
    for rel in xml_root.iter("rel"):
        name, kind = rel.get("name"), rel.get("type", RST)
        if name is None:
            raise MalformedXml(f"{doc_id}: <rel> without name")
        if kind not in (RST, MULTINUC):
            raise MalformedXml(f"{doc_id}: relation {name!r} has unknown type {kind!r}")
        header_rels.setdefault(name, set()).add(kind)
    body = xml_root.find("body")
    if body is None:
        raise MalformedXml(f"{doc_id}: missing <body>")

    elements: dict[str, dict] = {}
    segment_ids: list[str] = []
    texts: dict[str, str] = {}
    for el in body:
        if el.tag not in ("segment", "group"):
            continue
        eid = el.get("id")
        if eid is None:
            raise MalformedXml(f"{doc_id}: <{el.tag}> without id")
        if eid in elements:
            raise MalformedXml(f"{doc_id}: duplicate element id {eid}")
        info = {"tag": el.tag, "parent": el.get("parent"), "relname": el.get("relname"), "type": el.get("type", SPAN)}
        if el.tag == "segment":
            text = " ".join("".join(el.itertext()).split())
            if not text:
                if not lenient:
                    raise EmptySegment(f"{doc_id}: segment {eid} has no text")
                log.warning("%s: dropping empty segment %s", doc_id, eid)
                info["dropped"] = True
            else:
                segment_ids.append(eid)
                texts[eid] = text
        elif info["type"] not in (SPAN, MULTINUC):
            raise MalformedXml(f"{doc_id}: group {eid} has unknown type {info['type']!r}")
        elements[eid] = info

    dropped = {eid for eid, info in elements.items() if info.get("dropped")}
    children: dict[str, list[str]] = {eid: [] for eid in elements}
    roots = []
    for eid, info in elements.items():
        if eid in dropped:
            continue
        parent = info["parent"]
        if parent is None or parent == "0":
            roots.append(eid)
            continue
        if parent not in elements or parent in dropped:
            raise DanglingParentId(f"{doc_id}: element {eid} points to missing parent {parent}")
        relname = info["relname"] or SPAN
        info["relname"] = relname
        if relname != SPAN and relname not in header_rels:
            raise UnknownRelation(f"{doc_id}: relation {relname!r} not declared in header")
        children[parent].append(eid)
    if not segment_ids:
        raise MalformedRs3(f"{doc_id}: document has no segments")
    if len(roots) > 1:
        raise MultipleRoots(f"{doc_id}: {len(roots)} unattached elements: {', '.join(roots)}")
    if not roots:
        raise MalformedRs3(f"{doc_id}: no root element (cyclic attachment)")

    edu_index = {eid: i for i, eid in enumerate(segment_ids, 1)}
    building: set[str] = set()

    def classify(parent: str):
        pinfo = elements[parent]
        span_kids, members, sats = [], [], []
        for cid in children[parent]:
            relname = elements[cid]["relname"]
            kinds = header_rels.get(relname, set())
            if relname == SPAN:
                span_kids.append(cid)
            elif pinfo["tag"] == "group" and pinfo["type"] == MULTINUC and MULTINUC in kinds:
                members.append(cid)
            elif RST in kinds:
                sats.append(cid)
            else:
                raise MalformedRs3(f"{doc_id}: multinuclear relation {relname!r} on {cid} under non-multinuc {parent}")
        return span_kids, members, sats

    def base(eid: str) -> Node:
        info = elements[eid]
        span_kids, members, _ = classify(eid)
        if info["tag"] == "segment":
            if span_kids or members:
                raise MalformedRs3(f"{doc_id}: segment {eid} cannot dominate a nucleus")
            return leaf(edu_index[eid])
        if info["type"] == SPAN:
            if members:
                raise MalformedRs3(f"{doc_id}: span group {eid} has multinuclear members")
            if len(span_kids) != 1:
                raise MalformedRs3(f"{doc_id}: span group {eid} has {len(span_kids)} span children")
            return full(span_kids[0])
        if span_kids:
            raise MalformedRs3(f"{doc_id}: multinuc group {eid} has span children")
        if not members:
            raise MalformedRs3(f"{doc_id}: multinuc group {eid} has no members")
        if len(members) == 1:
            log.warning("%s: multinuc group %s has a single member; collapsing", doc_id, eid)
            return full(members[0])
        labels = {elements[m]["relname"] for m in members}
        if len(labels) != 1:
            raise MalformedRs3(f"{doc_id}: multinuc group {eid} mixes relations {sorted(labels)}")
        label = labels.pop()
        kids = sorted((nucleus(full(m), label) for m in members), key=lambda n: n.start)
        return _checked_node(kids, doc_id)

    def full(eid: str) -> Node:
        if eid in building:
            raise MalformedRs3(f"{doc_id}: cyclic attachment at {eid}")
        building.add(eid)
        core = base(eid)
        _, _, sats = classify(eid)
        building.discard(eid)
        if not sats:
            return core
        kids = [nucleus(core)] + [satellite(full(s), elements[s]["relname"]) for s in sats]
        kids.sort(key=lambda n: n.start)
        return _checked_node(kids, doc_id)

    root = replace(full(roots[0]), role=NUCLEUS, relation=None)
    covered = sum(1 for _ in root.leaves())
    if covered != len(segment_ids):
        raise MultipleRoots(f"{doc_id}: {len(segment_ids) - covered} segments are not attached to the root")
    edus = tuple(Edu(i, texts[eid]) for eid, i in edu_index.items())
    relations = frozenset((name, kind) for name, kinds in header_rels.items() for kind in kinds)
    return ConstituentTree(doc_id=doc_id, edus=edus, root=root, genre=genre, relations=relations)


def _checked_node(kids: list[Node], doc_id: str) -> Node:
    for a, b in zip(kids, kids[1:]):
        if a.end + 1 != b.start:
            raise NonProjectiveSpan(f"{doc_id}: leaves {a.start}-{b.end} are not contiguous")
    node = span_node(kids)
    if node.end - node.start + 1 != sum(1 for _ in node.leaves()):
        raise NonProjectiveSpan(f"{doc_id}: span {node.start}-{node.end} is not contiguous")
    return node


def write_rs3(tree: ConstituentTree) -> bytes:
    n = len(tree.edus)
    seg_attrs: dict[int, dict[str, str]] = {i: {} for i in range(1, n + 1)}
    groups: list[dict[str, str]] = []

    def emit(node: Node, parent: str | None, relname: str | None) -> str:
        if node.is_leaf:
            attrs = seg_attrs[node.edu]
            eid = str(node.edu)
        else:
            eid = str(n + len(groups) + 1)
            attrs = {"id": eid, "type": MULTINUC if node.kind == MULTINUC else SPAN}
            groups.append(attrs)
        if parent is not None:
            attrs["parent"] = parent
            attrs["relname"] = relname
        if node.is_leaf:
            return eid
        if node.kind == MULTINUC:
            for child in node.children:
                emit(child, eid, child.relation)
        else:
            nuc_id = emit(node.nuclei[0], eid, SPAN)
            for child in node.satellites:
                emit(child, nuc_id, child.relation)
        return eid

    emit(tree.root, None, None)
    rels = sorted(set(tree.relations) | used_relations(tree.root))

    rst = ET.Element("rst")
    header = ET.SubElement(rst, "header")
    relations = ET.SubElement(header, "relations")
    for name, kind in rels:
        ET.SubElement(relations, "rel", name=name, type=kind)
    body = ET.SubElement(rst, "body")
    for edu in tree.edus:
        seg = ET.SubElement(body, "segment", id=str(edu.index), **seg_attrs[edu.index])
        seg.text = edu.text
    for attrs in groups:
        ET.SubElement(body, "group", **attrs)
    ET.indent(rst)
    return ET.tostring(rst, encoding="utf-8", xml_declaration=True) + b"\n"


def read_rs3(path: str | os.PathLike, genre: str = "", lenient: bool = False) -> ConstituentTree:
    path = Path(path)
    return parse_rs3(path.read_bytes(), doc_id=path.stem, genre=genre, lenient=lenient)


# --------------------------------------------------------------------------
# dependency documents (.rsd)

@dataclass(frozen=True)
class Arc:
    dependent: int
    head: int
    label: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    edus: tuple[Edu, ...]
    arcs: tuple[Arc, ...]
    genre: str = ""

    def __post_init__(self):
        validate_dependencies(self)

    def heads(self) -> dict[int, int]:
        return {a.dependent: a.head for a in self.arcs}

    def labels(self) -> dict[int, str]:
        return {a.dependent: a.label for a in self.arcs}


def validate_dependencies(doc: Document) -> None:
    n = len(doc.edus)
    for i, edu in enumerate(doc.edus, 1):
        if edu.index != i:
            raise InvalidTree(f"{doc.doc_id}: EDU indices must be contiguous 1..n")
    deps = sorted(a.dependent for a in doc.arcs)
    if deps != list(range(1, n + 1)):
        raise InvalidTree(f"{doc.doc_id}: every EDU needs exactly one head")
    heads = {}
    for arc in doc.arcs:
        if not 0 <= arc.head <= n or arc.head == arc.dependent:
            raise HeadOutOfRange(f"{doc.doc_id}: EDU {arc.dependent} has head {arc.head}")
        heads[arc.dependent] = arc.head
    for start in heads:
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                raise CycleDetected(f"{doc.doc_id}: cycle through EDU {node}")
            seen.add(node)
            node = heads[node]
    roots = [d for d, h in heads.items() if h == 0]
    if len(roots) != 1:
        raise InvalidTree(f"{doc.doc_id}: expected exactly one root arc, found {len(roots)}")


def write_rsd(doc: Document) -> str:
    heads, labels = doc.heads(), doc.labels()
    lines = []
    for edu in doc.edus:
        text = " ".join(edu.text.split())
        lines.append(f"{edu.index}\t{text}\t{heads[edu.index]}\t{labels[edu.index]}")
    return "\n".join(lines) + "\n"


def parse_rsd(data: str | bytes, doc_id: str = "", genre: str = "") -> Document:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    edus, arcs = [], []
    for lineno, line in enumerate(data.splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise BadColumnCount(f"{doc_id}:{lineno}: expected 4 columns, got {len(cols)}")
        try:
            index, head = int(cols[0]), int(cols[2])
        except ValueError as exc:
            raise BadColumnCount(f"{doc_id}:{lineno}: non-integer index or head") from exc
        edus.append(Edu(index, cols[1]))
        arcs.append(Arc(index, head, cols[3]))
    n = len(edus)
    for arc in arcs:
        if not 0 <= arc.head <= n:
            raise HeadOutOfRange(f"{doc_id}: EDU {arc.dependent} has head {arc.head}")
    return Document(doc_id=doc_id, edus=tuple(edus), arcs=tuple(arcs), genre=genre)


# --------------------------------------------------------------------------
# sentence / paragraph sidecars

def parse_bounds(text: str) -> dict[str, list[int]]:
    """Read a ``.bounds`` sidecar: lines ``sentence<TAB>1 4 7`` / ``paragraph<TAB>1 7``
    listing the EDU indices that open a new unit."""
    out: dict[str, list[int]] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, values = line.partition("\t")
        out[key.strip()] = sorted(int(v) for v in values.split())
    return out


def apply_bounds(tree: ConstituentTree, sentence_starts: Iterable[int] | None,
                 paragraph_starts: Iterable[int] | None) -> ConstituentTree:
    def ids(starts):
        if starts is None:
            return [None] * len(tree.edus)
        starts = set(starts) | {1}
        out, current = [], 0
        for edu in tree.edus:
            if edu.index in starts:
                current += 1
            out.append(current)
        return out

    sents, paras = ids(sentence_starts), ids(paragraph_starts)
    edus = tuple(replace(e, sentence_id=s, paragraph_id=p) for e, s, p in zip(tree.edus, sents, paras))
    return replace(tree, edus=edus)


# --------------------------------------------------------------------------
# corpora

@dataclass(frozen=True)
class CorpusDocument:
    doc_id: str
    partition: str
    genre: str
    tree: ConstituentTree


@dataclass(frozen=True)
class CorpusHandle:
    name: str
    documents: Mapping[str, CorpusDocument] = field(default_factory=dict)

    def __post_init__(self):
        ordered = dict(sorted(self.documents.items()))
        object.__setattr__(self, "documents", MappingProxyType(ordered))

    def __len__(self):
        return len(self.documents)

    def __contains__(self, doc_id):
        return doc_id in self.documents

    def __getitem__(self, doc_id) -> CorpusDocument:
        return self.documents[doc_id]

    def docs(self, partitions: Iterable[str] | None = None,
             genres: Iterable[str] | None = None) -> list[CorpusDocument]:
        partitions = None if partitions is None else set(partitions)
        genres = None if genres is None else set(genres)
        return [d for d in self.documents.values()
                if (partitions is None or d.partition in partitions)
                and (genres is None or d.genre in genres)]

    def trees(self, partitions=None, genres=None) -> list[ConstituentTree]:
        return [d.tree for d in self.docs(partitions, genres)]

    @property
    def genres(self) -> list[str]:
        return sorted({d.genre for d in self.documents.values()})

    def count(self, partitions=None, genres=None) -> tuple[int, int]:
        """(documents, EDUs) for the selection."""
        docs = self.docs(partitions, genres)
        return len(docs), sum(len(d.tree.edus) for d in docs)


def read_manifest(path: str | os.PathLike) -> list[tuple[str, str, str]]:
    rows, seen = [], set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 3:
            raise BadColumnCount(f"{path}:{lineno}: manifest rows are doc_id<TAB>partition<TAB>genre")
        doc_id, partition, genre = (c.strip() for c in cols)
        if doc_id in seen:
            raise DuplicateDocId(f"{path}:{lineno}: {doc_id} listed twice")
        seen.add(doc_id)
        rows.append((doc_id, partition, genre))
    return rows


def _index_files(root: Path, suffix: str) -> dict[str, Path]:
    index: dict[str, Path] = {}
    for path in sorted(root.rglob(f"*{suffix}")):
        if path.stem in index:
            raise DuplicateDocId(f"{path.stem}: found both {index[path.stem]} and {path}")
        index[path.stem] = path
    return index


def load_corpus(root: str | os.PathLike, manifest: str | os.PathLike | None = None, name: str | None = None,
                lenient: bool = False, jobs: int = 1) -> CorpusHandle:
    """Load every document listed in the manifest from ``root`` (searched recursively).

    ``<doc_id>.bounds`` sidecars, when present next to the rs3 files, supply
    sentence and paragraph ids.
    """
    root = Path(root)
    manifest = Path(manifest) if manifest is not None else root / "manifest.tsv"
    rows = read_manifest(manifest)
    files = _index_files(root, ".rs3")
    bounds = _index_files(root, ".bounds")
    for doc_id, _, _ in rows:
        if doc_id not in files:
            raise MissingDocument(f"{doc_id}: no {doc_id}.rs3 under {root}")

    def load(row):
        doc_id, partition, genre = row
        tree = read_rs3(files[doc_id], genre=genre, lenient=lenient)
        if doc_id in bounds:
            b = parse_bounds(bounds[doc_id].read_text(encoding="utf-8"))
            tree = apply_bounds(tree, b.get("sentence"), b.get("paragraph"))
        return CorpusDocument(doc_id, partition, genre, tree)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            docs = list(pool.map(load, rows))
    else:
        docs = [load(r) for r in rows]
    return CorpusHandle(name or root.name, {d.doc_id: d for d in docs})


def corpus_from_trees(name: str, entries: Iterable[tuple[ConstituentTree, str]]) -> CorpusHandle:
    """Build a handle from in-memory trees paired with their partition."""
    docs = {}
    for tree, partition in entries:
        if tree.doc_id in docs:
            raise DuplicateDocId(tree.doc_id)
        docs[tree.doc_id] = CorpusDocument(tree.doc_id, partition, tree.genre, tree)
    return CorpusHandle(name, docs)


def write_corpus(corpus: CorpusHandle, root: str | os.PathLike) -> Path:
    """Write rs3 files, sidecars and ``manifest.tsv`` under ``root``."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for doc in corpus.documents.values():
        (root / f"{doc.doc_id}.rs3").write_bytes(write_rs3(doc.tree))
        sidecar = ""
        for key, attr in (("sentence", "sentence_id"), ("paragraph", "paragraph_id")):
            ids = [getattr(e, attr) for e in doc.tree.edus]
            if ids and ids[0] is not None:
                starts = [i for i in range(1, len(ids) + 1) if i == 1 or ids[i - 1] != ids[i - 2]]
                sidecar += f"{key}\t{' '.join(map(str, starts))}\n"
        if sidecar:
            (root / f"{doc.doc_id}.bounds").write_text(sidecar, encoding="utf-8")
        lines.append(f"{doc.doc_id}\t{doc.partition}\t{doc.genre}")
    manifest = root / "manifest.tsv"
    manifest.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return manifest
