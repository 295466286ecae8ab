"""RST discourse treebank tools, a shift-reduce parser and cross-genre experiment harness."""

from .depconv import cdu, to_dependencies
from .errors import RstError
from .metrics import ScoreTriple, aggregate, parseval, seg_f1
from .treebank import (
    ConstituentTree,
    CorpusHandle,
    Document,
    Edu,
    load_corpus,
    parse_rs3,
    parse_rsd,
    read_rs3,
    write_rs3,
    write_rsd,
)
from .trees import BinaryTree, binarize, corpus_stats, debinarize, nuclearity_distribution

__version__ = "0.1.0"

__all__ = [
    "cdu", "to_dependencies", "RstError", "ScoreTriple", "aggregate", "parseval", "seg_f1",
    "ConstituentTree", "CorpusHandle", "Document", "Edu", "load_corpus", "parse_rs3", "parse_rsd",
    "read_rs3", "write_rs3", "write_rsd", "BinaryTree", "binarize", "corpus_stats", "debinarize",
    "nuclearity_distribution",
]
