"""Exception hierarchy.

Every domain error derives from :class:`RstError` (itself a ``ValueError``),
which the CLI maps to exit code 1.
"""


class RstError(ValueError):
    pass


# treebank / formats
class MalformedRs3(RstError):
    pass


class MalformedXml(MalformedRs3):
    pass


class DanglingParentId(MalformedRs3):
    pass


class UnknownRelation(MalformedRs3):
    pass


class NonProjectiveSpan(MalformedRs3):
    pass


class MultipleRoots(MalformedRs3):
    pass


class EmptySegment(MalformedRs3):
    pass


class InvalidTree(RstError):
    pass


class BadColumnCount(RstError):
    pass


class HeadOutOfRange(RstError):
    pass


class CycleDetected(RstError):
    pass


class MissingDocument(RstError):
    pass


class DuplicateDocId(RstError):
    pass


# statistics / metrics
class EmptyCorpus(RstError):
    pass


class LeafMismatch(RstError):
    pass


class EmptyInput(RstError):
    pass


class TokenCountMismatch(RstError):
    pass


# relations
class UnknownLabel(RstError):
    pass


# dependencies / analysis
class NoRoot(RstError):
    pass


class DocMismatch(RstError):
    pass


class ZeroMargin(RstError):
    pass


# parser
class IllegalTransition(RstError):
    pass


class NonTerminalEnd(RstError):
    pass


class EmptyTrainSet(RstError):
    pass


class InventoryMismatch(RstError):
    pass


class ModelConfigMismatch(RstError):
    """Raised when a stored model was built with a different feature config."""


# experiments
class UnknownGenre(RstError):
    pass


class InfeasibleBudget(RstError):
    pass


class LeakageError(RstError):
    pass


class InvalidConfig(RstError):
    pass
