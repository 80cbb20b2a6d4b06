"""Exception hierarchy shared by all modules."""


class PrebuildError(Exception):
    """Base class. ``cell`` names the offending vertex, face or edge when known."""

    def __init__(self, message: str = "", cell=None, **data):
        super().__init__(message)
        self.cell = cell
        self.data = data

    @property
    def name(self) -> str:
        return type(self).__name__


# complex
class ComplexError(PrebuildError):
    pass


class NonEcarinate(ComplexError):
    pass


class NonNormal(ComplexError):
    pass


class BadLinkSize(ComplexError):
    pass


class OddLink(BadLinkSize):
    pass


class NonConvexFace(ComplexError):
    pass


class NonLatticeEdge(ComplexError):
    pass


class NotSimplyConnected(ComplexError):
    pass


class ExternalVertex(ComplexError):
    pass


class NotAdjacent(ComplexError):
    pass


class NonLatticeCut(ComplexError):
    pass


# scaffolding
class ScaffoldError(PrebuildError):
    pass


class NonStandard(ScaffoldError):
    pass


class OrientationViolation(ScaffoldError):
    pass


class NotRefracting(ScaffoldError):
    pass


class NotInitial(ScaffoldError):
    pass


class CycleFound(ScaffoldError):
    pass


class SinkNot42(ScaffoldError):
    pass


class ValidationFailed(ScaffoldError):
    """Aggregate of per-vertex errors; ``errors`` holds the individual ones."""

    def __init__(self, errors):
        msg = "; ".join("%s at %s: %s" % (e.name, e.cell, e) for e in errors)
        super().__init__(msg)
        self.errors = list(errors)


# reduction
class ReductionError(PrebuildError):
    pass


class ChainLeavesStandardList(ReductionError):
    pass


class ExternalHit(ReductionError):
    pass


class RegionDegenerate(ReductionError):
    pass


class GeneralPosition(ReductionError):
    pass


class RegionViolation(ReductionError):
    pass


class UnclassifiableResult(ReductionError):
    pass


class NonHarmonizable(ReductionError):
    pass


class PostSurgeryNonStandard(ReductionError):
    pass


class SectorArithmetic(ReductionError):
    pass


class StepLimit(ReductionError):
    pass


class NotCollapsible(ReductionError):
    """The chosen vertex or germ does not start a collapse."""


# network
class Inconclusive(PrebuildError):
    pass


# io
class IOFormatError(PrebuildError):
    pass


class SchemaError(IOFormatError):
    pass


class NonRational(IOFormatError):
    pass


class DanglingReference(IOFormatError):
    pass


class BadPattern(IOFormatError):
    pass

