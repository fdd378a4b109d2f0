"""Exception types raised by the geometry, residual, ODE and flow layers."""


class SolitonError(Exception):
    """Base class for all library errors."""


class ParamViolation(SolitonError):
    """A surface parameterization constraint fails beyond tolerance."""


class Singular(SolitonError):
    """Evaluation at a point where the formula has no finite value."""


class Degenerate(SolitonError):
    """A cylinder whose directrix velocity is parallel to the ruling."""


class BadInitialSpeed(SolitonError):
    pass


class DenominatorBlowup(SolitonError):
    pass


class StepLimit(SolitonError):
    pass


class UnknownFigure(SolitonError, KeyError):
    pass


class UnknownEntry(SolitonError, KeyError):
    pass


class DomainViolation(SolitonError, ValueError):
    pass


class CFLViolation(SolitonError):
    pass


class DegenerateFit(SolitonError):
    pass


class SpecParseError(SolitonError, ValueError):
    pass
