"""Exception types shared across the package."""


class QuadwalkError(Exception):
    """Base class for every error raised by this package."""


class ZeroDenominator(QuadwalkError, ZeroDivisionError):
    pass


class NonInvertibleLeadingTerm(QuadwalkError, ZeroDivisionError):
    pass


class NonSquareLeadingTerm(QuadwalkError, ValueError):
    pass


class BranchPole(QuadwalkError, ValueError):
    """A denominator shares a factor with the kernel, so it blows up on a root branch."""


class ParseError(QuadwalkError, ValueError):
    pass


class InvalidModel(QuadwalkError, ValueError):
    pass


class DegenerateKernel(QuadwalkError, ValueError):
    pass


class NotAnInvariant(QuadwalkError, ValueError):
    pass


class TOutOfRange(QuadwalkError, ValueError):
    pass


class ClassificationFailed(QuadwalkError, ArithmeticError):
    pass


class QuadratureNonConvergent(QuadwalkError, ArithmeticError):
    pass


class DegenerateLattice(QuadwalkError, ValueError):
    pass


class LatticeReductionFailed(QuadwalkError, ArithmeticError):
    pass


class IntegralNonConvergent(QuadwalkError, ArithmeticError):
    pass


class DegenerateQuadratic(QuadwalkError, ZeroDivisionError):
    pass


class PoleAtY4(QuadwalkError, ZeroDivisionError):
    pass


class OutsideDomain(QuadwalkError, ValueError):
    pass


class AtPole(QuadwalkError, ZeroDivisionError):
    pass


class PoleCollision(QuadwalkError, ValueError):
    pass
