"""Exception hierarchy shared by all dgw modules."""


class DGWError(Exception):
    """Base class for every error raised by the package."""


class NotPrime(DGWError):
    pass


class DegreeOverflow(DGWError):
    pass


class Inconsistent(DGWError):
    """An affine linear system has no solution."""


class NotIntegral(DGWError):
    pass


class NonUnitDenominator(DGWError):
    pass


class ZeroInput(DGWError):
    pass


class SingularConstantTerm(DGWError):
    pass


class SingularReduction(DGWError):
    pass


class DegreeNotOne(DGWError):
    pass


class SplittingDegreeExceeded(DGWError):
    pass


class DeterminantNotPhiFixed(DGWError):
    pass


class PhiFixednessViolated(DGWError):
    pass


class CentralizerNotTorus(DGWError):
    pass


class NoRationalDescent(DGWError):
    pass


class CapExceeded(DGWError):
    pass


class NotIrreducible(DGWError):
    pass


class NotDistinct(DGWError):
    pass


class ConstantTermNotOne(DGWError):
    pass


class BudgetExceeded(DGWError):
    pass


class BudgetExhausted(DGWError):
    pass


class NotPrimitiveRoot(DGWError):
    pass


class EigenvalueCollision(DGWError):
    pass


class PreconditionFailed(DGWError):
    pass


class BadAlpha(DGWError):
    pass


class ConjugationFailed(DGWError):
    pass


class InvariantViolated(DGWError):
    """A construction postcondition failed; ``name`` identifies which one."""

    def __init__(self, name, detail=""):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name)
