"""Exception and warning types raised across padelab."""

from __future__ import annotations


class PadelabError(Exception):
    """Base class for all padelab errors."""


class NumericalError(PadelabError):
    """Numerical failure (exit code 3 in the command line driver)."""


class ConfigInvalid(PadelabError):
    """Run configuration failed validation (exit code 2)."""


class NonFinite(NumericalError):
    pass


class ZeroPolynomial(NumericalError):
    pass


class NoConvergence(NumericalError):
    """Iteration did not converge; ``best`` carries the last iterate."""

    def __init__(self, msg: str, best=None):
        super().__init__(msg)
        self.best = best


class BudgetExceeded(NumericalError):
    """Adaptive quadrature ran out of panels."""

    def __init__(self, msg: str, estimate=None, error=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


class PrecisionMismatch(NumericalError):
    pass


class PathThroughBranchPoint(NumericalError):
    pass


class PointOnCut(NumericalError):
    pass


class DensityVanishes(NumericalError):
    pass


class UnknownKind(PadelabError, ValueError):
    pass


class SingularSystem(NumericalError):
    def __init__(self, msg: str, rank=None):
        super().__init__(msg)
        self.rank = rank


class NodeOnSingularity(NumericalError):
    pass


class DuplicateBranchPoint(PadelabError, ValueError):
    pass


class CutsSeparatePlane(PadelabError, ValueError):
    pass


class CutEndpointMismatch(PadelabError, ValueError):
    pass


class OnCutWithoutSide(NumericalError):
    pass


class SingularNormalization(NumericalError):
    pass


class PathDegeneracy(NumericalError):
    pass


class VAtBranchPoint(NumericalError):
    pass


class Singularity(NumericalError):
    pass


class TraceStall(NumericalError):
    def __init__(self, msg: str, location=None):
        super().__init__(msg)
        self.location = location


class LevelCurveNotJordan(NumericalError):
    pass


class XiNotConformal(NumericalError):
    pass


class NodeAtBranchPoint(NumericalError):
    pass


class DnContainsInfinity0(NumericalError):
    pass


class NonUniqueDivisor(NumericalError):
    pass


class ConditionEViolated(NumericalError):
    pass


class TooCloseToCut(NumericalError):
    pass


class IllConditioned(UserWarning):
    """Warning issued when a linear solve is badly conditioned."""
