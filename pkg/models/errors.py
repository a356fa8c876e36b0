#!/usr/bin/env python3
"""
Domain errors for chain analysis.

Every error raised by the services derives from ChainAnalysisError so the
CLI can map the whole family to exit status 1.
"""


class ChainAnalysisError(ValueError):
    """Base class for all domain errors"""


class InvalidParams(ChainAnalysisError):
    """Family parameters or option values outside their declared range"""


class OutOfRange(ChainAnalysisError):
    """A rate entry lies outside [0, 1]"""


class NotStochastic(ChainAnalysisError):
    """A row of the transition matrix does not sum to 1"""


class Reducible(ChainAnalysisError):
    """Some p_x (x < m) or q_x (x > 0) is zero"""


class StationaryOverflow(ChainAnalysisError):
    """Centered log-weights still exceed the representable range"""


class ConvergenceFailure(ChainAnalysisError):
    """Bisection could not certify a simple, separated eigenvalue"""


class NoClosedForm(ChainAnalysisError):
    """Family has no published closed-form spectrum"""


class PrecisionLoss(ChainAnalysisError):
    """Cancellation error in the spectral sum exceeds the budget"""


class OutsideRadius(ChainAnalysisError):
    """Argument at or beyond the radius of convergence of the MGF"""


class TooFewPoints(ChainAnalysisError):
    """A scan needs at least three family points"""


class NonPositiveTarget(ChainAnalysisError):
    """Metropolis target has a non-positive or non-finite weight"""
