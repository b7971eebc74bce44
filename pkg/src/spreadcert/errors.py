"""Exception hierarchy shared across the package."""


class SpreadcertError(Exception):
    """Base class for all package-specific errors."""


class GraphValidationError(SpreadcertError):
    """Adjacency fails a structural requirement (symmetry, sign, edges)."""


class RescaleUndefinedError(SpreadcertError):
    """Spectral rescaling requested on an edgeless graph."""


class StandingAssumptionError(SpreadcertError):
    """A covariance-model assumption is violated (positivity, symmetry)."""


class SolverConditioningError(SpreadcertError):
    """The generalised eigensolver cannot produce a reliable solution."""


class StabilityError(SpreadcertError):
    """rho * ||G||_2 >= 1, so the diffusion fixed point does not exist."""


class DegenerateInputError(SpreadcertError):
    """An input is degenerate for the requested operation (e.g. zero p0)."""


class IterationBudgetError(SpreadcertError):
    """Fixed-point iteration hit the iteration cap before converging.

    Carries the last iterate and the final step size so callers can inspect
    how far the recursion got.
    """

    def __init__(self, message, last_iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


class BendPointUndefinedError(SpreadcertError):
    """Bend point requested for a graph with d_max = 0."""


class InfeasibleTargetError(SpreadcertError):
    """Spreading target at or below the feasibility floor.

    No finite regularisation strength can certify such a target; the floor
    is carried so callers can report it.
    """

    def __init__(self, message, floor=None):
        super().__init__(message)
        self.floor = floor


class EdgelessGraphError(SpreadcertError):
    """Certification requested for an edgeless graph with rho > 0.

    The certificate evaluates to zero on such graphs while the measured
    spreading equals rho, so emitting it would be unsound.
    """


class ConfigError(SpreadcertError):
    """Experiment configuration is malformed or produces an empty run."""


class CertificationAuditError(SpreadcertError):
    """A sweep produced a record with measured spreading above the bound."""
