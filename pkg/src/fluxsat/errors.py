"""Exception hierarchy shared across the package."""


class FluxsatError(Exception):
    """Base class for all package errors."""


class ConfigError(FluxsatError):
    """Invalid or unknown configuration input."""


class NoBracket(FluxsatError):
    """Root finding called without a sign change on the bracket."""


class StepFailure(FluxsatError):
    """ODE step size underflow, typically near a blow-up time."""


class MaxStepsExceeded(FluxsatError):
    """ODE integration exceeded the step budget."""


class EventNotFound(FluxsatError):
    """A required ODE event was not located in the search interval."""


class DomainError(FluxsatError):
    """Argument outside the mathematical domain (e.g. arctanh of |x| >= 1)."""


class TimeBeyondBlowup(FluxsatError):
    """Barrier evaluated at or after its blow-up time."""


class OrderViolation(FluxsatError):
    """Waiting-time bounds requested with L < ell."""


class ConsistencyFailure(FluxsatError):
    """Internal closed-form identity violated beyond tolerance."""


class UnsupportedProfile(FluxsatError):
    """Profile outside the tracker's single-plateau class."""


class UnsupportedEvolution(FluxsatError):
    """Tracker evolution left its supported regime (e.g. interior blow-up)."""


class InvariantViolation(FluxsatError):
    """A conserved quantity drifted beyond tolerance."""


class CflViolation(FluxsatError):
    """Explicit step requested with dt above the stability bound."""


class NewtonDivergence(FluxsatError):
    """Implicit solve failed to converge; dt too large for the damping."""


class GridMismatch(FluxsatError):
    """Operation on fields living on different grids."""


class NoShockFound(FluxsatError):
    """Shock tracking found no steep-gradient cluster to follow."""


class DegenerateInput(FluxsatError):
    """Not enough (or non-monotone) data for the requested fit."""


class Unsupported(FluxsatError):
    """Operation restricted to m = 2 called with another exponent."""
