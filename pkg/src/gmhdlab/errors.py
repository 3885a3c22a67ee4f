"""Fault types shared across the package."""


class Fault(Exception):
    """Base class for all gmhdlab faults."""


class NonFiniteError(Fault):
    """A field contains NaN/Inf entries; carries the offending indices."""

    def __init__(self, message: str, indices=None):
        super().__init__(message)
        self.indices = indices


class DomainError(Fault):
    """An evaluation point lies outside the admissible domain."""


class ConfigError(Fault):
    """Inconsistent or unsupported configuration."""


class ConsistencyError(Fault):
    """A stated precondition on the data is violated beyond tolerance."""


class StepFault(Fault):
    """A time step produced a non-finite state; carries the pre-step state."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class TrajectoryFault(Fault):
    """A trajectory left the unit interval beyond tolerance."""


class PreconditionError(Fault):
    """Initial data fails the structural premise of the requested check."""


class RegimeError(Fault):
    """Parameters lie outside the regime the requested routine covers."""
