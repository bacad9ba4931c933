"""Exception hierarchy shared by all qpurify modules."""


class QPurifyError(ValueError):
    """Base class for every error raised by qpurify."""


class InvalidStateError(QPurifyError):
    """A matrix or vector failed one of the state invariants.

    ``residual`` carries the measured violation so callers can report it.
    """

    invariant = "state"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotHermitian(InvalidStateError):
    invariant = "hermitian"


class TraceNotOne(InvalidStateError):
    invariant = "unit-trace"


class NotPositive(InvalidStateError):
    invariant = "positive-semidefinite"


class NotNormalized(InvalidStateError):
    invariant = "normalized"


class BlochOutOfBall(InvalidStateError):
    invariant = "bloch-ball"


class NotOrthogonal(InvalidStateError):
    invariant = "orthogonal"


class DegenerateProjector(QPurifyError):
    """The projector is orthogonal to one of the mixture components."""


class InconsistentRecord(QPurifyError):
    """No pure state reproduces the given measurement record."""


class MaxEntNotPositive(InconsistentRecord):
    """The record implies a Bloch vector outside the unit ball."""


class ConfigError(QPurifyError):
    """Invalid experiment configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
