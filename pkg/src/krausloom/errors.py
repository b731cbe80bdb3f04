"""Exception types shared across the package."""


class KrausloomError(Exception):
    """Base class for all package errors."""


class InvalidArgument(KrausloomError, ValueError):
    """An argument violates a documented precondition."""


class InvalidState(KrausloomError, ValueError):
    """A state vector or density matrix fails its structural invariants."""


class InvalidChannel(KrausloomError, ValueError):
    """A Kraus set violates the completeness relation or its parameter ranges."""


class InvalidWiring(KrausloomError, ValueError):
    """A gate placement addresses wires inconsistently with its role."""


class InternalConsistencyError(KrausloomError, RuntimeError):
    """Two redundant computation paths disagreed beyond tolerance."""
