"""Exception types shared across the package."""


class PovmOptError(Exception):
    """Base class for all package errors."""


class InvalidStateError(PovmOptError):
    """State construction violated a physicality constraint (e.g. Bloch norm > 1)."""


class ResourceError(PovmOptError):
    """Requested problem size exceeds the configured dimension cap."""


class NotPsdError(PovmOptError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class DegenerateEnsembleError(PovmOptError):
    """Kraus ensemble sum G = sum_k A_k^dag A_k is (nearly) singular."""


class EmptyPovmError(PovmOptError):
    """Pruning removed every POVM element."""


class SingularProbabilityError(PovmOptError):
    """An outcome has (near-)zero probability but carries parameter information."""


class SingularCfimError(PovmOptError):
    """Classical Fisher information matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class NoSldError(PovmOptError):
    """The SLD equation has no solution (derivative leaves the state support)."""


class DegenerateOutcomeError(PovmOptError):
    """Gradient requested on an outcome whose probability vanished while it still carries information."""


class InitFailureError(PovmOptError):
    """Random initialization failed repeatedly."""


class NotApplicableError(PovmOptError):
    """The requested closed-form quantity is not defined for this model family."""


class NoCertificateError(PovmOptError):
    """SDP solver stopped without reaching the requested duality gap."""

    def __init__(self, message, value=None, gap=None):
        super().__init__(message)
        self.value = value
        self.gap = gap


class InfeasibleFreeParameterError(PovmOptError):
    """Free parameter of the three-outcome construction lies outside the feasible interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class InconsistentSolutionError(PovmOptError):
    """Closed-form construction produced an out-of-range intermediate value."""
