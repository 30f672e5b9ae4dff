"""Exception hierarchy shared across the package.

Errors that abort a numerical run derive from ``NumericalError`` so the CLI
can map them to a distinct exit code (3) versus configuration problems (2).
"""


class CavphaseError(Exception):
    pass


class ConfigError(CavphaseError, ValueError):
    """Bad run configuration; carries the offending key path when known."""

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class ShapeError(CavphaseError, ValueError):
    """Boundary shape violates positivity / star-shapedness."""


class DomainError(CavphaseError, ValueError):
    """Argument outside the operation's domain (e.g. origin not interior)."""


class RangeError(CavphaseError, ValueError):
    """Scalar argument outside its admissible range."""


class NumericalError(CavphaseError, RuntimeError):
    pass


class GrazingError(NumericalError):
    """Ray tangent to the wall within tolerance; carries the bounce index."""

    def __init__(self, message, bounce=None):
        self.bounce = bounce
        if bounce is not None:
            message = f"{message} (bounce {bounce})"
        super().__init__(message)


class ConvergenceError(NumericalError):
    """Root iteration failed; carries the iterate trace for diagnosis."""

    def __init__(self, message, iterates=None):
        self.iterates = list(iterates) if iterates is not None else []
        super().__init__(message)


class ReflectionFailureError(NumericalError):
    """No on-contour outgoing wavevector with inward group velocity."""


class EmptyDistributionError(NumericalError):
    """All ensemble intensity decayed before the recording window."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class SamplingError(CavphaseError, ValueError):
    """Boundary wave data undersampled for the requested transform."""
