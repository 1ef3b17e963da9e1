"""Exception types shared across the package.

Every failure the library signals deliberately derives from FracsimError so
callers (and the CLI dispatcher) can map failures to exit codes without
catching bare Exception.
"""

from __future__ import annotations


class FracsimError(Exception):
    """Base class for all deliberate failures raised by this package."""


class ValidationError(FracsimError, ValueError):
    """Invalid argument or configuration value, detected before any run starts."""


class ConfigError(ValidationError):
    """Configuration file problem.

    Args:
        message: human-readable description.
        source: file path, if known.
        field: offending key, if known.
    """

    def __init__(self, message: str, *, source: str | None = None, field: str | None = None):
        prefix = ""
        if source is not None:
            prefix += f"{source}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)
        self.source = source
        self.field = field


class ExprError(ValidationError):
    """Expression text rejected by the parser.

    Args:
        message: what went wrong (syntax, unknown identifier, arity).
        source: the expression text.
        position: 0-based character offset of the offending token.
    """

    def __init__(self, message: str, *, source: str = "", position: int = 0):
        super().__init__(f"{message} (at position {position} in {source!r})")
        self.source = source
        self.position = position


class NonFiniteStateError(FracsimError, ArithmeticError):
    """A solver step produced NaN or infinity.

    The solve is aborted; ``last_valid_index`` is the largest step index whose
    state is finite, and ``t`` the corresponding grid time.
    """

    def __init__(self, last_valid_index: int, t: float, detail: str = ""):
        msg = f"non-finite state at step {last_valid_index + 1}; last valid step is {last_valid_index} (t={t:.17g})"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)
        self.last_valid_index = last_valid_index
        self.t = t


class UnsupportedPrecisionError(ValidationError):
    """Requested floating-point width not available; message names the fallback."""


class SweepRunError(FracsimError):
    """A sweep's solve aborted; carries the offending forcing amplitude."""

    def __init__(self, message: str, *, f: float):
        super().__init__(message)
        self.f = f
