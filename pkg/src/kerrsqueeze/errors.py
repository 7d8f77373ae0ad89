"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class KerrError(Exception):
    """Base class for all errors raised by kerrsqueeze."""


class KerrDomainError(KerrError, ValueError):
    """Input outside the domain of a formula (CLI exit code 2)."""


class PrecisionError(KerrError, ArithmeticError):
    """Precision-doubling check failed or working precision is unusable (exit code 3)."""


class HPOverflowError(PrecisionError, OverflowError):
    """Real part of an exponent beyond the supported exponent range."""


class BracketError(KerrError, RuntimeError):
    """Golden-section bracket could not be established."""


class OracleMismatch(KerrError, AssertionError):
    """Fock-space oracle disagrees with the closed form (exit code 4)."""
