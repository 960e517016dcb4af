"""Exception taxonomy, aligned with the CLI exit-code contract."""


class WelschingerError(Exception):
    """Base class for all package errors."""


class ParseError(WelschingerError):
    """Malformed surface/class/vector text (CLI exit 2)."""


class ValidationError(WelschingerError):
    """Structurally valid input violating a precondition (CLI exit 3)."""


class CacheError(WelschingerError):
    """Cache file version/integrity problem (CLI exit 3)."""


class InternalCheckError(WelschingerError):
    """A derived identity failed at runtime; aborts the run (CLI exit 4)."""
