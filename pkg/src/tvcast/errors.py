"""Exception types raised across the conversion pipeline."""


class TvcastError(Exception):
    """Base class for all errors raised by tvcast."""


class MalformedXml(TvcastError, ValueError):
    pass


class MalformedBounds(TvcastError, ValueError):
    pass


class EmptyHierarchy(TvcastError, ValueError):
    pass


class DegenerateTreeWarning(UserWarning):
    """The root is narrower than the row width; the whole tree became one row."""


class EmptyPage(TvcastError, ValueError):
    pass


class MissingSizeEntry(TvcastError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing size entry"


class Infeasible(TvcastError):
    """Some item cannot be placed even alone on its row."""

    def __init__(self, message, item_ids=()):
        super().__init__(message)
        self.item_ids = list(item_ids)


class CannotFit(TvcastError):
    pass


class UnmappedCategory(TvcastError):
    pass


class DslSyntaxError(TvcastError, ValueError):
    """Raised by the DSL parser with a 1-based position and the expected tokens."""

    def __init__(self, message, line, column, expected=(), offset=0):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.offset = offset
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class DimensionMismatch(TvcastError, ValueError):
    pass


class ZeroLeaves(TvcastError, ValueError):
    pass


class EmptyJudgments(TvcastError, ValueError):
    pass


class PairingMismatch(TvcastError, ValueError):
    pass


class ConfigError(TvcastError):
    pass
