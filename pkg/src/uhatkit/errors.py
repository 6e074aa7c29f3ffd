"""Exception hierarchy shared by all uhatkit modules."""

from __future__ import annotations


class UhatkitError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(UhatkitError):
    """Vector or matrix widths do not line up."""


class ParseError(UhatkitError):
    """Syntax error in a textual model, with source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class ScopeError(UhatkitError):
    """A program references an undefined name, redefines one, or uses a
    position variable where it is not allowed."""


class EvaluationError(UhatkitError):
    """A word cannot be evaluated against a model."""


class EmptyWordError(EvaluationError):
    """Models in this package are only defined on nonempty words."""


class UnknownSymbolError(EvaluationError):
    """A word symbol (or formula atom) is outside the declared alphabet."""


class ModelError(UhatkitError):
    """A structurally invalid model (bad widths, bad tags, bad file)."""


class TranslationError(UhatkitError):
    """A model cannot be translated to the requested target."""


class UnsupportedScoreError(TranslationError):
    """An attention score predicate falls outside the translatable class."""

    def __init__(self, name: str, reason: str):
        self.name = name
        super().__init__(f"attention op {name!r}: {reason}")


class ReachabilityCapError(UhatkitError):
    """A reachable value set exceeded the configured cap."""

    def __init__(self, layer: int, size: int, cap: int):
        self.layer = layer
        self.size = size
        self.cap = cap
        super().__init__(
            f"reachable value set after layer {layer} has more than {cap} vectors "
            f"(at least {size}); raise the cap to continue"
        )


class AlphabetMismatchError(UhatkitError):
    """Two acceptors being compared declare different alphabets."""
