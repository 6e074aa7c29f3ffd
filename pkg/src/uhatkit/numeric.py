"""Exact rational scalars, vectors, and affine maps.

Everything downstream (transformer simulation, translations, score
comparisons) is computed over arbitrary-precision rationals in canonical
form, so equality and ordering are exact and runs are reproducible
bit-for-bit. Scalars are `fractions.Fraction`, re-exported as `Rational`;
Fraction already keeps the reduced-form, positive-denominator invariant
this package relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

from .errors import DimensionError, ParseError

Rational = Fraction

RationalLike = Union[Rational, int, str]

_RATIONAL_RE = re.compile(r"(-?\d+)(?:/(\d+))?")


def rational(value: RationalLike) -> Rational:
    """Coerce an int, a 'p' or 'p/q' string, or a Rational to a Rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def parse_rational(text: str) -> Rational:
    """Parse the wire format: decimal 'p' or 'p/q', minus sign on p only."""
    m = _RATIONAL_RE.fullmatch(text)
    if m is None:
        raise ParseError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Rational) -> str:
    """Inverse of parse_rational; omits the denominator when it is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def bit_length(x: Rational) -> int:
    """Bits needed for the canonical form: the larger of the binary lengths
    of |numerator| and denominator. 0 has length 1 (its denominator is 1)."""
    return max(abs(x.numerator).bit_length(), x.denominator.bit_length())


@dataclass(frozen=True)
class RationalVector:
    """An immutable fixed-width vector of rationals."""

    entries: tuple[Rational, ...]

    @staticmethod
    def of(*values: RationalLike) -> "RationalVector":
        return RationalVector(tuple(rational(v) for v in values))

    @staticmethod
    def from_iter(values: Iterable[RationalLike]) -> "RationalVector":
        return RationalVector(tuple(rational(v) for v in values))

    @staticmethod
    def zero(width: int) -> "RationalVector":
        return RationalVector((Fraction(0),) * width)

    @property
    def width(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Rational:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def concat(self, other: "RationalVector") -> "RationalVector":
        return RationalVector(self.entries + other.entries)

    def __repr__(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.entries) + ")"


def rvec(values: Iterable[RationalLike]) -> RationalVector:
    """Shorthand constructor accepting ints, 'p/q' strings, or Rationals."""
    return RationalVector.from_iter(values)


def dot(u: RationalVector, v: RationalVector) -> Rational:
    if u.width != v.width:
        raise DimensionError(f"dot of widths {u.width} and {v.width}")
    return sum((a * b for a, b in zip(u.entries, v.entries)), Fraction(0))


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + bias over rationals. Row count = output width."""

    matrix: tuple[tuple[Rational, ...], ...]
    bias: RationalVector

    def __post_init__(self):
        if len(self.matrix) != self.bias.width:
            raise DimensionError(
                f"{len(self.matrix)} matrix rows but bias width {self.bias.width}"
            )
        if len(self.matrix) == 0:
            raise DimensionError("affine map needs at least one output row")
        w = len(self.matrix[0])
        if any(len(row) != w for row in self.matrix):
            raise DimensionError("ragged matrix rows")

    @staticmethod
    def from_rows(rows: Iterable[Iterable[RationalLike]], bias: Iterable[RationalLike]) -> "AffineMap":
        return AffineMap(
            tuple(tuple(rational(x) for x in row) for row in rows),
            RationalVector.from_iter(bias),
        )

    @staticmethod
    def identity(width: int) -> "AffineMap":
        rows = tuple(
            tuple(Fraction(1) if i == j else Fraction(0) for j in range(width))
            for i in range(width)
        )
        return AffineMap(rows, RationalVector.zero(width))

    @staticmethod
    def zero(out_width: int, in_width: int) -> "AffineMap":
        rows = tuple((Fraction(0),) * in_width for _ in range(out_width))
        return AffineMap(rows, RationalVector.zero(out_width))

    @property
    def in_width(self) -> int:
        return len(self.matrix[0])

    @property
    def out_width(self) -> int:
        return len(self.matrix)

    @cached_property
    def _sparse_rows(self) -> tuple[tuple[tuple[int, Rational], ...], ...]:
        # Cached nonzero (column, coefficient) pairs; models are mostly sparse
        # gadget rows, so application cost tracks the nonzero count.
        return tuple(
            tuple((j, c) for j, c in enumerate(row) if c)
            for row in self.matrix
        )


def affine_apply(m: AffineMap, x: RationalVector) -> RationalVector:
    if x.width != m.in_width:
        raise DimensionError(f"map of input width {m.in_width} applied to width {x.width}")
    xs = x.entries
    out = []
    for bias, row in zip(m.bias.entries, m._sparse_rows):
        acc = bias
        for j, c in row:
            acc += c * xs[j]
        out.append(acc)
    return RationalVector(tuple(out))
