"""Corridor tilings with 2^n columns, their word encodings, and compilers
from tiling questions to B-RASP acceptors.

A tile is a quadruple of edge colors <left, up, right, down>. An instance
asks for m > 0 rows over 2^n columns such that the grid's outer border is
colored 0 (bottom/top rows have down/up = 0, first/last columns have
left/right = 0), adjacent edges match horizontally and vertically, and a
designated final tile sits in the top-right cell.

A grid is spelled as a word row by row (bottom row first); every cell
becomes one block: the column index i-1 in n binary digits (most
significant first), the tile's name, then '#'. compile_tiling_to_brasp
emits a program that accepts exactly the encodings of valid grids, so
bounded emptiness search on the program is a witness search for the
instance.

make_h_chain builds the 1-row variant: blocks carry plain symbols and the
program additionally checks that consecutive symbols form allowed pairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Optional, Sequence

from .brasp import (
    BoolExpr,
    BraspProgram,
    ProgramBuilder,
    ball,
    band,
    bany,
    bconst,
    biff,
    bimplies,
    bnot,
    bor,
    bref,
    bsym,
)
from .errors import DimensionError, ParseError, UhatkitError, UnknownSymbolError

Word = tuple[str, ...]

_NAME_RE = re.compile(r"[A-Za-z_]\w*")

# 2^n blocks per row; anything beyond this is out of scope for an
# explicit-word toolkit.
MAX_COLUMN_EXPONENT = 14

BITS = ("0", "1")
HASH = "#"


@dataclass(frozen=True)
class Tile:
    left: int
    up: int
    right: int
    down: int

    def __post_init__(self):
        for c in (self.left, self.up, self.right, self.down):
            if not isinstance(c, int) or c < 0:
                raise UhatkitError(f"edge colors must be nonnegative ints, got {c!r}")


@dataclass(frozen=True)
class TilingInstance:
    n: int
    tiles: tuple[tuple[str, Tile], ...]  # (name, tile), order is significant
    final: str

    def __post_init__(self):
        if not 1 <= self.n <= MAX_COLUMN_EXPONENT:
            raise UhatkitError(f"n must be in 1..{MAX_COLUMN_EXPONENT}, got {self.n}")
        names = [name for name, _ in self.tiles]
        if not names:
            raise UhatkitError("an instance needs at least one tile")
        if len(set(names)) != len(names):
            raise UhatkitError("duplicate tile names")
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise UhatkitError(f"tile names must be identifiers, got {name!r}")
        if self.final not in names:
            raise UhatkitError(f"final tile {self.final!r} is not in the tile set")

    @property
    def width(self) -> int:
        return 2 ** self.n

    @cached_property
    def by_name(self) -> dict[str, Tile]:
        return dict(self.tiles)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.tiles)


@dataclass(frozen=True)
class TilingGrid:
    """rows[j-1][i-1] is the tile name in column i of row j; row 1 is the
    bottom row, so the final tile of a solution sits at rows[-1][-1]."""

    rows: tuple[tuple[str, ...], ...]

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0


def _check_grid_shape(instance: TilingInstance, grid: TilingGrid) -> None:
    if grid.m < 1:
        raise DimensionError("a grid needs at least one row")
    if any(len(row) != instance.width for row in grid.rows):
        raise DimensionError(f"every row must have {instance.width} cells")
    known = instance.by_name
    for row in grid.rows:
        for name in row:
            if name not in known:
                raise UnknownSymbolError(f"unknown tile {name!r} in grid")


def verify_tiling(instance: TilingInstance, grid: TilingGrid) -> bool:
    """Check the five conditions: final tile in the top-right cell, 0-colored
    bottom/top and left/right borders, horizontal and vertical matching."""
    _check_grid_shape(instance, grid)
    tiles = instance.by_name
    rows, m, w = grid.rows, grid.m, instance.width
    if rows[m - 1][w - 1] != instance.final:
        return False
    for i in range(w):
        if tiles[rows[0][i]].down != 0 or tiles[rows[m - 1][i]].up != 0:
            return False
    for j in range(m):
        if tiles[rows[j][0]].left != 0 or tiles[rows[j][w - 1]].right != 0:
            return False
    for j in range(m):
        for i in range(w - 1):
            if tiles[rows[j][i]].right != tiles[rows[j][i + 1]].left:
                return False
    for j in range(m - 1):
        for i in range(w):
            if tiles[rows[j][i]].up != tiles[rows[j + 1][i]].down:
                return False
    return True


def _counter_bits(value: int, n: int) -> tuple[str, ...]:
    return tuple(format(value, f"0{n}b"))


def encode_grid(instance: TilingInstance, grid: TilingGrid) -> Word:
    """Row-major word: per cell, n counter bits (column - 1, most significant
    first), the tile name, then '#'."""
    _check_grid_shape(instance, grid)
    out: list[str] = []
    for row in grid.rows:
        for col, name in enumerate(row):
            out.extend(_counter_bits(col, instance.n))
            out.append(name)
            out.append(HASH)
    return tuple(out)


def decode_encoding(instance: TilingInstance, word: Sequence[str]) -> Optional[TilingGrid]:
    """Inverse of encode_grid; None when the word is not a well-formed
    encoding (the grid itself is not checked against the conditions)."""
    word = tuple(word)
    n = instance.n
    block = n + 2
    width = instance.width
    if not word or len(word) % block:
        return None
    blocks = len(word) // block
    if blocks % width:
        return None
    names = set(instance.names())
    cells: list[str] = []
    for b in range(blocks):
        seg = word[b * block:(b + 1) * block]
        bits, name, mark = seg[:n], seg[n], seg[n + 1]
        if any(c not in BITS for c in bits) or name not in names or mark != HASH:
            return None
        if tuple(bits) != _counter_bits(b % width, n):
            return None
        cells.append(name)
    rows = tuple(tuple(cells[j * width:(j + 1) * width]) for j in range(blocks // width))
    return TilingGrid(rows)


def search_tiling(instance: TilingInstance, max_rows: int) -> Optional[TilingGrid]:
    """Smallest-m solution with at most max_rows rows, ties broken by trying
    tiles in instance order (first found in that order wins), or None."""
    width = instance.width
    names = instance.names()
    tiles = instance.by_name
    for m in range(1, max_rows + 1):
        total = width * m
        cells: list[Optional[str]] = [None] * total
        nxt = [0] * total

        def fits(idx: int, name: str) -> bool:
            t = tiles[name]
            row, col = divmod(idx, width)
            if col == 0:
                if t.left != 0:
                    return False
            elif tiles[cells[idx - 1]].right != t.left:
                return False
            if col == width - 1 and t.right != 0:
                return False
            if row == 0:
                if t.down != 0:
                    return False
            elif tiles[cells[idx - width]].up != t.down:
                return False
            if row == m - 1 and t.up != 0:
                return False
            if idx == total - 1 and name != instance.final:
                return False
            return True

        idx = 0
        while idx >= 0:
            if idx == total:
                rows = tuple(tuple(cells[j * width:(j + 1) * width]) for j in range(m))
                return TilingGrid(rows)
            placed = False
            c = nxt[idx]
            while c < len(names):
                if fits(idx, names[c]):
                    cells[idx] = names[c]
                    nxt[idx] = c + 1
                    placed = True
                    break
                c += 1
            if placed:
                idx += 1
                if idx < total:
                    nxt[idx] = 0
            else:
                nxt[idx] = 0
                cells[idx] = None
                idx -= 1
    return None


# --- compilation to B-RASP ---------------------------------------------------

def _tile_at_i(names: Sequence[str]) -> BoolExpr:
    return bany([bsym(t, "i") for t in names])


def _tile_at_j(names: Sequence[str]) -> BoolExpr:
    return bany([bsym(t, "j") for t in names])


def _counter_defs(b: ProgramBuilder, n: int) -> list[str]:
    """C1..Cn: at a '#' position, Ck is the k-th counter bit of its own
    block, counted from the least significant bit. Ck looks back to the
    rightmost bit position, which for k > 1 carries C(k-1) of the bit one
    step further left."""
    bit_at_j = bor(bsym("0", "j"), bsym("1", "j"))
    b.attention("C1", "max", "future", bit_at_j, bsym("1", "j"), bconst(False))
    for k in range(2, n + 1):
        b.attention(f"C{k}", "max", "future", bit_at_j, bref(f"C{k-1}", "j"), bconst(False))
    return [f"C{k}" for k in range(1, n + 1)]


def _format_defs(b: ProgramBuilder, n: int, tile_names: Sequence[str]) -> None:
    """A(i): every position up to i reads like (bits^n tile '#')*; A at the
    last position accepts exactly the block format."""
    one = bconst(True)
    b.attention("A_T", "max", "future", one, _tile_at_j(tile_names), bconst(False))
    bit_at_j = bor(bsym("0", "j"), bsym("1", "j"))
    b.attention("A_C1", "max", "future", one, bit_at_j, bconst(False))
    for k in range(2, n + 1):
        b.attention(f"A_C{k}", "max", "future", one, bref(f"A_C{k-1}", "j"), bconst(False))
    b.attention("A_H1", "max", "future", one, bsym(HASH, "j"), bconst(True))
    for k in range(2, n + 2):
        b.attention(f"A_H{k}", "max", "future", one, bref(f"A_H{k-1}", "j"), bconst(True))
    b.positionwise("A_enc", band(
        bimplies(bsym(HASH, "i"), bref("A_T", "i")),
        bimplies(
            _tile_at_i(tile_names),
            band(ball([bref(f"A_C{k}", "i") for k in range(1, n + 1)]),
                 bref(f"A_H{n+1}", "i")),
        ),
    ))
    b.attention("A", "max", "future", bnot(bref("A_enc", "j")), bconst(False), bref("A_enc", "i"))


def _counter_step_defs(b: ProgramBuilder, n: int, wrap: bool) -> None:
    """C_inc: this block's counter is the previous block's plus one; with
    wrap also C_wrap (all-ones to all-zeros step, and pinned to zero on the
    first block) and the aggregate C requiring one of the two everywhere."""
    hash_at_j = bsym(HASH, "j")
    arms = []
    for k in range(1, n + 1):
        parts = [band(bnot(bref(f"C{r}", "i")), bref(f"C{r}", "j")) for r in range(1, k)]
        parts.append(bref(f"C{k}", "i"))
        parts.append(bnot(bref(f"C{k}", "j")))
        parts.extend(biff_pair(f"C{r}") for r in range(k + 1, n + 1))
        arms.append(ball(parts))
    inc_value = bany(arms)
    if not wrap:
        # One-row chains have no wraparound; the first block is pinned to
        # counter zero separately, so a missing predecessor defaults to 1.
        b.attention("C_inc", "max", "future", hash_at_j, inc_value, bconst(True))
        return
    b.attention("C_inc", "max", "future", hash_at_j, inc_value, bconst(False))
    all_zero_i = ball([bnot(bref(f"C{k}", "i")) for k in range(1, n + 1)])
    b.attention("C_wrap", "max", "future", hash_at_j,
                ball([band(bnot(bref(f"C{k}", "i")), bref(f"C{k}", "j"))
                      for k in range(1, n + 1)]),
                all_zero_i)
    # Aggregate default: each '#' needs C_wrap or C_inc. Requiring both at
    # once would be unsatisfiable at the last block, whose counter is all
    # ones; the score side already tests the negated disjunction.
    b.attention("C", "max", "future",
                band(hash_at_j, band(bnot(bref("C_wrap", "j")), bnot(bref("C_inc", "j")))),
                bconst(False),
                bor(bref("C_wrap", "i"), bref("C_inc", "i")))


def biff_pair(name: str) -> BoolExpr:
    return biff(bref(name, "i"), bref(name, "j"))


def compile_tiling_to_brasp(instance: TilingInstance) -> BraspProgram:
    """A program over {'0','1','#'} + tile names accepting exactly the
    encodings of grids that satisfy the instance."""
    n = instance.n
    names = instance.names()
    tiles = instance.by_name
    b = ProgramBuilder((*BITS, HASH, *names))
    hash_at_i = bsym(HASH, "i")
    hash_at_j = bsym(HASH, "j")

    _format_defs(b, n, names)
    _counter_defs(b, n)
    _counter_step_defs(b, n, wrap=True)

    for t in names:
        b.attention(f"B_{t}", "max", "future", _tile_at_j(names), bsym(t, "j"), bconst(False))

    def recent_tile_any(pred: Callable[[Tile], bool], var: str) -> BoolExpr:
        return bany([bref(f"B_{t}", var) for t in names if pred(tiles[t])])

    all_ones_i = ball([bref(f"C{k}", "i") for k in range(1, n + 1)])
    all_zero_i = ball([bnot(bref(f"C{k}", "i")) for k in range(1, n + 1)])
    same_counter = ball([biff_pair(f"C{k}") for k in range(1, n + 1)])

    b.positionwise("F", ball([hash_at_i, bref(f"B_{instance.final}", "i"), all_ones_i]))

    b.attention("E_bot", "max", "future", band(hash_at_j, same_counter),
                bconst(True), recent_tile_any(lambda t: t.down == 0, "i"))
    b.attention("E_top", "max", "future",
                band(hash_at_j, bor(recent_tile_any(lambda t: t.up != 0, "j"),
                                    ball([bnot(bref(f"C{k}", "j")) for k in range(1, n + 1)]))),
                band(recent_tile_any(lambda t: t.up == 0, "j"),
                     recent_tile_any(lambda t: t.up == 0, "i")),
                bconst(False))
    b.positionwise("E_left", bimplies(all_zero_i, recent_tile_any(lambda t: t.left == 0, "i")))
    b.positionwise("E_right", bimplies(all_ones_i, recent_tile_any(lambda t: t.right == 0, "i")))
    b.attention("E", "max", "future",
                band(hash_at_j, bnot(ball([bref("E_bot", "j"), bref("E_left", "j"),
                                           bref("E_right", "j")]))),
                bconst(False),
                ball([bref("E_bot", "i"), bref("E_top", "i"),
                      bref("E_left", "i"), bref("E_right", "i")]))

    def matching_pairs(match: Callable[[Tile, Tile], bool]) -> BoolExpr:
        return bany([band(bref(f"B_{t}", "i"), bref(f"B_{u}", "j"))
                     for t in names for u in names if match(tiles[t], tiles[u])])

    b.attention("M_down", "max", "future", band(hash_at_j, same_counter),
                matching_pairs(lambda t, u: t.down == u.up), bconst(True))
    b.attention("M_left", "max", "future", hash_at_j,
                bimplies(bany([bref(f"C{k}", "i") for k in range(1, n + 1)]),
                         matching_pairs(lambda t, u: t.left == u.right)),
                bconst(True))
    b.attention("M", "max", "future",
                band(hash_at_j, bnot(band(bref("M_down", "j"), bref("M_left", "j")))),
                bconst(False),
                band(bref("M_down", "i"), bref("M_left", "i")))

    b.positionwise("Y", ball([bref("A", "i"), bref("C", "i"), bref("F", "i"),
                              bref("E", "i"), bref("M", "i")]))
    return b.build("Y", "last")


# --- one-row chains ----------------------------------------------------------

@dataclass(frozen=True)
class HChainSpec:
    """2^n plain symbols in counter-indexed blocks; every consecutive symbol
    pair must belong to pairs."""

    n: int
    symbols: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_COLUMN_EXPONENT:
            raise UhatkitError(f"n must be in 1..{MAX_COLUMN_EXPONENT}, got {self.n}")
        if not self.symbols or len(set(self.symbols)) != len(self.symbols):
            raise UhatkitError("chain symbols must be nonempty and distinct")
        for s in self.symbols:
            if not _NAME_RE.fullmatch(s):
                raise UhatkitError(f"chain symbols must be identifiers, got {s!r}")
        for pair in self.pairs:
            if len(pair) != 2 or pair[0] not in self.symbols or pair[1] not in self.symbols:
                raise UhatkitError(f"pair {pair!r} uses unknown symbols")


DEFAULT_CHAIN_SYMBOLS = ("a", "b", "c")
DEFAULT_CHAIN_PAIRS = (("a", "b"), ("b", "c"), ("b", "a"), ("c", "b"))


def default_hchain(n: int) -> HChainSpec:
    return HChainSpec(n, DEFAULT_CHAIN_SYMBOLS, DEFAULT_CHAIN_PAIRS)


def chain_word(spec: HChainSpec, seq: Sequence[str]) -> Word:
    """Encode a symbol sequence of length 2^n into its block word."""
    if len(seq) != 2 ** spec.n:
        raise DimensionError(f"need exactly {2 ** spec.n} symbols, got {len(seq)}")
    out: list[str] = []
    for idx, s in enumerate(seq):
        if s not in spec.symbols:
            raise UnknownSymbolError(f"unknown chain symbol {s!r}")
        out.extend(_counter_bits(idx, spec.n))
        out.append(s)
        out.append(HASH)
    return tuple(out)


def make_h_chain(spec: HChainSpec) -> tuple[BraspProgram, Callable[[], Iterator[Word]]]:
    """The chain acceptor and a generator of exactly its accepted words.

    The program checks block format, counters running 0 .. 2^n - 1 (pinned
    to zero at the first block, incrementing between blocks, ending all
    ones), and membership of every consecutive symbol pair in spec.pairs.
    The generator yields encodings of all pair-respecting sequences in
    lexicographic spec.symbols order.
    """
    n = spec.n
    b = ProgramBuilder((*BITS, HASH, *spec.symbols))
    hash_at_i = bsym(HASH, "i")
    hash_at_j = bsym(HASH, "j")

    _format_defs(b, n, spec.symbols)
    _counter_defs(b, n)
    _counter_step_defs(b, n, wrap=False)

    # The first '#' has no predecessor to increment from, so C_inc defaults
    # to 1 there; pin that block's counter to zero instead.
    b.attention("HasPrev", "max", "future", hash_at_j, bconst(True), bconst(False))
    all_zero_i = ball([bnot(bref(f"C{k}", "i")) for k in range(1, n + 1)])
    b.positionwise("StepOK", band(bref("C_inc", "i"),
                                  bor(bref("HasPrev", "i"), all_zero_i)))
    b.attention("CheckStep", "max", "future",
                band(hash_at_j, bnot(bref("StepOK", "j"))),
                bconst(False), bref("StepOK", "i"))

    sym_at_j = bany([bsym(s, "j") for s in spec.symbols])
    sym_at_i = bany([bsym(s, "i") for s in spec.symbols])
    b.attention("M_left", "max", "future", sym_at_j,
                bany([band(bsym(h, "j"), bsym(hh, "i")) for h, hh in spec.pairs]),
                bconst(True))
    b.attention("CheckPair", "max", "future",
                band(sym_at_j, bnot(bref("M_left", "j"))),
                bconst(False), bimplies(sym_at_i, bref("M_left", "i")))

    all_ones_i = ball([bref(f"C{k}", "i") for k in range(1, n + 1)])
    b.positionwise("F", band(hash_at_i, all_ones_i))
    b.positionwise("Y", ball([bref("A", "i"), bref("CheckStep", "i"),
                              bref("CheckPair", "i"), bref("F", "i")]))
    program = b.build("Y", "last")

    def words() -> Iterator[Word]:
        count = 2 ** n
        allowed = set(spec.pairs)

        def extend(prefix: list[str]) -> Iterator[Word]:
            if len(prefix) == count:
                yield chain_word(spec, prefix)
                return
            for s in spec.symbols:
                if not prefix or (prefix[-1], s) in allowed:
                    prefix.append(s)
                    yield from extend(prefix)
                    prefix.pop()

        yield from extend([])

    return program, words


# --- instance and grid files -------------------------------------------------
#
#   n: 2
#   tile wall 0 1 2 0
#   tile gap 2 0 0 1
#   final: gap
#
# Grid files hold one row of tile names per line, bottom row first.

def parse_tiles_file(text: str) -> TilingInstance:
    n: Optional[int] = None
    tiles: list[tuple[str, Tile]] = []
    final: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("n:"):
            if n is not None:
                raise ParseError("duplicate n line", lineno)
            try:
                n = int(line[2:].strip())
            except ValueError:
                raise ParseError(f"bad n value {line[2:].strip()!r}", lineno)
        elif line.startswith("tile "):
            parts = line.split()
            if len(parts) != 6:
                raise ParseError("tile lines are 'tile <name> <left> <up> <right> <down>'", lineno)
            try:
                colors = [int(x) for x in parts[2:]]
            except ValueError:
                raise ParseError(f"bad edge colors in {line!r}", lineno)
            tiles.append((parts[1], Tile(*colors)))
        elif line.startswith("final:"):
            if final is not None:
                raise ParseError("duplicate final line", lineno)
            final = line[len("final:"):].strip()
        else:
            raise ParseError(f"cannot parse line {line!r}", lineno)
    if n is None or final is None or not tiles:
        raise ParseError("instance file needs n, at least one tile, and final")
    try:
        return TilingInstance(n, tuple(tiles), final)
    except UhatkitError as exc:
        raise ParseError(str(exc)) from exc


def format_tiles_file(instance: TilingInstance) -> str:
    lines = [f"n: {instance.n}"]
    for name, t in instance.tiles:
        lines.append(f"tile {name} {t.left} {t.up} {t.right} {t.down}")
    lines.append(f"final: {instance.final}")
    return "\n".join(lines) + "\n"


def parse_grid_file(text: str) -> TilingGrid:
    rows = [tuple(line.split()) for line in text.splitlines() if line.strip()]
    if not rows:
        raise ParseError("empty grid file")
    if len({len(r) for r in rows}) != 1:
        raise ParseError("grid rows must all have the same number of cells")
    return TilingGrid(tuple(rows))


def format_grid_file(grid: TilingGrid) -> str:
    return "\n".join(" ".join(row) for row in grid.rows) + "\n"
