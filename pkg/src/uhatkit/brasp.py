"""B-RASP: straight-line Boolean programs with positional attention.

A program fixes an alphabet and defines a sequence of named Boolean
vectors over the positions of an input word. Initial vectors Q[a] mark
where each alphabet symbol occurs. Each definition is either

  * position-wise: a Boolean combination, at every position i, of vectors
    already defined at i; or
  * attention: scan the positions j allowed by a mask (all of them, j < i,
    or j > i) for those whose score predicate S(i, j) holds, pick the
    leftmost (min) or rightmost (max) such j, and output the value
    predicate V(i, j) there; when no j qualifies, output the default D(i).

The word is accepted when the designated output vector is 1 at the first
or last position. The interpreter packs each vector into an int bitmask
(bit i-1 = position i), which keeps the scan over candidate positions and
all Boolean combinations cheap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import (
    EmptyWordError,
    ParseError,
    ScopeError,
    UnknownSymbolError,
)

Word = tuple[str, ...]

_IDENT_RE = re.compile(r"[A-Za-z_]\w*")
_RESERVED = {"def", "attn", "min", "max", "default", "alphabet", "output",
             "first", "last", "Q", "i", "j"}


def initial_name(symbol: str) -> str:
    """Trace/reference key of the initial vector marking a symbol."""
    return f"Q[{symbol}]"


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class BoolExpr:
    """Node of a Boolean position predicate.

    kind: const | ref | not | and | or | implies | iff.
    const uses value; ref uses name and var ('i' or 'j'); the connectives
    use left (and right for the binary ones).
    """

    kind: str
    value: bool = False
    name: str = ""
    var: str = ""
    left: Optional["BoolExpr"] = None
    right: Optional["BoolExpr"] = None


B_TRUE = BoolExpr("const", value=True)
B_FALSE = BoolExpr("const", value=False)


def bconst(value: bool) -> BoolExpr:
    return B_TRUE if value else B_FALSE


def bref(name: str, var: str = "i") -> BoolExpr:
    assert var in ("i", "j")
    return BoolExpr("ref", name=name, var=var)


def bsym(symbol: str, var: str = "i") -> BoolExpr:
    return bref(initial_name(symbol), var)


def bnot(a: BoolExpr) -> BoolExpr:
    return BoolExpr("not", left=a)


def band(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return BoolExpr("and", left=a, right=b)


def bor(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return BoolExpr("or", left=a, right=b)


def bimplies(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return BoolExpr("implies", left=a, right=b)


def biff(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return BoolExpr("iff", left=a, right=b)


def ball(items: Iterable[BoolExpr]) -> BoolExpr:
    """Left-folded conjunction; the empty conjunction is 1."""
    items = list(items)
    if not items:
        return B_TRUE
    out = items[0]
    for x in items[1:]:
        out = band(out, x)
    return out


def bany(items: Iterable[BoolExpr]) -> BoolExpr:
    """Left-folded disjunction; the empty disjunction is 0."""
    items = list(items)
    if not items:
        return B_FALSE
    out = items[0]
    for x in items[1:]:
        out = bor(out, x)
    return out


def expr_refs(e: BoolExpr) -> list[tuple[str, str]]:
    """All (name, var) references in e, in syntactic order."""
    out: list[tuple[str, str]] = []
    stack = [e]
    while stack:
        x = stack.pop()
        if x.kind == "ref":
            out.append((x.name, x.var))
        if x.right is not None:
            stack.append(x.right)
        if x.left is not None:
            stack.append(x.left)
    return list(reversed(out))


# --- programs --------------------------------------------------------------

@dataclass(frozen=True)
class PositionwiseOp:
    expr: BoolExpr


@dataclass(frozen=True)
class AttentionOp:
    direction: str  # "min" (leftmost) or "max" (rightmost)
    mask: str       # "none", "future" (j < i), or "past" (j > i)
    score: BoolExpr
    value: BoolExpr
    default: BoolExpr


BraspOp = Union[PositionwiseOp, AttentionOp]


@dataclass(frozen=True)
class BraspDef:
    name: str
    op: BraspOp


@dataclass(frozen=True)
class BraspProgram:
    alphabet: tuple[str, ...]
    defs: tuple[BraspDef, ...]
    output: str
    output_position: str  # "first" or "last"

    def def_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.defs)


def check_program(p: BraspProgram) -> None:
    """Raise ScopeError/ParseError unless p is well-formed: distinct
    identifier names, references only to earlier definitions, the j
    variable only inside attention scores and values."""
    if not p.alphabet:
        raise ScopeError("empty alphabet")
    if len(set(p.alphabet)) != len(p.alphabet):
        raise ScopeError("duplicate alphabet symbols")
    for s in p.alphabet:
        if not s or "'" in s or any(c.isspace() for c in s):
            raise ScopeError(f"bad alphabet symbol {s!r}")
    known = {initial_name(s) for s in p.alphabet}

    def check_expr(e: BoolExpr, where: str, allow_j: bool) -> None:
        for name, var in expr_refs(e):
            if name not in known:
                raise ScopeError(f"{where}: reference to undefined vector {name!r}")
            if var == "j" and not allow_j:
                raise ScopeError(f"{where}: variable j is not allowed here")

    for d in p.defs:
        if not _IDENT_RE.fullmatch(d.name) or d.name in _RESERVED:
            raise ScopeError(f"bad vector name {d.name!r}")
        if d.name in known:
            raise ScopeError(f"vector {d.name!r} defined twice")
        if isinstance(d.op, PositionwiseOp):
            check_expr(d.op.expr, d.name, allow_j=False)
        else:
            if d.op.direction not in ("min", "max"):
                raise ScopeError(f"{d.name}: bad direction {d.op.direction!r}")
            if d.op.mask not in ("none", "future", "past"):
                raise ScopeError(f"{d.name}: bad mask {d.op.mask!r}")
            check_expr(d.op.score, f"{d.name} score", allow_j=True)
            check_expr(d.op.value, f"{d.name} value", allow_j=True)
            check_expr(d.op.default, f"{d.name} default", allow_j=False)
        known.add(d.name)
    if p.output not in known:
        raise ScopeError(f"output vector {p.output!r} is not defined")
    if p.output_position not in ("first", "last"):
        raise ScopeError(f"bad output position {p.output_position!r}")


class ProgramBuilder:
    """Incremental construction with scope checking at each step."""

    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = tuple(alphabet)
        self.defs: list[BraspDef] = []

    def positionwise(self, name: str, expr: BoolExpr) -> BoolExpr:
        self.defs.append(BraspDef(name, PositionwiseOp(expr)))
        return bref(name)

    def attention(self, name: str, direction: str, mask: str, score: BoolExpr,
                  value: BoolExpr, default: BoolExpr) -> BoolExpr:
        self.defs.append(BraspDef(name, AttentionOp(direction, mask, score, value, default)))
        return bref(name)

    def build(self, output: str, output_position: str) -> BraspProgram:
        p = BraspProgram(self.alphabet, tuple(self.defs), output, output_position)
        check_program(p)
        return p


# --- interpreter -----------------------------------------------------------

# Compiled expressions are closures f(top, gi, gj) over int bitmasks: top is
# the all-ones mask of the evaluation domain (a single bit when evaluating at
# one position), gi/gj map vector names to operand masks.

_Compiled = Callable[[int, Callable[[str], int], Callable[[str], int]], int]


def _compile_expr(e: BoolExpr) -> _Compiled:
    k = e.kind
    if k == "const":
        if e.value:
            return lambda top, gi, gj: top
        return lambda top, gi, gj: 0
    if k == "ref":
        nm = e.name
        if e.var == "i":
            return lambda top, gi, gj: gi(nm)
        return lambda top, gi, gj: gj(nm)
    if k == "not":
        f = _compile_expr(e.left)
        return lambda top, gi, gj: top ^ f(top, gi, gj)
    fl = _compile_expr(e.left)
    fr = _compile_expr(e.right)
    if k == "and":
        return lambda top, gi, gj: fl(top, gi, gj) & fr(top, gi, gj)
    if k == "or":
        return lambda top, gi, gj: fl(top, gi, gj) | fr(top, gi, gj)
    if k == "implies":
        return lambda top, gi, gj: (top ^ fl(top, gi, gj)) | fr(top, gi, gj)
    if k == "iff":
        return lambda top, gi, gj: top ^ fl(top, gi, gj) ^ fr(top, gi, gj)
    raise AssertionError(f"unknown expr kind {k}")


@dataclass
class BraspTrace:
    """Every vector of one run, in definition order, as per-position bools."""

    word: Word
    vectors: dict[str, tuple[bool, ...]]


class BraspRunner:
    """A validated program compiled once and applied to many words."""

    def __init__(self, program: BraspProgram):
        check_program(program)
        self.program = program
        self._steps: list[tuple] = []
        for d in program.defs:
            if isinstance(d.op, PositionwiseOp):
                self._steps.append((d.name, None, (_compile_expr(d.op.expr),)))
            else:
                score_uses_i = any(var == "i" for _, var in expr_refs(d.op.score))
                self._steps.append((
                    d.name,
                    d.op,
                    (_compile_expr(d.op.score), _compile_expr(d.op.value),
                     _compile_expr(d.op.default), score_uses_i),
                ))

    def masks(self, word: Sequence[str]) -> dict[str, int]:
        word = tuple(word)
        n = len(word)
        if n == 0:
            raise EmptyWordError("B-RASP programs run on nonempty words")
        full = (1 << n) - 1
        vals: dict[str, int] = {}
        for sym in self.program.alphabet:
            vals[initial_name(sym)] = 0
        for i, sym in enumerate(word):
            key = initial_name(sym)
            if key not in vals:
                raise UnknownSymbolError(f"symbol {sym!r} at position {i + 1} is not in the alphabet")
            vals[key] |= 1 << i

        get = vals.__getitem__
        for name, op, comp in self._steps:
            if op is None:
                vals[name] = comp[0](full, get, None)
                continue
            fscore, fvalue, fdefault, score_uses_i = comp
            # With no i references the score mask is shared by every query
            # position; compute it once per word.
            shared_score = None if score_uses_i else fscore(full, None, get)
            rightmost = op.direction == "max"
            mask_kind = op.mask
            out = 0
            for i in range(n):
                if mask_kind == "future":
                    allowed = (1 << i) - 1
                elif mask_kind == "past":
                    allowed = full ^ ((1 << (i + 1)) - 1)
                else:
                    allowed = full
                if shared_score is not None:
                    cand = shared_score & allowed
                else:
                    bit_i = 1 << i
                    gi_vec = lambda nm, b=bit_i: full if vals[nm] & b else 0
                    cand = fscore(full, gi_vec, get) & allowed
                gi_bit = lambda nm, b=1 << i: 1 if vals[nm] & b else 0
                if cand:
                    j = cand.bit_length() - 1 if rightmost else (cand & -cand).bit_length() - 1
                    gj_bit = lambda nm, b=1 << j: 1 if vals[nm] & b else 0
                    bit = fvalue(1, gi_bit, gj_bit)
                else:
                    bit = fdefault(1, gi_bit, None)
                out |= bit << i
            vals[name] = out
        return vals

    def trace(self, word: Sequence[str]) -> BraspTrace:
        word = tuple(word)
        vals = self.masks(word)
        n = len(word)
        return BraspTrace(word, {
            name: tuple(bool(m >> i & 1) for i in range(n)) for name, m in vals.items()
        })

    def accepts(self, word: Sequence[str]) -> bool:
        word = tuple(word)
        vals = self.masks(word)
        pos = 0 if self.program.output_position == "first" else len(word) - 1
        return bool(vals[self.program.output] >> pos & 1)


def eval_brasp(program: BraspProgram, word: Sequence[str]) -> BraspTrace:
    """Run the program; the trace lists every vector including the Q[a]."""
    return BraspRunner(program).trace(word)


def brasp_accepts(program: BraspProgram, word: Sequence[str]) -> bool:
    return BraspRunner(program).accepts(word)


# --- concrete syntax -------------------------------------------------------
#
#   alphabet: 'a' 'b' '#'
#   output: Y last
#   def N(i) = <expr>
#   def N(i) = attn min|max j [ * | <expr> ] <expr> default <expr>
#
# Masks: * (none), j<i (strict future), j>i (strict past). Atoms: 0, 1,
# Q['a'](i|j), Name(i|j). Operator precedence, tightest first:
# !, &, |, -> (right-associative), <-> (left-associative).

_EXPR_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow><->|->)|(?P<punct>[()\[\]=|&!<>*])|(?P<quoted>'[^']*')|(?P<word>[A-Za-z0-9_]+))"
)


class _Tok:
    __slots__ = ("text", "column")

    def __init__(self, text: str, column: int):
        self.text = text
        self.column = column


def _tokenize(text: str, line: int, column_offset: int = 0) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _EXPR_TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            col = column_offset + text.index(rest[0], pos) + 1
            raise ParseError(f"unexpected character {rest[0]!r}", line, col)
        toks.append(_Tok(m.group(m.lastgroup), column_offset + m.start(m.lastgroup) + 1))
        pos = m.end()
    return toks


class _ExprParser:
    def __init__(self, toks: list[_Tok], line: int):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self) -> Optional[str]:
        return self.toks[self.i].text if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of line", self.line)
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", self.line, t.column)
        return t

    def at_end(self) -> bool:
        return self.i == len(self.toks)

    def expr(self) -> BoolExpr:
        return self.iff_level()

    def iff_level(self) -> BoolExpr:
        f = self.impl_level()
        while self.peek() == "<->":
            self.next()
            f = biff(f, self.impl_level())
        return f

    def impl_level(self) -> BoolExpr:
        f = self.or_level()
        if self.peek() == "->":
            self.next()
            return bimplies(f, self.impl_level())
        return f

    def or_level(self) -> BoolExpr:
        f = self.and_level()
        while self.peek() == "|":
            self.next()
            f = bor(f, self.and_level())
        return f

    def and_level(self) -> BoolExpr:
        f = self.unary_level()
        while self.peek() == "&":
            self.next()
            f = band(f, self.unary_level())
        return f

    def unary_level(self) -> BoolExpr:
        if self.peek() == "!":
            self.next()
            return bnot(self.unary_level())
        return self.atom_level()

    def _position_var(self) -> str:
        t = self.next()
        if t.text not in ("i", "j"):
            raise ParseError(f"expected position variable i or j, found {t.text!r}",
                             self.line, t.column)
        return t.text

    def atom_level(self) -> BoolExpr:
        t = self.next()
        if t.text == "(":
            f = self.expr()
            self.expect(")")
            return f
        if t.text == "0":
            return B_FALSE
        if t.text == "1":
            return B_TRUE
        if t.text == "Q":
            self.expect("[")
            s = self.next()
            sym = s.text[1:-1] if s.text.startswith("'") else s.text
            if not sym:
                raise ParseError("empty symbol in Q[...]", self.line, s.column)
            self.expect("]")
            self.expect("(")
            var = self._position_var()
            self.expect(")")
            return bref(initial_name(sym), var)
        if _IDENT_RE.fullmatch(t.text) and t.text not in _RESERVED:
            self.expect("(")
            var = self._position_var()
            self.expect(")")
            return bref(t.text, var)
        raise ParseError(f"unexpected token {t.text!r}", self.line, t.column)


_DEF_RE = re.compile(r"\s*def\s+([A-Za-z_]\w*)\s*\(\s*i\s*\)\s*=\s*")


def _parse_mask(p: _ExprParser) -> str:
    t = p.next()
    if t.text == "*":
        return "none"
    if t.text == "j":
        op = p.next()
        p.expect("i")
        if op.text == "<":
            return "future"
        if op.text == ">":
            return "past"
        raise ParseError(f"bad mask operator {op.text!r}", p.line, op.column)
    raise ParseError(f"expected mask (*, j<i, or j>i), found {t.text!r}", p.line, t.column)


def parse_brasp(text: str) -> BraspProgram:
    """Parse and validate a program in the line-oriented syntax above."""
    alphabet: Optional[tuple[str, ...]] = None
    output: Optional[tuple[str, str]] = None
    defs: list[BraspDef] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("alphabet:"):
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", lineno)
            syms = []
            for tok in re.findall(r"'[^']*'|\S+", line[len("alphabet:"):]):
                syms.append(tok[1:-1] if tok.startswith("'") else tok)
            alphabet = tuple(syms)
            continue
        if line.startswith("output:"):
            if output is not None:
                raise ParseError("duplicate output line", lineno)
            parts = line[len("output:"):].split()
            if len(parts) != 2 or parts[1] not in ("first", "last"):
                raise ParseError("output line must be 'output: <name> first|last'", lineno)
            output = (parts[0], parts[1])
            continue
        m = _DEF_RE.match(raw)
        if m is None:
            raise ParseError(f"cannot parse line {line!r}", lineno)
        name = m.group(1)
        p = _ExprParser(_tokenize(raw[m.end():], lineno, column_offset=m.end()), lineno)
        if p.peek() == "attn":
            p.next()
            d = p.next()
            if d.text not in ("min", "max"):
                raise ParseError(f"expected min or max, found {d.text!r}", lineno, d.column)
            p.expect("j")
            p.expect("[")
            mask = _parse_mask(p)
            p.expect("|")
            score = p.expr()
            p.expect("]")
            value = p.expr()
            p.expect("default")
            default = p.expr()
            if not p.at_end():
                t = p.toks[p.i]
                raise ParseError(f"trailing input {t.text!r}", lineno, t.column)
            defs.append(BraspDef(name, AttentionOp(d.text, mask, score, value, default)))
        else:
            expr = p.expr()
            if not p.at_end():
                t = p.toks[p.i]
                raise ParseError(f"trailing input {t.text!r}", lineno, t.column)
            defs.append(BraspDef(name, PositionwiseOp(expr)))
    if alphabet is None:
        raise ParseError("missing alphabet line")
    if output is None:
        raise ParseError("missing output line")
    program = BraspProgram(alphabet, tuple(defs), output[0], output[1])
    check_program(program)
    return program


_EXPR_PREC = {"iff": 0, "implies": 1, "or": 2, "and": 3, "not": 4}
_EXPR_OP = {"iff": " <-> ", "implies": " -> ", "or": " | ", "and": " & "}

_INITIAL_REF_RE = re.compile(r"Q\[(.*)\]\Z")


def format_expr(e: BoolExpr) -> str:
    def go(f: BoolExpr, parent: int) -> str:
        if f.kind == "const":
            return "1" if f.value else "0"
        if f.kind == "ref":
            m = _INITIAL_REF_RE.fullmatch(f.name)
            if m is not None:
                return f"Q['{m.group(1)}']({f.var})"
            return f"{f.name}({f.var})"
        if f.kind == "not":
            return "!" + go(f.left, _EXPR_PREC["not"])
        prec = _EXPR_PREC[f.kind]
        if f.kind == "implies":
            s = go(f.left, prec + 1) + _EXPR_OP[f.kind] + go(f.right, prec)
        else:
            s = go(f.left, prec) + _EXPR_OP[f.kind] + go(f.right, prec + 1)
        return f"({s})" if prec < parent else s

    return go(e, 0)


_MASK_TEXT = {"none": "*", "future": "j<i", "past": "j>i"}


def format_brasp(p: BraspProgram) -> str:
    """Emit the concrete syntax; parse_brasp(format_brasp(p)) == p."""
    lines = ["alphabet: " + " ".join(f"'{s}'" for s in p.alphabet),
             f"output: {p.output} {p.output_position}"]
    for d in p.defs:
        if isinstance(d.op, PositionwiseOp):
            lines.append(f"def {d.name}(i) = {format_expr(d.op.expr)}")
        else:
            o = d.op
            lines.append(
                f"def {d.name}(i) = attn {o.direction} j [ {_MASK_TEXT[o.mask]} | "
                f"{format_expr(o.score)} ] {format_expr(o.value)} default {format_expr(o.default)}"
            )
    return "\n".join(lines) + "\n"
