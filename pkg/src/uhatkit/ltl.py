"""Linear temporal logic with strict Since/Until on finite nonempty words.

Formulas are immutable DAG nodes over the core connectives
true/false/atom/not/and/or/since/until. The sugared operators
(sometime-past P, sometime-future F, next X, always G) expand into the
core at construction time, so every consumer only sees core nodes.

Semantics at position i of w (positions are 1-based):
    Q_a(i)          w[i] = a
    phi1 S phi2     exists j < i with phi2 at j and phi1 at all k, j < k < i
    phi1 U phi2     exists j > i with phi2 at j and phi1 at all k, i < k < j
Both temporal operators are strict: they never look at position i itself,
and they are false when no earlier/later position exists.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Optional, Sequence

from .errors import EmptyWordError, EvaluationError, ParseError, UnknownSymbolError

Word = tuple[str, ...]

CORE_KINDS = ("true", "false", "atom", "not", "and", "or", "since", "until")


class LtlFormula:
    """One DAG node. Compare structurally; share subterms where possible."""

    __slots__ = ("kind", "symbol", "left", "right", "_hash")

    def __init__(self, kind: str, symbol: Optional[str] = None,
                 left: Optional["LtlFormula"] = None,
                 right: Optional["LtlFormula"] = None):
        assert kind in CORE_KINDS
        self.kind = kind
        self.symbol = symbol
        self.left = left
        self.right = right
        self._hash = hash((
            kind,
            symbol,
            left._hash if left is not None else 0,
            right._hash if right is not None else 1,
        ))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, LtlFormula):
            return NotImplemented
        # Iterative structural compare; formulas from translations nest too
        # deeply for recursion.
        stack = [(self, other)]
        while stack:
            x, y = stack.pop()
            if x is y:
                continue
            if x._hash != y._hash or x.kind != y.kind or x.symbol != y.symbol:
                return False
            for cx, cy in ((x.left, y.left), (x.right, y.right)):
                if (cx is None) != (cy is None):
                    return False
                if cx is not None:
                    stack.append((cx, cy))
        return True

    def __repr__(self) -> str:
        return f"LtlFormula<{format_ltl(self)}>"


TRUE = LtlFormula("true")
FALSE = LtlFormula("false")


def true_() -> LtlFormula:
    return TRUE


def false_() -> LtlFormula:
    return FALSE


def atom(symbol: str) -> LtlFormula:
    return LtlFormula("atom", symbol=symbol)


def not_(a: LtlFormula) -> LtlFormula:
    if a.kind == "true":
        return FALSE
    if a.kind == "false":
        return TRUE
    if a.kind == "not":
        return a.left
    return LtlFormula("not", left=a)


def and_(a: LtlFormula, b: LtlFormula) -> LtlFormula:
    if a.kind == "false" or b.kind == "false":
        return FALSE
    if a.kind == "true":
        return b
    if b.kind == "true":
        return a
    if a is b:
        return a
    return LtlFormula("and", left=a, right=b)


def or_(a: LtlFormula, b: LtlFormula) -> LtlFormula:
    if a.kind == "true" or b.kind == "true":
        return TRUE
    if a.kind == "false":
        return b
    if b.kind == "false":
        return a
    if a is b:
        return a
    return LtlFormula("or", left=a, right=b)


def implies(a: LtlFormula, b: LtlFormula) -> LtlFormula:
    return or_(not_(a), b)


def since(a: LtlFormula, b: LtlFormula) -> LtlFormula:
    if b.kind == "false":
        return FALSE
    return LtlFormula("since", left=a, right=b)


def until(a: LtlFormula, b: LtlFormula) -> LtlFormula:
    if b.kind == "false":
        return FALSE
    return LtlFormula("until", left=a, right=b)


def big_and(items: Iterable[LtlFormula]) -> LtlFormula:
    out = TRUE
    seen: set[LtlFormula] = set()
    for f in items:
        if f.kind == "false":
            return FALSE
        if f.kind == "true" or f in seen:
            continue
        seen.add(f)
        out = and_(out, f)
    return out


def big_or(items: Iterable[LtlFormula]) -> LtlFormula:
    out = FALSE
    seen: set[LtlFormula] = set()
    for f in items:
        if f.kind == "true":
            return TRUE
        if f.kind == "false" or f in seen:
            continue
        seen.add(f)
        out = or_(out, f)
    return out


# Sugar. Stored desugared, so the evaluator and all translations only
# handle the eight core kinds.

def sometime_past(a: LtlFormula) -> LtlFormula:
    """P a: a held at some strictly earlier position."""
    return since(TRUE, a)


def sometime_future(a: LtlFormula) -> LtlFormula:
    """F a: a holds at some strictly later position."""
    return until(TRUE, a)


def next_(a: LtlFormula) -> LtlFormula:
    """X a: a holds at the immediately following position."""
    return until(FALSE, a)


def always(a: LtlFormula) -> LtlFormula:
    """G a: a holds here and at every later position."""
    return and_(a, not_(sometime_future(not_(a))))


def subformulas(phi: LtlFormula) -> list[LtlFormula]:
    """Distinct DAG nodes of phi in bottom-up (children first) order."""
    order: list[LtlFormula] = []
    seen: set[int] = set()
    stack: list[tuple[LtlFormula, bool]] = [(phi, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        if node.right is not None:
            stack.append((node.right, False))
        if node.left is not None:
            stack.append((node.left, False))
    return order


def formula_size(phi: LtlFormula) -> int:
    """Number of distinct subterms (DAG nodes, not tree nodes)."""
    return len(subformulas(phi))


def atoms_of(phi: LtlFormula) -> set[str]:
    return {f.symbol for f in subformulas(phi) if f.kind == "atom"}


class LtlEvaluator:
    """Reusable bottom-up evaluator.

    Truth values of each subterm across all positions of a word are packed
    into one int bitmask (bit i-1 = position i), so Boolean connectives are
    single bitwise operations and Since/Until are short prefix/suffix loops.
    """

    def __init__(self, phi: LtlFormula):
        self.root = phi
        self.order = subformulas(phi)

    def bitmask(self, word: Sequence[str]) -> int:
        word = tuple(word)
        n = len(word)
        if n == 0:
            raise EmptyWordError("LTL formulas are evaluated on nonempty words")
        full = (1 << n) - 1
        masks: dict[int, int] = {}
        for node in self.order:
            kind = node.kind
            if kind == "true":
                m = full
            elif kind == "false":
                m = 0
            elif kind == "atom":
                m = 0
                sym = node.symbol
                for i, a in enumerate(word):
                    if a == sym:
                        m |= 1 << i
            elif kind == "not":
                m = full ^ masks[id(node.left)]
            elif kind == "and":
                m = masks[id(node.left)] & masks[id(node.right)]
            elif kind == "or":
                m = masks[id(node.left)] | masks[id(node.right)]
            elif kind == "since":
                f1, f2 = masks[id(node.left)], masks[id(node.right)]
                m = 0
                for i in range(1, n):
                    prev = 1 << (i - 1)
                    if f2 & prev or (f1 & prev and m & prev):
                        m |= 1 << i
            else:  # until
                f1, f2 = masks[id(node.left)], masks[id(node.right)]
                m = 0
                for i in range(n - 2, -1, -1):
                    nxt = 1 << (i + 1)
                    if f2 & nxt or (f1 & nxt and m & nxt):
                        m |= 1 << i
            masks[id(node)] = m
        return masks[id(self.root)]

    def table(self, word: Sequence[str]) -> tuple[bool, ...]:
        m = self.bitmask(word)
        return tuple(bool(m >> i & 1) for i in range(len(word)))

    def at(self, word: Sequence[str], position: int) -> bool:
        n = len(tuple(word))
        if not 1 <= position <= n:
            raise EvaluationError(f"position {position} outside 1..{n}")
        return bool(self.bitmask(word) >> (position - 1) & 1)

    def accepts(self, word: Sequence[str], output_position: str = "last") -> bool:
        word = tuple(word)
        if not word:
            raise EmptyWordError("acceptance is undefined on the empty word")
        k = 1 if output_position == "first" else len(word)
        return self.at(word, k)


def eval_ltl(phi: LtlFormula, word: Sequence[str], position: int) -> bool:
    """Truth of phi at a 1-based position of a nonempty word."""
    return LtlEvaluator(phi).at(word, position)


def ltl_accepts(phi: LtlFormula, word: Sequence[str], output_position: str = "last") -> bool:
    """Truth of phi at the output position (first or last) of the word."""
    return LtlEvaluator(phi).accepts(word, output_position)


def words_over(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """Nonempty words by length, then lexicographically in alphabet order."""
    for n in range(1, max_len + 1):
        for w in itertools.product(tuple(alphabet), repeat=n):
            yield w


def ltl_bounded_sat(phi: LtlFormula, alphabet: Sequence[str], max_len: int,
                    output_position: str = "last") -> Optional[Word]:
    """First word (length, then lex order) of length <= max_len accepted by
    phi at the output position, or None when no such word exists."""
    ev = LtlEvaluator(phi)
    for w in words_over(alphabet, max_len):
        if ev.accepts(w, output_position):
            return w
    return None


# ---------------------------------------------------------------------------
# Concrete syntax.
#
#   formula := temporal
#   temporal := impl (('S' | 'U') impl)*          left-associative, lowest
#   impl := disj ('->' impl)?                     right-associative
#   disj := conj ('|' conj)*
#   conj := unary ('&' unary)*
#   unary := ('!' | 'X' | 'F' | 'G' | 'P')* atom_expr
#   atom_expr := 'true' | 'false' | 'Q' '(' sym ')' | '(' formula ')'
#
# Symbols in Q(...) are bare words or single-quoted strings.

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<punct>[()!&|])|(?P<quoted>'[^']*')|(?P<word>[A-Za-z0-9_#]+))"
)

_UNARY = {"!", "X", "F", "G", "P"}


class _Tok:
    __slots__ = ("text", "column")

    def __init__(self, text: str, column: int):
        self.text = text
        self.column = column


def _tokenize_formula(text: str, line: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", line, pos + 1)
        toks.append(_Tok(m.group(m.lastgroup), m.start(m.lastgroup) + 1))
        pos = m.end()
    return toks


class _FormulaParser:
    def __init__(self, tokens: list[_Tok], alphabet: Optional[Sequence[str]], line: int):
        self.toks = tokens
        self.i = 0
        self.alphabet = None if alphabet is None else set(alphabet)
        self.line = line

    def peek(self) -> Optional[str]:
        return self.toks[self.i].text if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of formula", self.line)
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", self.line, t.column)

    def parse(self) -> LtlFormula:
        f = self.temporal()
        if self.i != len(self.toks):
            t = self.toks[self.i]
            raise ParseError(f"trailing input {t.text!r}", self.line, t.column)
        return f

    def temporal(self) -> LtlFormula:
        f = self.impl()
        while self.peek() in ("S", "U"):
            op = self.next().text
            g = self.impl()
            f = since(f, g) if op == "S" else until(f, g)
        return f

    def impl(self) -> LtlFormula:
        f = self.disj()
        if self.peek() == "->":
            self.next()
            return implies(f, self.impl())
        return f

    def disj(self) -> LtlFormula:
        f = self.conj()
        while self.peek() == "|":
            self.next()
            f = or_(f, self.conj())
        return f

    def conj(self) -> LtlFormula:
        f = self.unary()
        while self.peek() == "&":
            self.next()
            f = and_(f, self.unary())
        return f

    def unary(self) -> LtlFormula:
        t = self.peek()
        if t in _UNARY:
            self.next()
            inner = self.unary()
            if t == "!":
                return not_(inner)
            if t == "X":
                return next_(inner)
            if t == "F":
                return sometime_future(inner)
            if t == "G":
                return always(inner)
            return sometime_past(inner)
        return self.atom_expr()

    def atom_expr(self) -> LtlFormula:
        t = self.next()
        if t.text == "(":
            f = self.temporal()
            self.expect(")")
            return f
        if t.text == "true":
            return TRUE
        if t.text == "false":
            return FALSE
        if t.text == "Q":
            self.expect("(")
            s = self.next()
            sym = s.text[1:-1] if s.text.startswith("'") else s.text
            if not sym:
                raise ParseError("empty symbol in Q(...)", self.line, s.column)
            self.expect(")")
            if self.alphabet is not None and sym not in self.alphabet:
                raise UnknownSymbolError(
                    f"line {self.line}: symbol {sym!r} not in the declared alphabet"
                )
            return atom(sym)
        raise ParseError(f"unexpected token {t.text!r}", self.line, t.column)


def parse_ltl(text: str, alphabet: Optional[Sequence[str]] = None) -> LtlFormula:
    """Parse a formula; atoms are checked against alphabet when given."""
    toks = _tokenize_formula(text, line=1)
    if not toks:
        raise ParseError("empty formula", 1)
    return _FormulaParser(toks, alphabet, line=1).parse()


_BARE_SYM_RE = re.compile(r"[A-Za-z0-9_#]+")

# Larger binds tighter; used to decide where parentheses are needed.
_PREC = {"since": 0, "until": 0, "or": 2, "and": 3, "not": 4}


def _fmt_symbol(sym: str) -> str:
    if _BARE_SYM_RE.fullmatch(sym) and sym not in ("true", "false"):
        return sym
    return f"'{sym}'"


def format_ltl(phi: LtlFormula) -> str:
    """Concrete syntax for phi; parse_ltl(format_ltl(phi)) == phi."""
    def go(f: LtlFormula, parent: int) -> str:
        k = f.kind
        if k == "true":
            return "true"
        if k == "false":
            return "false"
        if k == "atom":
            return f"Q({_fmt_symbol(f.symbol)})"
        if k == "not":
            return "!" + go(f.left, _PREC["not"])
        prec = _PREC[k]
        op = {"and": " & ", "or": " | ", "since": " S ", "until": " U "}[k]
        # Left-associative: the right child needs parens at equal precedence.
        s = go(f.left, prec) + op + go(f.right, prec + 1)
        return f"({s})" if prec < parent else s

    return go(phi, 0)


# Model files: an alphabet line, an output-position line, then the formula
# (possibly wrapped over several lines).

def parse_ltl_file(text: str) -> tuple[LtlFormula, tuple[str, ...], str]:
    alphabet: Optional[tuple[str, ...]] = None
    output_position: Optional[str] = None
    formula_lines: list[str] = []
    first_formula_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if alphabet is None:
            if not line.startswith("alphabet:"):
                raise ParseError("expected 'alphabet: ...' header", lineno)
            syms = []
            for tok in line[len("alphabet:"):].split():
                syms.append(tok[1:-1] if tok.startswith("'") and tok.endswith("'") else tok)
            if not syms or len(set(syms)) != len(syms):
                raise ParseError("alphabet must list distinct symbols", lineno)
            alphabet = tuple(syms)
        elif output_position is None:
            if not line.startswith("output:"):
                raise ParseError("expected 'output: first|last' header", lineno)
            output_position = line[len("output:"):].strip()
            if output_position not in ("first", "last"):
                raise ParseError(f"bad output position {output_position!r}", lineno)
        else:
            if not formula_lines:
                first_formula_line = lineno
            formula_lines.append(raw)
    if alphabet is None or output_position is None or not formula_lines:
        raise ParseError("formula file needs alphabet, output, and a formula")
    toks: list[_Tok] = []
    for off, raw in enumerate(formula_lines):
        toks.extend(_tokenize_formula(raw, first_formula_line + off))
    phi = _FormulaParser(toks, alphabet, first_formula_line).parse()
    return phi, alphabet, output_position


def format_ltl_file(phi: LtlFormula, alphabet: Sequence[str], output_position: str) -> str:
    head = "alphabet: " + " ".join(_fmt_symbol(s) for s in alphabet)
    return f"{head}\noutput: {output_position}\n{format_ltl(phi)}\n"
