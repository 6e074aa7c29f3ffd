"""Translations between the three acceptor families.

ltl_to_uhat: one 0/1 vector component per subformula. Boolean connectives
become attention layers with an all-zero score whose combiner ignores the
attended vector (plus ReLU clamps); Since becomes one strict-future,
rightmost-tie attention layer that looks up the last position where
(not phi1) or phi2 holds and copies phi2's value from there, and Until is
the strict-past, leftmost mirror.

brasp_to_uhat: simulates a program whose attention scores fall into two
shapes: predicates on the attended position only, and conjunctions of
such a guard with component equality tests between both positions. The
score is realized as (number of matching components) + guard, so a
position satisfies the B-RASP predicate exactly when it scores the strict
maximum d + 1; the attended vector carries a constant-1 validity flag and
copies of the tested components, from which the layer's consumers decide
position-wise whether a qualifying position existed and either evaluate
the value predicate on the copies or fall back to the default.

uhat_to_ltl: computes the reachable value set of every layer and builds,
per layer and per value v, a formula that holds at position i exactly
when the layer outputs v there. Attention layers enumerate (own value,
attended value) pairs and pin the attended position through score
comparisons; all six mask/tie-break combinations are covered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import ltl
from .brasp import (
    AttentionOp,
    BoolExpr,
    BraspProgram,
    PositionwiseOp,
    check_program,
    expr_refs,
    initial_name,
)
from .errors import (
    DimensionError,
    TranslationError,
    UnsupportedScoreError,
    UnknownSymbolError,
)
from .ltl import LtlFormula, subformulas
from .numeric import AffineMap, Rational, RationalVector, affine_apply, dot
from .uhat import (
    AttentionLayer,
    ReluLayer,
    TokenEmbedding,
    Uhat,
    check_model,
    reachable_value_sets,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class TranslationReport:
    source: str
    target: str
    stats: dict[str, int] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def summary(self) -> str:
        parts = [f"{self.source} -> {self.target}"]
        parts += [f"{k}={v}" for k, v in sorted(self.stats.items())]
        return " ".join(parts)


# --- shared gadget builder ---------------------------------------------------

class _UhatBuilder:
    """Grows a transformer one component at a time.

    Component 0 is the constant 1 and components 1..|alphabet| are the
    symbol one-hots; every appended layer keeps all existing components, so
    component indices stay valid for the rest of the build. Boolean gadget
    layers are attention layers whose query and key are identically zero
    (every position ties, the tie-break picks some position, and the
    combiner ignores the attended half), plus ReLU clamps.
    """

    ONE = 0

    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = tuple(alphabet)
        self.width = 1 + len(self.alphabet)
        self.layers: list = []
        self._memo: dict = {}
        self._const: dict[int, int] = {0: 1}

    def symbol_comp(self, symbol: str) -> int:
        return 1 + self.alphabet.index(symbol)

    def _append_rows(self, rows: list[tuple[dict[int, Rational], Rational]]) -> list[int]:
        r = self.width
        zero_map = AffineMap.zero(r, r)
        matrix = []
        bias = []
        for c in range(r):
            row = [_ZERO] * (2 * r)
            row[c] = _ONE
            matrix.append(tuple(row))
            bias.append(_ZERO)
        for coeffs, b in rows:
            row = [_ZERO] * (2 * r)
            for c, x in coeffs.items():
                row[c] = Fraction(x)
            matrix.append(tuple(row))
            bias.append(Fraction(b))
        combine = AffineMap(tuple(matrix), RationalVector(tuple(bias)))
        self.layers.append(AttentionLayer(zero_map, zero_map, combine, "none", "rightmost"))
        out = list(range(r, r + len(rows)))
        self.width += len(rows)
        return out

    def _relu(self, comp: int) -> None:
        self.layers.append(ReluLayer(comp + 1, self.width))

    def const_comp(self, value: bool) -> int:
        if value:
            return self.ONE
        key = ("const", 0)
        if key not in self._memo:
            c = self._append_rows([({}, 0)])[0]
            self._const[c] = 0
            self._memo[key] = c
        return self._memo[key]

    def negate(self, a: int) -> int:
        if a in self._const:
            return self.const_comp(not self._const[a])
        key = ("not", a)
        if key not in self._memo:
            c = self._append_rows([({a: -1}, 1)])[0]
            self._memo[key] = c
            self._memo[("not", c)] = a
        return self._memo[key]

    def conj(self, a: int, b: int) -> int:
        if a in self._const:
            return b if self._const[a] else self.const_comp(False)
        if b in self._const:
            return a if self._const[b] else self.const_comp(False)
        if a == b:
            return a
        key = ("and", min(a, b), max(a, b))
        if key not in self._memo:
            c = self._append_rows([({a: 1, b: 1}, -1)])[0]
            self._relu(c)
            self._memo[key] = c
        return self._memo[key]

    def disj(self, a: int, b: int) -> int:
        if a in self._const:
            return b if not self._const[a] else self.ONE
        if b in self._const:
            return a if not self._const[b] else self.ONE
        if a == b:
            return a
        key = ("or", min(a, b), max(a, b))
        if key not in self._memo:
            # 1 - max(0, 1 - a - b) is 1 unless both are 0.
            z = self._append_rows([({a: -1, b: -1}, 1)])[0]
            self._relu(z)
            c = self._append_rows([({z: -1}, 1)])[0]
            self._memo[key] = c
        return self._memo[key]

    def iff_comp(self, a: int, b: int) -> int:
        if a in self._const:
            return b if self._const[a] else self.negate(b)
        if b in self._const:
            return a if self._const[b] else self.negate(a)
        if a == b:
            return self.ONE
        key = ("iff", min(a, b), max(a, b))
        if key not in self._memo:
            # 1 - relu(a-b) - relu(b-a) = 1 - |a-b| on 0/1 inputs.
            d1, d2 = self._append_rows([({a: 1, b: -1}, 0), ({a: -1, b: 1}, 0)])
            self._relu(d1)
            self._relu(d2)
            c = self._append_rows([({d1: -1, d2: -1}, 1)])[0]
            self._memo[key] = c
        return self._memo[key]

    def implies_comp(self, a: int, b: int) -> int:
        return self.disj(self.negate(a), b)

    def expr_comp(self, e: BoolExpr, env_i: Optional[dict[str, int]],
                  env_j: Optional[dict[str, int]]) -> int:
        k = e.kind
        if k == "const":
            return self.const_comp(e.value)
        if k == "ref":
            env = env_i if e.var == "i" else env_j
            assert env is not None, f"variable {e.var} has no binding here"
            return env[e.name]
        if k == "not":
            return self.negate(self.expr_comp(e.left, env_i, env_j))
        a = self.expr_comp(e.left, env_i, env_j)
        b = self.expr_comp(e.right, env_i, env_j)
        if k == "and":
            return self.conj(a, b)
        if k == "or":
            return self.disj(a, b)
        if k == "implies":
            return self.implies_comp(a, b)
        if k == "iff":
            return self.iff_comp(a, b)
        raise AssertionError(k)

    def pad_to(self, width: int) -> None:
        while self.width < width:
            c = self._append_rows([({}, 0)])[0]
            self._const[c] = 0

    def attention(self, mask: str, tie: str,
                  q_rows: list[tuple[dict[int, Rational], Rational]],
                  k_rows: list[tuple[dict[int, Rational], Rational]],
                  copies: Sequence[int]) -> tuple[int, dict[int, int]]:
        """Append a real attention layer.

        The score is the dot product of the q_rows values at the attending
        position with the k_rows values at the attended one. The output
        keeps every existing component and appends a copy of the attended
        position's constant-1 component (the validity flag: 0 exactly when
        the mask left no positions) followed by copies of the requested
        components. Returns (validity comp, source comp -> copy comp).
        """
        assert len(q_rows) == len(k_rows)
        self.pad_to(len(q_rows))
        r = self.width

        def score_map(rows):
            matrix = []
            bias = []
            for coeffs, b in rows:
                row = [_ZERO] * r
                for c, x in coeffs.items():
                    row[c] = Fraction(x)
                matrix.append(tuple(row))
                bias.append(Fraction(b))
            for _ in range(r - len(rows)):
                matrix.append((_ZERO,) * r)
                bias.append(_ZERO)
            return AffineMap(tuple(matrix), RationalVector(tuple(bias)))

        wanted = [c for c in dict.fromkeys(copies)]
        matrix = []
        bias = []
        for c in range(r):
            row = [_ZERO] * (2 * r)
            row[c] = _ONE
            matrix.append(tuple(row))
            bias.append(_ZERO)
        for src in [self.ONE] + wanted:
            row = [_ZERO] * (2 * r)
            row[r + src] = _ONE
            matrix.append(tuple(row))
            bias.append(_ZERO)
        combine = AffineMap(tuple(matrix), RationalVector(tuple(bias)))
        self.layers.append(AttentionLayer(score_map(q_rows), score_map(k_rows),
                                          combine, mask, tie))
        valid = r
        copy_map = {src: r + 1 + idx for idx, src in enumerate(wanted)}
        self.width += 1 + len(wanted)
        return valid, copy_map

    def finish(self, accept_comp: int, output_position: str) -> Uhat:
        emb_vectors = []
        for k in range(len(self.alphabet)):
            entries = [_ZERO] * (1 + len(self.alphabet))
            entries[0] = _ONE
            entries[1 + k] = _ONE
            emb_vectors.append(RationalVector(tuple(entries)))
        accept = [_ZERO] * self.width
        accept[accept_comp] = _ONE
        t = Uhat(
            embedding=TokenEmbedding(self.alphabet, tuple(emb_vectors)),
            layers=tuple(self.layers),
            accept=RationalVector(tuple(accept)),
            output_position=output_position,
        )
        check_model(t)
        return t


# --- LTL to UHAT -------------------------------------------------------------

@dataclass
class LtlToUhatResult:
    uhat: Uhat
    component_of: dict[LtlFormula, int]
    report: TranslationReport


def ltl_to_uhat_result(phi: LtlFormula, alphabet: Sequence[str],
                       output_position: str = "last") -> LtlToUhatResult:
    alphabet = tuple(alphabet)
    b = _UhatBuilder(alphabet)
    comp: dict[LtlFormula, int] = {}
    for node in subformulas(phi):
        kind = node.kind
        if kind == "true":
            c = b.ONE
        elif kind == "false":
            c = b.const_comp(False)
        elif kind == "atom":
            if node.symbol not in alphabet:
                raise UnknownSymbolError(f"formula atom {node.symbol!r} not in the alphabet")
            c = b.symbol_comp(node.symbol)
        elif kind == "not":
            c = b.negate(comp[node.left])
        elif kind == "and":
            c = b.conj(comp[node.left], comp[node.right])
        elif kind == "or":
            c = b.disj(comp[node.left], comp[node.right])
        else:
            c1, c2 = comp[node.left], comp[node.right]
            # The last/first position where (not phi1) or phi2 holds decides
            # phi1 S phi2 / phi1 U phi2: phi2 there means satisfied, and
            # anything after/before it satisfies phi1. With no such position
            # the copied phi2 value is 0 at a non-witness, which is correct,
            # as is the all-zero attended vector at the word boundary.
            cond = b.disj(b.negate(c1), c2)
            mask, tie = ("future", "rightmost") if kind == "since" else ("past", "leftmost")
            _, copy_map = b.attention(mask, tie,
                                      q_rows=[({}, 1)],
                                      k_rows=[({cond: 1}, 0)],
                                      copies=[c2])
            c = copy_map[c2]
        comp[node] = c
    t = b.finish(comp[phi], output_position)
    report = TranslationReport(
        source="ltl", target="uhat",
        stats={"formula_nodes": len(comp), "layers": len(t.layers), "width": b.width},
    )
    return LtlToUhatResult(t, comp, report)


def ltl_to_uhat(phi: LtlFormula, alphabet: Sequence[str],
                output_position: str = "last") -> Uhat:
    return ltl_to_uhat_result(phi, alphabet, output_position).uhat


# --- B-RASP to UHAT ----------------------------------------------------------

@dataclass(frozen=True)
class ScoreClass:
    """Shape of an attention score predicate.

    j_only: a predicate on the attended position alone (guard).
    equality: a guard conjoined with component equality tests N(i) <-> N(j).
    unsupported: anything else; reason says which conjunct failed.
    """

    kind: str
    guard: BoolExpr
    names: tuple[str, ...] = ()
    reason: str = ""


def _flatten_and(e: BoolExpr) -> list[BoolExpr]:
    if e.kind == "and":
        return _flatten_and(e.left) + _flatten_and(e.right)
    return [e]


def _as_equality(e: BoolExpr) -> Optional[str]:
    if e.kind != "iff" or e.left.kind != "ref" or e.right.kind != "ref":
        return None
    l, r = e.left, e.right
    if l.name == r.name and {l.var, r.var} == {"i", "j"}:
        return l.name
    return None


def classify_score(score: BoolExpr) -> ScoreClass:
    guard_parts: list[BoolExpr] = []
    names: list[str] = []
    for part in _flatten_and(score):
        if all(var == "j" for _, var in expr_refs(part)):
            guard_parts.append(part)
            continue
        name = _as_equality(part)
        if name is None:
            from .brasp import format_expr

            return ScoreClass("unsupported", score,
                              reason=f"conjunct {format_expr(part)!r} mixes positions "
                                     "and is not an equality test")
        if name not in names:
            names.append(name)
    from .brasp import ball

    guard = ball(guard_parts)
    if names:
        return ScoreClass("equality", guard, tuple(names))
    return ScoreClass("j_only", guard)


def _equality_score_rows(pairs: Sequence[tuple[int, int]], guard: Optional[int],
                         ) -> tuple[list, list]:
    """Query/key row specs whose dot product is (number of pairs whose bit
    matches between both positions) + (guard at the attended position).
    Each pair is (bit component, complement component); a bit matches when
    b_i b_j + (1-b_i)(1-b_j) = 1."""
    q_rows: list[tuple[dict[int, Rational], Rational]] = []
    k_rows: list[tuple[dict[int, Rational], Rational]] = []
    for bit, nbit in pairs:
        q_rows.append(({bit: 1}, 0))
        k_rows.append(({bit: 1}, 0))
        q_rows.append(({nbit: 1}, 0))
        k_rows.append(({nbit: 1}, 0))
    if guard is not None:
        q_rows.append(({}, 1))
        k_rows.append(({guard: 1}, 0))
    return q_rows, k_rows


def build_equality_layer(width: int, pairs: Sequence[tuple[int, int]],
                         mask: str, tie: str,
                         guard: Optional[int] = None) -> AttentionLayer:
    """An attention layer selecting, among the unmasked positions, one whose
    listed component pairs (bit, complement-bit) all match the attending
    position; matches score one point per pair, so a full match (d points,
    d+1 with a satisfied guard) beats every partial one. The combiner is
    the identity on (own vector, attended vector)."""
    rows = 2 * len(pairs) + (1 if guard is not None else 0)
    if rows > width:
        raise DimensionError(f"width {width} cannot carry {rows} score terms")
    for bit, nbit in pairs:
        if not (0 <= bit < width and 0 <= nbit < width):
            raise DimensionError("component pair outside the layer width")
    q_rows, k_rows = _equality_score_rows(pairs, guard)

    def score_map(specs):
        matrix = []
        bias = []
        for coeffs, b in specs:
            row = [_ZERO] * width
            for c, x in coeffs.items():
                row[c] = Fraction(x)
            matrix.append(tuple(row))
            bias.append(Fraction(b))
        for _ in range(width - len(specs)):
            matrix.append((_ZERO,) * width)
            bias.append(_ZERO)
        return AffineMap(tuple(matrix), RationalVector(tuple(bias)))

    return AttentionLayer(score_map(q_rows), score_map(k_rows),
                          AffineMap.identity(2 * width), mask, tie)


@dataclass
class BraspToUhatResult:
    uhat: Uhat
    component_of: dict[str, int]
    score_classes: dict[str, ScoreClass]
    report: TranslationReport


_BRASP_TIE = {"max": "rightmost", "min": "leftmost"}


def brasp_to_uhat_result(program: BraspProgram) -> BraspToUhatResult:
    check_program(program)
    b = _UhatBuilder(program.alphabet)
    env: dict[str, int] = {
        initial_name(s): b.symbol_comp(s) for s in program.alphabet
    }
    score_classes: dict[str, ScoreClass] = {}
    for d in program.defs:
        if isinstance(d.op, PositionwiseOp):
            env[d.name] = b.expr_comp(d.op.expr, env, None)
            continue
        op: AttentionOp = d.op
        sc = classify_score(op.score)
        score_classes[d.name] = sc
        if sc.kind == "unsupported":
            raise UnsupportedScoreError(d.name, sc.reason)
        # The guard reads only the attended position, so its truth value is
        # a position-wise function computable in advance at every position.
        guard_comp = b.expr_comp(sc.guard, None, env)
        pairs = [(env[nm], b.negate(env[nm])) for nm in sc.names]
        q_rows, k_rows = _equality_score_rows(pairs, guard_comp)

        value_j_names = [nm for nm, var in expr_refs(op.value) if var == "j"]
        need = list(dict.fromkeys(
            [env[nm] for nm in value_j_names]
            + [env[nm] for nm in sc.names]
            + [guard_comp]
        ))
        valid, copy_map = b.attention(op.mask, _BRASP_TIE[op.direction],
                                      q_rows, k_rows, need)
        # Re-check the score on the copies: the chosen position maximizes
        # matches + guard, so it satisfies the predicate iff any unmasked
        # position does; otherwise fall back to the default.
        sat = b.conj(valid, copy_map[guard_comp])
        for nm in sc.names:
            sat = b.conj(sat, b.iff_comp(env[nm], copy_map[env[nm]]))
        env_j = {nm: copy_map[env[nm]] for nm in value_j_names}
        v_comp = b.expr_comp(op.value, env, env_j)
        d_comp = b.expr_comp(op.default, env, None)
        env[d.name] = b.disj(b.conj(sat, v_comp),
                             b.conj(b.negate(sat), d_comp))
    t = b.finish(env[program.output], program.output_position)
    report = TranslationReport(
        source="brasp", target="uhat",
        stats={"defs": len(program.defs), "layers": len(t.layers), "width": b.width},
    )
    return BraspToUhatResult(t, dict(env), score_classes, report)


def brasp_to_uhat(program: BraspProgram) -> Uhat:
    return brasp_to_uhat_result(program).uhat


# --- UHAT to LTL -------------------------------------------------------------

@dataclass
class UhatToLtlResult:
    formula: LtlFormula
    value_sets: list[list[RationalVector]]
    layer_formulas: list[dict[RationalVector, LtlFormula]]
    report: TranslationReport


def _attention_formulas(layer: AttentionLayer, values: list[RationalVector],
                        prev: dict[RationalVector, LtlFormula],
                        ) -> dict[RationalVector, list[LtlFormula]]:
    queried = {u: affine_apply(layer.query, u) for u in values}
    keyed = {b: affine_apply(layer.key, b) for b in values}
    score: dict[tuple[int, int], Rational] = {}
    for iu, u in enumerate(values):
        for ib, bb in enumerate(values):
            score[(iu, ib)] = dot(queried[u], keyed[bb])

    memo: dict = {}

    def score_disj(iu: int, rel: str, sigma: Rational) -> LtlFormula:
        """Disjunction of phi_b over values b whose score against u stands
        in the given relation to sigma."""
        key = (iu, rel, sigma)
        if key not in memo:
            if rel == "<":
                picked = [b for ib, b in enumerate(values) if score[(iu, ib)] < sigma]
            elif rel == ">":
                picked = [b for ib, b in enumerate(values) if score[(iu, ib)] > sigma]
            else:
                picked = [b for ib, b in enumerate(values) if score[(iu, ib)] >= sigma]
            memo[key] = ltl.big_or([prev[b] for b in picked])
        return memo[key]

    def none_past(iu: int, rel: str, sigma: Rational) -> LtlFormula:
        key = ("np", iu, rel, sigma)
        if key not in memo:
            memo[key] = ltl.not_(ltl.sometime_past(score_disj(iu, rel, sigma)))
        return memo[key]

    def none_future(iu: int, rel: str, sigma: Rational) -> LtlFormula:
        key = ("nf", iu, rel, sigma)
        if key not in memo:
            memo[key] = ltl.not_(ltl.sometime_future(score_disj(iu, rel, sigma)))
        return memo[key]

    mask, tie = layer.mask, layer.tie
    out: dict[RationalVector, list[LtlFormula]] = {}

    def emit(v: RationalVector, f: LtlFormula) -> None:
        if f.kind != "false":
            out.setdefault(v, []).append(f)

    for iu, u in enumerate(values):
        phi_u = prev[u]
        for ia, a in enumerate(values):
            v = affine_apply(layer.combine, u.concat(a))
            phi_a = prev[a]
            sigma = score[(iu, ia)]
            sigma_self = score[(iu, iu)]
            if mask == "future" and tie == "rightmost":
                f = ltl.and_(phi_u, ltl.since(
                    score_disj(iu, "<", sigma),
                    ltl.and_(phi_a, none_past(iu, ">", sigma))))
            elif mask == "future" and tie == "leftmost":
                f = ltl.big_and([
                    phi_u,
                    ltl.sometime_past(ltl.and_(phi_a, none_past(iu, ">=", sigma))),
                    none_past(iu, ">", sigma)])
            elif mask == "past" and tie == "leftmost":
                f = ltl.and_(phi_u, ltl.until(
                    score_disj(iu, "<", sigma),
                    ltl.and_(phi_a, none_future(iu, ">", sigma))))
            elif mask == "past" and tie == "rightmost":
                f = ltl.big_and([
                    phi_u,
                    ltl.sometime_future(ltl.and_(phi_a, none_future(iu, ">=", sigma))),
                    none_future(iu, ">", sigma)])
            elif tie == "rightmost":  # no masking
                # Attended position: here, strictly left, strictly right.
                if ia == iu:
                    f = ltl.big_and([phi_u,
                                     none_past(iu, ">", sigma_self),
                                     none_future(iu, ">=", sigma_self)])
                    emit(v, f)
                if sigma > sigma_self:
                    f = ltl.big_and([
                        phi_u,
                        none_future(iu, ">=", sigma),
                        ltl.since(score_disj(iu, "<", sigma),
                                  ltl.and_(phi_a, none_past(iu, ">", sigma)))])
                    emit(v, f)
                if sigma >= sigma_self:
                    f = ltl.big_and([
                        phi_u,
                        none_past(iu, ">", sigma),
                        ltl.sometime_future(ltl.and_(phi_a, none_future(iu, ">=", sigma))),
                        none_future(iu, ">", sigma)])
                    emit(v, f)
                continue
            else:  # no masking, leftmost
                if ia == iu:
                    f = ltl.big_and([phi_u,
                                     none_past(iu, ">=", sigma_self),
                                     none_future(iu, ">", sigma_self)])
                    emit(v, f)
                if sigma >= sigma_self:
                    f = ltl.big_and([
                        phi_u,
                        ltl.sometime_past(ltl.and_(phi_a, none_past(iu, ">=", sigma))),
                        none_past(iu, ">", sigma),
                        none_future(iu, ">", sigma)])
                    emit(v, f)
                if sigma > sigma_self:
                    f = ltl.big_and([
                        phi_u,
                        none_past(iu, ">=", sigma),
                        ltl.until(score_disj(iu, "<", sigma),
                                  ltl.and_(phi_a, none_future(iu, ">", sigma)))])
                    emit(v, f)
                continue
            emit(v, f)

    if mask in ("future", "past"):
        # Boundary positions have no unmasked candidates and attend to the
        # zero vector.
        no_candidates = (ltl.not_(ltl.sometime_past(ltl.TRUE)) if mask == "future"
                         else ltl.not_(ltl.sometime_future(ltl.TRUE)))
        zero = RationalVector.zero(layer.in_width)
        grouped: dict[RationalVector, list[LtlFormula]] = {}
        for u in values:
            grouped.setdefault(affine_apply(layer.combine, u.concat(zero)), []).append(prev[u])
        for v, fs in grouped.items():
            emit(v, ltl.and_(no_candidates, ltl.big_or(fs)))
    return out


def uhat_to_ltl_result(t: Uhat, cap: int = 100000) -> UhatToLtlResult:
    check_model(t)
    sets = reachable_value_sets(t, cap)
    emb = t.embedding
    prev: dict[RationalVector, LtlFormula] = {
        v: ltl.big_or([ltl.atom(a) for a, ev in zip(emb.alphabet, emb.vectors) if ev == v])
        for v in sets[0]
    }
    layer_formulas = [dict(prev)]
    for idx, layer in enumerate(t.layers):
        values = sets[idx]
        if isinstance(layer, ReluLayer):
            c = layer.coord - 1
            grouped: dict[RationalVector, list[LtlFormula]] = {}
            for u in values:
                if u.entries[c] < 0:
                    entries = list(u.entries)
                    entries[c] = _ZERO
                    v = RationalVector(tuple(entries))
                else:
                    v = u
                grouped.setdefault(v, []).append(prev[u])
            cur = {v: ltl.big_or(fs) for v, fs in grouped.items()}
        else:
            pieces = _attention_formulas(layer, values, prev)
            cur = {v: ltl.big_or(fs) for v, fs in pieces.items()}
        for v in sets[idx + 1]:
            cur.setdefault(v, ltl.FALSE)
        prev = cur
        layer_formulas.append(dict(cur))
    root = ltl.big_or([prev[v] for v in sets[-1] if dot(t.accept, v) > 0])
    report = TranslationReport(
        source="uhat", target="ltl",
        stats={
            "layers": len(t.layers),
            "max_value_set": max(len(s) for s in sets),
            "formula_nodes": ltl.formula_size(root),
        },
    )
    return UhatToLtlResult(root, sets, layer_formulas, report)


def uhat_to_ltl(t: Uhat, cap: int = 100000) -> LtlFormula:
    return uhat_to_ltl_result(t, cap).formula
