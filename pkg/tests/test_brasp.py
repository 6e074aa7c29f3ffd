import pytest
from hypothesis import given, settings, strategies as st

import uhatkit as uk
from uhatkit.errors import (
    EmptyWordError,
    ParseError,
    ScopeError,
    UnknownSymbolError,
)

from oracles import naive_brasp, naive_brasp_accepts

AB = ("a", "b")


def program_text(defs, alphabet="'a' 'b'", output="Y last"):
    return f"alphabet: {alphabet}\noutput: {output}\n" + "\n".join(defs) + "\n"


def tiny(expr="Q['a'](i)"):
    return uk.parse_brasp(program_text([f"def Y(i) = {expr}"]))


class TestParser:
    def test_smallest_program(self):
        p = tiny()
        assert len(p.defs) == 1
        assert p.defs[0].op == uk.PositionwiseOp(uk.bref("Q[a]", "i"))
        assert (p.output, p.output_position) == ("Y", "last")

    def test_attention_op_shape(self):
        p = uk.parse_brasp(program_text([
            "def M(i) = attn max j [j<i | Q['a'](j) | Q['b'](j)] "
            "Q['a'](j) & Q['b'](i) default 1",
            "def Y(i) = M(i)",
        ]))
        op = p.defs[0].op
        assert isinstance(op, uk.AttentionOp)
        assert (op.direction, op.mask) == ("max", "future")
        assert op.score == uk.bor(uk.bsym("a", "j"), uk.bsym("b", "j"))
        assert op.value == uk.band(uk.bsym("a", "j"), uk.bsym("b", "i"))
        assert op.default == uk.B_TRUE

    def test_chain_checker_value_predicate_shape(self):
        # The compiled chain checker's pair test: rightmost earlier symbol
        # position, value = disjunction over allowed (h, h') pairs.
        program, _ = uk.make_h_chain(uk.default_hchain(1))
        m_left = next(d.op for d in program.defs if d.name == "M_left")
        assert isinstance(m_left, uk.AttentionOp)
        assert (m_left.direction, m_left.mask) == ("max", "future")
        sym_at_j = uk.bany([uk.bsym(s, "j") for s in ("a", "b", "c")])
        assert m_left.score == sym_at_j
        want_value = uk.bany([uk.band(uk.bsym(h, "j"), uk.bsym(hp, "i"))
                              for h, hp in uk.DEFAULT_CHAIN_PAIRS])
        assert m_left.value == want_value
        assert m_left.default == uk.B_TRUE

    def test_forward_reference_is_scope_error(self):
        with pytest.raises(ScopeError):
            uk.parse_brasp(program_text([
                "def Y(i) = Z(i)",
                "def Z(i) = Q['a'](i)",
            ]))

    def test_j_in_positionwise_is_scope_error(self):
        with pytest.raises(ScopeError):
            uk.parse_brasp(program_text(["def Y(i) = Q['a'](j)"]))

    def test_j_in_default_is_scope_error(self):
        with pytest.raises(ScopeError):
            uk.parse_brasp(program_text([
                "def Y(i) = attn max j [j<i | Q['a'](j)] 1 default Q['a'](j)",
            ]))

    def test_duplicate_name(self):
        with pytest.raises(ScopeError):
            uk.parse_brasp(program_text([
                "def Y(i) = Q['a'](i)",
                "def Y(i) = Q['b'](i)",
            ]))

    def test_syntax_error_carries_line(self):
        with pytest.raises(ParseError) as e:
            uk.parse_brasp("alphabet: 'a'\noutput: Y last\ndef Y(i) = &\n")
        assert "line 3" in str(e.value)

    def test_undefined_output(self):
        with pytest.raises(ScopeError):
            uk.parse_brasp(program_text(["def Z(i) = Q['a'](i)"]))


class TestEval:
    def test_initial_vectors(self):
        p = tiny()
        trace = uk.eval_brasp(p, tuple("aba"))
        assert trace.vectors["Q[a]"] == (True, False, True)
        assert trace.vectors["Q[b]"] == (False, True, False)

    def test_accepts_output_position(self):
        p = tiny()
        assert uk.brasp_accepts(p, tuple("ba")) is True
        assert uk.brasp_accepts(p, tuple("ab")) is False
        p_first = uk.parse_brasp(program_text(["def Y(i) = Q['a'](i)"],
                                              output="Y first"))
        assert uk.brasp_accepts(p_first, tuple("ab")) is True

    def test_constant_score_tie_probe(self):
        # score 1 with strict-future mask: max picks i-1, min picks 1.
        p = uk.parse_brasp(program_text([
            "def Prev(i) = attn max j [j<i | 1] Q['a'](j) default 0",
            "def First(i) = attn min j [j<i | 1] Q['a'](j) default 0",
            "def Y(i) = Prev(i)",
        ]))
        t = uk.eval_brasp(p, tuple("abba"))
        assert t.vectors["Prev"] == (False, True, False, False)
        assert t.vectors["First"] == (False, True, True, True)

    def test_default_fires_at_boundaries(self):
        p = uk.parse_brasp(program_text([
            "def L(i) = attn max j [j<i | 1] 1 default 0",
            "def R(i) = attn max j [j>i | 1] 1 default 0",
            "def Y(i) = L(i)",
        ]))
        t = uk.eval_brasp(p, tuple("aab"))
        assert t.vectors["L"] == (False, True, True)
        assert t.vectors["R"] == (True, True, False)

    def test_score_false_everywhere_fires_default(self):
        p = uk.parse_brasp(program_text([
            "def Y(i) = attn max j [* | 0] 0 default Q['a'](i)",
        ]))
        t = uk.eval_brasp(p, tuple("ab"))
        assert t.vectors["Y"] == (True, False)

    def test_empty_word(self):
        with pytest.raises(EmptyWordError):
            uk.eval_brasp(tiny(), ())

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError):
            uk.eval_brasp(tiny(), ("a", "z"))

    def test_determinism(self):
        p = tiny()
        w = tuple("abab")
        assert uk.eval_brasp(p, w) == uk.eval_brasp(p, w)


# --- random program generation for differential testing ----------------------

def expr_strategy(names, allow_j, depth=2):
    base = [uk.B_TRUE, uk.B_FALSE]
    base += [uk.bref(n, "i") for n in names]
    if allow_j:
        base += [uk.bref(n, "j") for n in names]
    leaf = st.sampled_from(base)
    if depth == 0:
        return leaf
    sub = expr_strategy(names, allow_j, depth - 1)
    return st.one_of(
        leaf,
        st.builds(uk.bnot, sub),
        st.builds(uk.band, sub, sub),
        st.builds(uk.bor, sub, sub),
        st.builds(uk.bimplies, sub, sub),
        st.builds(uk.biff, sub, sub),
    )


@st.composite
def random_program(draw):
    names = [uk.initial_name(s) for s in AB]
    defs = []
    for idx in range(draw(st.integers(1, 4))):
        name = f"P{idx}"
        if draw(st.booleans()):
            op = uk.PositionwiseOp(draw(expr_strategy(names, False)))
        else:
            op = uk.AttentionOp(
                direction=draw(st.sampled_from(("min", "max"))),
                mask=draw(st.sampled_from(("none", "future", "past"))),
                score=draw(expr_strategy(names, True)),
                value=draw(expr_strategy(names, True)),
                default=draw(expr_strategy(names, False)),
            )
        defs.append(uk.BraspDef(name, op))
        names.append(name)
    return uk.BraspProgram(AB, tuple(defs), defs[-1].name,
                           draw(st.sampled_from(("first", "last"))))


class TestDifferential:
    @settings(max_examples=150, deadline=None)
    @given(random_program())
    def test_interpreter_matches_naive(self, p):
        runner = uk.BraspRunner(p)
        for w in uk.words_over(AB, 4):
            want = naive_brasp(p, w)
            got = runner.trace(w)
            for name, bits in want.items():
                assert got.vectors[name] == tuple(bits), (name, w)
            assert runner.accepts(w) == naive_brasp_accepts(p, w)


class TestRoundTrip:
    @settings(max_examples=100, deadline=None)
    @given(random_program())
    def test_format_parse_identity(self, p):
        assert uk.parse_brasp(uk.format_brasp(p)) == p

    def test_chain_program_round_trips(self):
        program, _ = uk.make_h_chain(uk.default_hchain(2))
        assert uk.parse_brasp(uk.format_brasp(program)) == program

    def test_tiling_program_round_trips(self):
        inst = uk.TilingInstance(
            1, (("a", uk.Tile(0, 1, 0, 0)), ("b", uk.Tile(0, 0, 0, 1))), "b")
        program = uk.compile_tiling_to_brasp(inst)
        assert uk.parse_brasp(uk.format_brasp(program)) == program
