import random
from fractions import Fraction

import pytest

import uhatkit as uk

# Entries and coefficients kept tiny so score sets and reachable sets stay
# small enough for exhaustive differential runs.
EMBED_ENTRIES = (Fraction(0), Fraction(1, 2), Fraction(1))
MAP_COEFFS = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1))
MASK_TIE_COMBOS = tuple((m, t) for m in uk.MASKS for t in uk.TIES)

AB = ("a", "b")


def random_affine(rng, out_w, in_w):
    rows = tuple(tuple(rng.choice(MAP_COEFFS) for _ in range(in_w))
                 for _ in range(out_w))
    bias = uk.rvec([rng.choice(MAP_COEFFS) for _ in range(out_w)])
    return uk.AffineMap(rows, bias)


def random_uhat(k):
    """Seeded small transformer over {a,b}: at most two attention layers of
    width at most 3, optional ReLU after each, first layer's mask and
    tie-breaking cycling through all six combinations with k."""
    rng = random.Random(1000 + k)
    width = rng.randint(1, 3)
    emb = uk.TokenEmbedding(AB, tuple(
        uk.rvec([rng.choice(EMBED_ENTRIES) for _ in range(width)])
        for _ in AB))
    layers = []
    w = width
    for li in range(rng.randint(1, 2)):
        mask, tie = MASK_TIE_COMBOS[k % 6] if li == 0 else rng.choice(MASK_TIE_COMBOS)
        out_w = rng.randint(1, 3)
        layers.append(uk.AttentionLayer(
            random_affine(rng, w, w), random_affine(rng, w, w),
            random_affine(rng, out_w, 2 * w), mask, tie))
        w = out_w
        if rng.random() < 0.4:
            layers.append(uk.ReluLayer(rng.randint(1, w), w))
    accept = uk.rvec([rng.choice(MAP_COEFFS) for _ in range(w)])
    return uk.Uhat(emb, tuple(layers), accept,
                   rng.choice(("first", "last")))


def formula_suite():
    """Named formulas over {a,b}; the suite drives the LTL translation
    differential tests."""
    a, b = uk.atom("a"), uk.atom("b")
    ab_star = uk.and_(
        uk.always(uk.implies(a, uk.next_(b))),
        uk.always(uk.implies(uk.and_(b, uk.next_(uk.TRUE)), uk.next_(a))))
    return [
        ("atom", a),
        ("negation", uk.not_(a)),
        ("conjunction", uk.and_(a, b)),
        ("disjunction", uk.or_(a, b)),
        ("implication", uk.implies(a, b)),
        ("since", uk.since(a, b)),
        ("until", uk.until(a, b)),
        ("alternating_pairs", ab_star),
        ("past", uk.sometime_past(a)),
        ("future", uk.sometime_future(b)),
        ("next", uk.next_(a)),
        ("globally", uk.always(a)),
        ("nested_past_future", uk.sometime_past(uk.sometime_future(a))),
        ("next_next", uk.next_(uk.next_(b))),
        ("global_implication", uk.always(uk.implies(a, uk.sometime_future(b)))),
        ("since_of_until", uk.since(uk.until(a, b), b)),
        ("until_of_since", uk.until(a, uk.since(b, a))),
        ("negated_since", uk.not_(uk.since(a, b))),
        ("globally_next", uk.always(uk.implies(b, uk.next_(uk.or_(a, b))))),
        ("past_and_future", uk.and_(uk.sometime_past(a), uk.sometime_future(a))),
        ("deep_nesting", uk.since(uk.or_(a, uk.next_(b)),
                                  uk.and_(b, uk.sometime_past(a)))),
        ("constants", uk.or_(uk.and_(uk.TRUE, a), uk.and_(uk.FALSE, b))),
    ]


def tiling_instances():
    """Five-plus small instances, including unsolvable ones."""
    T = uk.Tile
    return [
        ("single_blank",
         uk.TilingInstance(1, (("t", T(0, 0, 0, 0)),), "t")),
        ("two_tiles_one_row",
         uk.TilingInstance(1, (("l", T(0, 0, 1, 0)), ("r", T(1, 0, 0, 0))), "r")),
        ("forced_two_rows",
         uk.TilingInstance(1, (("a", T(0, 1, 0, 0)), ("b", T(0, 0, 0, 1))), "b")),
        ("unsolvable_no_left_zero",
         uk.TilingInstance(1, (("t", T(1, 0, 1, 0)), ("u", T(1, 0, 0, 0))), "t")),
        ("three_tiles",
         uk.TilingInstance(1, (("t1", T(0, 0, 1, 0)), ("t2", T(1, 1, 0, 0)),
                               ("t3", T(1, 0, 0, 1))), "t3")),
        ("unsolvable_final_unplaceable",
         uk.TilingInstance(1, (("t", T(0, 0, 0, 0)), ("f", T(1, 1, 1, 1))), "f")),
    ]


@pytest.fixture(scope="session")
def suite():
    return formula_suite()


@pytest.fixture(scope="session")
def instances():
    return tiling_instances()


@pytest.fixture(scope="session")
def hchain1():
    spec = uk.default_hchain(1)
    program, words = uk.make_h_chain(spec)
    return spec, program, words


@pytest.fixture(scope="session")
def uhat_ltl_pairs():
    """The 100 seeded transformers with their translated formulas; shared
    between the translation and equivalence acceptance runs."""
    pairs = []
    for k in range(100):
        t = random_uhat(k)
        pairs.append((t, uk.uhat_to_ltl(t)))
    return pairs


@pytest.fixture(scope="session")
def ltl_uhat_pairs(suite):
    """Each suite formula with its translated transformer (output last)."""
    return [(name, phi, uk.ltl_to_uhat_result(phi, AB, "last"))
            for name, phi in suite]
