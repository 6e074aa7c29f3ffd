"""Masked unique hard-attention transformers over exact rationals.

A model embeds each alphabet symbol into Q^d and then applies a fixed
sequence of layers. An attention layer carries affine maps query and key
(width r to r), a combiner (width 2r to s), a mask, and a tie-break side.
At position i it scores every unmasked position j by
<query(v_i), key(v_j)>, keeps the score-maximal ones, and attends to the
leftmost or rightmost of them; with no unmasked position it attends to
the zero vector. The layer then outputs combine(v_i, attended). A ReLU
layer clamps one coordinate at zero. The word is accepted when the final
vector at the output position has positive inner product with the
acceptance vector.

Scores are compared exactly and are never written into the output
sequence, so value sizes depend on the layer stack but not on the word
length; value_bound_report makes that measurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

from .errors import (
    EmptyWordError,
    ModelError,
    ReachabilityCapError,
    UnknownSymbolError,
)
from .numeric import (
    AffineMap,
    Rational,
    RationalVector,
    affine_apply,
    bit_length,
    dot,
    format_rational,
    parse_rational,
)

Word = tuple[str, ...]

MASKS = ("none", "future", "past")
TIES = ("leftmost", "rightmost")


@dataclass(frozen=True)
class TokenEmbedding:
    alphabet: tuple[str, ...]
    vectors: tuple[RationalVector, ...]  # aligned with alphabet

    @property
    def width(self) -> int:
        return self.vectors[0].width

    @cached_property
    def _by_symbol(self) -> dict[str, RationalVector]:
        return dict(zip(self.alphabet, self.vectors))

    def embed(self, symbol: str) -> RationalVector:
        v = self._by_symbol.get(symbol)
        if v is None:
            raise UnknownSymbolError(f"symbol {symbol!r} is not in the alphabet")
        return v


@dataclass(frozen=True)
class AttentionLayer:
    query: AffineMap    # r -> r, applied at the attending position
    key: AffineMap      # r -> r, applied at the attended position
    combine: AffineMap  # 2r -> s, applied to (own vector, attended vector)
    mask: str           # "none", "future" (j < i), or "past" (j > i)
    tie: str            # "leftmost" or "rightmost"

    @property
    def in_width(self) -> int:
        return self.query.in_width

    @property
    def out_width(self) -> int:
        return self.combine.out_width


@dataclass(frozen=True)
class ReluLayer:
    coord: int  # 1-based coordinate that is clamped at zero
    width: int

    @property
    def in_width(self) -> int:
        return self.width

    @property
    def out_width(self) -> int:
        return self.width


Layer = Union[AttentionLayer, ReluLayer]


@dataclass(frozen=True)
class Uhat:
    embedding: TokenEmbedding
    layers: tuple[Layer, ...]
    accept: RationalVector
    output_position: str  # "first" or "last"


def check_model(t: Uhat) -> None:
    """Raise ModelError unless widths chain, tags are legal, and the
    alphabet is a nonempty list of distinct symbols."""
    emb = t.embedding
    if not emb.alphabet:
        raise ModelError("empty alphabet")
    if len(set(emb.alphabet)) != len(emb.alphabet):
        raise ModelError("duplicate alphabet symbols")
    if len(emb.alphabet) != len(emb.vectors):
        raise ModelError("embedding must map every symbol")
    width = emb.vectors[0].width
    if width < 1 or any(v.width != width for v in emb.vectors):
        raise ModelError("embedding vectors must share a positive width")
    for idx, layer in enumerate(t.layers):
        if isinstance(layer, AttentionLayer):
            r = layer.query.in_width
            if r != width:
                raise ModelError(f"layer {idx}: expects width {r}, gets {width}")
            if layer.query.out_width != r or layer.key.in_width != r or layer.key.out_width != r:
                raise ModelError(f"layer {idx}: query/key must map width {r} to width {r}")
            if layer.combine.in_width != 2 * r:
                raise ModelError(f"layer {idx}: combiner must read width {2 * r}")
            if layer.mask not in MASKS:
                raise ModelError(f"layer {idx}: bad mask {layer.mask!r}")
            if layer.tie not in TIES:
                raise ModelError(f"layer {idx}: bad tie {layer.tie!r}")
            width = layer.combine.out_width
        elif isinstance(layer, ReluLayer):
            if layer.width != width:
                raise ModelError(f"layer {idx}: expects width {layer.width}, gets {width}")
            if not 1 <= layer.coord <= width:
                raise ModelError(f"layer {idx}: coordinate {layer.coord} outside 1..{width}")
        else:
            raise ModelError(f"layer {idx}: unknown layer type {type(layer).__name__}")
    if t.accept.width != width:
        raise ModelError(f"acceptance vector width {t.accept.width}, final width {width}")
    if t.output_position not in ("first", "last"):
        raise ModelError(f"bad output position {t.output_position!r}")


def _unmasked_range(mask: str, i: int, n: int) -> range:
    if mask == "future":
        return range(0, i)
    if mask == "past":
        return range(i + 1, n)
    return range(0, n)


def apply_attention_layer(layer: AttentionLayer, vectors: Sequence[RationalVector],
                          ) -> tuple[list[RationalVector], list[Optional[int]], int]:
    """One attention step over a full sequence.

    Returns (outputs, chosen, score_bits): the output sequence, the 1-based
    attended position per query position (None where the mask leaves no
    candidates), and the largest bit_length among all computed scores.
    """
    n = len(vectors)
    queried = [affine_apply(layer.query, v) for v in vectors]
    keyed = [affine_apply(layer.key, v) for v in vectors]
    # Scores via the nonzero support of the queried vector: gadget layers
    # use an all-zero query, so their score pass costs nothing.
    q_support = [tuple((c, x) for c, x in enumerate(q.entries) if x) for q in queried]
    zero_vec = RationalVector.zero(layer.query.in_width)
    rightmost = layer.tie == "rightmost"
    outputs: list[RationalVector] = []
    chosen: list[Optional[int]] = []
    score_bits = 0
    for i in range(n):
        best: Optional[Rational] = None
        best_j = -1
        support = q_support[i]
        for j in _unmasked_range(layer.mask, i, n):
            kj = keyed[j].entries
            s = Fraction(0)
            for c, x in support:
                s += x * kj[c]
            b = bit_length(s)
            if b > score_bits:
                score_bits = b
            if best is None or s > best or (rightmost and s == best):
                best = s
                best_j = j
        if best is None:
            attended = zero_vec
            chosen.append(None)
        else:
            attended = vectors[best_j]
            chosen.append(best_j + 1)
        outputs.append(affine_apply(layer.combine, vectors[i].concat(attended)))
    return outputs, chosen, score_bits


def apply_relu_layer(layer: ReluLayer, vectors: Sequence[RationalVector]) -> list[RationalVector]:
    c = layer.coord - 1
    out = []
    for v in vectors:
        if v.entries[c] < 0:
            entries = list(v.entries)
            entries[c] = Fraction(0)
            out.append(RationalVector(tuple(entries)))
        else:
            out.append(v)
    return out


@dataclass
class UhatTrace:
    """stages[0] is the embedded sequence; stages[k] the output of layer k.

    chosen and score_bits align with the model's layers; both are None for
    ReLU layers. Chosen positions are 1-based.
    """

    word: Word
    stages: tuple[tuple[RationalVector, ...], ...]
    chosen: tuple[Optional[tuple[Optional[int], ...]], ...]
    score_bits: tuple[Optional[int], ...]


def simulate(t: Uhat, word: Sequence[str]) -> UhatTrace:
    word = tuple(word)
    if not word:
        raise EmptyWordError("transformers here run on nonempty words")
    vectors: list[RationalVector] = [t.embedding.embed(a) for a in word]
    stages = [tuple(vectors)]
    chosen: list[Optional[tuple[Optional[int], ...]]] = []
    score_bits: list[Optional[int]] = []
    for layer in t.layers:
        if isinstance(layer, AttentionLayer):
            vectors, picked, bits = apply_attention_layer(layer, vectors)
            chosen.append(tuple(picked))
            score_bits.append(bits)
        else:
            vectors = apply_relu_layer(layer, vectors)
            chosen.append(None)
            score_bits.append(None)
        stages.append(tuple(vectors))
    return UhatTrace(word, tuple(stages), tuple(chosen), tuple(score_bits))


def uhat_accepts(t: Uhat, word: Sequence[str]) -> bool:
    trace = simulate(t, word)
    final = trace.stages[-1]
    v = final[0] if t.output_position == "first" else final[-1]
    return dot(t.accept, v) > 0


def value_bound_report(trace: UhatTrace) -> int:
    """Largest bit_length over every vector entry in every stage and every
    attention score computed during the run."""
    worst = 0
    for stage in trace.stages:
        for v in stage:
            for x in v.entries:
                b = bit_length(x)
                if b > worst:
                    worst = b
    for bits in trace.score_bits:
        if bits is not None and bits > worst:
            worst = bits
    return worst


def _vector_sort_key(v: RationalVector):
    return tuple((x.numerator, x.denominator) for x in v.entries)


def reachable_value_sets(t: Uhat, cap: int = 100000) -> list[list[RationalVector]]:
    """Per stage, every vector value any position of any word could carry.

    Entry 0 is the range of the embedding. An attention layer maps a pair
    (own value u, attended value a) to combine(u, a); a ranges over the
    incoming set plus the zero vector (attention over an empty candidate
    set). A ReLU layer clamps coordinates pointwise. The sets are exact
    supersets of what any single word realizes, returned sorted for
    reproducibility; exceeding the cap raises ReachabilityCapError.
    """
    check_model(t)
    current = {v for v in t.embedding.vectors}
    sets = [sorted(current, key=_vector_sort_key)]
    for idx, layer in enumerate(t.layers):
        if isinstance(layer, AttentionLayer):
            zero = RationalVector.zero(layer.in_width)
            sources = list(current) + ([zero] if zero not in current else [])
            nxt = set()
            for u in current:
                for a in sources:
                    nxt.add(affine_apply(layer.combine, u.concat(a)))
                    if len(nxt) > cap:
                        raise ReachabilityCapError(idx, len(nxt), cap)
        else:
            c = layer.coord - 1
            nxt = set()
            for u in current:
                if u.entries[c] < 0:
                    entries = list(u.entries)
                    entries[c] = Fraction(0)
                    nxt.add(RationalVector(tuple(entries)))
                else:
                    nxt.add(u)
        current = nxt
        sets.append(sorted(current, key=_vector_sort_key))
    return sets


# --- model files -----------------------------------------------------------
#
# JSON with every rational as a "p" or "p/q" string, so round-trips are
# bit-exact. Affine maps are {"matrix": [[..]], "bias": [..]}.

def _map_to_json(m: AffineMap) -> dict:
    return {
        "matrix": [[format_rational(x) for x in row] for row in m.matrix],
        "bias": [format_rational(x) for x in m.bias.entries],
    }


def _map_from_json(obj: dict, what: str) -> AffineMap:
    try:
        return AffineMap.from_rows(
            [[parse_rational(x) for x in row] for row in obj["matrix"]],
            [parse_rational(x) for x in obj["bias"]],
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"bad affine map in {what}: {exc}") from exc


def uhat_to_json_dict(t: Uhat) -> dict:
    layers = []
    for layer in t.layers:
        if isinstance(layer, AttentionLayer):
            layers.append({
                "kind": "attn",
                "A": _map_to_json(layer.query),
                "B": _map_to_json(layer.key),
                "C": _map_to_json(layer.combine),
                "mask": layer.mask,
                "tie": layer.tie,
            })
        else:
            layers.append({"kind": "relu", "coord": layer.coord})
    return {
        "alphabet": list(t.embedding.alphabet),
        "embedding": {
            sym: [format_rational(x) for x in vec.entries]
            for sym, vec in zip(t.embedding.alphabet, t.embedding.vectors)
        },
        "layers": layers,
        "accept": [format_rational(x) for x in t.accept.entries],
        "output_position": t.output_position,
    }


def uhat_from_json_dict(obj: dict) -> Uhat:
    try:
        alphabet = tuple(obj["alphabet"])
        embedding = TokenEmbedding(
            alphabet,
            tuple(RationalVector.from_iter(parse_rational(x) for x in obj["embedding"][sym])
                  for sym in alphabet),
        )
        layers: list[Layer] = []
        width = embedding.width
        for idx, rec in enumerate(obj["layers"]):
            kind = rec.get("kind")
            if kind == "attn":
                layer = AttentionLayer(
                    query=_map_from_json(rec["A"], f"layer {idx} A"),
                    key=_map_from_json(rec["B"], f"layer {idx} B"),
                    combine=_map_from_json(rec["C"], f"layer {idx} C"),
                    mask=rec["mask"],
                    tie=rec["tie"],
                )
                width = layer.combine.out_width
            elif kind == "relu":
                # The record stores only the coordinate; the width follows
                # from the layer chain.
                layer = ReluLayer(coord=int(rec["coord"]), width=width)
            else:
                raise ModelError(f"layer {idx}: unknown kind {kind!r}")
            layers.append(layer)
        t = Uhat(
            embedding=embedding,
            layers=tuple(layers),
            accept=RationalVector.from_iter(parse_rational(x) for x in obj["accept"]),
            output_position=obj["output_position"],
        )
    except ModelError:
        raise
    except Exception as exc:
        raise ModelError(f"malformed model file: {exc}") from exc
    check_model(t)
    return t


def format_uhat(t: Uhat) -> str:
    return json.dumps(uhat_to_json_dict(t), indent=2) + "\n"


def parse_uhat(text: str) -> Uhat:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from exc
    return uhat_from_json_dict(obj)
