"""Executable semantics for masked unique hard-attention transformers,
B-RASP programs, and finite-word LTL, with exact rational arithmetic,
translations between the three families, a power-of-two tiling compiler,
and bounded emptiness/equivalence/mutation analyses."""

from .errors import (
    AlphabetMismatchError,
    DimensionError,
    EmptyWordError,
    EvaluationError,
    ModelError,
    ParseError,
    ReachabilityCapError,
    ScopeError,
    TranslationError,
    UhatkitError,
    UnknownSymbolError,
    UnsupportedScoreError,
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
    rational,
    rvec,
)
from .ltl import (
    FALSE,
    TRUE,
    LtlEvaluator,
    LtlFormula,
    always,
    and_,
    atom,
    atoms_of,
    big_and,
    big_or,
    eval_ltl,
    false_,
    format_ltl,
    format_ltl_file,
    formula_size,
    implies,
    ltl_accepts,
    ltl_bounded_sat,
    next_,
    not_,
    or_,
    parse_ltl,
    parse_ltl_file,
    since,
    sometime_future,
    sometime_past,
    subformulas,
    true_,
    until,
    words_over,
)
from .brasp import (
    AttentionOp,
    B_FALSE,
    B_TRUE,
    BoolExpr,
    BraspDef,
    BraspProgram,
    BraspRunner,
    BraspTrace,
    PositionwiseOp,
    ProgramBuilder,
    ball,
    band,
    bany,
    bconst,
    biff,
    bimplies,
    bnot,
    bor,
    brasp_accepts,
    bref,
    bsym,
    check_program,
    eval_brasp,
    expr_refs,
    format_brasp,
    format_expr,
    initial_name,
    parse_brasp,
)
from .uhat import (
    MASKS,
    TIES,
    AttentionLayer,
    Layer,
    ReluLayer,
    TokenEmbedding,
    Uhat,
    UhatTrace,
    apply_attention_layer,
    apply_relu_layer,
    check_model,
    format_uhat,
    parse_uhat,
    reachable_value_sets,
    simulate,
    uhat_accepts,
    uhat_from_json_dict,
    uhat_to_json_dict,
    value_bound_report,
)
from .tiling import (
    DEFAULT_CHAIN_PAIRS,
    DEFAULT_CHAIN_SYMBOLS,
    HChainSpec,
    MAX_COLUMN_EXPONENT,
    Tile,
    TilingGrid,
    TilingInstance,
    chain_word,
    compile_tiling_to_brasp,
    decode_encoding,
    default_hchain,
    encode_grid,
    format_grid_file,
    format_tiles_file,
    make_h_chain,
    parse_grid_file,
    parse_tiles_file,
    search_tiling,
    verify_tiling,
)
from .translate import (
    BraspToUhatResult,
    LtlToUhatResult,
    ScoreClass,
    TranslationReport,
    UhatToLtlResult,
    brasp_to_uhat,
    brasp_to_uhat_result,
    build_equality_layer,
    classify_score,
    ltl_to_uhat,
    ltl_to_uhat_result,
    uhat_to_ltl,
    uhat_to_ltl_result,
)
from .analysis import (
    Acceptor,
    MutationReport,
    SearchReport,
    bounded_emptiness,
    bounded_equivalence,
    format_mutation_report,
    format_search_report,
    min_witness,
    mutation_test,
)
from .cli import dispatch

Word = tuple[str, ...]

__version__ = "0.1.0"
