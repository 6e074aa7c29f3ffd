"""Command-line entry point.

One executable, eleven subcommands: run models, translate between the
families, compile tiling instances, and run the bounded analyses. Output
is plain text on stdout, byte-identical for identical inputs and seeds;
--format records switches to key=value lines for scripting. Exit codes
follow the search convention: witness or counterexample found 0, search
exhausted 1, any error 2.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import analysis, tiling, translate
from .analysis import Acceptor
from .brasp import eval_brasp, parse_brasp
from .errors import UhatkitError
from .ltl import format_ltl_file, parse_ltl_file
from .uhat import (
    parse_uhat,
    reachable_value_sets,
    simulate,
    value_bound_report,
)

SUBCOMMANDS = (
    "run", "translate", "compile-tiling", "hchain", "empty", "min-witness",
    "equiv", "mutate", "verify-tiling", "search-tiling", "reachable",
)

# Which subcommand reaches each public operation (dispatch reaches all).
OPERATION_COVERAGE = {
    "affine_apply": "run",
    "dot": "run",
    "bit_length": "run",
    "parse_brasp": "run",
    "eval_brasp": "run",
    "brasp_accepts": "run",
    "simulate": "run",
    "uhat_accepts": "run",
    "value_bound_report": "run",
    "reachable_value_sets": "reachable",
    "parse_ltl": "run",
    "eval_ltl": "run",
    "ltl_accepts": "run",
    "ltl_bounded_sat": "empty",
    "ltl_to_uhat": "translate",
    "brasp_to_uhat": "translate",
    "build_equality_layer": "translate",
    "uhat_to_ltl": "translate",
    "verify_tiling": "verify-tiling",
    "encode_grid": "search-tiling",
    "compile_tiling_to_brasp": "compile-tiling",
    "search_tiling": "search-tiling",
    "make_h_chain": "hchain",
    "bounded_emptiness": "empty",
    "min_witness": "min-witness",
    "bounded_equivalence": "equiv",
    "mutation_test": "mutate",
    "dispatch": "run",
}

_EXTENSIONS = {".uhat": "uhat", ".brasp": "brasp", ".ltl": "ltl",
               ".tiles": "tiles"}


def _infer_kind(path: str, override: Optional[str]) -> str:
    if override:
        return override
    for ext, kind in _EXTENSIONS.items():
        if path.endswith(ext):
            return kind
    raise UhatkitError(
        f"cannot infer the model kind of {path!r}; pass --kind")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UhatkitError(f"cannot read {path}: {e.strerror or e}") from e


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise UhatkitError(f"cannot write {path}: {e.strerror or e}") from e


def _with_context(path: str, parser, text: str):
    try:
        return parser(text)
    except UhatkitError as e:
        raise UhatkitError(f"{path}: {e}") from e


class _Loaded:
    def __init__(self, kind: str, model):
        self.kind = kind
        self.model = model

    def acceptor(self) -> Acceptor:
        if self.kind == "brasp":
            return Acceptor.for_brasp(self.model)
        if self.kind == "uhat":
            return Acceptor.for_uhat(self.model)
        phi, alphabet, outpos = self.model
        return Acceptor.for_ltl(phi, alphabet, outpos)


def _load(path: str, override: Optional[str]) -> _Loaded:
    kind = _infer_kind(path, override)
    text = _read(path)
    if kind == "brasp":
        return _Loaded(kind, _with_context(path, parse_brasp, text))
    if kind == "uhat":
        return _Loaded(kind, _with_context(path, parse_uhat, text))
    if kind == "ltl":
        return _Loaded(kind, _with_context(path, parse_ltl_file, text))
    raise UhatkitError(f"{path}: a {kind} file is not a runnable model")


def parse_word_arg(text: str) -> tuple[str, ...]:
    """Comma- or whitespace-separated symbols; otherwise each character is
    a symbol."""
    if "," in text:
        return tuple(p for p in (s.strip() for s in text.split(",")) if p)
    if any(ch.isspace() for ch in text):
        return tuple(text.split())
    return tuple(text)


def _emit(records: list[tuple[str, str]], plain: list[str], fmt: str) -> None:
    if fmt == "records":
        for k, v in records:
            print(f"{k}={v}")
    else:
        for line in plain:
            print(line)


def _word_str(w: Sequence[str]) -> str:
    return "".join(w) if all(len(s) == 1 for s in w) else " ".join(w)


# --- subcommand handlers -----------------------------------------------------

def _cmd_run(args) -> int:
    loaded = _load(args.model, args.kind)
    word = parse_word_arg(args.word)
    ok = loaded.acceptor().accepts(word)
    result = "accept" if ok else "reject"
    records = [("result", result)]
    if args.format == "records":
        # Extra trace-derived fields for scripting.
        if loaded.kind == "uhat":
            records.append(
                ("value_bits", str(value_bound_report(simulate(loaded.model, word)))))
        elif loaded.kind == "brasp":
            trace = eval_brasp(loaded.model, word)
            bits = trace.vectors[loaded.model.output]
            records.append(("output_vector", "".join("1" if b else "0" for b in bits)))
    _emit(records, [result], args.format)
    return 0


def _cmd_translate(args) -> int:
    pair = (args.from_kind, args.to_kind)
    if pair == ("ltl", "uhat"):
        phi, alphabet, outpos = _with_context(args.infile, parse_ltl_file,
                                              _read(args.infile))
        res = translate.ltl_to_uhat_result(phi, alphabet, outpos)
        from .uhat import format_uhat

        _write(args.outfile, format_uhat(res.uhat))
        report = res.report
    elif pair == ("brasp", "uhat"):
        program = _with_context(args.infile, parse_brasp, _read(args.infile))
        res = translate.brasp_to_uhat_result(program)
        from .uhat import format_uhat

        _write(args.outfile, format_uhat(res.uhat))
        report = res.report
    elif pair == ("uhat", "ltl"):
        t = _with_context(args.infile, parse_uhat, _read(args.infile))
        res = translate.uhat_to_ltl_result(t, cap=args.cap)
        _write(args.outfile, format_ltl_file(res.formula, t.embedding.alphabet,
                                             t.output_position))
        report = res.report
    else:
        raise UhatkitError(
            f"no translation from {args.from_kind} to {args.to_kind}")
    records = [("translation", f"{report.source}->{report.target}")]
    records += [(k, str(v)) for k, v in sorted(report.stats.items())]
    _emit(records, [report.summary()], args.format)
    return 0


def _cmd_compile_tiling(args) -> int:
    instance = _with_context(args.infile, tiling.parse_tiles_file,
                             _read(args.infile))
    program = tiling.compile_tiling_to_brasp(instance)
    from .brasp import format_brasp

    _write(args.outfile, format_brasp(program))
    records = [("tiles", str(len(instance.tiles))),
               ("width", str(instance.width)),
               ("defs", str(len(program.defs)))]
    _emit(records, [f"compiled {len(instance.tiles)} tiles, "
                    f"width {instance.width}, {len(program.defs)} definitions"],
          args.format)
    return 0


def _cmd_hchain(args) -> int:
    program, _ = tiling.make_h_chain(tiling.default_hchain(args.n))
    from .brasp import format_brasp

    _write(args.outfile, format_brasp(program))
    records = [("n", str(args.n)), ("defs", str(len(program.defs)))]
    _emit(records, [f"chain checker for n={args.n}, "
                    f"{len(program.defs)} definitions"], args.format)
    return 0


def _cmd_empty(args) -> int:
    acceptor = _load(args.model, args.kind).acceptor()
    report = analysis.bounded_emptiness(acceptor, args.max_len)
    records = [("outcome", report.outcome)]
    if report.witness is not None:
        records += [("witness", _word_str(report.witness)),
                    ("length", str(len(report.witness)))]
    records += [("max_len", str(report.max_len)),
                ("words_examined", str(report.words_examined))]
    _emit(records, analysis.format_search_report(report).splitlines(),
          args.format)
    return 0 if report.outcome == "witness" else 1


def _cmd_min_witness(args) -> int:
    acceptor = _load(args.model, args.kind).acceptor()
    w = analysis.min_witness(acceptor, args.max_len)
    if w is None:
        _emit([("witness", "none"), ("max_len", str(args.max_len))],
              [f"no witness up to length {args.max_len}"], args.format)
        return 1
    _emit([("witness", _word_str(w)), ("length", str(len(w)))],
          [_word_str(w)], args.format)
    return 0


def _cmd_equiv(args) -> int:
    a1 = _load(args.a, args.kind).acceptor()
    a2 = _load(args.b, args.kind).acceptor()
    w = analysis.bounded_equivalence(a1, a2, args.max_len)
    if w is None:
        _emit([("equivalent", "yes"), ("max_len", str(args.max_len))],
              [f"equivalent up to length {args.max_len}"], args.format)
        return 1
    _emit([("equivalent", "no"), ("counterexample", _word_str(w)),
           ("length", str(len(w)))],
          [f"counterexample: {_word_str(w)}"], args.format)
    return 0


def _cmd_mutate(args) -> int:
    acceptor = _load(args.model, args.kind).acceptor()
    word = parse_word_arg(args.word)
    report = analysis.mutation_test(acceptor, word, args.trials, args.seed)
    records = [
        ("accepted_original", "yes" if report.accepted_original else "no"),
        ("trials", str(report.trials)),
        ("seed", str(report.seed)),
        ("rejected_mutants", str(report.rejected_mutants)),
        ("accepting_mutants", str(len(report.accepting_mutants))),
    ]
    records += [("accepting", _word_str(m)) for m in report.accepting_mutants]
    _emit(records, analysis.format_mutation_report(report).splitlines(),
          args.format)
    return 0


def _cmd_verify_tiling(args) -> int:
    instance = _with_context(args.infile, tiling.parse_tiles_file,
                             _read(args.infile))
    grid = _with_context(args.grid, tiling.parse_grid_file, _read(args.grid))
    ok = tiling.verify_tiling(instance, grid)
    _emit([("valid", "yes" if ok else "no")],
          ["valid tiling" if ok else "invalid tiling"], args.format)
    return 0 if ok else 1


def _cmd_search_tiling(args) -> int:
    instance = _with_context(args.infile, tiling.parse_tiles_file,
                             _read(args.infile))
    grid = tiling.search_tiling(instance, args.max_rows)
    if grid is None:
        _emit([("found", "no"), ("max_rows", str(args.max_rows))],
              [f"no tiling with at most {args.max_rows} rows"], args.format)
        return 1
    encoding = tiling.encode_grid(instance, grid)
    rows = tiling.format_grid_file(grid).splitlines()
    records = [("found", "yes"), ("rows", str(grid.m)),
               ("encoding", _word_str(encoding))]
    _emit(records, rows + [f"encoding: {_word_str(encoding)}"], args.format)
    return 0


def _cmd_reachable(args) -> int:
    t = _with_context(args.model, parse_uhat, _read(args.model))
    sets = reachable_value_sets(t, cap=args.cap)
    records = [(f"layer{i}", str(len(s))) for i, s in enumerate(sets)]
    plain = [f"layer {i}: {len(s)} values" for i, s in enumerate(sets)]
    _emit(records, plain, args.format)
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uhatkit",
        description="Run, translate, and analyze hard-attention transformers, "
                    "B-RASP programs, and finite-word LTL formulas.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("text", "records"),
                       default="text", help="output style")

    def add_model(p):
        p.add_argument("--model", "-m", required=True, help="model file")
        p.add_argument("--kind", choices=("uhat", "brasp", "ltl"),
                       help="override the kind inferred from the extension")

    p = sub.add_parser("run", help="run a model on one word")
    add_model(p)
    p.add_argument("--word", "-w", required=True,
                   help="input word; comma/space separated symbols or "
                        "one character per symbol")
    add_format(p)
    p.set_defaults(handler=_cmd_run)

    p = sub.add_parser("translate", help="translate between model families")
    p.add_argument("--from", dest="from_kind", required=True,
                   choices=("ltl", "brasp", "uhat"))
    p.add_argument("--to", dest="to_kind", required=True,
                   choices=("uhat", "ltl"))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--cap", type=int, default=100000,
                   help="reachable-value-set cap for uhat-to-ltl")
    add_format(p)
    p.set_defaults(handler=_cmd_translate)

    p = sub.add_parser("compile-tiling",
                       help="compile a tiling instance to a B-RASP program")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_compile_tiling)

    p = sub.add_parser("hchain",
                       help="emit the chain-word checker program for "
                            "the default three-symbol relation")
    p.add_argument("--n", type=int, required=True,
                   help="counter width; blocks count 2^n")
    p.add_argument("--out", dest="outfile", required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_hchain)

    p = sub.add_parser("empty", help="bounded emptiness search")
    add_model(p)
    p.add_argument("--max-len", type=int, required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_empty)

    p = sub.add_parser("min-witness", help="shortest accepted word")
    add_model(p)
    p.add_argument("--max-len", type=int, required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_min_witness)

    p = sub.add_parser("equiv", help="bounded equivalence of two models")
    p.add_argument("--a", required=True, help="first model file")
    p.add_argument("--b", required=True, help="second model file")
    p.add_argument("--kind", choices=("uhat", "brasp", "ltl"),
                   help="override the kind of both files")
    p.add_argument("--max-len", type=int, required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_equiv)

    p = sub.add_parser("mutate", help="single-substitution mutation testing")
    add_model(p)
    p.add_argument("--word", "-w", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    add_format(p)
    p.set_defaults(handler=_cmd_mutate)

    p = sub.add_parser("verify-tiling", help="check a grid against an instance")
    p.add_argument("--in", dest="infile", required=True, help="instance file")
    p.add_argument("--grid", required=True, help="grid file")
    add_format(p)
    p.set_defaults(handler=_cmd_verify_tiling)

    p = sub.add_parser("search-tiling",
                       help="search for a valid grid by height")
    p.add_argument("--in", dest="infile", required=True, help="instance file")
    p.add_argument("--max-rows", type=int, required=True)
    add_format(p)
    p.set_defaults(handler=_cmd_search_tiling)

    p = sub.add_parser("reachable", help="per-layer reachable value set sizes")
    p.add_argument("--model", "-m", required=True, help="transformer file")
    p.add_argument("--cap", type=int, default=100000)
    add_format(p)
    p.set_defaults(handler=_cmd_reachable)

    return parser


def dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv))
    try:
        return args.handler(args)
    except UhatkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
