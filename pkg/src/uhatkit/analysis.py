"""Bounded language analyses over a uniform acceptor interface.

Exact emptiness and equivalence for these acceptor families are
intractable in general, so every operation here enumerates words up to a
caller-chosen length bound. The enumeration order is fixed: length first,
then lexicographic in the acceptor's declared alphabet order, making every
reported witness reproducible. Wall-clock time is recorded on reports for
callers that want it but is deliberately excluded from the stable text
renderings.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .brasp import BraspProgram, BraspRunner, Word, check_program
from .errors import AlphabetMismatchError, EvaluationError, UnknownSymbolError
from .ltl import LtlEvaluator, LtlFormula, atoms_of, words_over
from .uhat import Uhat, check_model, uhat_accepts


@dataclass(frozen=True)
class Acceptor:
    """A language acceptor with a uniform accepts(word) surface.

    Wraps a B-RASP program, a transformer, or an LTL formula with an
    output position; the wrapper adds no semantics of its own.
    """

    kind: str  # "brasp", "uhat", or "ltl"
    alphabet: tuple[str, ...]
    _accepts: Callable[[Sequence[str]], bool]

    @staticmethod
    def for_brasp(program: BraspProgram) -> "Acceptor":
        check_program(program)
        runner = BraspRunner(program)
        return Acceptor("brasp", program.alphabet, runner.accepts)

    @staticmethod
    def for_uhat(t: Uhat) -> "Acceptor":
        check_model(t)
        return Acceptor("uhat", t.embedding.alphabet,
                        lambda w: uhat_accepts(t, w))

    @staticmethod
    def for_ltl(phi: LtlFormula, alphabet: Sequence[str],
                output_position: str = "last") -> "Acceptor":
        alphabet = tuple(alphabet)
        stray = atoms_of(phi) - set(alphabet)
        if stray:
            raise UnknownSymbolError(
                f"formula atoms {sorted(stray)} not in the alphabet")
        if output_position not in ("first", "last"):
            raise EvaluationError(f"unknown output position {output_position!r}")
        ev = LtlEvaluator(phi)
        return Acceptor("ltl", alphabet,
                        lambda w: ev.accepts(w, output_position))

    def accepts(self, word: Sequence[str]) -> bool:
        return self._accepts(word)


@dataclass(frozen=True)
class SearchReport:
    outcome: str  # "witness" or "exhausted"
    witness: Optional[Word]
    max_len: int
    words_examined: int
    wall_time: float


def bounded_emptiness(acceptor: Acceptor, max_len: int) -> SearchReport:
    """First accepted word in length-then-lexicographic order, or
    exhaustion after every nonempty word of length <= max_len."""
    if max_len < 1:
        raise EvaluationError("max_len must be at least 1")
    start = time.perf_counter()
    examined = 0
    for w in words_over(acceptor.alphabet, max_len):
        examined += 1
        if acceptor.accepts(w):
            return SearchReport("witness", w, max_len, examined,
                                time.perf_counter() - start)
    return SearchReport("exhausted", None, max_len, examined,
                        time.perf_counter() - start)


def min_witness(acceptor: Acceptor, max_len: int) -> Optional[Word]:
    """Shortest accepted word (lexicographically first among equals), or
    None when no word of length <= max_len is accepted."""
    return bounded_emptiness(acceptor, max_len).witness


def bounded_equivalence(a1: Acceptor, a2: Acceptor,
                        max_len: int) -> Optional[Word]:
    """Smallest word on which the two acceptors disagree, or None when
    they agree on every word of length <= max_len."""
    if a1.alphabet != a2.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {list(a1.alphabet)} vs {list(a2.alphabet)}")
    if max_len < 1:
        raise EvaluationError("max_len must be at least 1")
    for w in words_over(a1.alphabet, max_len):
        if a1.accepts(w) != a2.accepts(w):
            return w
    return None


@dataclass(frozen=True)
class MutationReport:
    accepted_original: bool
    rejected_mutants: int
    accepting_mutants: tuple[Word, ...]
    trials: int
    seed: int


def mutation_test(acceptor: Acceptor, word: Sequence[str], trials: int,
                  seed: int) -> MutationReport:
    """Accepts on the original word and on `trials` mutants, each obtained
    by substituting one uniformly chosen position with a uniformly chosen
    different symbol. Insertions and deletions are deliberately not used,
    so mutants keep the original length."""
    word = tuple(word)
    if not word:
        raise EvaluationError("mutation testing needs a nonempty word")
    if len(acceptor.alphabet) < 2:
        raise EvaluationError(
            "mutation needs at least two symbols to substitute between")
    rng = random.Random(seed)
    accepted_original = acceptor.accepts(word)
    rejected = 0
    accepting: list[Word] = []
    for _ in range(trials):
        pos = rng.randrange(len(word))
        others = [s for s in acceptor.alphabet if s != word[pos]]
        mutant = word[:pos] + (rng.choice(others),) + word[pos + 1:]
        if acceptor.accepts(mutant):
            accepting.append(mutant)
        else:
            rejected += 1
    return MutationReport(accepted_original, rejected, tuple(accepting),
                          trials, seed)


def _format_word(w: Word) -> str:
    if all(len(s) == 1 for s in w):
        return "".join(w)
    return " ".join(w)


def format_search_report(r: SearchReport) -> str:
    """Stable text rendering; wall time is intentionally omitted so equal
    searches produce byte-identical reports."""
    lines = [f"outcome: {r.outcome}"]
    if r.witness is not None:
        lines.append(f"witness: {_format_word(r.witness)}")
        lines.append(f"length: {len(r.witness)}")
    lines.append(f"max_len: {r.max_len}")
    lines.append(f"words_examined: {r.words_examined}")
    return "\n".join(lines) + "\n"


def format_mutation_report(r: MutationReport) -> str:
    lines = [
        f"accepted_original: {'yes' if r.accepted_original else 'no'}",
        f"trials: {r.trials}",
        f"seed: {r.seed}",
        f"rejected_mutants: {r.rejected_mutants}",
        f"accepting_mutants: {len(r.accepting_mutants)}",
    ]
    for m in r.accepting_mutants:
        lines.append(f"accepting: {_format_word(m)}")
    return "\n".join(lines) + "\n"
