import pytest

import uhatkit as uk
from uhatkit.cli import (
    OPERATION_COVERAGE,
    SUBCOMMANDS,
    dispatch,
    parse_word_arg,
)

from conftest import AB


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def ltl_file(tmp_path):
    path = tmp_path / "since.ltl"
    phi = uk.since(uk.atom("a"), uk.atom("b"))
    path.write_text(uk.format_ltl_file(phi, AB, "last"))
    return str(path)


@pytest.fixture
def uhat_file(tmp_path):
    path = tmp_path / "atom.uhat"
    path.write_text(uk.format_uhat(uk.ltl_to_uhat(uk.atom("a"), AB)))
    return str(path)


@pytest.fixture
def brasp_file(tmp_path):
    path = tmp_path / "p.brasp"
    path.write_text("alphabet: 'a' 'b'\noutput: Y last\n"
                    "def Y(i) = Q['a'](i)\n")
    return str(path)


@pytest.fixture
def tiles_file(tmp_path):
    path = tmp_path / "inst.tiles"
    inst = uk.TilingInstance(1, (("t", uk.Tile(0, 0, 0, 0)),), "t")
    path.write_text(uk.format_tiles_file(inst))
    return str(path)


class TestRun:
    def test_accept_line(self, capsys, ltl_file):
        code, out, _ = run_cli(capsys, "run", "--model", ltl_file,
                               "--word", "ba")
        assert (code, out) == (0, "accept\n")

    def test_reject_line(self, capsys, ltl_file):
        code, out, _ = run_cli(capsys, "run", "--model", ltl_file,
                               "--word", "ab")
        assert (code, out) == (0, "reject\n")

    def test_uhat_records_include_value_bits(self, capsys, uhat_file):
        code, out, _ = run_cli(capsys, "run", "--model", uhat_file,
                               "--word", "a", "--format", "records")
        assert code == 0
        assert "result=accept\n" in out
        assert "value_bits=1\n" in out

    def test_brasp_records_include_output_vector(self, capsys, brasp_file):
        code, out, _ = run_cli(capsys, "run", "--model", brasp_file,
                               "--word", "aba", "--format", "records")
        assert code == 0
        assert "output_vector=101\n" in out

    def test_kind_override(self, capsys, tmp_path):
        path = tmp_path / "noext"
        path.write_text(uk.format_ltl_file(uk.atom("a"), AB, "last"))
        code, out, _ = run_cli(capsys, "run", "--model", str(path),
                               "--kind", "ltl", "--word", "a")
        assert (code, out) == (0, "accept\n")

    def test_missing_extension_is_an_error(self, capsys, tmp_path):
        path = tmp_path / "noext"
        path.write_text("x")
        code, _, err = run_cli(capsys, "run", "--model", str(path),
                               "--word", "a")
        assert code == 2
        assert "error:" in err and "--kind" in err


class TestTranslateAndEquiv:
    def test_translation_then_equivalence_session(self, capsys, tmp_path,
                                                  ltl_file):
        out_uhat = str(tmp_path / "since.uhat")
        code, out, _ = run_cli(capsys, "translate", "--from", "ltl",
                               "--to", "uhat", "--in", ltl_file,
                               "--out", out_uhat)
        assert code == 0
        assert "ltl -> uhat" in out
        code, out, _ = run_cli(capsys, "equiv", "--a", ltl_file,
                               "--b", out_uhat, "--max-len", "5")
        assert code == 1
        assert out == "equivalent up to length 5\n"

    def test_uhat_to_ltl_round(self, capsys, tmp_path, uhat_file):
        out_ltl = str(tmp_path / "back.ltl")
        code, _, _ = run_cli(capsys, "translate", "--from", "uhat",
                             "--to", "ltl", "--in", uhat_file,
                             "--out", out_ltl)
        assert code == 0
        code, out, _ = run_cli(capsys, "equiv", "--a", uhat_file,
                               "--b", out_ltl, "--max-len", "4")
        assert (code, out) == (1, "equivalent up to length 4\n")

    def test_counterexample_found(self, capsys, tmp_path):
        f1 = tmp_path / "a.ltl"
        f2 = tmp_path / "b.ltl"
        f1.write_text(uk.format_ltl_file(uk.atom("a"), AB, "last"))
        f2.write_text(uk.format_ltl_file(uk.atom("b"), AB, "last"))
        code, out, _ = run_cli(capsys, "equiv", "--a", str(f1),
                               "--b", str(f2), "--max-len", "3")
        assert code == 0
        assert out == "counterexample: a\n"

    def test_unsupported_direction(self, capsys, ltl_file, tmp_path):
        code, _, err = run_cli(capsys, "translate", "--from", "ltl",
                               "--to", "ltl", "--in", ltl_file,
                               "--out", str(tmp_path / "x"))
        assert code == 2
        assert "no translation" in err


class TestTilingCommands:
    def test_compile_then_empty_matches_search(self, capsys, tmp_path,
                                               tiles_file):
        out_brasp = str(tmp_path / "inst.brasp")
        code, _, _ = run_cli(capsys, "compile-tiling", "--in", tiles_file,
                             "--out", out_brasp)
        assert code == 0
        code, out, _ = run_cli(capsys, "empty", "--model", out_brasp,
                               "--max-len", "6")
        assert code == 0
        inst = uk.parse_tiles_file(open(tiles_file).read())
        expected = uk.encode_grid(inst, uk.search_tiling(inst, 1))
        assert f"witness: {''.join(expected)}\n" in out

    def test_verify_tiling_exit_codes(self, capsys, tmp_path, tiles_file):
        good = tmp_path / "good.grid"
        good.write_text("t t\n")
        code, out, _ = run_cli(capsys, "verify-tiling", "--in", tiles_file,
                               "--grid", str(good))
        assert (code, out) == (0, "valid tiling\n")
        bad = tmp_path / "bad.tiles"
        inst = uk.TilingInstance(
            1, (("t", uk.Tile(0, 0, 0, 0)), ("u", uk.Tile(0, 0, 0, 0))), "u")
        bad.write_text(uk.format_tiles_file(inst))
        code, out, _ = run_cli(capsys, "verify-tiling", "--in", str(bad),
                               "--grid", str(good))
        assert (code, out) == (1, "invalid tiling\n")

    def test_search_tiling_prints_grid_and_encoding(self, capsys, tiles_file):
        code, out, _ = run_cli(capsys, "search-tiling", "--in", tiles_file,
                               "--max-rows", "3")
        assert code == 0
        assert out == "t t\nencoding: 0t#1t#\n"

    def test_search_tiling_absent(self, capsys, tmp_path):
        inst = uk.TilingInstance(1, (("t", uk.Tile(1, 0, 1, 0)),), "t")
        path = tmp_path / "bad.tiles"
        path.write_text(uk.format_tiles_file(inst))
        code, out, _ = run_cli(capsys, "search-tiling", "--in", str(path),
                               "--max-rows", "2")
        assert code == 1
        assert out == "no tiling with at most 2 rows\n"

    def test_hchain_emits_a_loadable_program(self, capsys, tmp_path):
        out_brasp = str(tmp_path / "chain.brasp")
        code, out, _ = run_cli(capsys, "hchain", "--n", "1",
                               "--out", out_brasp)
        assert code == 0
        assert "chain checker for n=1" in out
        program = uk.parse_brasp(open(out_brasp).read())
        assert uk.brasp_accepts(program, ("0", "a", "#", "1", "b", "#"))


class TestAnalysisCommands:
    def test_min_witness_found(self, capsys, brasp_file):
        code, out, _ = run_cli(capsys, "min-witness", "--model", brasp_file,
                               "--max-len", "3")
        assert (code, out) == (0, "a\n")

    def test_min_witness_absent(self, capsys, tmp_path):
        path = tmp_path / "never.ltl"
        path.write_text(uk.format_ltl_file(uk.FALSE, AB, "last"))
        code, out, _ = run_cli(capsys, "min-witness", "--model", str(path),
                               "--max-len", "3")
        assert (code, out) == (1, "no witness up to length 3\n")

    def test_empty_exhausted_exit_code(self, capsys, tmp_path):
        path = tmp_path / "never.ltl"
        path.write_text(uk.format_ltl_file(uk.FALSE, AB, "last"))
        code, out, _ = run_cli(capsys, "empty", "--model", str(path),
                               "--max-len", "2")
        assert code == 1
        assert "outcome: exhausted" in out

    def test_mutate_deterministic_output(self, capsys, ltl_file):
        argv = ("mutate", "--model", ltl_file, "--word", "ba",
                "--trials", "8", "--seed", "3")
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2
        assert "trials: 8" in out1 and "seed: 3" in out1

    def test_mutate_records_format(self, capsys, ltl_file):
        code, out, _ = run_cli(capsys, "mutate", "--model", ltl_file,
                               "--word", "ba", "--trials", "2",
                               "--format", "records")
        assert code == 0
        assert "accepted_original=yes\n" in out
        assert "trials=2\n" in out

    def test_reachable_sizes(self, capsys, uhat_file):
        code, out, _ = run_cli(capsys, "reachable", "--model", uhat_file)
        assert code == 0
        assert out == "layer 0: 2 values\n"


class TestErrors:
    def test_missing_file(self, capsys):
        code, out, err = run_cli(capsys, "run", "--model", "no/such.ltl",
                                 "--word", "a")
        assert code == 2
        assert out == ""
        assert err.startswith("error: cannot read no/such.ltl")

    def test_parse_error_names_the_file(self, capsys, tmp_path):
        path = tmp_path / "broken.brasp"
        path.write_text("alphabet: 'a'\noutput: Y last\ndef Y(i) = &\n")
        code, _, err = run_cli(capsys, "run", "--model", str(path),
                               "--word", "a")
        assert code == 2
        assert "broken.brasp" in err and "line 3" in err

    def test_unknown_subcommand_exits_via_argparse(self, capsys):
        with pytest.raises(SystemExit) as e:
            dispatch(["frobnicate"])
        assert e.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as e:
            dispatch(["run", "--word", "a"])
        assert e.value.code == 2


class TestWordArgument:
    def test_plain_characters(self):
        assert parse_word_arg("aba") == ("a", "b", "a")

    def test_comma_separated(self):
        assert parse_word_arg("0,t1,#") == ("0", "t1", "#")

    def test_whitespace_separated(self):
        assert parse_word_arg("0 t1 #") == ("0", "t1", "#")

    def test_trailing_comma_ignored(self):
        assert parse_word_arg("a,b,") == ("a", "b")


class TestCoverage:
    def test_every_subcommand_exists_and_is_used(self):
        parser_cmds = set(SUBCOMMANDS)
        assert set(OPERATION_COVERAGE.values()) <= parser_cmds
        assert parser_cmds <= set(OPERATION_COVERAGE.values())

    def test_operations_are_real_package_names(self):
        import uhatkit
        for op in OPERATION_COVERAGE:
            assert hasattr(uhatkit, op), op

    def test_byte_identical_reruns(self, capsys, tiles_file):
        argv = ("search-tiling", "--in", tiles_file, "--max-rows", "2",
                "--format", "records")
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2
