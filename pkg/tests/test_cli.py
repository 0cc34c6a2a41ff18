"""End-to-end CLI behaviour: commands, formats, env overrides, exit codes."""

import io
import sys

import pytest

from cbpvdp.cli import EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, main

COIN = "produce (ret * (+) omega[V unit])\n"


@pytest.fixture
def coin_file(tmp_path):
    p = tmp_path / "coin.cbpv"
    p.write_text(COIN)
    return str(p)


def run_cli(capsys, argv, stdin_text=None):
    if stdin_text is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin_text)
        try:
            code = main(argv)
        finally:
            sys.stdin = old
    else:
        code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_ok(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["check", coin_file])
    assert code == EXIT_OK
    assert "ok:" in out
    assert "F V unit" in out


def test_check_type_error_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.cbpv"
    p.write_text("obs[1/2] (produce 3)\n")
    code, _out, err = run_cli(capsys, ["check", str(p)])
    assert code == EXIT_SEMANTIC
    assert "error" in err


def test_check_unbound_variable_exit_1(tmp_path, capsys):
    p = tmp_path / "free.cbpv"
    p.write_text("produce zz\n")
    code, _out, err = run_cli(capsys, ["check", str(p)])
    assert code == EXIT_SEMANTIC
    assert "unbound" in err


def test_check_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "broken.cbpv"
    p.write_text("produce (ret *\n")
    code, _out, err = run_cli(capsys, ["check", str(p)])
    assert code == EXIT_PARSE
    assert "parse error" in err


def test_run_human(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["run", coin_file])
    assert code == EXIT_OK
    assert "lower bound 1/2" in out
    assert "exact" in out


def test_run_records(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["--format", "records", "run", coin_file])
    assert code == EXIT_OK
    lines = [ln for ln in out.splitlines() if ln]
    fields = dict(ln.split("=", 1) for ln in lines)
    assert fields["lower"] == "1/2"
    assert fields["exact"] == "true"
    assert fields["lower_decimal"] == "0.500000"


def test_run_with_trace(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["run", coin_file, "--trace"])
    assert code == EXIT_OK
    assert "start" in out
    assert "init-produce" in out
    assert "split-pchoice" in out
    assert "lower bound 1/2" in out


def test_run_reads_stdin(capsys):
    code, out, _ = run_cli(capsys, ["run", "-"], stdin_text=COIN)
    assert code == EXIT_OK
    assert "lower bound 1/2" in out


def test_eval_reports_value_and_mass(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["eval", coin_file])
    assert code == EXIT_OK
    assert "must{dist{1/2 @ tt}}" in out
    assert "guaranteed mass 1/2" in out


def test_eval_records_fields(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["--format", "records", "eval", coin_file])
    assert code == EXIT_OK
    fields = dict(ln.split("=", 1) for ln in out.splitlines() if ln)
    assert fields["mass"] == "1/2"
    assert fields["exact"] == "true"


def test_eval_rec_depth_flag(tmp_path, capsys):
    p = tmp_path / "geo.cbpv"
    p.write_text("produce (rec u : V unit. (ret * (+) u))\n")
    code, out, _ = run_cli(capsys, ["--rec-depth", "3", "eval", str(p)])
    assert code == EXIT_OK
    assert "7/8" in out
    assert "approximant" in out


def test_expand_elaborates_arrow_sequencing(tmp_path, capsys):
    p = tmp_path / "eta.cbpv"
    p.write_text(
        "produce * to x : unit in \\y : int. produce (ret *)\n")
    code, out, _ = run_cli(capsys, ["expand", str(p)])
    assert code == EXIT_OK
    # elaboration pushes sequencing under a fresh lambda
    assert out.startswith("(\\")
    assert "to x : unit in" in out
    assert ": (int -> F V unit)" in out


def test_trace_command(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["trace", coin_file])
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("start")
    assert any(ln.startswith("split-pchoice") for ln in out.splitlines())


def test_trace_records(coin_file, capsys):
    code, out, _ = run_cli(capsys, ["--format", "records", "trace", coin_file])
    assert code == EXIT_OK
    assert "rule=start" in out
    assert "rule=split-pchoice" in out


def test_adequacy_command(capsys):
    code, out, _ = run_cli(capsys, [
        "--max-budget", "20000", "adequacy", "--count", "15",
        "--max-depth", "5"])
    assert code == EXIT_OK
    assert "total: 15" in out
    assert "exact-match" in out


def test_adequacy_records(capsys):
    code, out, _ = run_cli(capsys, [
        "--format", "records", "--max-budget", "20000",
        "adequacy", "--count", "5", "--max-depth", "4"])
    assert code == EXIT_OK
    assert "total=5" in out
    assert out.count("verdict=") == 5


def test_fuzz_command(capsys):
    code, out, _ = run_cli(capsys, ["fuzz", "--count", "20",
                                    "--max-depth", "5"])
    assert code == EXIT_OK
    assert "fuzz: 20/20 ok" in out


def test_seed_changes_fuzz_corpus(capsys):
    argv = ["fuzz", "--count", "8", "--max-depth", "5", "--print-terms"]
    _c, out_a, _ = run_cli(capsys, ["--seed", "1"] + argv)
    _c, out_b, _ = run_cli(capsys, ["--seed", "2"] + argv)
    _c, out_a2, _ = run_cli(capsys, ["--seed", "1"] + argv)
    assert out_a == out_a2
    assert out_a != out_b


def test_env_overrides(coin_file, capsys, monkeypatch):
    monkeypatch.setenv("CBPVDP_FORMAT", "records")
    code, out, _ = run_cli(capsys, ["run", coin_file])
    assert code == EXIT_OK
    assert "lower=1/2" in out


def test_env_rec_depth(tmp_path, capsys, monkeypatch):
    p = tmp_path / "geo.cbpv"
    p.write_text("produce (rec u : V unit. (ret * (+) u))\n")
    monkeypatch.setenv("CBPVDP_REC_DEPTH", "2")
    code, out, _ = run_cli(capsys, ["eval", str(p)])
    assert code == EXIT_OK
    assert "3/4" in out


def test_flag_beats_env(coin_file, capsys, monkeypatch):
    monkeypatch.setenv("CBPVDP_FORMAT", "records")
    code, out, _ = run_cli(capsys, ["--format", "human", "run", coin_file])
    assert code == EXIT_OK
    assert "lower bound 1/2" in out


def test_epsilon_flag_parses_fractions(coin_file, capsys):
    code, _out, _ = run_cli(capsys, ["--epsilon", "1/1000", "run", coin_file])
    assert code == EXIT_OK
    with pytest.raises(SystemExit):
        main(["--epsilon", "nonsense", "run", coin_file])


def test_console_script_is_wired():
    import importlib.metadata as md
    eps = md.entry_points()
    if hasattr(eps, "select"):
        scripts = eps.select(group="console_scripts", name="cbpvdp")
        assert any(e.value == "cbpvdp.cli:main" for e in scripts)
