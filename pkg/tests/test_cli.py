from fractions import Fraction

from ieccsim.cli import main
from ieccsim.rationals import parse_fraction


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_noiseless(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--protocol", "611", "--n", "3", "--epsilon", "1/2",
        "--m", "16", "--adversary", "null", "--x", "101",
    )
    assert code == 0
    assert "x=101 success=True" in out
    assert "erasure_fraction=0" in out


def test_run_divisibility_error(capsys):
    code, _out, err = run_cli(capsys, "run", "--protocol", "611", "--m", "12", "--x", "101")
    assert code == 2
    assert "divisible by 8" in err


def test_run_all_inputs(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--protocol", "35", "--n", "2", "--m", "16",
        "--adversary", "random", "--budget", "1/4", "--inputs", "all", "--seed", "1",
    )
    assert code == 0
    assert out.count("success=") == 4


def test_run_writes_identical_traces(tmp_path, capsys):
    argv = ["run", "--protocol", "611", "--n", "2", "--m", "16",
            "--adversary", "random", "--budget", "2/5", "--x", "10", "--seed", "9"]
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert main(argv + ["--trace", str(a)]) in (0, 1)
    capsys.readouterr()
    assert main(argv + ["--trace", str(b)]) in (0, 1)
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(b'{"block"')


def test_trace_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("IECC_TRACE_DIR", str(tmp_path))
    code, _, _ = run_cli(
        capsys, "run", "--protocol", "611", "--n", "2", "--m", "16",
        "--x", "10", "--trace", "t.jsonl",
    )
    assert code == 0
    assert (tmp_path / "t.jsonl").exists()


def test_sweep_budget_zero_no_failures(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--protocol", "611", "--n", "2", "--m", "32",
        "--budgets", "0", "--reps", "1",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "budget,runs,failures,violations,mean_fraction"
    budget, runs, failures, violations, mean = lines[1].split(",")
    assert (budget, failures, violations, mean) == ("0", "0", "0", "0")


def test_sweep_budget_one_fails_and_roundtrips(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run_cli(
        capsys, "sweep", "--protocol", "611", "--n", "2", "--m", "32",
        "--budgets", "1", "--reps", "1", "--out", str(out_file),
    )
    assert code == 0
    text = out_file.read_text()
    header, row = text.strip().splitlines()
    budget, runs, failures, violations, mean = row.split(",")
    assert int(failures) > 0
    # CSV round-trip: the rationals re-parse exactly
    assert parse_fraction(budget) == Fraction(1)
    assert 0 <= parse_fraction(mean) <= 1
    code2, out2, _ = run_cli(
        capsys, "sweep", "--protocol", "611", "--n", "2", "--m", "32",
        "--budgets", "1", "--reps", "1",
    )
    assert out2 == text  # byte-identical summary for identical arguments


def test_attack_confusion_cli(capsys, tmp_path):
    plan_file = tmp_path / "plan.jsonl"
    code, out, _ = run_cli(
        capsys, "attack", "confusion", "--protocol", "611", "--n", "3",
        "--m", "64", "--out", str(plan_file),
    )
    assert code == 0
    assert "views_identical=True" in out
    assert "within_bound=True" in out
    assert plan_file.read_text().startswith('{"description"')


def test_attack_bitflip_cli(capsys):
    code, out, _ = run_cli(capsys, "attack", "bitflip", "--n", "3", "--count", "8")
    assert code == 0
    assert "views_identical=True" in out and "within_bound=True" in out


def test_attack_search_cli(capsys):
    code, out, _ = run_cli(
        capsys, "attack", "search", "--protocol", "611", "--n", "2",
        "--m", "32", "--budget", "0",
    )
    assert code == 0
    assert "fooling_plan=none" in out
    code, out, _ = run_cli(
        capsys, "attack", "search", "--protocol", "611", "--n", "2",
        "--m", "32", "--budget", "1",
    )
    assert code == 0
    assert "fooling_plan=found" in out


def test_attack_search_too_large_exit_code(capsys):
    code, _out, err = run_cli(
        capsys, "attack", "search", "--protocol", "611", "--n", "2",
        "--m", "32", "--epsilon", "1/3", "--budget", "1",
    )
    assert code == 3
    assert "attack generator error" in err


def test_codebook_cycle(tmp_path, capsys):
    cb_file = tmp_path / "cb.txt"
    code, out, _ = run_cli(
        capsys, "codebook", "build", str(cb_file), "--count", "8",
        "--length", "64", "--epsilon", "1/8", "--forbid-constants",
    )
    assert code == 0 and "built count=8" in out
    code, out, _ = run_cli(capsys, "codebook", "verify", str(cb_file),
                           "--triple", "exhaustive")
    assert code == 0 and "certified=True" in out
    code, out, _ = run_cli(capsys, "codebook", "show", str(cb_file))
    assert code == 0
    assert len(out.strip().splitlines()) == 8

    # hand-corrupt one word: verification must now fail
    lines = cb_file.read_text().splitlines()
    lines[2] = lines[1]
    cb_file.write_text("\n".join(lines) + "\n")
    code, out, _ = run_cli(capsys, "codebook", "verify", str(cb_file),
                           "--triple", "exhaustive")
    assert code == 0 and "certified=False" in out


def test_codebook_construction_failure_exit_code(tmp_path, capsys):
    code, _out, err = run_cli(
        capsys, "codebook", "build", str(tmp_path / "x.txt"),
        "--count", "200", "--length", "8", "--epsilon", "1/8",
    )
    assert code == 4
    assert "construction failed" in err


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("protocol=611\nn=2\nm=16\nx=11\nadversary=null\n")
    code, out, _ = run_cli(capsys, "run", "--config", str(config))
    assert code == 0 and "x=11 success=True" in out
    # a flag overrides the file value
    code, out, _ = run_cli(capsys, "run", "--config", str(config), "--x", "01")
    assert code == 0 and "x=01 success=True" in out
