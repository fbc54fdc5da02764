import os
import subprocess
import sys

import pytest

from normlab.cli import main
from normlab.martingale import (
    FSMartingale,
    periodic_full_stake,
    serialize_martingale,
)
from normlab.numstream import digits, parse_spec, read_digit_cache
from normlab.transducer import doubling_transducer, serialize_transducer

from fractions import Fraction


@pytest.fixture
def doubling_file(tmp_path):
    path = tmp_path / "dbl.txt"
    path.write_text(serialize_transducer(doubling_transducer(3)) + "\n")
    return str(path)


@pytest.fixture
def fullstake_file(tmp_path):
    path = tmp_path / "bets.txt"
    path.write_text(serialize_martingale(periodic_full_stake(2, [0, 1])) + "\n")
    return str(path)


def test_repsys_cfn_prints_single_value(capsys):
    assert main(["repsys", "cfn", "--spec", "rat:1/2", "--base", "3", "--f", "identity", "--n", "7"]) == 0
    assert capsys.readouterr().out.strip() == "7"


def test_unknown_subcommand_and_flags_exit_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["digits", "--spec", "rat:1/2", "--wat"]) == 2
    assert main(["digits", "--spec", "rat:1/x", "--base", "10", "--n", "4"]) == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "digits" in capsys.readouterr().out


def test_module_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "normlab.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0


def test_digits_stdout_matches_library(capsys):
    assert main(["digits", "--spec", "champernowne:10", "--base", "10", "--n", "16"]) == 0
    out = capsys.readouterr().out.strip()
    expected = digits(parse_spec("champernowne:10"), 10, 16).digits
    assert out == "".join(str(d) for d in expected)


def test_blocks_csv_and_summary(capsys):
    assert main(["blocks", "--spec", "rat:1/3", "--base", "10", "--k", "1", "--n", "50,100"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().splitlines()
    assert lines[0] == "spec,base,k,n,discrepancy_num,discrepancy_den"
    assert lines[1] == "rat:1/3,10,1,50,9,10"
    assert "discrepancy" in captured.err


def test_transducer_run_cd_cnd(doubling_file, capsys):
    assert main(["transducer", "run", "--machine", doubling_file, "--input", "101"]) == 0
    assert capsys.readouterr().out.strip() == "11011"
    assert main(["transducer", "cd", "--machine", doubling_file, "--target", "1111"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert main(["transducer", "cd", "--machine", doubling_file, "--target", "1"]) == 0
    assert capsys.readouterr().out.strip() == "not-an-output"
    assert main(["transducer", "cnd", "--machine", doubling_file, "--spec", "rat:1/2", "--n", "10"]) == 0
    assert capsys.readouterr().out.strip() == "5"


def test_budget_exhaustion_exits_3(doubling_file, capsys):
    code = main(
        ["transducer", "cnd", "--machine", doubling_file, "--spec", "sqrt:2", "--n", "12", "--budget", "10"]
    )
    assert code == 3


def test_martingale_check_fair_and_unfair(fullstake_file, tmp_path, capsys):
    assert main(["martingale", "check", "--machine", fullstake_file]) == 0
    unfair = FSMartingale(
        2,
        ["q"],
        "q",
        {("q", 0): "q", ("q", 1): "q"},
        {"q": (Fraction(1, 2), Fraction(1, 4))},
    )
    path = tmp_path / "unfair.txt"
    path.write_text(serialize_martingale(unfair) + "\n")
    assert main(["martingale", "check", "--machine", str(path)]) == 1
    assert "3/4" in capsys.readouterr().out


def test_martingale_capital_word_and_spec(fullstake_file, capsys):
    assert main(["martingale", "capital", "--machine", fullstake_file, "--word", "0101"]) == 0
    assert capsys.readouterr().out.strip() == "16"
    assert main(["martingale", "capital", "--machine", fullstake_file, "--spec", "rat:1/3", "--n", "10"]) == 0
    assert capsys.readouterr().out.strip() == "1024"
    assert main(["martingale", "capital", "--machine", fullstake_file]) == 2


def test_martingale_profile_csv(fullstake_file, capsys):
    assert main(
        ["martingale", "profile", "--machine", fullstake_file, "--spec", "rat:1/3", "--n", "64"]
    ) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "spec,base,n,log2_capital"
    assert "sustained" in captured.err


def test_repsys_cfnd_single_value(doubling_file, capsys):
    assert main(
        ["repsys", "cfnd", "--spec", "rat:1/2", "--base", "3", "--f", "identity",
         "--machine", doubling_file, "--n", "9"]
    ) == 0
    assert capsys.readouterr().out.strip() == "5"


def test_repsys_weak_profile_csv(capsys):
    assert main(
        ["repsys", "weak", "--spec", "rat:1/2", "--base", "3", "--f", "identity", "--n", "2,4,6"]
    ) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "label,spec,n,value,cap_hit,ratio_num,ratio_den"
    assert len(lines) == 4


def test_repsys_strong_multiple_machines(doubling_file, capsys):
    assert main(
        ["repsys", "strong", "--spec", "rat:1/2", "--base", "3", "--f", "identity",
         "--machine", f"dbl={doubling_file}", "--machine", doubling_file, "--n", "4,6"]
    ) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5  # header + 2 machines x 2 grid points


def test_dim_csv(capsys):
    assert main(["dim", "--spec", "rat:1/3", "--base", "2", "--n", "32,64"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().splitlines()
    assert lines[0] == "spec,base,n,codec,k_m,ratio"
    assert len(lines) == 9  # 2 lengths x 4 codecs
    assert "estimate" in captured.err


def test_dim_custom_codecs(capsys):
    assert main(
        ["dim", "--spec", "rat:1/3", "--base", "2", "--n", "32", "--codecs", "lz,repsys:identity"]
    ) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3


def test_experiment_separation_passes(capsys):
    assert main(["experiment", "separation", "--base", "3", "--nmax", "6"]) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "experiment,check,expected,observed,passed"
    assert "verdict: PASS" in captured.err


def test_experiment_interleave_exit_codes(capsys):
    # the 0.02 default is not met at n=10^4; a looser threshold is
    assert main(["experiment", "interleave"]) == 1
    assert main(["experiment", "interleave", "--z-threshold", "0.05"]) == 0


def test_experiment_compose_seeded(capsys):
    assert main(["experiment", "compose", "--trials", "10", "--seed", "3"]) == 0
    assert "seed=3" in capsys.readouterr().err


def test_outdir_writes_csv_text_figure(tmp_path, capsys):
    outdir = str(tmp_path / "out")
    assert main(
        ["blocks", "--spec", "rat:1/3", "--base", "10", "--k", "1", "--n", "50", "--outdir", outdir]
    ) == 0
    names = sorted(os.listdir(outdir))
    assert names == ["blocks.csv", "blocks.png", "blocks.txt"]
    assert os.path.getsize(os.path.join(outdir, "blocks.png")) > 1000
    assert not [n for n in names if n.startswith(".tmp-")]


def test_cache_fresh_serve_extend(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NORMLAB_CACHE_DIR", str(tmp_path / "cache"))
    assert main(["cache", "--spec", "champernowne:10", "--base", "10", "--n", "300"]) == 0
    path = capsys.readouterr().out.strip()
    before = open(path, "rb").read()
    # shorter re-request leaves the file byte-identical
    assert main(["cache", "--spec", "champernowne:10", "--base", "10", "--n", "100"]) == 0
    capsys.readouterr()
    assert open(path, "rb").read() == before
    # longer request appends, never rewrites the existing prefix
    assert main(["cache", "--spec", "champernowne:10", "--base", "10", "--n", "600"]) == 0
    capsys.readouterr()
    base, spec_string, ds = read_digit_cache(path)
    assert (base, spec_string, len(ds)) == (10, "champernowne:10", 600)
    assert ds[:300] == digits(parse_spec("champernowne:10"), 10, 300).digits
    # cached digits are served back through the file: spec
    assert main(["digits", "--spec", f"file:10:{path}", "--base", "10", "--n", "600"]) == 0
    served = capsys.readouterr().out.strip()
    assert served == "".join(str(d) for d in ds)


def test_cache_refuses_mismatched_file(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NORMLAB_CACHE_DIR", str(tmp_path))
    target = tmp_path / "x.digits"
    assert main(["cache", "--spec", "rat:1/3", "--base", "10", "--n", "50", "--path", str(target)]) == 0
    assert main(["cache", "--spec", "rat:1/2", "--base", "10", "--n", "50", "--path", str(target)]) == 2


def test_batch_runs_jobs_and_injects_seed(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "[specs]\nx = rat:1/3\n"
        "[jobs]\n"
        "blocks --spec x --base 10 --k 1 --n 60\n"
        "experiment compose --trials 5\n"
        "[output]\ndir = results\nseed = 11\n"
    )
    assert main(["experiment", "batch", "--config", str(cfg)]) == 0
    captured = capsys.readouterr()
    assert "seed=11" in captured.err
    assert (tmp_path / "results" / "job01" / "blocks.csv").exists()
    assert (tmp_path / "results" / "job01" / "blocks.png").exists()
    assert (tmp_path / "results" / "job02" / "experiment-compose-identity.csv").exists()


def test_batch_config_errors_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[jobs]\nblocks --spec nope --base 2 --k 1 --n 10\n")
    assert main(["experiment", "batch", "--config", str(cfg)]) == 2
    assert main(["experiment", "batch", "--config", str(tmp_path / "missing.cfg")]) == 2
