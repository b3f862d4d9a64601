"""Command-line front end: outputs, manifests, exit codes."""

import csv
import json

import pytest

from hbfq.cli import (EXIT_NO_ROOT, EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_UNSTABLE,
                      PAPER_COLUMNS, SOLVE_COLUMNS, SWEEP_COLUMNS, VERIFY_COLUMNS, main)

EXAMPLE_TOML = """
lambda = 4.0
mu1 = 5.0
mu2 = 5.0
c = 0.2017

[profile]
kind = "uniform"
a = 0.0
b = 10.0

[service]
kind = "exponential"
"""


@pytest.fixture
def scenario_file(tmp_path):
    f = tmp_path / "example.toml"
    f.write_text(EXAMPLE_TOML)
    return str(f)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestSolve:
    def test_solve_outputs_and_manifest(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        assert main(["solve", "--scenario", scenario_file, "--out-dir", str(out)]) == EXIT_OK
        rows = read_csv(out / "solve.csv")
        assert list(rows[0].keys()) == list(SOLVE_COLUMNS)
        assert len(rows) == 1
        assert abs(float(rows[0]["x_beta1"]) - 0.2017) < 1e-8
        assert abs(float(rows[0]["resid_bid_vs_price"])) < 1e-8
        assert abs(float(rows[0]["resid_indifference"])) < 1e-8
        man = json.loads((out / "manifest.json").read_text())
        assert man["command"] == "solve" and man["n_roots"] == 1
        assert man["resolved_scenario"]["lambda"] == 4.0

    def test_solve_bit_reproducible(self, tmp_path, scenario_file):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["solve", "--scenario", scenario_file, "--out-dir", str(out)]) == EXIT_OK
            outs.append((out / "solve.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_no_interior_root_exit_code(self, tmp_path, scenario_file):
        big = tmp_path / "bigc.toml"
        big.write_text(EXAMPLE_TOML.replace("c = 0.2017", "c = 10.0"))
        out = tmp_path / "out"
        assert main(["solve", "--scenario", str(big), "--out-dir", str(out)]) == EXIT_NO_ROOT
        man = json.loads((out / "manifest.json").read_text())
        assert man["all_hbf_equilibrium"] is True

    def test_solver_failure_exit_code(self, tmp_path, scenario_file):
        bad = tmp_path / "minbid.toml"
        bad.write_text(EXAMPLE_TOML.replace("c = 0.2017", "c = 0.2017\nm = 1.0"))
        assert main(["solve", "--scenario", str(bad), "--out-dir", str(tmp_path / "o")]) == EXIT_SOLVER

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("lambda = oops\n")
        assert main(["solve", "--scenario", str(bad), "--out-dir", str(tmp_path / "o")]) == EXIT_PARSE
        assert main(["solve", "--no-such-flag"]) == EXIT_PARSE

    def test_instability_exit_code(self, tmp_path):
        f = tmp_path / "unstable.toml"
        f.write_text(EXAMPLE_TOML.replace("lambda = 4.0", "lambda = 10.0"))
        assert main(["solve", "--scenario", str(f), "--out-dir", str(tmp_path / "o")]) == EXIT_UNSTABLE


class TestVerify:
    def test_two_threshold_report(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["verify", "--scenario", scenario_file, "--policy", "two-threshold",
                     "--b1", "1.67", "--b2", "5.66", "--out-dir", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "verify.csv")
        assert list(rows[0].keys()) == list(VERIFY_COLUMNS)
        assert len(rows) >= 1000
        assert {r["assigned"] for r in rows} == {"fifo", "hbf"}

    def test_all_hbf_large_price_passes(self, tmp_path, scenario_file):
        big = tmp_path / "big.toml"
        big.write_text(EXAMPLE_TOML.replace("c = 0.2017", "c = 100.0"))
        out = tmp_path / "out"
        assert main(["verify", "--scenario", str(big), "--policy", "all-hbf",
                     "--out-dir", str(out)]) == EXIT_OK
        man = json.loads((out / "manifest.json").read_text())
        assert man["max_regret"] <= 1e-9 and man["passed"] is True

    def test_single_low_violations_listed(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        assert main(["verify", "--scenario", scenario_file, "--policy", "single-low",
                     "--b1", "3", "--out-dir", str(out)]) == EXIT_OK
        rows = read_csv(out / "verify.csv")
        assert any(float(r["regret"]) > 1e-3 for r in rows)


class TestSimulate:
    def test_seed_reproducible(self, tmp_path, scenario_file):
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = main(["simulate", "--scenario", scenario_file, "--policy", "equilibrium",
                         "--horizon", "20000", "--seed", "9", "--out-dir", str(out)])
            assert code == EXIT_OK
            blobs.append((out / "bins.csv").read_bytes() + (out / "servers.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_reps_ci_columns(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", scenario_file, "--policy", "all-fifo",
                     "--horizon", "5000", "--reps", "3", "--out-dir", str(out)])
        assert code == EXIT_OK
        header = (out / "bins.csv").read_text().splitlines()[0]
        assert "mean_wait_ci_lo" in header and "mean_wait_ci_hi" in header

    def test_explicit_policy_flags(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["simulate", "--scenario", scenario_file, "--policy", "two-threshold",
                     "--b1", "1.67", "--b2", "5.66", "--horizon", "5000", "--out-dir", str(out)])
        assert code == EXIT_OK


class TestSweep:
    def test_sweep_rows_and_argmax(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["sweep", "--scenario", scenario_file, "--c-min", "0", "--c-max", "0.6",
                     "--steps", "4", "--scan", "100", "--out-dir", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "sweep.csv")
        assert list(rows[0].keys()) == list(SWEEP_COLUMNS)
        assert len(rows) == 4
        assert sum(r["argmax_total"] == "True" for r in rows) == 1
        assert rows[0]["status"] == "root" and float(rows[0]["beta1"]) == 0.0

    def test_steps_one_degenerates_to_solve(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["sweep", "--scenario", scenario_file, "--c-min", "0.2017",
                     "--c-max", "0.2017", "--steps", "1", "--scan", "150", "--out-dir", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "sweep.csv")
        assert len(rows) == 1
        out2 = tmp_path / "solve"
        main(["solve", "--scenario", scenario_file, "--out-dir", str(out2)])
        solve_rows = read_csv(out2 / "solve.csv")
        assert float(rows[0]["beta1"]) == pytest.approx(float(solve_rows[0]["beta1"]), abs=1e-9)

    def test_no_root_rows_marked_and_continue(self, tmp_path, scenario_file):
        out = tmp_path / "out"
        code = main(["sweep", "--scenario", scenario_file, "--c-min", "0.2017", "--c-max", "10",
                     "--steps", "3", "--scan", "80", "--out-dir", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "sweep.csv")
        assert [r["status"] for r in rows] == ["root", "no-root", "all-hbf"]


class TestPaperExample:
    def test_report(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["paper-example", "--out-dir", str(out),
                     "--oracle-panels", "200000"]) == EXIT_OK
        rows = read_csv(out / "paper_example.csv")
        assert list(rows[0].keys()) == list(PAPER_COLUMNS)
        byq = {(r["quantity"], r["variant"]): r for r in rows}
        assert abs(float(byq[("d2", "-")]["computed"]) - 1.0 / 3.404) < 1e-12
        assert abs(float(byq[("w1_at_beta1", "example")]["computed"]) - 0.0938641) < 1e-6
        for variant in ("eq2", "example"):
            r = byq[("x_at_beta1", variant)]
            assert abs(float(r["oracle_delta"])) <= 1e-8
            assert abs(float(r["residual"])) > 0.05   # reported, far from 0.2017
        text = capsys.readouterr().out
        assert "discrepancy report" in text
