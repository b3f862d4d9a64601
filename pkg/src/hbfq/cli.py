"""Scenario-driven command line: solve, verify, simulate, sweep, and the
published-example discrepancy report.

Every command writes its CSV outputs plus a run manifest (manifest.json) into
--out-dir. Exit codes are stable:

    0  success
    2  scenario/flag parse error
    3  instability (a server would see utilization >= 1)
    4  solver failure (contract could not be certified)
    5  no interior two-threshold root (boundary outcome noted in the manifest)

Numeric CSV cells are written with full double precision (repr) so fixtures
diff cleanly; the paper-example command also prints a rounded text table.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .desim import (SimConfig, replicate, simulate, write_bins_csv, write_servers_csv)
from .equilibrium import (revenue, solve_two_threshold, sweep_admission_price, verify_wardrop)
from .errors import ScenarioError, SolverError, UnstableRoutingError
from .model import RoutingPolicy, Scenario, load_scenario
from .paper_example import build_report, example_scenario, format_report

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSTABLE = 3
EXIT_SOLVER = 4
EXIT_NO_ROOT = 5

SOLVE_COLUMNS = ("root_index", "beta1", "beta2", "lambda1", "lambda2", "w0",
                 "x_beta1", "d1_beta1", "d2", "resid_bid_vs_price", "resid_indifference",
                 "cond_interior", "revenue_fifo", "revenue_hbf")
VERIFY_COLUMNS = ("beta", "p", "cost_fifo", "cost_hbf", "assigned", "regret")
SWEEP_COLUMNS = ("c", "status", "beta1", "beta2", "lambda1", "lambda2", "revenue_fifo",
                 "revenue_hbf", "revenue_total", "resid_bid_vs_price", "resid_indifference",
                 "n_roots", "argmax_total", "argmax_fifo")
PAPER_COLUMNS = ("quantity", "variant", "published", "computed", "residual",
                 "oracle", "oracle_delta", "note")

_POLICY_ALIASES = {
    "all-hbf": "all-hbf",
    "all-fifo": "all-fifo",
    "single-low": "single-low",
    "single-threshold-low-fifo": "single-low",
    "single-high": "single-high",
    "single-threshold-high-fifo": "single-high",
    "two-threshold": "two-threshold",
    "equilibrium": "equilibrium",
}


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return repr(int(v))
    return repr(float(v))


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _manifest(out_dir: Path, command: str, args: argparse.Namespace, scenario: Scenario | None,
              outputs: list[str], started: float, extra: dict | None = None) -> None:
    man = {
        "tool": "hbfq",
        "version": __version__,
        "command": command,
        "argv": sys.argv[1:],
        "scenario_path": getattr(args, "scenario", None),
        "resolved_scenario": scenario.to_dict() if scenario is not None else None,
        "seed": getattr(args, "seed", None),
        "wait_variant": getattr(args, "wait_variant", None),
        "tol": getattr(args, "tol", None),
        "outputs": outputs,
        "schema": {"bins": "bins-v1", "servers": "servers-v1", "solve": "solve-v1",
                   "verify": "verify-v1", "sweep": "sweep-v1", "paper": "paper-v1"},
        "duration_s": time.time() - started,
    }
    man.update(extra or {})
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(man, f, indent=2, sort_keys=True, default=str)


def _policy_from_args(args: argparse.Namespace, scenario: Scenario) -> RoutingPolicy:
    name = _POLICY_ALIASES.get(args.policy)
    if name is None:
        raise ScenarioError(f"unknown policy {args.policy!r}")
    if name == "equilibrium":
        res = solve_two_threshold(scenario, variant=args.wait_variant)
        if not res.solutions:
            raise SolverError("no interior equilibrium to simulate; pass an explicit policy")
        return res.solutions[0].policy
    if name == "all-hbf":
        return RoutingPolicy.all_hbf()
    if name == "all-fifo":
        return RoutingPolicy.all_fifo()
    if args.b1 is None:
        raise ScenarioError(f"policy {args.policy!r} needs --b1")
    if name == "single-low":
        return RoutingPolicy.single_low_fifo(args.b1, t=args.t)
    if name == "single-high":
        return RoutingPolicy.single_high_fifo(args.b1, t=args.t)
    if args.b2 is None:
        raise ScenarioError("two-threshold policy needs --b1 and --b2")
    return RoutingPolicy.two_threshold(args.b1, args.b2, t=args.t)


def _solution_row(idx: int, sol) -> tuple:
    b1 = sol.policy.beta1
    rf, rh = revenue(sol)
    return (idx, b1, sol.policy.beta2, sol.hbf.lambda1, sol.fifo.lambda2, sol.hbf.w0,
            float(sol.bid(b1)), float(sol.d1(b1)), sol.d2,
            sol.residuals["bid_vs_price"], sol.residuals["indifference"],
            sol.diagnostics.get("case", "interior") == "interior", rf, rh)


def cmd_solve(args) -> int:
    started = time.time()
    scenario = load_scenario(args.scenario)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = solve_two_threshold(scenario, variant=args.wait_variant, tol=args.tol, scan=args.scan)
    rows = [_solution_row(i, s) for i, s in enumerate(res.solutions)]
    _write_csv(out / "solve.csv", SOLVE_COLUMNS, rows)
    extra = {
        "n_roots": len(res.solutions),
        "boundary_roots": [list(r) for r in res.boundary_roots],
        "all_hbf_equilibrium": res.all_hbf_equilibrium if res.no_interior_root else None,
    }
    _manifest(out, "solve", args, scenario, ["solve.csv"], started, extra)
    if res.no_interior_root:
        note = "all-HBF degenerate equilibrium verified" if res.all_hbf_equilibrium \
            else "no equilibrium of the two-threshold form found"
        print(f"no interior root; {note} (see manifest)", file=sys.stderr)
        return EXIT_NO_ROOT
    for row in rows:
        print(f"root {row[0]}: beta1={row[1]:.12g} beta2={row[2]:.12g} "
              f"residuals=({row[9]:.3e}, {row[10]:.3e})")
    return EXIT_OK


def cmd_verify(args) -> int:
    started = time.time()
    scenario = load_scenario(args.scenario)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    policy = _policy_from_args(args, scenario)
    report = verify_wardrop(scenario, policy, grid_size=args.grid, tol=args.tol,
                            variant=args.wait_variant)
    _write_csv(out / "verify.csv", VERIFY_COLUMNS, report.rows())
    _manifest(out, "verify", args, scenario, ["verify.csv"], started, {
        "policy": {"form": policy.form, "beta1": policy.beta1, "beta2": policy.beta2, "t": policy.t},
        "max_regret": report.max_regret,
        "violating_beta": report.violating_beta,
        "passed": report.passed,
    })
    print(f"max regret {report.max_regret:.6e} on {report.beta.size} grid points "
          f"({'OK' if report.passed else f'violations, worst at beta={report.violating_beta:.6g}'})")
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.time()
    scenario = load_scenario(args.scenario)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    policy = _policy_from_args(args, scenario)
    config = SimConfig(scenario, policy, horizon=args.horizon, seed=args.seed,
                       warmup=args.warmup, n_bins=args.bins, variant=args.wait_variant)
    outputs = ["bins.csv", "servers.csv"]
    if args.reps > 1:
        rep = replicate(config, args.reps)
        write_bins_csv(rep.bins, out / "bins.csv")
        write_servers_csv(rep.reports[0].servers, out / "servers.csv")
        extra = {"reps": args.reps, "server_ci": rep.server_ci,
                 "policy": {"form": policy.form, "beta1": policy.beta1, "beta2": policy.beta2}}
    else:
        rep = simulate(config)
        write_bins_csv(rep.bins, out / "bins.csv")
        write_servers_csv(rep.servers, out / "servers.csv")
        extra = {"max_regret": rep.max_regret, "window": rep.window,
                 "policy": {"form": policy.form, "beta1": policy.beta1, "beta2": policy.beta2}}
    _manifest(out, "simulate", args, scenario, outputs, started, extra)
    print(f"simulated {args.horizon} arrivals (reps={args.reps}); outputs in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    started = time.time()
    scenario = load_scenario(args.scenario)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cs = np.linspace(args.c_min, args.c_max, args.steps)
    res = sweep_admission_price(scenario, cs, variant=args.wait_variant, scan=args.scan,
                                tol=args.tol)
    rows = []
    for i, e in enumerate(res.entries):
        rows.append((e.c, e.status, e.beta1, e.beta2, e.lambda1, e.lambda2, e.revenue_fifo,
                     e.revenue_hbf, e.revenue_total, e.resid_bid_vs_price, e.resid_indifference,
                     e.n_roots, i == res.argmax_total, i == res.argmax_fifo))
    _write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    _manifest(out, "sweep", args, scenario, ["sweep.csv"], started, {
        "argmax_total": res.argmax_total, "argmax_fifo": res.argmax_fifo,
        "statuses": [e.status for e in res.entries],
    })
    if res.argmax_total is not None:
        best = res.entries[res.argmax_total]
        print(f"revenue-maximizing admission price c={best.c:.6g} "
              f"(total rate {best.revenue_total:.6g})")
    return EXIT_OK


def cmd_paper_example(args) -> int:
    started = time.time()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = build_report(oracle_panels=args.oracle_panels)
    _write_csv(out / "paper_example.csv", PAPER_COLUMNS,
               [(r.quantity, r.variant, r.published, r.computed, r.residual,
                 r.oracle, r.oracle_delta, r.note) for r in rows])
    _manifest(out, "paper-example", args, example_scenario(), ["paper_example.csv"], started)
    print(format_report(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbfq",
        description="Wardrop equilibrium routing between a fixed-price FIFO queue "
                    "and a highest-bidder-first auction queue",
    )
    parser.add_argument("--version", action="version", version=f"hbfq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario TOML file")
        p.add_argument("--out-dir", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--wait-variant", choices=("eq2", "example"), default="eq2",
                       help="waiting-time accounting (default eq2; 'example' reproduces "
                            "the published example's unit-numerator arithmetic)")
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("solve", help="solve for the two-threshold equilibrium")
    common(p)
    p.add_argument("--scan", type=int, default=200, help="grid-scan resolution per axis")
    p.set_defaults(func=cmd_solve, tol_default=1e-8)

    p = sub.add_parser("verify", help="check the routing condition for a policy")
    common(p)
    p.add_argument("--policy", required=True, help="|".join(sorted(set(_POLICY_ALIASES))))
    p.add_argument("--b1", type=float, default=None)
    p.add_argument("--b2", type=float, default=None)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_verify, tol_default=1e-6)

    p = sub.add_parser("simulate", help="discrete-event simulation of a policy")
    common(p)
    p.add_argument("--policy", default="equilibrium")
    p.add_argument("--b1", type=float, default=None)
    p.add_argument("--b2", type=float, default=None)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--horizon", type=int, default=1_000_000, help="number of arrivals")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--warmup", type=float, default=0.1)
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=cmd_simulate, tol_default=1e-6)

    p = sub.add_parser("sweep", help="sweep the admission price and report revenue")
    common(p)
    p.add_argument("--c-min", type=float, required=True)
    p.add_argument("--c-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--scan", type=int, default=200)
    p.set_defaults(func=cmd_sweep, tol_default=1e-8)

    p = sub.add_parser("paper-example",
                       help="recompute the published example and report residuals")
    common(p, scenario=False)
    p.add_argument("--oracle-panels", type=int, default=1_000_000)
    p.set_defaults(func=cmd_paper_example, tol_default=1e-8)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code not in (0, None) else 0
    if args.tol is None:
        args.tol = args.tol_default
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except UnstableRoutingError as e:
        print(f"instability: {e}", file=sys.stderr)
        return EXIT_UNSTABLE
    except SolverError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
