"""Wardrop equilibrium routing between a fixed-price FIFO queue and a
highest-bidder-first auction queue: analytics, solvers, and a discrete-event
simulation oracle."""

__version__ = "0.1.0"

from .errors import ScenarioError, SolverError, UnstableRoutingError
from .model import (RoutingPolicy, Scenario, ServiceDistribution, TypeProfile,
                    load_scenario, parse_scenario)
from .queueing import (BidCurve, FifoLoad, HbfProfile, bid, build_profiles,
                       fifo_wait, sojourn_fifo, sojourn_hbf, waiting_time)
from .equilibrium import (DeviationWitness, EquilibriumSolution, SweepResult,
                          TwoThresholdResult, WardropReport, check_lemma1,
                          check_lemma2, evaluate_policy, revenue,
                          solve_single_threshold, solve_two_threshold,
                          sweep_admission_price, verify_wardrop)
from .desim import (ReplicationReport, SimConfig, SimReport, empirical_regret,
                    replicate, simulate, write_bins_csv, write_servers_csv)
from .paper_example import build_report, example_scenario, format_report

__all__ = [
    "__version__",
    "ScenarioError", "SolverError", "UnstableRoutingError",
    "TypeProfile", "ServiceDistribution", "Scenario", "RoutingPolicy",
    "load_scenario", "parse_scenario",
    "HbfProfile", "FifoLoad", "BidCurve", "build_profiles", "waiting_time",
    "bid", "sojourn_hbf", "sojourn_fifo", "fifo_wait",
    "EquilibriumSolution", "WardropReport", "DeviationWitness", "TwoThresholdResult",
    "SweepResult", "verify_wardrop", "solve_two_threshold", "solve_single_threshold",
    "check_lemma1", "check_lemma2", "revenue", "sweep_admission_price", "evaluate_policy",
    "SimConfig", "SimReport", "ReplicationReport", "simulate", "replicate",
    "empirical_regret", "write_bins_csv", "write_servers_csv",
    "example_scenario", "build_report", "format_report",
]
