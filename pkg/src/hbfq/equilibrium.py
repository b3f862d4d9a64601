"""Wardrop equilibrium: verification, threshold solvers, constructive
refutations of the single-threshold candidates, and revenue.

A routing is a Wardrop equilibrium when no individual type can lower its
total cost (money + beta * expected sojourn) by switching servers or bids.
The two-threshold solver finds (beta1, beta2) with

    X(beta1) = c           (bid at the lower threshold equals the FIFO price)
    D1(beta1) = D2         (equal sojourns at the threshold)

where the middle types (beta1, beta2) join FIFO and the rest the auction
queue. The single-threshold solver covers the regime c <= m via the
effective minimum bid m - c.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ScenarioError, SolverError, UnstableRoutingError
from .model import RoutingPolicy, Scenario
from .queueing import (BidCurve, FifoLoad, HbfProfile, build_profiles,
                       sojourn_hbf, waiting_time)

__all__ = [
    "EquilibriumSolution", "WardropReport", "DeviationWitness",
    "TwoThresholdResult", "SweepEntry", "SweepResult",
    "verify_wardrop", "solve_two_threshold", "solve_single_threshold",
    "check_lemma1", "check_lemma2", "revenue", "sweep_admission_price",
    "evaluate_policy",
]


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass
class EquilibriumSolution:
    scenario: Scenario
    policy: RoutingPolicy
    variant: str
    hbf: HbfProfile
    fifo: FifoLoad
    bid_curve: BidCurve
    residuals: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def d2(self) -> float:
        return self.fifo.d2

    def bid(self, beta):
        return self.bid_curve(beta)

    def waiting(self, beta):
        return waiting_time(beta, self.hbf, variant=self.variant)

    def d1(self, beta):
        return sojourn_hbf(beta, self.hbf, variant=self.variant)


@dataclass
class WardropReport:
    beta: np.ndarray
    p: np.ndarray
    cost_fifo: np.ndarray
    cost_hbf: np.ndarray
    assigned: np.ndarray          # "fifo" | "hbf" | "split"
    regret: np.ndarray
    max_regret: float
    violating_beta: float | None
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_regret <= self.tol

    def rows(self):
        for i in range(self.beta.size):
            yield (self.beta[i], self.p[i], self.cost_fifo[i], self.cost_hbf[i],
                   str(self.assigned[i]), self.regret[i])


@dataclass
class DeviationWitness:
    policy: RoutingPolicy
    beta: float
    deviation_bid: float
    prescribed_cost: float
    deviation_cost: float
    advantage: float
    price_used: float
    calibrated: bool


@dataclass
class TwoThresholdResult:
    solutions: tuple[EquilibriumSolution, ...]
    boundary_roots: tuple[tuple[float, float], ...]
    all_hbf_report: WardropReport | None
    diagnostics: dict

    @property
    def no_interior_root(self) -> bool:
        return len(self.solutions) == 0

    @property
    def all_hbf_equilibrium(self) -> bool:
        return self.all_hbf_report is not None and self.all_hbf_report.max_regret <= 1e-8


# ---------------------------------------------------------------------------
# Wardrop verification
# ---------------------------------------------------------------------------

def verify_wardrop(scenario: Scenario, policy: RoutingPolicy, grid_size: int = 1000,
                   tol: float = 1e-6, variant: str = "eq2",
                   quad_tol: float = 1e-10) -> WardropReport:
    """Check the routing condition on a type grid.

    p > 0 requires FIFO weakly preferred, p < 1 requires the auction queue
    weakly preferred, interior p requires indifference. The cost of deviating
    to the auction queue is minimized over all attainable bid levels.
    """
    hbf, fifo = build_profiles(scenario, policy)
    curve = BidCurve(hbf, variant=variant, tol=quad_tol)
    a, b = scenario.profile.a, scenario.profile.b
    grid = np.unique(np.concatenate([np.linspace(a, b, grid_size), policy.thresholds()]))

    x = curve.values(grid)
    d1 = sojourn_hbf(grid, hbf, variant=variant)
    cost_fifo = scenario.c + grid * fifo.d2
    own_hbf = scenario.m + x + grid * d1

    # best attainable bid level for a deviator of each type (blocked for memory)
    dev_hbf = np.empty_like(grid)
    level_cost = scenario.m + x
    for s in range(0, grid.size, 256):
        blk = grid[s:s + 256, None]
        dev_hbf[s:s + 256] = np.min(level_cost[None, :] + blk * d1[None, :], axis=1)

    p = np.asarray(policy.fifo_prob(grid))
    regret = np.zeros_like(grid)
    to_hbf = np.maximum(0.0, cost_fifo - dev_hbf)     # binds where p > 0
    to_fifo = np.maximum(0.0, own_hbf - cost_fifo)    # binds where p < 1
    regret[p > 0.0] = to_hbf[p > 0.0]
    regret[p < 1.0] = np.maximum(regret[p < 1.0], to_fifo[p < 1.0])

    cost_hbf = np.where(p == 1.0, dev_hbf, own_hbf)
    assigned = np.where(p == 1.0, "fifo", np.where(p == 0.0, "hbf", "split"))
    imax = int(np.argmax(regret))
    max_regret = float(regret[imax])
    return WardropReport(
        beta=grid, p=p, cost_fifo=cost_fifo, cost_hbf=cost_hbf, assigned=assigned,
        regret=regret, max_regret=max_regret,
        violating_beta=float(grid[imax]) if max_regret > tol else None, tol=tol,
    )


# ---------------------------------------------------------------------------
# Two-threshold solver
# ---------------------------------------------------------------------------

def _tt_residuals(scenario: Scenario, variant: str, quad_tol: float, b1: float, b2: float):
    policy = RoutingPolicy.two_threshold(b1, b2)
    hbf, fifo = build_profiles(scenario, policy)
    x1 = BidCurve(hbf, variant=variant, tol=quad_tol)(b1)
    d1 = float(sojourn_hbf(b1, hbf, variant=variant))
    return x1 - scenario.c, d1 - fifo.d2


def _tt_scan(scenario: Scenario, variant: str, n: int):
    """Vectorized residual signs on an n x n interior grid (composite Simpson
    for the bid integral; closed forms elsewhere). Returns grid axes and the
    two residual meshes with NaN at infeasible points."""
    prof, svc = scenario.profile, scenario.service
    lam, mu, c = scenario.lam, scenario.mu1, scenario.c
    e2 = svc.second_moment()
    a, b = prof.a, prof.b
    g = np.linspace(a, b, n + 2)[1:-1]
    Fg = np.asarray(prof.cdf(g))

    H = 1.0 - (Fg[None, :] - Fg[:, None])          # H[i, j], beta1=g[i], beta2=g[j]
    valid = (g[:, None] < g[None, :]) & (H < mu / lam - 1e-12) & (1.0 - H < mu / lam - 1e-12)

    lam2 = lam * (1.0 - H)
    num = lam * H * e2 / 2.0 if variant == "eq2" else 1.0
    den = mu - lam * (H - Fg[:, None])
    d1 = 1.0 / mu + num / den**2
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = 1.0 / mu + lam2 * e2 / (2.0 * mu**2 * (1.0 - lam2 / mu))
    r_gap = np.where(valid, d1 - d2, np.nan)

    # X(beta1) along each row via 129-node composite Simpson on [a, beta1]
    m_nodes = 129
    w = np.ones(m_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    r1 = np.full((n, n), np.nan)
    for i in range(n):
        cols = np.nonzero(valid[i])[0]
        if cols.size == 0:
            continue
        y = np.linspace(a, g[i], m_nodes)
        h3 = (y[1] - y[0]) / 3.0
        yf = y * np.asarray(prof.pdf(y))
        Fy = np.asarray(prof.cdf(y))
        Hrow = H[i, cols][:, None]
        dn = 1.0 - (lam / mu) * (Hrow - Fy[None, :])
        integral = h3 * (w[None, :] * yf[None, :] / dn**3).sum(axis=1)
        coef = lam**2 * Hrow[:, 0] * e2 / mu**3 if variant == "eq2" else 2.0 * lam / mu**3
        r1[i, cols] = coef * integral - c
    return g, r1, r_gap


def _sign_change_cells(g, r1, rg):
    """Grid cells whose corners straddle zero in both residuals."""
    seeds = []
    n = g.size
    for i in range(n - 1):
        for j in range(n - 1):
            c1 = r1[i:i + 2, j:j + 2].ravel()
            c2 = rg[i:i + 2, j:j + 2].ravel()
            if np.any(np.isnan(c1)) or np.any(np.isnan(c2)):
                continue
            if c1.min() <= 0.0 <= c1.max() and c2.min() <= 0.0 <= c2.max():
                seeds.append((0.5 * (g[i] + g[i + 1]), 0.5 * (g[j] + g[j + 1])))
    return seeds


def _newton2(fun, x0, ftol, max_iter, box):
    """Damped Newton with central finite-difference Jacobian on a 2-vector."""
    (lo1, hi1), (lo2, hi2) = box
    scale = max(hi1 - lo1, hi2 - lo2)
    h = 1e-7 * scale

    def safe(x):
        try:
            return np.array(fun(float(x[0]), float(x[1]))), True
        except (UnstableRoutingError, ScenarioError):
            return np.array([np.inf, np.inf]), False

    def clip(x):
        return np.array([min(max(x[0], lo1), hi1), min(max(x[1], lo2), hi2)])

    x = clip(np.asarray(x0, dtype=float))
    f, ok = safe(x)
    history = [float(np.max(np.abs(f)))]
    if not ok:
        return None
    for _ in range(max_iter):
        if np.max(np.abs(f)) <= ftol:
            break
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            fp, okp = safe(clip(x + e))
            fm, okm = safe(clip(x - e))
            if not (okp and okm):
                return None
            J[:, k] = (fp - fm) / (2.0 * h)
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return None
        step, accepted = 1.0, False
        while step > 1e-10:
            xn = clip(x + step * dx)
            fn, okn = safe(xn)
            if okn and np.linalg.norm(fn) < np.linalg.norm(f):
                x, f = xn, fn
                accepted = True
                break
            step *= 0.5
        history.append(float(np.max(np.abs(f))))
        if not accepted:
            break
    return x, f, history


def _make_solution(scenario, policy, variant, quad_tol, extra_diag=None) -> EquilibriumSolution:
    hbf, fifo = build_profiles(scenario, policy)
    curve = BidCurve(hbf, variant=variant, tol=quad_tol)
    b1 = policy.beta1 if np.isfinite(policy.beta1) else scenario.profile.a
    x1 = float(curve(b1))
    d1 = float(sojourn_hbf(b1, hbf, variant=variant))
    residuals = {
        "bid_vs_price": x1 - scenario.c,
        "indifference": (x1 - scenario.c) + b1 * (d1 - fifo.d2),
        "sojourn_gap": d1 - fifo.d2,
    }
    return EquilibriumSolution(
        scenario=scenario, policy=policy, variant=variant, hbf=hbf, fifo=fifo,
        bid_curve=curve, residuals=residuals, diagnostics=dict(extra_diag or {}),
    )


def evaluate_policy(scenario: Scenario, policy: RoutingPolicy, variant: str = "eq2",
                    quad_tol: float = 1e-10) -> EquilibriumSolution:
    """Bundle the analytic objects for an arbitrary policy without solving."""
    return _make_solution(scenario, policy, variant, quad_tol, {"case": "evaluated"})


def solve_two_threshold(scenario: Scenario, *, variant: str = "eq2", scan: int = 200,
                        tol: float = 1e-8, quad_tol: float = 1e-12,
                        newton_tol: float = 1e-10, max_newton: int = 60) -> TwoThresholdResult:
    """Find all interior (beta1, beta2) equilibria: coarse grid scan seeding a
    damped Newton iteration; every root found is returned. With no interior
    root, the degenerate everyone-bids outcome is checked and reported."""
    if scenario.m != 0.0:
        raise SolverError("two-threshold solver requires m = 0 (c <= m is the single-threshold regime)")
    if scenario.mu1 != scenario.mu2:
        raise SolverError("two-threshold solver assumes identical service rates mu1 == mu2")

    a, b = scenario.profile.a, scenario.profile.b
    diag: dict = {"variant": variant, "scan": scan}

    if scenario.c == 0.0:
        sol = _degenerate_zero_price(scenario, variant, quad_tol)
        diag["note"] = "c = 0: beta1 pinned at a, beta2 from the reduced 1-D problem"
        return TwoThresholdResult((sol,), (), None, diag)

    g, r1, rg = _tt_scan(scenario, variant, scan)
    seeds = _sign_change_cells(g, r1, rg)
    diag["seeds"] = len(seeds)

    eps = 1e-9 * (b - a)
    box = ((a + eps, b - eps), (a + eps, b - eps))
    roots: list[tuple[float, float, float, float, list]] = []
    boundary: list[tuple[float, float]] = []
    for s in seeds:
        out = _newton2(lambda x1_, x2_: _tt_residuals(scenario, variant, quad_tol, x1_, x2_),
                       s, newton_tol, max_newton, box)
        if out is None:
            continue
        x, f, hist = out
        if np.max(np.abs(f)) > tol:
            continue
        b1, b2 = float(x[0]), float(x[1])
        interior = (a + 10 * eps) < b1 < b2 < (b - 10 * eps)
        if not interior:
            boundary.append((b1, b2))
            continue
        if any(abs(b1 - r[0]) < 1e-6 * (b - a) and abs(b2 - r[1]) < 1e-6 * (b - a) for r in roots):
            continue
        roots.append((b1, b2, float(f[0]), float(f[1]), hist))

    roots.sort(key=lambda r: r[0])
    solutions = []
    for b1, b2, f1, f2, hist in roots:
        sol = _make_solution(scenario, RoutingPolicy.two_threshold(b1, b2), variant, quad_tol,
                             {"newton_history": hist, "case": "interior"})
        solutions.append(sol)

    all_hbf_report = None
    if not solutions:
        try:
            all_hbf_report = verify_wardrop(scenario, RoutingPolicy.all_hbf(),
                                            grid_size=1000, tol=1e-8, variant=variant)
        except UnstableRoutingError:
            all_hbf_report = None
    return TwoThresholdResult(tuple(solutions), tuple(boundary), all_hbf_report, diag)


def _degenerate_zero_price(scenario: Scenario, variant: str, quad_tol: float) -> EquilibriumSolution:
    """c = 0 limit: beta1 = a (X(a) = 0 = c) and beta2 balances the sojourns."""
    prof = scenario.profile
    lam, mu = scenario.lam, scenario.mu1
    a, b = prof.a, prof.b
    q_lo = max(0.0, 1.0 - mu / lam) + 1e-9
    q_hi = min(1.0, mu / lam) - 1e-9

    def gap(b2: float) -> float:
        _, r = _tt_residuals(scenario, variant, quad_tol, a, b2)
        return r

    lo = float(prof.quantile(q_lo)) if q_lo > 0 else a + 1e-9 * (b - a)
    hi = float(prof.quantile(q_hi)) if q_hi < 1 else b - 1e-9 * (b - a)
    grid = np.linspace(lo, hi, 256)
    vals = np.array([gap(x) for x in grid])
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if idx.size == 0:
        raise SolverError("c = 0 reduction: no sojourn-balance root found")
    b2 = brentq(gap, grid[idx[0]], grid[idx[0] + 1], xtol=1e-14, rtol=8.9e-16)
    return _make_solution(scenario, RoutingPolicy.two_threshold(a, float(b2)), variant, quad_tol,
                          {"case": "boundary_limit_beta1=a"})


# ---------------------------------------------------------------------------
# Single-threshold solver (minimum-bid regime, c <= m)
# ---------------------------------------------------------------------------

def _count_sign_changes(vals: np.ndarray) -> tuple[int, list[int]]:
    """Strict sign changes over consecutive finite entries; exact zeros count
    as a change at their position."""
    s = np.sign(vals)
    changes = []
    prev = None
    for i, v in enumerate(s):
        if np.isnan(v):
            continue
        if v == 0.0:
            changes.append(i)
            prev = None
            continue
        if prev is not None and v != prev:
            changes.append(i)
        prev = v
    return len(changes), changes


def solve_single_threshold(scenario: Scenario, *, scan: int = 2048,
                           quad_tol: float = 1e-12) -> EquilibriumSolution:
    """Low types to FIFO below beta1, the rest bid; covers c <= m via the
    effective minimum bid m - c. Three-case procedure with bisection for the
    interior case; asserts a single sign change of the balance residual."""
    m_eff = scenario.m - scenario.c
    if m_eff < 0.0:
        raise SolverError("single-threshold solver applies when c <= m; use the two-threshold solver")
    prof = scenario.profile
    a, b = prof.a, prof.b
    mu1, mu2, lam = scenario.mu1, scenario.mu2, scenario.lam
    e2 = scenario.service.second_moment()

    def balance_at(policy_beta: float) -> tuple[float, float, float]:
        hbf, fifo = build_profiles(scenario, RoutingPolicy.single_low_fifo(policy_beta))
        d1 = float(sojourn_hbf(policy_beta, hbf))
        return m_eff + policy_beta * (d1 - fifo.d2), d1, fifo.d2

    # case beta1 = a: everyone bids
    if lam < mu1:
        bal_a, d1a, d2a = balance_at(a)
        if m_eff + a * d1a < a * d2a:
            return _make_solution(scenario, RoutingPolicy.single_low_fifo(a), "eq2", quad_tol,
                                  {"case": "beta1=a", "balance": bal_a})
    # case beta1 = b: everyone to FIFO
    if lam < mu2:
        bal_b, d1b, d2b = balance_at(b)
        if m_eff + b * d1b > b * d2b:
            return _make_solution(scenario, RoutingPolicy.single_low_fifo(b), "eq2", quad_tol,
                                  {"case": "beta1=b", "balance": bal_b})

    # interior: m_eff + beta1*(D1(beta1) - D2(lambda2)) = 0 on the stable window
    q_lo = max(0.0, (lam - mu1) / lam) + 1e-9
    q_hi = min(1.0, mu2 / lam) - 1e-9
    lo = float(prof.quantile(q_lo))
    hi = float(prof.quantile(q_hi))
    lo = max(lo, a + 1e-12 * (b - a))
    hi = min(hi, b - 1e-12 * (b - a))
    grid = np.linspace(lo, hi, scan)
    Fg = np.asarray(prof.cdf(grid))
    lam2 = lam * Fg
    lam1 = lam - lam2
    w0 = lam1 * e2 / (2.0 * mu1**2)
    d1 = 1.0 / mu1 + mu1**2 * w0 / (mu1 - lam1) ** 2
    d2 = 1.0 / mu2 + lam2 * e2 / (2.0 * mu2**2 * (1.0 - lam2 / mu2))
    g = m_eff + grid * (d1 - d2)

    n_changes, where = _count_sign_changes(g)
    if n_changes == 0:
        raise SolverError("single-threshold residual has no sign change and neither boundary case applies")
    if n_changes > 1:
        raise SolverError(f"single-threshold uniqueness violated: {n_changes} sign changes detected")

    i = where[0]
    lo_b, hi_b = grid[max(i - 1, 0)], grid[i]
    root = brentq(lambda x: balance_at(float(x))[0], lo_b, hi_b, xtol=1e-14, rtol=8.9e-16)
    bal, d1r, d2r = balance_at(float(root))
    sol = _make_solution(scenario, RoutingPolicy.single_low_fifo(float(root)), "eq2", quad_tol,
                         {"case": "interior", "sign_changes": n_changes,
                          "bracket": (float(lo_b), float(hi_b))})
    sol.residuals["min_bid_balance"] = bal
    return sol


# ---------------------------------------------------------------------------
# Constructive refutations of the single-threshold candidates (c > 0, m = 0)
# ---------------------------------------------------------------------------

def _require_refutation_regime(scenario: Scenario) -> None:
    if scenario.c <= 0.0 or scenario.m != 0.0:
        raise ScenarioError("refutation checks apply to c > 0 with no minimum bid")


def check_lemma1(scenario: Scenario, beta1: float, deviator_beta: float | None = None,
                 grid: int = 512) -> DeviationWitness | None:
    """Refute the low-FIFO single threshold: a type below beta1 deviates to the
    auction queue with a zero bid (landing behind everyone) and still wins.

    When the candidate's indifference price is positive it is used (the most
    favorable price for the candidate); otherwise no positive price can
    calibrate the threshold and the scenario's own c is used.
    """
    _require_refutation_regime(scenario)
    prof = scenario.profile
    a, b = prof.a, prof.b
    if not (a < beta1 <= b):
        raise ScenarioError(f"candidate threshold must lie in ({a}, {b}], got {beta1}")
    policy = RoutingPolicy.single_low_fifo(beta1)
    try:
        hbf, fifo = build_profiles(scenario, policy)
    except UnstableRoutingError:
        beta = deviator_beta if deviator_beta is not None else 0.5 * (a + beta1)
        return DeviationWitness(policy, float(beta), 0.0, float("inf"), 0.0,
                                float("inf"), scenario.c, False)
    d1_tail = float(sojourn_hbf(beta1, hbf))       # zero-bid position: behind the whole queue
    d2 = fifo.d2
    calibrated = d1_tail > d2
    price = beta1 * (d1_tail - d2) if calibrated else scenario.c

    def adv(beta):
        return price + beta * d2 - beta * d1_tail

    if deviator_beta is None:
        betas = np.linspace(a, beta1, grid, endpoint=False)
        i = int(np.argmax(adv(betas)))
        deviator_beta = float(betas[i])
    advantage = float(adv(deviator_beta))
    if advantage <= 0.0:
        return None
    return DeviationWitness(
        policy=policy, beta=float(deviator_beta), deviation_bid=0.0,
        prescribed_cost=float(price + deviator_beta * d2),
        deviation_cost=float(deviator_beta * d1_tail),
        advantage=advantage, price_used=float(price), calibrated=calibrated,
    )


def check_lemma2(scenario: Scenario, beta1: float, deviator_beta: float | None = None,
                 variant: str = "eq2", quad_tol: float = 1e-10) -> DeviationWitness | None:
    """Refute the high-FIFO single threshold: a type above beta1 deviates by
    paying the standing top bid X(beta1) and is served next.

    Follows the refuted construction's own accounting, under which the top
    bid's sojourn is the bare service time 1/mu1. The calibrated price is
    used regardless of sign (the claim is for every positive price).
    """
    _require_refutation_regime(scenario)
    prof = scenario.profile
    a, b = prof.a, prof.b
    if not (a < beta1 < b):
        raise ScenarioError(f"candidate threshold must lie in ({a}, {b}), got {beta1}")
    policy = RoutingPolicy.single_high_fifo(beta1)
    hbf, fifo = build_profiles(scenario, policy)
    x_top = float(BidCurve(hbf, variant=variant, tol=quad_tol)(beta1))
    d1_top = 1.0 / scenario.mu1
    d2 = fifo.d2
    price = x_top + beta1 * d1_top - beta1 * d2    # indifference at the threshold

    def adv(beta):
        return (price + beta * d2) - (x_top + beta * d1_top)

    if deviator_beta is None:
        deviator_beta = b if adv(b) >= adv(0.5 * (beta1 + b)) else 0.5 * (beta1 + b)
    advantage = float(adv(deviator_beta))
    if advantage <= 0.0:
        return None
    return DeviationWitness(
        policy=policy, beta=float(deviator_beta), deviation_bid=x_top,
        prescribed_cost=float(price + deviator_beta * d2),
        deviation_cost=float(x_top + deviator_beta * d1_top),
        advantage=advantage, price_used=float(price), calibrated=True,
    )


# ---------------------------------------------------------------------------
# Revenue
# ---------------------------------------------------------------------------

def revenue(solution: EquilibriumSolution) -> tuple[float, float]:
    """Money rates (fifo, hbf): c*lambda2 and lambda1*(m + E[X])."""
    fifo_rate = solution.scenario.c * solution.fifo.lambda2
    hbf_rate = solution.hbf.lambda1 * (solution.scenario.m + solution.bid_curve.expected_bid())
    return fifo_rate, hbf_rate


# ---------------------------------------------------------------------------
# Admission-price sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepEntry:
    c: float
    status: str                       # "root" | "no-root" | "all-hbf" | "error"
    beta1: float
    beta2: float
    lambda1: float
    lambda2: float
    revenue_fifo: float
    revenue_hbf: float
    revenue_total: float
    resid_bid_vs_price: float
    resid_indifference: float
    n_roots: int
    note: str = ""


@dataclass
class SweepResult:
    entries: list[SweepEntry]
    argmax_total: int | None
    argmax_fifo: int | None


def sweep_admission_price(scenario: Scenario, c_values, *, variant: str = "eq2",
                          scan: int = 200, tol: float = 1e-8) -> SweepResult:
    """Solve per admission price; per-point failures become marked rows."""
    entries: list[SweepEntry] = []
    nan = float("nan")
    for c in np.asarray(c_values, dtype=float):
        scn = scenario.replace(c=float(c))
        try:
            res = solve_two_threshold(scn, variant=variant, scan=scan, tol=tol)
        except (SolverError, UnstableRoutingError) as e:
            entries.append(SweepEntry(float(c), "error", nan, nan, nan, nan, nan, nan, nan,
                                      nan, nan, 0, note=str(e)))
            continue
        if res.solutions:
            sol = res.solutions[0]
            rf, rh = revenue(sol)
            entries.append(SweepEntry(
                float(c), "root", sol.policy.beta1, sol.policy.beta2,
                sol.hbf.lambda1, sol.fifo.lambda2, rf, rh, rf + rh,
                sol.residuals["bid_vs_price"], sol.residuals["indifference"],
                len(res.solutions),
                note=sol.diagnostics.get("case", ""),
            ))
        elif res.all_hbf_equilibrium:
            sol = _make_solution(scn, RoutingPolicy.all_hbf(), variant, 1e-12)
            _, rh = revenue(sol)
            entries.append(SweepEntry(float(c), "all-hbf", nan, nan, sol.hbf.lambda1, 0.0,
                                      0.0, rh, rh, nan, nan, 0, note="degenerate everyone-bids"))
        else:
            entries.append(SweepEntry(float(c), "no-root", nan, nan, nan, nan, nan, nan, nan,
                                      nan, nan, 0, note=f"boundary roots: {res.boundary_roots}"))
    totals = [e.revenue_total if np.isfinite(e.revenue_total) else -np.inf for e in entries]
    fifos = [e.revenue_fifo if np.isfinite(e.revenue_fifo) else -np.inf for e in entries]
    argmax_total = int(np.argmax(totals)) if np.isfinite(max(totals, default=-np.inf)) else None
    argmax_fifo = int(np.argmax(fifos)) if np.isfinite(max(fifos, default=-np.inf)) else None
    return SweepResult(entries, argmax_total, argmax_fifo)
