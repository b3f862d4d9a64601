"""Discrete-event simulation of the parallel FIFO + highest-bidder-first
system; the independent oracle for the analytic waits, sojourns, equilibrium
regret, and revenue.

A single run is strictly sequential event-list semantics: Poisson arrivals,
each samples a sensitivity from the profile, routes by the policy (ties at
exact thresholds randomized by t), FIFO serves in arrival order, the auction
queue serves the highest standing bid (earlier arrival wins ties), service is
non-preemptive. Deterministic given the seed. Statistics are collected for
arrivals after the warmup fraction.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace

import numpy as np

from .errors import ScenarioError
from .model import RoutingPolicy, Scenario
from .queueing import BidCurve, build_profiles, sojourn_hbf

HBF, FIFO = 0, 1
_BATCHES = 20


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    policy: RoutingPolicy
    horizon: int
    seed: int = 0
    warmup: float = 0.1
    n_bins: int = 50
    variant: str = "eq2"
    bid_fn: object = None          # callable beta -> bid; overrides the analytic curve
    constant_bid: float | None = None
    record_departures: bool = False
    keep_samples: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ScenarioError("horizon must be >= 1")
        if not (0.0 <= self.warmup < 1.0):
            raise ScenarioError("warmup fraction must lie in [0, 1)")
        if self.n_bins < 1:
            raise ScenarioError("need at least one type bin")
        if self.horizon > 50_000_000:
            raise ScenarioError("horizon too large for in-memory arrays")


@dataclass
class ServerStats:
    name: str
    n: int
    lambda_eff: float
    throughput: float
    utilization: float
    mean_queue_len: float
    revenue_rate: float
    revenue_se: float
    mean_wait: float
    se_wait: float
    mean_sojourn: float
    se_sojourn: float
    little_residual: float
    little_se: float


@dataclass
class SimReport:
    config: SimConfig
    bins: dict                     # arrays: beta_lo, beta_hi, n, mean_beta, mean_wait, ...
    servers: dict                  # name -> ServerStats
    window: tuple[float, float]
    n_kept: int
    max_regret: float = float("nan")
    departures: np.ndarray | None = None
    samples: dict | None = None


def _default_bids(config: SimConfig):
    if config.constant_bid is not None:
        cb = float(config.constant_bid)
        return lambda b: np.full(np.shape(b), cb)
    if config.bid_fn is not None:
        return config.bid_fn
    hbf, _ = build_profiles(config.scenario, config.policy)
    if hbf.lambda1 == 0.0:
        return lambda b: np.zeros(np.shape(b))
    xs, ys = BidCurve(hbf, variant=config.variant, tol=1e-10).table()
    return lambda b: np.interp(b, xs, ys)


def simulate(config: SimConfig) -> SimReport:
    scn, pol = config.scenario, config.policy
    build_profiles(scn, pol)       # instability detected at config time
    rng = np.random.default_rng(config.seed)
    n = config.horizon

    t_arr = np.cumsum(rng.exponential(1.0 / scn.lam, n))
    betas = scn.profile.sample(rng, n)
    svc = scn.service.sample(rng, n)

    p = np.asarray(pol.fifo_prob(betas), dtype=float)
    to_fifo = p >= 1.0
    tie = (p > 0.0) & (p < 1.0)
    if np.any(tie):
        to_fifo = to_fifo.copy()
        to_fifo[tie] = rng.random(int(tie.sum())) < p[tie]

    bids = np.zeros(n)
    hbf_mask = ~to_fifo
    if np.any(hbf_mask):
        bids[hbf_mask] = _default_bids(config)(betas[hbf_mask])
    dur = svc / np.where(to_fifo, scn.mu2, scn.mu1)
    money = np.where(to_fifo, scn.c, scn.m + bids)

    t_start = np.empty(n)
    t_dep = np.empty(n)

    # event loop: pending departure per server + pointer into the arrival array
    inf = float("inf")
    dep_t = [inf, inf]
    cur = [-1, -1]
    q_hbf: list[tuple[float, int, int]] = []   # (-bid, arrival seq, idx)
    q_fifo_head = 0
    q_fifo: list[int] = []
    i = 0
    heappush, heappop = heapq.heappush, heapq.heappop
    while True:
        ta = t_arr[i] if i < n else inf
        t0, t1 = dep_t[0], dep_t[1]
        if t0 == inf and t1 == inf and i >= n:
            break
        if t0 <= t1 and t0 <= ta:
            now = t0
            t_dep[cur[0]] = now
            if q_hbf:
                _, _, j = heappop(q_hbf)
                t_start[j] = now
                dep_t[0] = now + dur[j]
                cur[0] = j
            else:
                dep_t[0] = inf
                cur[0] = -1
        elif t1 <= ta:
            now = t1
            t_dep[cur[1]] = now
            if q_fifo_head < len(q_fifo):
                j = q_fifo[q_fifo_head]
                q_fifo_head += 1
                t_start[j] = now
                dep_t[1] = now + dur[j]
                cur[1] = j
            else:
                dep_t[1] = inf
                cur[1] = -1
        elif i < n:
            now = ta
            s = 1 if to_fifo[i] else 0
            if cur[s] < 0:
                t_start[i] = now
                dep_t[s] = now + dur[i]
                cur[s] = i
            elif s == 0:
                heappush(q_hbf, (-bids[i], i, i))
            else:
                q_fifo.append(i)
            i += 1
        else:
            break

    return _build_report(config, t_arr, betas, bids, money, to_fifo, t_start, t_dep, dur)


def _batch_se(values: np.ndarray) -> float:
    if values.size < 2:
        return float("nan")
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def _build_report(config, t_arr, betas, bids, money, to_fifo, t_start, t_dep, dur) -> SimReport:
    scn, pol = config.scenario, config.policy
    n = config.horizon
    k0 = int(config.warmup * n)
    T0 = t_arr[k0] if k0 > 0 else 0.0
    T1 = t_arr[-1]
    span = T1 - T0
    kept = np.arange(k0, n)
    wait = t_start - t_arr
    sojourn = t_dep - t_arr

    servers = {}
    sides = {"hbf": ~to_fifo, "fifo": to_fifo}
    edges = np.array_split(kept, _BATCHES)
    for name, mask in sides.items():
        km = kept[mask[kept]]
        ns = km.size
        lam_eff = ns / span
        # time averages over [T0, T1] include pre-warmup and straggling overlap
        am = np.nonzero(mask)[0]
        ov = np.clip(np.minimum(t_dep[am], T1) - np.maximum(t_arr[am], T0), 0.0, None)
        L = float(ov.sum() / span)
        busy = np.clip(np.minimum(t_dep[am], T1) - np.maximum(t_start[am], T0), 0.0, None)
        util = float(busy.sum() / span)
        thr = float(np.count_nonzero((t_dep[am] >= T0) & (t_dep[am] <= T1)) / span)
        mean_w = float(wait[km].mean()) if ns else float("nan")
        mean_s = float(sojourn[km].mean()) if ns else float("nan")
        rev = float(money[km].sum() / span)

        bw, bs, br, blit = [], [], [], []
        for bidx in edges:
            bm = bidx[mask[bidx]]
            if bm.size == 0:
                continue
            lo, hi = t_arr[bidx[0]], t_arr[bidx[-1]]
            if hi <= lo:
                continue
            bw.append(wait[bm].mean())
            bs.append(sojourn[bm].mean())
            br.append(money[bm].sum() / (hi - lo))
            ovb = np.clip(np.minimum(t_dep[am], hi) - np.maximum(t_arr[am], lo), 0.0, None)
            Lb = ovb.sum() / (hi - lo)
            blit.append(Lb - (bm.size / (hi - lo)) * sojourn[bm].mean())
        servers[name] = ServerStats(
            name=name, n=ns, lambda_eff=lam_eff, throughput=thr, utilization=util,
            mean_queue_len=L, revenue_rate=rev, revenue_se=_batch_se(np.array(br)),
            mean_wait=mean_w, se_wait=_batch_se(np.array(bw)),
            mean_sojourn=mean_s, se_sojourn=_batch_se(np.array(bs)),
            little_residual=L - lam_eff * mean_s if ns else float("nan"),
            little_se=_batch_se(np.array(blit)),
        )

    # equal-probability type bins, split at the policy thresholds
    qs = scn.profile.quantile(np.linspace(0.0, 1.0, config.n_bins + 1))
    bin_edges = np.unique(np.concatenate([np.atleast_1d(qs), pol.thresholds()]))
    nb = bin_edges.size - 1
    which = np.clip(np.searchsorted(bin_edges, betas[kept], side="right") - 1, 0, nb - 1)
    cnt = np.bincount(which, minlength=nb).astype(float)
    safe = np.maximum(cnt, 1.0)

    def bin_mean(x):
        return np.bincount(which, weights=x, minlength=nb) / safe

    def bin_se(x, mean):
        sq = np.bincount(which, weights=x * x, minlength=nb) / safe
        var = np.maximum(sq - mean**2, 0.0)
        return np.sqrt(var / safe)

    kb, kw, ks = betas[kept], wait[kept], sojourn[kept]
    kcost = money[kept] + kb * ks
    mean_beta = bin_mean(kb)
    mean_wait_b = bin_mean(kw)
    mean_cost_b = bin_mean(kcost)
    bins = {
        "beta_lo": bin_edges[:-1], "beta_hi": bin_edges[1:], "n": cnt.astype(int),
        "mean_beta": mean_beta, "mean_wait": mean_wait_b,
        "se_wait": bin_se(kw, mean_wait_b), "mean_sojourn": bin_mean(ks),
        "mean_bid": bin_mean(bids[kept]), "mean_cost": mean_cost_b,
        "se_cost": bin_se(kcost, mean_cost_b),
        "side": np.where(np.asarray(pol.fifo_prob(0.5 * (bin_edges[:-1] + bin_edges[1:]))) >= 0.5,
                         "fifo", "hbf"),
        "regret": np.full(nb, np.nan),
    }

    report = SimReport(config=config, bins=bins, servers=servers, window=(float(T0), float(T1)),
                       n_kept=kept.size)
    regrets = empirical_regret(report, scn, pol, variant=config.variant)
    bins["regret"] = regrets
    with np.errstate(invalid="ignore"):
        report.max_regret = float(np.nanmax(regrets)) if np.any(np.isfinite(regrets)) else float("nan")

    if config.record_departures:
        report.departures = np.argsort(t_dep, kind="stable")
    if config.keep_samples:
        report.samples = {
            "beta": betas, "to_fifo": to_fifo, "bid": bids, "money": money,
            "t_arr": t_arr, "t_start": t_start, "t_dep": t_dep, "dur": dur,
        }
    return report


def empirical_regret(report: SimReport, scenario: Scenario, policy: RoutingPolicy,
                     variant: str = "eq2", grid: int = 1001) -> np.ndarray:
    """Per-bin assigned-side empirical mean cost minus the analytic cost of the
    best deviation to the other side (analytic fill-in covers empty sides)."""
    hbf, fifo = build_profiles(scenario, policy)
    curve = BidCurve(hbf, variant=variant, tol=1e-10)
    a, b = scenario.profile.a, scenario.profile.b
    levels = np.linspace(a, b, grid)
    x_lv = curve.values(levels)
    d1_lv = sojourn_hbf(levels, hbf, variant=variant)

    bins = report.bins
    out = np.full(bins["beta_lo"].size, np.nan)
    for i in range(out.size):
        if bins["n"][i] == 0:
            continue
        beta = bins["mean_beta"][i]
        if bins["side"][i] == "fifo":
            counter = scenario.m + np.min(x_lv + beta * d1_lv)
        else:
            counter = scenario.c + beta * fifo.d2
        out[i] = bins["mean_cost"][i] - counter
    return out


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------

@dataclass
class ReplicationReport:
    base_config: SimConfig
    n_reps: int
    reports: list
    server_ci: dict                # name -> {metric: (mean, half_width)}
    bins: dict                     # aggregated arrays incl. CI columns

    def ci(self, server: str, metric: str) -> tuple[float, float]:
        return self.server_ci[server][metric]


def replicate(config: SimConfig, n_reps: int) -> ReplicationReport:
    """Independent replications with seeds derived from the base seed."""
    if n_reps < 2:
        raise ScenarioError("need at least 2 replications")
    from scipy.stats import t as tdist

    children = np.random.SeedSequence(config.seed).spawn(n_reps)
    reports = [simulate(replace(config, seed=s)) for s in children]
    tcrit = float(tdist.ppf(0.975, n_reps - 1))

    def ci(vals):
        v = np.asarray(vals, dtype=float)
        return float(v.mean()), float(tcrit * v.std(ddof=1) / np.sqrt(n_reps))

    server_ci = {}
    for name in reports[0].servers:
        server_ci[name] = {
            m: ci([getattr(r.servers[name], m) for r in reports])
            for m in ("mean_wait", "mean_sojourn", "revenue_rate", "utilization",
                      "mean_queue_len", "throughput")
        }

    b0 = reports[0].bins
    nb = b0["beta_lo"].size
    stack_w = np.vstack([r.bins["mean_wait"] for r in reports])
    stack_c = np.vstack([r.bins["mean_cost"] for r in reports])
    half_w = tcrit * np.std(stack_w, axis=0, ddof=1) / np.sqrt(n_reps)
    bins = {
        "beta_lo": b0["beta_lo"], "beta_hi": b0["beta_hi"],
        "n": np.sum([r.bins["n"] for r in reports], axis=0),
        "mean_wait": stack_w.mean(axis=0),
        "se_wait": np.std(stack_w, axis=0, ddof=1) / np.sqrt(n_reps),
        "mean_bid": np.mean([r.bins["mean_bid"] for r in reports], axis=0),
        "mean_cost": stack_c.mean(axis=0),
        "regret": np.nanmean([r.bins["regret"] for r in reports], axis=0),
        "mean_wait_ci_lo": stack_w.mean(axis=0) - half_w,
        "mean_wait_ci_hi": stack_w.mean(axis=0) + half_w,
    }
    return ReplicationReport(base_config=config, n_reps=n_reps, reports=reports,
                             server_ci=server_ci, bins=bins)


# ---------------------------------------------------------------------------
# CSV output (fixed, versioned schemas)
# ---------------------------------------------------------------------------

BIN_COLUMNS = ("beta_lo", "beta_hi", "n", "mean_wait", "se_wait", "mean_bid", "mean_cost", "regret")
BIN_REP_COLUMNS = BIN_COLUMNS + ("mean_wait_ci_lo", "mean_wait_ci_hi")
SERVER_COLUMNS = ("server", "throughput", "utilization", "mean_queue_len",
                  "revenue_rate", "little_residual", "little_se")
BIN_SCHEMA = "bins-v1"
BIN_REP_SCHEMA = "bins-reps-v1"
SERVER_SCHEMA = "servers-v1"


def write_bins_csv(bins: dict, path) -> str:
    cols = BIN_REP_COLUMNS if "mean_wait_ci_lo" in bins else BIN_COLUMNS
    with open(path, "w", newline="") as f:
        f.write(",".join(cols) + "\n")
        for i in range(len(bins["beta_lo"])):
            f.write(",".join(repr(int(bins[c][i])) if c == "n" else repr(float(bins[c][i]))
                             for c in cols) + "\n")
    return BIN_REP_SCHEMA if cols is BIN_REP_COLUMNS else BIN_SCHEMA


def write_servers_csv(servers: dict, path) -> str:
    with open(path, "w", newline="") as f:
        f.write(",".join(SERVER_COLUMNS) + "\n")
        for name in ("hbf", "fifo"):
            s = servers[name]
            f.write(",".join([name] + [repr(float(getattr(s, c))) for c in SERVER_COLUMNS[1:]]) + "\n")
    return SERVER_SCHEMA
