"""System parameters: delay-sensitivity profiles, service distributions,
scenarios and routing policies.

All types are immutable after construction. Samplers take an explicit
numpy Generator so callers own all randomness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ScenarioError, UnstableRoutingError

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

# ---------------------------------------------------------------------------
# Delay-sensitivity profile (the distribution of a customer's cost per unit delay)
# ---------------------------------------------------------------------------

PROFILE_KINDS = ("uniform", "piecewise-linear-cdf", "truncated-exponential")


@dataclass(frozen=True)
class TypeProfile:
    """Distribution of the per-unit-delay cost on a bounded support [a, b].

    The cdf must be continuous and strictly increasing on (a, b): atoms and
    flat stretches are rejected at construction so that quantile(cdf(x)) == x.
    """

    kind: str
    a: float
    b: float
    rate: float = 0.0                       # truncated-exponential only
    knots_x: tuple[float, ...] = ()         # piecewise-linear-cdf only
    knots_q: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ScenarioError(f"unknown profile kind {self.kind!r}")
        if not (0.0 <= self.a < self.b < np.inf):
            raise ScenarioError(f"need 0 <= a < b < inf, got a={self.a}, b={self.b}")
        if self.kind == "truncated-exponential" and self.rate == 0.0:
            raise ScenarioError("truncated-exponential needs a nonzero rate")
        if self.kind == "piecewise-linear-cdf":
            x = np.asarray(self.knots_x, dtype=float)
            q = np.asarray(self.knots_q, dtype=float)
            if x.size < 2 or x.size != q.size:
                raise ScenarioError("piecewise-linear-cdf needs matching knot arrays (>= 2 points)")
            if x[0] != self.a or x[-1] != self.b:
                raise ScenarioError("knots must start at a and end at b")
            if q[0] != 0.0 or q[-1] != 1.0:
                raise ScenarioError("cdf knots must run from 0 to 1")
            if np.any(np.diff(x) <= 0.0):
                raise ScenarioError("knot positions must be strictly increasing (no atoms)")
            if np.any(np.diff(q) <= 0.0):
                raise ScenarioError("cdf knot values must be strictly increasing (no flat cdf)")

    # -- constructors ------------------------------------------------------

    @classmethod
    def uniform(cls, a: float, b: float) -> TypeProfile:
        return cls("uniform", float(a), float(b))

    @classmethod
    def piecewise_linear(cls, knots: Sequence[tuple[float, float]]) -> TypeProfile:
        xs = tuple(float(x) for x, _ in knots)
        qs = tuple(float(q) for _, q in knots)
        return cls("piecewise-linear-cdf", xs[0], xs[-1], knots_x=xs, knots_q=qs)

    @classmethod
    def truncated_exponential(cls, a: float, b: float, rate: float) -> TypeProfile:
        return cls("truncated-exponential", float(a), float(b), rate=float(rate))

    # -- distribution functions -------------------------------------------

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            out = (x - self.a) / (self.b - self.a)
        elif self.kind == "truncated-exponential":
            r = self.rate
            out = np.expm1(-r * (x - self.a)) / np.expm1(-r * (self.b - self.a))
        else:
            out = np.interp(x, self.knots_x, self.knots_q)
        return np.clip(out, 0.0, 1.0)[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        if self.kind == "uniform":
            out = np.full_like(x, 1.0 / (self.b - self.a))
        elif self.kind == "truncated-exponential":
            r = self.rate
            out = r * np.exp(-r * (x - self.a)) / (-np.expm1(-r * (self.b - self.a)))
        else:
            xs = np.asarray(self.knots_x)
            slopes = np.diff(self.knots_q) / np.diff(xs)
            idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, slopes.size - 1)
            out = slopes[idx]
        return np.where(inside, out, 0.0)[()]

    def quantile(self, q):
        """Smallest x with cdf(x) >= q."""
        q = np.asarray(q, dtype=float)
        if np.any(q < 0.0) or np.any(q > 1.0):
            raise ScenarioError("quantile argument outside [0, 1]")
        if self.kind == "uniform":
            out = self.a + q * (self.b - self.a)
        elif self.kind == "truncated-exponential":
            r = self.rate
            out = self.a - np.log1p(q * np.expm1(-r * (self.b - self.a))) / r
        else:
            out = np.interp(q, self.knots_q, self.knots_x)
        return np.clip(out, self.a, self.b)[()]

    def sample(self, rng: np.random.Generator, size=None):
        return self.quantile(rng.random(size))

    def breakpoints(self) -> tuple[float, ...]:
        """Points where the pdf may be discontinuous (integration split points)."""
        if self.kind == "piecewise-linear-cdf":
            return self.knots_x
        return (self.a, self.b)


# ---------------------------------------------------------------------------
# Service requirement distribution (unit mean)
# ---------------------------------------------------------------------------

SERVICE_KINDS = ("exponential", "deterministic", "erlang-k", "hyperexponential")


@dataclass(frozen=True)
class ServiceDistribution:
    """Unit-mean service requirement; actual durations are the requirement / rate."""

    kind: str
    k: int = 1                  # erlang-k shape
    p: float = 0.5              # hyperexponential branch probability
    m1: float = 1.0             # hyperexponential branch means
    m2: float = 1.0

    def __post_init__(self):
        if self.kind not in SERVICE_KINDS:
            raise ScenarioError(f"unknown service kind {self.kind!r}")
        if self.kind == "erlang-k" and self.k < 1:
            raise ScenarioError("erlang-k needs k >= 1")
        if self.kind == "hyperexponential":
            if not (0.0 < self.p < 1.0) or self.m1 <= 0.0 or self.m2 <= 0.0:
                raise ScenarioError("hyperexponential needs 0<p<1 and positive branch means")
            if abs(self.mean() - 1.0) > 1e-9:
                raise ScenarioError(
                    f"hyperexponential mean {self.mean()!r} != 1; pick p*m1+(1-p)*m2 = 1"
                )

    @classmethod
    def exponential(cls) -> ServiceDistribution:
        return cls("exponential")

    @classmethod
    def deterministic(cls) -> ServiceDistribution:
        return cls("deterministic")

    @classmethod
    def erlang(cls, k: int) -> ServiceDistribution:
        return cls("erlang-k", k=int(k))

    @classmethod
    def hyperexponential(cls, p: float, m1: float, m2: float) -> ServiceDistribution:
        return cls("hyperexponential", p=float(p), m1=float(m1), m2=float(m2))

    def mean(self) -> float:
        if self.kind == "hyperexponential":
            return self.p * self.m1 + (1.0 - self.p) * self.m2
        return 1.0

    def second_moment(self) -> float:
        if self.kind == "exponential":
            return 2.0
        if self.kind == "deterministic":
            return 1.0
        if self.kind == "erlang-k":
            return 1.0 + 1.0 / self.k
        return 2.0 * (self.p * self.m1**2 + (1.0 - self.p) * self.m2**2)

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "exponential":
            return rng.exponential(1.0, size)
        if self.kind == "deterministic":
            return np.ones(size) if size is not None else 1.0
        if self.kind == "erlang-k":
            return rng.gamma(self.k, 1.0 / self.k, size)
        u = rng.random(size)
        means = np.where(u < self.p, self.m1, self.m2)
        return rng.exponential(1.0, size) * means


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Full system parameterization.

    lam: total Poisson arrival rate; mu1: HBF service rate; mu2: FIFO service
    rate; c: FIFO admission price; m: mandatory minimum HBF bid.
    """

    lam: float
    mu1: float
    mu2: float
    c: float
    m: float
    profile: TypeProfile
    service: ServiceDistribution

    def __post_init__(self):
        if self.lam <= 0.0 or self.mu1 <= 0.0 or self.mu2 <= 0.0:
            raise ScenarioError("lam, mu1, mu2 must be positive")
        if self.c < 0.0 or self.m < 0.0:
            raise ScenarioError("c and m must be nonnegative")
        if not (self.lam < self.mu1 + self.mu2):
            raise UnstableRoutingError(
                f"lam={self.lam} >= mu1+mu2={self.mu1 + self.mu2}: no stable routing split exists"
            )

    def replace(self, **kw) -> Scenario:
        import dataclasses

        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = {
            "lambda": self.lam,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "c": self.c,
            "m": self.m,
            "profile": {"kind": self.profile.kind, "a": self.profile.a, "b": self.profile.b},
            "service": {"kind": self.service.kind},
        }
        if self.profile.kind == "truncated-exponential":
            d["profile"]["rate"] = self.profile.rate
        if self.profile.kind == "piecewise-linear-cdf":
            d["profile"]["knots"] = [list(t) for t in zip(self.profile.knots_x, self.profile.knots_q)]
        if self.service.kind == "erlang-k":
            d["service"]["k"] = self.service.k
        if self.service.kind == "hyperexponential":
            d["service"].update(p=self.service.p, m1=self.service.m1, m2=self.service.m2)
        return d


# ---------------------------------------------------------------------------
# Routing policy
# ---------------------------------------------------------------------------

ALL_HBF = "all-hbf"
ALL_FIFO = "all-fifo"
SINGLE_LOW_FIFO = "single-threshold-low-fifo"
SINGLE_HIGH_FIFO = "single-threshold-high-fifo"
TWO_THRESHOLD = "two-threshold"
POLICY_FORMS = (ALL_HBF, ALL_FIFO, SINGLE_LOW_FIFO, SINGLE_HIGH_FIFO, TWO_THRESHOLD)


@dataclass(frozen=True)
class RoutingPolicy:
    """Piecewise routing rule: p(beta) is the probability of joining FIFO.

    Exact threshold hits route to FIFO with probability t; under a continuous
    profile they have measure zero, so t is payoff-irrelevant and defaults to 0.
    """

    form: str
    beta1: float = float("nan")
    beta2: float = float("nan")
    t: float = 0.0

    def __post_init__(self):
        if self.form not in POLICY_FORMS:
            raise ScenarioError(f"unknown policy form {self.form!r}")
        if not (0.0 <= self.t <= 1.0):
            raise ScenarioError("tie fraction t must lie in [0, 1]")
        if self.form in (SINGLE_LOW_FIFO, SINGLE_HIGH_FIFO) and not np.isfinite(self.beta1):
            raise ScenarioError(f"{self.form} needs beta1")
        if self.form == TWO_THRESHOLD:
            if not (np.isfinite(self.beta1) and np.isfinite(self.beta2)):
                raise ScenarioError("two-threshold needs beta1 and beta2")
            if self.beta1 > self.beta2:
                raise ScenarioError("need beta1 <= beta2")

    @classmethod
    def all_hbf(cls) -> RoutingPolicy:
        return cls(ALL_HBF)

    @classmethod
    def all_fifo(cls) -> RoutingPolicy:
        return cls(ALL_FIFO)

    @classmethod
    def single_low_fifo(cls, beta1: float, t: float = 0.0) -> RoutingPolicy:
        return cls(SINGLE_LOW_FIFO, beta1=float(beta1), t=t)

    @classmethod
    def single_high_fifo(cls, beta1: float, t: float = 0.0) -> RoutingPolicy:
        return cls(SINGLE_HIGH_FIFO, beta1=float(beta1), t=t)

    @classmethod
    def two_threshold(cls, beta1: float, beta2: float, t: float = 0.0) -> RoutingPolicy:
        return cls(TWO_THRESHOLD, beta1=float(beta1), beta2=float(beta2), t=t)

    def validate_for(self, profile: TypeProfile) -> None:
        for th in self.thresholds():
            if not (profile.a <= th <= profile.b):
                raise ScenarioError(f"threshold {th} outside the profile support [{profile.a}, {profile.b}]")

    def thresholds(self) -> tuple[float, ...]:
        if self.form in (SINGLE_LOW_FIFO, SINGLE_HIGH_FIFO):
            return (self.beta1,)
        if self.form == TWO_THRESHOLD:
            return (self.beta1, self.beta2)
        return ()

    def fifo_prob(self, beta):
        """p(beta), vectorized."""
        beta = np.asarray(beta, dtype=float)
        t = self.t
        if self.form == ALL_FIFO:
            p = np.ones_like(beta)
        elif self.form == ALL_HBF:
            p = np.zeros_like(beta)
        elif self.form == SINGLE_LOW_FIFO:
            p = np.where(beta < self.beta1, 1.0, np.where(beta == self.beta1, t, 0.0))
        elif self.form == SINGLE_HIGH_FIFO:
            p = np.where(beta > self.beta1, 1.0, np.where(beta == self.beta1, t, 0.0))
        else:
            inside = (beta > self.beta1) & (beta < self.beta2)
            at = (beta == self.beta1) | (beta == self.beta2)
            p = np.where(inside, 1.0, np.where(at, t, 0.0))
        return p[()]

    def fifo_intervals(self, a: float, b: float) -> list[tuple[float, float]]:
        """Closure of {beta: p(beta) = 1}, as disjoint intervals inside [a, b]."""
        if self.form == ALL_FIFO:
            raw = [(a, b)]
        elif self.form == ALL_HBF:
            raw = []
        elif self.form == SINGLE_LOW_FIFO:
            raw = [(a, self.beta1)]
        elif self.form == SINGLE_HIGH_FIFO:
            raw = [(self.beta1, b)]
        else:
            raw = [(self.beta1, self.beta2)]
        return [(lo, hi) for lo, hi in raw if hi > lo]

    def hbf_intervals(self, a: float, b: float) -> list[tuple[float, float]]:
        """Complement of the FIFO intervals within [a, b]."""
        out, lo = [], a
        for l, h in self.fifo_intervals(a, b):
            if l > lo:
                out.append((lo, l))
            lo = h
        if b > lo:
            out.append((lo, b))
        return out


# ---------------------------------------------------------------------------
# Scenario files (TOML)
# ---------------------------------------------------------------------------

_TOP_KEYS = {"lambda", "mu1", "mu2", "c", "m", "profile", "service"}


def parse_scenario(data: dict) -> Scenario:
    """Build a Scenario from a parsed TOML table.

    Missing m defaults to 0; missing mu2 defaults to mu1.
    """
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        lam = float(data["lambda"])
        mu1 = float(data["mu1"])
    except KeyError as e:
        raise ScenarioError(f"missing required scenario key {e.args[0]!r}") from None
    mu2 = float(data.get("mu2", mu1))
    c = float(data.get("c", 0.0))
    m = float(data.get("m", 0.0))

    prof = dict(data.get("profile", {}))
    pkind = prof.pop("kind", None)
    if pkind == "uniform":
        profile = TypeProfile.uniform(prof.pop("a"), prof.pop("b"))
    elif pkind == "truncated-exponential":
        profile = TypeProfile.truncated_exponential(prof.pop("a"), prof.pop("b"), prof.pop("rate"))
    elif pkind == "piecewise-linear-cdf":
        prof.pop("a", None)
        prof.pop("b", None)
        profile = TypeProfile.piecewise_linear([tuple(k) for k in prof.pop("knots")])
    else:
        raise ScenarioError(f"profile.kind must be one of {PROFILE_KINDS}, got {pkind!r}")
    if prof:
        raise ScenarioError(f"unknown profile keys: {sorted(prof)}")

    svc = dict(data.get("service", {}))
    skind = svc.pop("kind", None)
    if skind == "exponential":
        service = ServiceDistribution.exponential()
    elif skind == "deterministic":
        service = ServiceDistribution.deterministic()
    elif skind == "erlang-k":
        service = ServiceDistribution.erlang(svc.pop("k"))
    elif skind == "hyperexponential":
        service = ServiceDistribution.hyperexponential(svc.pop("p"), svc.pop("m1"), svc.pop("m2"))
    else:
        raise ScenarioError(f"service.kind must be one of {SERVICE_KINDS}, got {skind!r}")
    if svc:
        raise ScenarioError(f"unknown service keys: {sorted(svc)}")

    return Scenario(lam=lam, mu1=mu1, mu2=mu2, c=c, m=m, profile=profile, service=service)


def load_scenario(path) -> Scenario:
    """Load a scenario from a TOML file; raises ScenarioError with location info."""
    with open(path, "rb") as f:
        try:
            data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ScenarioError(f"{path}: {e}") from None
    try:
        return parse_scenario(data)
    except KeyError as e:
        raise ScenarioError(f"{path}: missing key {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, (ScenarioError, UnstableRoutingError)):
            raise
        raise ScenarioError(f"{path}: {e}") from None
