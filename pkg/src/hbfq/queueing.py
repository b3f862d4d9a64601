"""Analytic quantities for the routed two-server system.

Given a scenario and a routing policy this module builds the per-server
loads, the conditional sensitivity profile of the auction-queue joiners,
the residual-work constant, per-type waiting times, the equilibrium bid
curve, and the FIFO sojourn (Pollaczek-Khinchine).

Two waiting-time variants are supported:

* ``"eq2"`` (default): wait(beta) = mu^2 * W0 / (mu - lam1*(1 - F1(beta)))^2,
  with W0 = lam1 * E[S^2] / (2 mu^2) the mean residual work seen on arrival.
* ``"example"``: numerator 1 instead of mu^2 * W0. This reproduces the
  arithmetic of the published numerical example, which is not consistent
  with the first form; it exists for the discrepancy report.

The bid curve is the classic auction-queue equilibrium bid: the marginal
money a type pays equals the delay-cost saving of outbidding its
neighbours, X(beta) = integral of 2*rho1*W0*y / (1-rho1+rho1*F1(y))^3 dF1(y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnstableRoutingError
from .model import RoutingPolicy, Scenario, ServiceDistribution, TypeProfile
from .quadrature import adaptive_simpson_batch

WAIT_VARIANTS = ("eq2", "example")


def _check_variant(variant: str) -> None:
    if variant not in WAIT_VARIANTS:
        raise ValueError(f"wait variant must be one of {WAIT_VARIANTS}, got {variant!r}")


# ---------------------------------------------------------------------------
# Routed profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HbfProfile:
    """Load and conditional type profile of the auction-queue joiners.

    ``removed`` holds the FIFO intervals as (lo, hi, F(lo), mass); ``pieces``
    the complementary HBF intervals as (lo, hi, u_lo, u_hi, F(lo)) where u is
    the F1-cdf coordinate. ``hbf_mass`` is the joining fraction of the
    population; F1 is the original profile with the FIFO mass cut out and
    renormalized (flat across each cut).
    """

    lambda1: float
    mu1: float
    rho1: float
    w0: float
    hbf_mass: float
    profile: TypeProfile
    removed: tuple[tuple[float, float, float, float], ...]
    pieces: tuple[tuple[float, float, float, float, float], ...]

    def f1_cdf(self, beta):
        if self.hbf_mass <= 0.0:
            return np.where(np.asarray(beta, dtype=float) >= self.profile.a, 1.0, 0.0)[()]
        F = self.profile.cdf(beta)
        cut = 0.0
        for lo, _hi, flo, mass in self.removed:
            cut = cut + np.clip(F - flo, 0.0, mass)
        return (F - cut) / self.hbf_mass

    def f1_pdf(self, beta):
        beta = np.asarray(beta, dtype=float)
        if self.hbf_mass <= 0.0:
            return np.zeros_like(beta)[()]
        inside = np.zeros(beta.shape, dtype=bool)
        for lo, hi, _ulo, _uhi, _flo in self.pieces:
            inside |= (beta >= lo) & (beta <= hi)
        return np.where(inside, self.profile.pdf(beta) / self.hbf_mass, 0.0)[()]

    def quantile_f1(self, u):
        """Inverse of f1_cdf, mapping [0, 1] onto the HBF-assigned intervals."""
        u = np.asarray(u, dtype=float)
        if self.hbf_mass <= 0.0:
            return np.full(u.shape, self.profile.a)[()]
        u_hi = np.array([p[3] for p in self.pieces])
        idx = np.clip(np.searchsorted(u_hi, u, side="left"), 0, len(self.pieces) - 1)
        u_lo = np.array([p[2] for p in self.pieces])[idx]
        f_lo = np.array([p[4] for p in self.pieces])[idx]
        target = np.clip(f_lo + (u - u_lo) * self.hbf_mass, 0.0, 1.0)
        return self.profile.quantile(target)

    def u_breaks(self) -> np.ndarray:
        """F1-cdf coordinates of the piece boundaries (quadrature split points)."""
        pts = sorted({p[2] for p in self.pieces} | {p[3] for p in self.pieces} | {0.0, 1.0})
        return np.array(pts)


@dataclass(frozen=True)
class FifoLoad:
    lambda2: float
    mu2: float
    rho2: float
    w2: float
    d2: float


def build_profiles(scenario: Scenario, policy: RoutingPolicy) -> tuple[HbfProfile, FifoLoad]:
    """Split the arrival stream per the policy; errors out on unstable loads."""
    profile = scenario.profile
    policy.validate_for(profile)
    a, b = profile.a, profile.b

    removed = []
    fifo_mass = 0.0
    for lo, hi in policy.fifo_intervals(a, b):
        flo, fhi = float(profile.cdf(lo)), float(profile.cdf(hi))
        mass = fhi - flo
        removed.append((lo, hi, flo, mass))
        fifo_mass += mass
    hbf_mass = 1.0 - fifo_mass

    lambda2 = scenario.lam * fifo_mass
    lambda1 = scenario.lam - lambda2
    rho1 = lambda1 / scenario.mu1
    rho2 = lambda2 / scenario.mu2
    if rho1 >= 1.0 or rho2 >= 1.0:
        raise UnstableRoutingError(
            f"policy makes a server unstable (rho1={rho1:.4g}, rho2={rho2:.4g})",
            rho1=rho1, rho2=rho2,
        )

    pieces = []
    if hbf_mass > 0.0:
        u_cursor = 0.0
        for lo, hi in policy.hbf_intervals(a, b):
            f_lo = float(profile.cdf(lo))
            f_hi = float(profile.cdf(hi))
            u_lo = u_cursor
            u_cursor = u_lo + (f_hi - f_lo) / hbf_mass
            pieces.append((lo, hi, u_lo, min(u_cursor, 1.0), f_lo))
        # close the last piece exactly at 1 against rounding
        lo, hi, u_lo, _u_hi, f_lo = pieces[-1]
        pieces[-1] = (lo, hi, u_lo, 1.0, f_lo)

    e2 = scenario.service.second_moment()
    w0 = lambda1 * e2 / (2.0 * scenario.mu1**2)
    hbf = HbfProfile(
        lambda1=lambda1, mu1=scenario.mu1, rho1=rho1, w0=w0, hbf_mass=hbf_mass,
        profile=profile, removed=tuple(removed), pieces=tuple(pieces),
    )
    w2 = fifo_wait(lambda2, scenario.mu2, scenario.service)
    fifo = FifoLoad(lambda2=lambda2, mu2=scenario.mu2, rho2=rho2, w2=w2, d2=w2 + 1.0 / scenario.mu2)
    return hbf, fifo


# ---------------------------------------------------------------------------
# Waiting times and sojourns
# ---------------------------------------------------------------------------

def waiting_time(beta, hbf: HbfProfile, mu1: float | None = None, variant: str = "eq2"):
    """Expected wait of a type-beta customer bidding its equilibrium bid."""
    _check_variant(variant)
    mu1 = hbf.mu1 if mu1 is None else mu1
    num = mu1**2 * hbf.w0 if variant == "eq2" else 1.0
    den = mu1 - hbf.lambda1 * (1.0 - hbf.f1_cdf(beta))
    return num / den**2


def sojourn_hbf(beta, hbf: HbfProfile, mu1: float | None = None, variant: str = "eq2"):
    mu1 = hbf.mu1 if mu1 is None else mu1
    return waiting_time(beta, hbf, mu1, variant) + 1.0 / mu1


def fifo_wait(lambda2: float, mu2: float, service: ServiceDistribution) -> float:
    """Pollaczek-Khinchine mean wait for the FIFO server."""
    if lambda2 == 0.0:
        return 0.0
    rho2 = lambda2 / mu2
    if rho2 >= 1.0:
        raise UnstableRoutingError(f"FIFO load rho2={rho2:.4g} >= 1", rho2=rho2)
    return lambda2 * service.second_moment() / (2.0 * mu2**2 * (1.0 - rho2))


def sojourn_fifo(lambda2: float, mu2: float, service: ServiceDistribution) -> float:
    return fifo_wait(lambda2, mu2, service) + 1.0 / mu2


# ---------------------------------------------------------------------------
# Bid curve
# ---------------------------------------------------------------------------

class BidCurve:
    """Equilibrium bid X(beta), evaluated by adaptive Simpson quadrature.

    Integration runs on the F1-cdf coordinate u (the integrand is smooth
    there except at the policy thresholds, which are used as split points):

        X(beta) = integral_0^{F1(beta)} coef * Q1(u) / (1-rho1+rho1*u)^3 du

    with coef = 2*rho1*W0 ("eq2") or 2*rho1/mu1^2 ("example").
    """

    def __init__(self, hbf: HbfProfile, variant: str = "eq2", tol: float = 1e-10):
        _check_variant(variant)
        self.hbf = hbf
        self.variant = variant
        self.tol = float(tol)
        if variant == "eq2":
            self._coef = 2.0 * hbf.rho1 * hbf.w0
        else:
            self._coef = 2.0 * hbf.rho1 / hbf.mu1**2
        self._breaks = hbf.u_breaks()
        self._accum_err = 0.0

    def _integrand(self, u):
        rho1 = self.hbf.rho1
        return self._coef * self.hbf.quantile_f1(u) / (1.0 - rho1 + rho1 * u) ** 3

    def _cumulative(self, us: np.ndarray) -> np.ndarray:
        """Integral from 0 to each u in the sorted array us."""
        if self._coef == 0.0:
            return np.zeros_like(us)
        edges = np.unique(np.concatenate([[0.0], self._breaks, us]))
        lo, hi = edges[:-1], edges[1:]
        seg_tol = self.tol / max(lo.size, 1)
        vals, errs = adaptive_simpson_batch(self._integrand, lo, hi, seg_tol)
        self._accum_err = float(np.sum(errs))
        cum = np.concatenate([[0.0], np.cumsum(vals)])
        return cum[np.searchsorted(edges, us)]

    def values(self, beta) -> np.ndarray:
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        u = np.atleast_1d(self.hbf.f1_cdf(beta))
        order = np.argsort(u)
        out = np.empty_like(u)
        out[order] = self._cumulative(u[order])
        return out

    def __call__(self, beta):
        scalar = np.isscalar(beta) or np.asarray(beta).ndim == 0
        vals = self.values(beta)
        return float(vals[0]) if scalar else vals

    def error_bound(self) -> float:
        """Accumulated quadrature error estimate of the last evaluation."""
        return self._accum_err

    def expected_bid(self) -> float:
        """E[X] over the joiners, via integration by parts: int (1-u) g(u) du."""
        if self._coef == 0.0:
            return 0.0
        edges = self._breaks
        vals, _ = adaptive_simpson_batch(
            lambda u: (1.0 - u) * self._integrand(u), edges[:-1], edges[1:],
            self.tol / max(edges.size - 1, 1),
        )
        return float(np.sum(vals))

    def table(self, points_per_piece: int = 4096) -> tuple[np.ndarray, np.ndarray]:
        """Dense (beta, bid) table for interpolation; exact on flat gaps."""
        a, b = self.hbf.profile.a, self.hbf.profile.b
        grids = [np.array([a, b])]
        for lo, hi, _ulo, _uhi, _flo in self.hbf.pieces:
            grids.append(np.linspace(lo, hi, points_per_piece))
        betas = np.unique(np.concatenate(grids))
        return betas, self.values(betas)


def bid(beta, hbf: HbfProfile, variant: str = "eq2", tol: float = 1e-10):
    """One-shot evaluation of the equilibrium bid X(beta)."""
    return BidCurve(hbf, variant=variant, tol=tol)(beta)
