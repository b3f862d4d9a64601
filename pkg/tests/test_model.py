"""Distribution and scenario types: inverses, moments, samplers, file parsing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from hbfq.errors import ScenarioError, UnstableRoutingError
from hbfq.model import (RoutingPolicy, Scenario, ServiceDistribution, TypeProfile,
                        load_scenario, parse_scenario)
from hbfq.quadrature import adaptive_simpson


class TestTypeProfile:
    def test_uniform_cdf_values(self):
        p = TypeProfile.uniform(0, 10)
        assert p.cdf(1.67) == pytest.approx(0.167, abs=1e-12)
        assert p.cdf(0.0) == 0.0
        assert p.cdf(5.66) == pytest.approx(0.566, abs=1e-12)
        assert p.cdf(-1.0) == 0.0 and p.cdf(11.0) == 1.0

    def test_uniform_quantile(self):
        p = TypeProfile.uniform(0, 10)
        assert p.quantile(0.5) == 5.0
        assert p.quantile(0.0) == 0.0
        with pytest.raises(ScenarioError):
            p.quantile(1.5)

    @pytest.mark.parametrize("pi", range(3))
    def test_roundtrip_grid(self, profiles_all, pi):
        p = profiles_all[pi]
        betas = np.linspace(p.a, p.b, 10_000)[1:-1]
        assert np.max(np.abs(p.quantile(p.cdf(betas)) - betas)) < 1e-9

    @pytest.mark.parametrize("pi", range(3))
    def test_pdf_integrates_to_one(self, profiles_all, pi):
        p = profiles_all[pi]
        pts = p.breakpoints()
        total = sum(adaptive_simpson(p.pdf, lo, hi, tol=1e-12)[0]
                    for lo, hi in zip(pts[:-1], pts[1:]))
        assert total == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("pi", range(3))
    def test_sampler_ks(self, profiles_all, pi):
        p = profiles_all[pi]
        x = p.sample(np.random.default_rng(7), 100_000)
        assert stats.kstest(x, p.cdf).pvalue > 0.01

    def test_sampler_deterministic_and_clt(self):
        p = TypeProfile.uniform(0, 10)
        a = p.sample(np.random.default_rng(3), 100)
        b = p.sample(np.random.default_rng(3), 100)
        assert np.array_equal(a, b)
        x = p.sample(np.random.default_rng(5), 1_000_000)
        assert abs(x.mean() - 5.0) < 0.01

    def test_atom_and_flat_rejection(self):
        with pytest.raises(ScenarioError):
            TypeProfile.piecewise_linear([(0, 0), (0, 0.5), (10, 1)])   # atom at 0
        with pytest.raises(ScenarioError):
            TypeProfile.piecewise_linear([(0, 0), (5, 0.5), (8, 0.5), (10, 1)])  # flat cdf
        with pytest.raises(ScenarioError):
            TypeProfile.uniform(5, 5)

    @given(a=st.floats(0, 5), width=st.floats(0.5, 20), rate=st.floats(0.05, 3),
           q=st.floats(0.001, 0.999))
    @settings(max_examples=50, deadline=None)
    def test_truncated_exponential_inverse_property(self, a, width, rate, q):
        p = TypeProfile.truncated_exponential(a, a + width, rate)
        x = p.quantile(q)
        assert float(p.cdf(x)) == pytest.approx(q, abs=1e-9)


class TestServiceDistribution:
    def test_second_moments_closed_form(self, services_all):
        exp, det, erl, hyp = services_all
        assert exp.second_moment() == 2.0
        assert det.second_moment() == 1.0
        assert erl.second_moment() == 1.5

    def test_erlang2_second_moment_against_monte_carlo(self):
        s = ServiceDistribution.erlang(2)
        x = s.sample(np.random.default_rng(11), 10_000_000)
        assert s.second_moment() == pytest.approx(float(np.mean(x * x)), abs=3e-3)

    def test_unit_mean(self, services_all):
        for s in services_all:
            assert s.mean() == pytest.approx(1.0, abs=1e-9)
            x = s.sample(np.random.default_rng(2), 200_000)
            assert float(np.mean(x)) == pytest.approx(1.0, abs=0.02)

    def test_exponential_second_moment_clt(self):
        s = ServiceDistribution.exponential()
        x = s.sample(np.random.default_rng(4), 1_000_000)
        assert float(np.mean(x * x)) == pytest.approx(2.0, abs=0.02)

    def test_sampler_ks_against_scipy(self):
        rng = np.random.default_rng(9)
        cases = [
            (ServiceDistribution.exponential(), stats.expon()),
            (ServiceDistribution.erlang(2), stats.gamma(a=2, scale=0.5)),
        ]
        for ours, ref in cases:
            x = ours.sample(rng, 100_000)
            assert stats.kstest(x, ref.cdf).pvalue > 0.01
        d = ServiceDistribution.deterministic().sample(rng, 1000)
        assert np.all(d == 1.0)

    def test_hyperexponential_validation(self):
        with pytest.raises(ScenarioError):
            ServiceDistribution.hyperexponential(0.5, 1.0, 2.0)   # mean 1.5
        s = ServiceDistribution.hyperexponential(0.4, 0.5, 4.0 / 3.0)
        x = s.sample(np.random.default_rng(6), 2_000_000)
        assert float(np.mean(x * x)) == pytest.approx(s.second_moment(), rel=0.02)


class TestScenario:
    def test_validation(self):
        prof, svc = TypeProfile.uniform(0, 10), ServiceDistribution.exponential()
        with pytest.raises(ScenarioError):
            Scenario(lam=-1, mu1=5, mu2=5, c=0, m=0, profile=prof, service=svc)
        with pytest.raises(ScenarioError):
            Scenario(lam=4, mu1=5, mu2=5, c=-0.1, m=0, profile=prof, service=svc)
        with pytest.raises(UnstableRoutingError):
            Scenario(lam=10, mu1=5, mu2=5, c=0, m=0, profile=prof, service=svc)

    def test_toml_roundtrip(self, tmp_path):
        src = """
lambda = 4.0
mu1 = 5.0
c = 0.2017

[profile]
kind = "uniform"
a = 0.0
b = 10.0

[service]
kind = "erlang-k"
k = 2
"""
        f = tmp_path / "scn.toml"
        f.write_text(src)
        scn = load_scenario(f)
        assert scn.mu2 == scn.mu1 == 5.0      # missing mu2 defaults to mu1
        assert scn.m == 0.0                   # missing m defaults to 0
        assert scn.service.k == 2

    def test_toml_errors(self, tmp_path):
        f = tmp_path / "bad.toml"
        f.write_text("lambda = oops")
        with pytest.raises(ScenarioError):
            load_scenario(f)
        f.write_text('lambda = 4.0\nmu1 = 5.0\nbogus = 1\n[profile]\nkind = "uniform"\na = 0.0\nb = 10.0\n[service]\nkind = "exponential"\n')
        with pytest.raises(ScenarioError, match="bogus"):
            load_scenario(f)

    def test_parse_piecewise_and_hyper(self):
        scn = parse_scenario({
            "lambda": 2.0, "mu1": 5.0,
            "profile": {"kind": "piecewise-linear-cdf",
                        "knots": [[0.0, 0.0], [4.0, 0.7], [10.0, 1.0]]},
            "service": {"kind": "hyperexponential", "p": 0.4, "m1": 0.5, "m2": 4.0 / 3.0},
        })
        assert scn.profile.kind == "piecewise-linear-cdf"
        assert scn.service.kind == "hyperexponential"


class TestRoutingPolicy:
    def test_fifo_prob_shapes(self):
        two = RoutingPolicy.two_threshold(2.0, 6.0, t=0.25)
        b = np.array([1.0, 2.0, 4.0, 6.0, 8.0])
        assert list(two.fifo_prob(b)) == [0.0, 0.25, 1.0, 0.25, 0.0]
        low = RoutingPolicy.single_low_fifo(3.0)
        assert list(low.fifo_prob(np.array([2.0, 3.0, 4.0]))) == [1.0, 0.0, 0.0]
        high = RoutingPolicy.single_high_fifo(3.0)
        assert list(high.fifo_prob(np.array([2.0, 3.0, 4.0]))) == [0.0, 0.0, 1.0]

    def test_intervals_partition(self):
        pol = RoutingPolicy.two_threshold(2.0, 6.0)
        assert pol.fifo_intervals(0, 10) == [(2.0, 6.0)]
        assert pol.hbf_intervals(0, 10) == [(0.0, 2.0), (6.0, 10.0)]
        assert RoutingPolicy.single_low_fifo(0.0).fifo_intervals(0, 10) == []

    def test_validation(self):
        with pytest.raises(ScenarioError):
            RoutingPolicy.two_threshold(6.0, 2.0)
        with pytest.raises(ScenarioError):
            RoutingPolicy("two-threshold", beta1=1.0)
        pol = RoutingPolicy.two_threshold(2.0, 12.0)
        with pytest.raises(ScenarioError):
            pol.validate_for(TypeProfile.uniform(0, 10))
