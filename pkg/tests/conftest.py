import numpy as np
import pytest

from hbfq.model import RoutingPolicy, Scenario, ServiceDistribution, TypeProfile


@pytest.fixture(scope="session")
def example_scenario():
    """The published two-threshold example."""
    return Scenario(lam=4.0, mu1=5.0, mu2=5.0, c=0.2017, m=0.0,
                    profile=TypeProfile.uniform(0.0, 10.0),
                    service=ServiceDistribution.exponential())


@pytest.fixture(scope="session")
def example_policy():
    """The published thresholds, fixed."""
    return RoutingPolicy.two_threshold(1.67, 5.66)


@pytest.fixture(scope="session")
def solved_example(example_scenario):
    """Default-variant equilibrium of the example scenario (solved once)."""
    from hbfq.equilibrium import solve_two_threshold

    res = solve_two_threshold(example_scenario)
    assert res.solutions, "example scenario must have an interior equilibrium"
    return res


@pytest.fixture(scope="session")
def profiles_all():
    return [
        TypeProfile.uniform(0.0, 10.0),
        TypeProfile.truncated_exponential(0.0, 10.0, rate=0.3),
        TypeProfile.piecewise_linear([(0.0, 0.0), (2.0, 0.5), (6.0, 0.8), (10.0, 1.0)]),
    ]


@pytest.fixture(scope="session")
def services_all():
    return [
        ServiceDistribution.exponential(),
        ServiceDistribution.deterministic(),
        ServiceDistribution.erlang(2),
        ServiceDistribution.hyperexponential(0.4, 0.5, 4.0 / 3.0),
    ]


def rng(seed=12345):
    return np.random.default_rng(seed)
