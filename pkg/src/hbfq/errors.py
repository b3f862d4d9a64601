"""Shared exception types."""


class ScenarioError(ValueError):
    """Invalid scenario, distribution, or policy definition."""


class UnstableRoutingError(RuntimeError):
    """A routing (or the scenario itself) pushes a server to utilization >= 1."""

    def __init__(self, message: str, rho1: float | None = None, rho2: float | None = None):
        super().__init__(message)
        self.rho1 = rho1
        self.rho2 = rho2


class SolverError(RuntimeError):
    """An equilibrium solver could not certify its contract."""
