"""Initial data, topographies and parameters of the four benchmark cases.

1. dam break on a wet floor        (3 - 2H(x)) (1, 0, 1, 1),  x in [-4, 4],  T = 0.2
2. dam break on a dry floor        (3 - 3H(x)) (1, 0, 1, 1),  x in [-4, 4],  T = 0.5
3. double rarefaction over a step  x in (0, 25),  T = 0.25
4. solitary-wave runup on a beach  x in (0, 100), T = 32.5
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable

import numpy as np

from .model import Params
from .timestepper import BoundaryCondition, Grid, SimState

SOLITARY_ALPHA = 0.019 / 0.1
BEACH_SLOPE_LENGTH = 19.85


def heaviside(x):
    """Unit step with H(0) = 1."""
    return np.where(np.asarray(x, dtype=float) < 0, 0.0, 1.0)


def _flat(x):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Scenario:
    """A benchmark: ``init_fn(x, params)`` returns conservative states of shape (len(x), 4)."""

    name: str
    domain: tuple[float, float]
    topo_fn: Callable
    init_fn: Callable
    t_final: float
    default_params: Params
    default_cells: int = 400
    bc: BoundaryCondition = BoundaryCondition.NEUMANN

    def grid(self, cells: int | None = None) -> Grid:
        return Grid.uniform(*self.domain, cells or self.default_cells, self.topo_fn)

    def initial_state(self, grid: Grid, params: Params | None = None) -> SimState:
        params = params or self.default_params
        return SimState(self.init_fn(grid.centers, params), 0.0)

    def with_params(self, **overrides) -> "Scenario":
        return replace(self, default_params=replace(self.default_params, **overrides))


def _riemann_init(x, params, left: float, jump: float):
    level = left - jump * heaviside(x)
    return level[:, None] * np.array([1.0, 0.0, 1.0, 1.0])


def _step_topography(x):
    return heaviside(x - 25.0 / 3.0) - heaviside(x - 25.0 / 2.0)


def _double_rarefaction_init(x, params):
    h = np.maximum(0.0, 10.0 - _step_topography(x))
    hu = -350.0 + 700.0 * heaviside(x - 50.0 / 3.0)
    return np.stack([h, hu, h, h], axis=-1)


def synolakis_profile(x, alpha: float = SOLITARY_ALPHA):
    """Solitary-wave surface perturbation, as printed for the runup benchmark."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    x = np.asarray(x, dtype=float)
    center = math.acosh(math.sqrt(1.0 / 0.05)) / (0.75 * alpha)
    with np.errstate(over="ignore"):  # cosh -> inf gives the correct limit 0
        return alpha / np.cosh(math.sqrt(0.75 * alpha) * (x - center)) ** 2


def _beach(x):
    return np.maximum(0.0, (np.asarray(x, dtype=float) - 40.0) / BEACH_SLOPE_LENGTH)


def _runup_init(x, params):
    h0 = synolakis_profile(x)
    h = np.maximum(0.0, 1.0 + h0 - _beach(x))
    return np.stack([h, h * math.sqrt(params.g) * h0, h, h], axis=-1)


_CASES = {
    1: Scenario("dam break, wet floor", (-4.0, 4.0), _flat,
                partial(_riemann_init, left=3.0, jump=2.0), 0.2, Params(eta_p=1.0, lam=1.0)),
    2: Scenario("dam break, dry floor", (-4.0, 4.0), _flat,
                partial(_riemann_init, left=3.0, jump=3.0), 0.5, Params(eta_p=1.0, lam=1.0)),
    3: Scenario("double rarefaction over a step", (0.0, 25.0), _step_topography,
                _double_rarefaction_init, 0.25, Params(eta_p=1e-4, lam=1.0)),
    4: Scenario("solitary wave runup", (0.0, 100.0), _beach,
                _runup_init, 32.5, Params(eta_p=1e-4, lam=1.0)),
}


def test_case(n: int) -> Scenario:
    """Benchmark ``n`` in 1..4."""
    try:
        return _CASES[int(n)]
    except (KeyError, ValueError, TypeError):
        raise ValueError(f"unknown test case {n!r}; expected 1, 2, 3 or 4") from None


test_case.__test__ = False  # not a pytest test
