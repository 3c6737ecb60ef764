import math

import numpy as np
import pytest

from viscoswe import diagnostics as diag
from viscoswe.model import Params, to_conservative
from viscoswe.scenarios import test_case as scenario
from viscoswe.timestepper import Grid, SimState, compute_dt, hyperbolic_step, interface_data


def states(*prims):
    return SimState(to_conservative(np.array(prims, dtype=float)))


def test_total_mass():
    grid = Grid.uniform(0, 10, 5)
    assert diag.total_mass(states(*[[2, 0, 1, 1]] * 5), grid) == 20.0
    assert diag.total_mass(SimState(np.zeros((5, 4))), grid) == 0.0
    sc = scenario(1)
    g = sc.grid(400)
    assert diag.total_mass(sc.initial_state(g), g) == pytest.approx(16.0, rel=1e-15)


def _one_step(st, grid, prm):
    data = interface_data(st, grid, prm)
    dt = compute_dt(st, grid, prm, data=data)
    return hyperbolic_step(st, grid, prm, dt, data=data), data, dt


def test_energy_inequality_uniform_and_rest():
    prm = Params(g=9.81, eta_p=1.0)
    grid = Grid.uniform(0, 1, 10)
    for st in (states(*[[1.5, 0.3, 1.2, 0.8]] * 10), states(*[[2.0, 0, 1, 1]] * 10)):
        new, data, dt = _one_step(st, grid, prm)
        assert abs(diag.check_energy_inequality(st, new, data, grid, dt, prm)) <= 1e-14


def test_energy_inequality_test1_first_step():
    sc = scenario(1)
    grid = sc.grid(400)
    st = sc.initial_state(grid)
    prm = sc.default_params
    new, data, dt = _one_step(st, grid, prm)
    emax = np.max(diag.cell_energy(st, grid, prm))
    assert diag.check_energy_inequality(st, new, data, grid, dt, prm) <= 1e-10 * emax


def test_check_domain():
    assert diag.check_domain(states([1, 0, 2, 3], [2, 1, 0.5, 4])) == (1.0, 0.5, 3.0)
    assert diag.check_domain(SimState(np.zeros((3, 4)))) == (0.0, 1.0, 1.0)


def test_check_domain_test2_100_steps():
    sc = scenario(2)
    grid = sc.grid(400)
    st = sc.initial_state(grid)
    from viscoswe.timestepper import advance
    for _ in range(100):
        st, _ = advance(st, grid, sc.default_params)
        assert min(diag.check_domain(st)) >= 0.0


def test_principle_extrema():
    assert diag.principle_extrema(states(*[[1, 0, 1, 1]] * 3)) == (1.0, 1.0)
    assert diag.principle_extrema(states(*[[2, 0, 1, 1]] * 3)) == (0.5, 0.5)
    mixed = states([1, 0, 4, 1], [0.5, 0, 1, 4], [0, 0, 1, 1])
    # s_xx = (0.5, 2), s_zz = (1, 4); the dry cell is ignored
    assert diag.principle_extrema(mixed) == (2.0, 1.0)
    assert all(math.isnan(v) for v in diag.principle_extrema(SimState(np.zeros((2, 4)))))


def test_steady_residual():
    sc = scenario(3)
    grid = sc.grid(30)
    h = np.maximum(0, 10 - grid.topo)
    lake = SimState(np.column_stack([h, 0 * h, h, h]))
    assert diag.steady_residual(lake, grid) == 0.0
    flow = SimState(np.column_stack([h, h, h, h]))
    assert diag.steady_residual(flow, grid) >= 1.0
    bumped = lake.copy()
    bumped.cells[4] *= (h[4] + 1e-3) / h[4]
    assert diag.steady_residual(bumped, grid) >= 1e-3 * (1 - 1e-12)


def test_step_report_rejects_nonfinite():
    ok = dict(t=0.1, dt=0.01, mass=1.0, energy=2.0, max_sxx=1.0, min_szz=1.0,
              energy_violation=0.0, min_h=0.0, min_sigma=1.0)
    diag.StepReport(**ok)
    with pytest.raises(ValueError):
        diag.StepReport(**{**ok, "energy": float("nan")})


def test_source_dissipation_nonnegative():
    from viscoswe.timestepper import relax_source_step
    prm = Params(eta_p=2.0, lam=0.5)
    st = states([1, 0, 3, 0.5], [2, 1, 0.2, 2.0])
    grid = Grid.uniform(0, 1, 2)
    assert diag.source_dissipation(st, relax_source_step(st, 0.1, prm), grid, prm) > 0
