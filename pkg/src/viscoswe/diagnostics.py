"""Run-time monitors: mass, energy balance, invariant-domain margins and s-extrema."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import DRY_THRESHOLD, H, SXX, SZZ, U, Params, elastic_energy, to_primitive, total_energy
from .timestepper import Grid, InterfaceData, SimState


@dataclass
class StepReport:
    """Per-step summary written by the CLI driver."""

    t: float
    dt: float
    mass: float
    energy: float
    max_sxx: float
    min_szz: float
    energy_violation: float
    min_h: float
    min_sigma: float

    def __post_init__(self):
        bad = [k for k, v in asdict(self).items() if not np.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite report fields: {', '.join(bad)}")


def total_mass(state: SimState, grid: Grid) -> float:
    return float(np.sum(state.cells[:, H] * grid.widths))


def cell_energy(state: SimState, grid: Grid, params: Params,
                dry_threshold: float = DRY_THRESHOLD) -> np.ndarray:
    """Per-cell E~ = E + g h b (zero on dry cells)."""
    p = to_primitive(state.cells, dry_threshold)
    _, e_tilde = total_energy(p, grid.topo, params)
    return np.where(p[:, H] > 0, e_tilde, 0.0)


def total_energy_sum(state: SimState, grid: Grid, params: Params) -> float:
    """Sum of E~ dx over the mesh."""
    return float(np.sum(cell_energy(state, grid, params) * grid.widths))


def check_energy_inequality(pre: SimState, post: SimState, data: InterfaceData, grid: Grid,
                            dt: float, params: Params) -> float:
    """Worst cell-wise value of E(q^{n+1}) - E(q^n) + dt/dx (G_{i+1/2} - G_{i-1/2}).

    ``post`` must be the result of a hyperbolic step with fluxes ``data``;
    a positive return value is a violation.  The potential energy g h b and
    its flux are included, which is a no-op on a flat bottom.
    """
    G = data.fluxes.energy_flux
    lhs = (cell_energy(post, grid, params) - cell_energy(pre, grid, params)
           + dt / grid.widths * (G[1:] - G[:-1]))
    return float(np.max(lhs))


def check_domain(state: SimState, dry_threshold: float = DRY_THRESHOLD):
    """``(min h, min sigma_xx, min sigma_zz)``; dry cells count as sigma = 1."""
    p = to_primitive(state.cells, dry_threshold)
    return float(np.min(p[:, H])), float(np.min(p[:, SXX])), float(np.min(p[:, SZZ]))


def principle_extrema(state: SimState, dry_threshold: float = DRY_THRESHOLD):
    """``(max s_xx, min s_zz)`` over wet cells, or ``(nan, nan)`` if every cell is dry."""
    p = to_primitive(state.cells, dry_threshold)
    wet = p[:, H] > 0
    if not np.any(wet):
        return float("nan"), float("nan")
    h = p[wet, H]
    s_xx = 1.0 / (np.sqrt(p[wet, SXX]) * h)
    s_zz = np.sqrt(p[wet, SZZ]) / h
    return float(np.max(s_xx)), float(np.min(s_zz))


def source_dissipation(mid: SimState, post: SimState, grid: Grid, params: Params) -> float:
    """Energy removed by the relaxation step (elastic part only; h and hu are untouched)."""
    def elastic(state):
        p = to_primitive(state.cells)
        wet = p[:, H] > 0
        e = np.zeros(len(p))
        e[wet] = p[wet, H] * elastic_energy(p[wet], params)
        return float(np.sum(e * grid.widths))
    return elastic(mid) - elastic(post)


def steady_residual(state: SimState, grid: Grid, dry_threshold: float = DRY_THRESHOLD) -> float:
    """Distance to a lake at rest: max |u| + |h + b - level| + |sigma - 1| over cells.

    ``level`` is the median free surface over wet cells; dry cells only
    contribute through their (zero) velocity.
    """
    p = to_primitive(state.cells, dry_threshold)
    wet = p[:, H] > 0
    res = np.abs(p[:, U]) + np.abs(p[:, SXX] - 1.0) + np.abs(p[:, SZZ] - 1.0)
    if np.any(wet):
        eta = p[:, H] + grid.topo
        level = np.median(eta[wet])
        res = res + np.where(wet, np.abs(eta - level), 0.0)
    return float(np.max(res))
