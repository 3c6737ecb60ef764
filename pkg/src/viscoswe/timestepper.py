"""Explicit finite-volume time stepping with a split stress-relaxation source.

One step of :func:`advance` is

1. ``dt`` from the half-CFL condition on the hydrostatically reconstructed fans,
2. the flux-difference update ``q_i -= dt/dx_i (F_l[i+1/2] - F_r[i-1/2])``,
3. the backward-Euler relaxation ``sigma <- (sigma + dt/lam) / (1 + dt/lam)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .model import DRY_THRESHOLD, H, HSXX, HSZZ, Params, to_primitive
from ._kernels import fused_interface_fluxes
from .riemann import max_speed
from .wellbalanced import TopoFluxPair, topo_fluxes_primitive


class BoundaryCondition(enum.Enum):
    NEUMANN = "neumann"
    PERIODIC = "periodic"

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown boundary condition {value!r}") from None


class PositivityError(ArithmeticError):
    """The update left the invariant domain (CFL violated or corrupted data)."""


class DtUnderflowError(RuntimeError):
    """The stable time step fell below the configured floor."""

    def __init__(self, dt: float, floor: float, t: float):
        super().__init__(f"time step {dt:.3e} below floor {floor:.3e} at t={t:.6g}")
        self.dt = dt
        self.floor = floor
        self.t = t


@dataclass
class Grid:
    """1-D mesh: interface positions ``edges`` and cell-centred topography ``topo``."""

    edges: np.ndarray
    topo: np.ndarray = None

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if self.edges.ndim != 1 or self.edges.size < 2:
            raise ValueError("edges must be a 1-D array with at least two entries")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        if self.topo is None:
            self.topo = np.zeros(self.n_cells)
        self.topo = np.asarray(self.topo, dtype=float)
        if self.topo.shape != (self.n_cells,):
            raise ValueError("topo must have one value per cell")

    @classmethod
    def uniform(cls, x_min: float, x_max: float, n_cells: int,
                topo_fn: Callable | None = None) -> "Grid":
        edges = np.linspace(x_min, x_max, n_cells + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
        topo = None if topo_fn is None else np.broadcast_to(topo_fn(centers), centers.shape)
        return cls(edges, topo)

    @property
    def n_cells(self) -> int:
        return self.edges.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def flat(self) -> bool:
        return bool(np.all(self.topo == self.topo[0]))


@dataclass
class SimState:
    cells: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.cells = np.array(self.cells, dtype=float)
        if self.cells.ndim != 2 or self.cells.shape[1] != 4:
            raise ValueError("cells must have shape (N, 4)")

    def copy(self) -> "SimState":
        return SimState(self.cells.copy(), self.time)


class InterfaceData(NamedTuple):
    """Fluxes at the N+1 interfaces of an N-cell mesh (ghost cells included)."""

    fluxes: TopoFluxPair
    speeds: np.ndarray
    dx_min: np.ndarray


def apply_bc(cells: np.ndarray, bc: BoundaryCondition):
    """Left and right ghost values for the given boundary condition."""
    bc = BoundaryCondition.parse(bc)
    cells = np.asarray(cells)
    if bc is BoundaryCondition.NEUMANN:
        return cells[0].copy(), cells[-1].copy()
    return cells[-1].copy(), cells[0].copy()


def _extend(values: np.ndarray, bc: BoundaryCondition) -> np.ndarray:
    left, right = apply_bc(values, bc)
    return np.concatenate([left[None], values, right[None]])


def interface_data(state: SimState, grid: Grid, params: Params, bc=BoundaryCondition.NEUMANN,
                   dry_threshold: float = DRY_THRESHOLD, fused: bool = True) -> InterfaceData:
    """Solve every interface Riemann problem of the current state.

    ``fused=False`` goes through the vectorised reference solver and keeps
    the fans (``data.fluxes.fan``); the default compiled kernel does not.
    """
    bc = BoundaryCondition.parse(bc)
    prim = to_primitive(state.cells, dry_threshold)
    p_ext = _extend(prim, bc)
    b_ext = _extend(grid.topo, bc)
    dx_ext = _extend(grid.widths, bc)
    dx_min = np.minimum(dx_ext[:-1], dx_ext[1:])
    if fused:
        f_l, f_r, G, A = fused_interface_fluxes(p_ext, b_ext, params.g, params.k, dry_threshold)
        return InterfaceData(TopoFluxPair(f_l, f_r, G, None), A, dx_min)
    fluxes = topo_fluxes_primitive(p_ext[:-1], p_ext[1:], b_ext[:-1], b_ext[1:], params,
                                   dry_threshold)
    return InterfaceData(fluxes, max_speed(fluxes.fan), dx_min)


def compute_dt(state: SimState, grid: Grid, params: Params, cfl: float = 0.5,
               bc=BoundaryCondition.NEUMANN, dt_cap: float = np.inf,
               data: InterfaceData | None = None) -> float:
    """Largest dt with ``dt * A <= cfl * min(dx_i, dx_i+1)`` at every interface."""
    if not 0 < cfl <= 0.5:
        raise ValueError(f"cfl must lie in (0, 1/2], got {cfl}")
    if data is None:
        data = interface_data(state, grid, params, bc)
    moving = data.speeds > 0
    if not np.any(moving):
        return float(dt_cap)
    dt = float(np.min(cfl * data.dx_min[moving] / data.speeds[moving]))
    return min(dt, float(dt_cap))


def _clean(cells: np.ndarray, t: float) -> np.ndarray:
    """Zero round-off negatives; raise on genuine loss of positivity."""
    scale = max(float(np.max(np.abs(cells[:, H]))), 1.0)
    tol = 1e-12 * scale
    signed = cells[:, [H, HSXX, HSZZ]]
    if np.any(signed < -tol) or not np.all(np.isfinite(cells)):
        i = int(np.argmin(np.min(signed, axis=1)))
        raise PositivityError(f"cell {i} left the invariant domain at t={t:.6g}: {cells[i]}")
    signed = np.maximum(signed, 0.0)
    cells[:, [H, HSXX, HSZZ]] = signed
    cells[cells[:, H] == 0.0] = 0.0
    return cells


def hyperbolic_step(state: SimState, grid: Grid, params: Params, dt: float,
                    bc=BoundaryCondition.NEUMANN, data: InterfaceData | None = None) -> SimState:
    """Flux-difference update without the relaxation source."""
    if data is None:
        data = interface_data(state, grid, params, bc)
    f = data.fluxes
    ratio = (dt / grid.widths)[:, None]
    cells = state.cells - ratio * (f.f_l[1:] - f.f_r[:-1])
    return SimState(_clean(cells, state.time), state.time + dt)


def relax_source_step(state: SimState, dt: float, params: Params) -> SimState:
    """Backward-Euler integration of d(sigma)/dt = (1 - sigma)/lam; h and hu untouched."""
    r = dt / params.lam
    cells = state.cells.copy()
    h = cells[:, H]
    cells[:, HSXX] = (cells[:, HSXX] + r * h) / (1.0 + r)
    cells[:, HSZZ] = (cells[:, HSZZ] + r * h) / (1.0 + r)
    return SimState(cells, state.time)


@dataclass
class StepInfo:
    """By-products of one :func:`advance` call, for diagnostics."""

    dt: float
    data: InterfaceData
    pre: SimState
    mid: SimState = field(repr=False, default=None)


def advance(state: SimState, grid: Grid, params: Params, cfl: float = 0.5,
            bc=BoundaryCondition.NEUMANN, dt_cap: float = np.inf, dt_floor: float = 0.0,
            with_info: bool = False):
    """One fractional step: hyperbolic update then stress relaxation.

    Returns ``(new_state, dt)``, or ``(new_state, StepInfo)`` with ``with_info``.
    ``dt_cap`` clips the step (e.g. to land on an output time) and is exempt
    from the ``dt_floor`` check.
    """
    bc = BoundaryCondition.parse(bc)
    data = interface_data(state, grid, params, bc)
    dt_stable = compute_dt(state, grid, params, cfl, bc, np.inf, data)
    if dt_stable < dt_floor:
        raise DtUnderflowError(dt_stable, dt_floor, state.time)
    dt = min(dt_stable, dt_cap)
    if not np.isfinite(dt):
        raise ValueError("no wave speed and no dt_cap: the step size is unbounded")
    mid = hyperbolic_step(state, grid, params, dt, bc, data)
    new = relax_source_step(mid, dt, params)
    if with_info:
        return new, StepInfo(dt, data, state, mid)
    return new, dt
