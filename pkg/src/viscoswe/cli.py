"""Command-line driver: single runs with CSV output, convergence tables and parameter sweeps.

Configuration files are plain ``key=value`` lines with ``#`` comments; every
key is a :class:`RunConfig` field (``lambda`` is accepted for ``lam``) and
command-line flags of the same name override the file.

    viscoswe run --scenario 1 --cells 400 --output_dir out
    viscoswe converge --scenario 1 --cell_list 50,100,200,400
    viscoswe trend --scenario 1 --param eta_p --values 0.1,10,1000
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import diagnostics as diag
from .model import DRY_THRESHOLD, H, SXX, SZZ, Params, extra_stress, to_primitive
from .scenarios import Scenario, test_case
from .timestepper import (
    BoundaryCondition,
    DtUnderflowError,
    Grid,
    PositivityError,
    SimState,
    advance,
)

ENERGY_TOL = 1e-10

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_DT_UNDERFLOW = 2
EXIT_POSITIVITY = 3

SNAPSHOT_COLUMNS = ("x", "b", "h", "u", "sigma_xx", "sigma_zz", "tau_xx", "tau_zz")
REPORT_COLUMNS = ("t", "dt", "mass", "energy", "max_sxx", "min_szz", "energy_violation", "min_h")


@dataclass
class RunConfig:
    """One simulation.  ``None`` means "use the scenario default"."""

    scenario: int | str = 1
    cells: int | None = None
    cfl: float = 0.5
    g: float | None = None
    eta_p: float | None = None
    lam: float | None = None
    t_final: float | None = None
    snapshot_times: tuple[float, ...] = ()
    output_dir: str | None = None
    bc: str | None = None
    dt_floor: float = 1e-10
    x_min: float | None = None
    x_max: float | None = None
    custom: Scenario | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.scenario != "custom" and self.scenario not in (1, 2, 3, 4):
            raise ValueError(f"scenario: expected 1, 2, 3, 4 or 'custom', got {self.scenario!r}")
        if self.cells is not None and self.cells < 4:
            raise ValueError(f"cells: must be at least 4, got {self.cells}")
        if not 0 < self.cfl <= 0.5:
            raise ValueError(f"cfl: out of range (0, 0.5], got {self.cfl}")
        if self.t_final is not None and not self.t_final > 0:
            raise ValueError(f"t_final: must be positive, got {self.t_final}")
        if not self.dt_floor >= 0:
            raise ValueError(f"dt_floor: must be non-negative, got {self.dt_floor}")
        times = tuple(self.snapshot_times)
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot_times: must be sorted")
        if times and times[0] < 0:
            raise ValueError("snapshot_times: must be non-negative")
        if self.t_final is not None and times and times[-1] > self.t_final:
            raise ValueError("snapshot_times: beyond t_final")
        if self.bc is not None:
            BoundaryCondition.parse(self.bc)
        if (self.x_min is None) != (self.x_max is None):
            raise ValueError("x_min/x_max: give both or neither")
        if self.x_min is not None and not self.x_min < self.x_max:
            raise ValueError("x_min/x_max: need x_min < x_max")
        # Params validates g, eta_p, lam
        if any(v is not None for v in (self.g, self.eta_p, self.lam)):
            Params(**{k: v for k, v in (("g", self.g), ("eta_p", self.eta_p), ("lam", self.lam))
                      if v is not None})

    # -- resolution of defaults -------------------------------------------------------------

    def resolve_scenario(self) -> Scenario:
        if self.scenario == "custom":
            if self.custom is None:
                raise ValueError("scenario 'custom' needs a Scenario object (library use only)")
            sc = self.custom
        else:
            sc = test_case(self.scenario)
        if self.x_min is not None:
            sc = replace(sc, domain=(self.x_min, self.x_max))
        return sc

    def params(self) -> Params:
        base = self.resolve_scenario().default_params
        over = {k: v for k, v in (("g", self.g), ("eta_p", self.eta_p), ("lam", self.lam))
                if v is not None}
        return replace(base, **over)

    def final_time(self) -> float:
        return self.t_final if self.t_final is not None else self.resolve_scenario().t_final

    def boundary(self) -> BoundaryCondition:
        return BoundaryCondition.parse(self.bc) if self.bc is not None else self.resolve_scenario().bc

    def n_cells(self) -> int:
        return self.cells if self.cells is not None else self.resolve_scenario().default_cells

    def outputs(self) -> tuple[float, ...]:
        t_end = self.final_time()
        times = tuple(self.snapshot_times) or (t_end,)
        if times[-1] > t_end:
            raise ValueError("snapshot_times: beyond t_final")
        return times


_KEY_ALIASES = {"lambda": "lam"}
_CONFIG_KEYS = [f.name for f in fields(RunConfig) if f.name != "custom"]


def _convert(key: str, raw: str):
    raw = raw.strip()
    try:
        if key == "scenario":
            return "custom" if raw == "custom" else int(raw)
        if key == "cells":
            return int(raw)
        if key in ("output_dir", "bc"):
            return raw
        if key == "snapshot_times":
            return tuple(float(s) for s in raw.replace(",", " ").split())
        value = float(raw)
    except ValueError:
        raise ValueError(f"{key}: malformed value {raw!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{key}: value must be finite, got {raw!r}")
    return value


def parse_pairs(text: str) -> dict:
    """Raw ``key=value`` pairs of a config file, converted but not validated together."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = _KEY_ALIASES.get(key, key)
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        out[key] = _convert(key, raw)
    return out


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from file text; ``overrides`` (e.g. CLI flags) win."""
    values = parse_pairs(text)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**values)


# -- single run -----------------------------------------------------------------------------


@dataclass
class RunResult:
    status: int
    state: SimState
    grid: Grid
    steps: int
    reports: list = field(default_factory=list, repr=False)
    snapshots: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    error: str | None = None


def snapshot_rows(state: SimState, grid: Grid, params: Params):
    p = to_primitive(state.cells, DRY_THRESHOLD)
    tau_xx, tau_zz = extra_stress(p, params)
    return np.column_stack([grid.centers, grid.topo, p, tau_xx, tau_zz])


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["%.17g" % v for v in row])


def simulate(config: RunConfig, keep_reports: bool = True) -> RunResult:
    """Advance to every snapshot time and collect step reports, without writing files."""
    sc = config.resolve_scenario()
    params = config.params()
    bc = config.boundary()
    grid = sc.grid(config.n_cells())
    state = sc.initial_state(grid, params)
    targets = list(config.outputs())
    flat = grid.flat

    result = RunResult(EXIT_OK, state, grid, 0)
    for target in targets:
        while state.time < target:
            try:
                new, info = advance(state, grid, params, config.cfl, bc,
                                    dt_cap=target - state.time, dt_floor=config.dt_floor,
                                    with_info=True)
            except DtUnderflowError as exc:
                result.status, result.error = EXIT_DT_UNDERFLOW, str(exc)
                return result
            except PositivityError as exc:
                result.status, result.error = EXIT_POSITIVITY, str(exc)
                return result
            if info.dt == target - state.time:
                new.time = target
            if keep_reports:
                report = _report(info, new, grid, params)
                result.reports.append(report)
                scale = max(float(np.max(np.abs(diag.cell_energy(info.pre, grid, params)))), 1e-300)
                if flat and report.energy_violation > ENERGY_TOL * scale:
                    result.violations.append(f"energy inequality at t={new.time:.6g}: "
                                             f"{report.energy_violation:.3e}")
                if report.min_h < 0 or report.min_sigma < 0:
                    result.violations.append(f"invariant domain left at t={new.time:.6g}")
            state = new
            result.steps += 1
            result.state = state
        result.snapshots.append((target, state.copy()))
    if result.violations:
        result.status = EXIT_INVARIANT
    return result


def _report(info, new: SimState, grid: Grid, params: Params) -> diag.StepReport:
    violation = diag.check_energy_inequality(info.pre, info.mid, info.data, grid, info.dt, params)
    min_h, min_sxx, min_szz = diag.check_domain(new)
    max_sxx, min_szz_s = diag.principle_extrema(new)
    if not np.isfinite(max_sxx):
        max_sxx, min_szz_s = 0.0, 0.0
    return diag.StepReport(t=new.time, dt=info.dt, mass=diag.total_mass(new, grid),
                           energy=diag.total_energy_sum(new, grid, params), max_sxx=max_sxx,
                           min_szz=min_szz_s, energy_violation=violation, min_h=min_h,
                           min_sigma=min(min_sxx, min_szz))


def run(config: RunConfig) -> RunResult:
    """Simulate and write ``snapshot_XXX.csv`` files plus ``steps.csv`` into ``output_dir``.

    Output written before an abort (dt underflow, positivity loss) is kept.
    """
    out = Path(config.output_dir or "output")
    out.mkdir(parents=True, exist_ok=True)
    result = simulate(config)
    params = config.params()
    for i, (t, state) in enumerate(result.snapshots):
        _write_csv(out / f"snapshot_{i:03d}.csv", SNAPSHOT_COLUMNS,
                   snapshot_rows(state, result.grid, params))
    _write_csv(out / "steps.csv", REPORT_COLUMNS,
               ([getattr(r, c) for c in REPORT_COLUMNS] for r in result.reports))
    return result


# -- convergence ----------------------------------------------------------------------------


def project(fine: np.ndarray, n_coarse: int) -> np.ndarray:
    """Average a uniform fine-mesh field onto a nested coarse mesh."""
    n_fine = fine.shape[0]
    if n_coarse <= 0 or n_fine % n_coarse:
        raise ValueError(f"meshes are not nested: {n_fine} cells onto {n_coarse}")
    r = n_fine // n_coarse
    return fine.reshape(n_coarse, r, *fine.shape[1:]).mean(axis=1)


@dataclass
class ConvergenceRow:
    coarse: int
    fine: int
    l1: np.ndarray  # per conservative variable (h, hu, h sxx, h szz)


def run_convergence(base: RunConfig, cell_list: Sequence[int]) -> list[ConvergenceRow]:
    """L1 distances between consecutive resolutions, finer averaged onto coarser."""
    cell_list = [int(n) for n in cell_list]
    if len(cell_list) < 2:
        raise ValueError("cell_list needs at least two resolutions")
    for a, b in zip(cell_list, cell_list[1:]):
        if b < a or b % a:
            raise ValueError(f"meshes are not nested: {a} then {b}")
    sols = {}
    for n in sorted(set(cell_list)):
        res = simulate(replace(base, cells=n, snapshot_times=()), keep_reports=False)
        if res.error:
            raise RuntimeError(f"{n}-cell run failed: {res.error}")
        sols[n] = (res.state.cells, res.grid.widths)
    rows = []
    for a, b in zip(cell_list, cell_list[1:]):
        coarse, dx = sols[a]
        diff = np.abs(coarse - project(sols[b][0], a))
        rows.append(ConvergenceRow(a, b, np.sum(diff * dx[:, None], axis=0)))
    return rows


# -- parameter trends -----------------------------------------------------------------------


@dataclass
class TrendRow:
    value: float
    front: float
    front_at_boundary: bool
    contact: float
    h_jump: float
    sxx_jump: float
    szz_jump: float


def _first_crossing(x, theta, level, start=0):
    for i in range(max(start, 0), len(theta) - 1):
        a, b = theta[i], theta[i + 1]
        if (a - level) * (b - level) <= 0 and a != b:
            return i, x[i] + (level - a) / (b - a) * (x[i + 1] - x[i])
    return None, float("nan")


def measure_structure(state: SimState, grid: Grid, h_right: float, threshold: float = 0.01):
    """Front, contact position and contact jumps of a dam-break-like solution.

    The contact is where ``s_xx`` (transported, so it only jumps at the
    contact) crosses halfway between its far-left and far-right values; the
    jumps compare the states where that crossing is 10% and 90% complete.
    """
    p = to_primitive(state.cells)
    x = grid.centers
    away = np.nonzero(np.abs(p[:, H] - h_right) > threshold)[0]
    front = float(x[away[-1]]) if away.size else float("nan")
    at_boundary = bool(away.size and away[-1] == len(x) - 1)

    wet = p[:, H] > 0
    s = np.where(wet, 1.0 / (np.sqrt(p[:, SXX]) * np.where(wet, p[:, H], 1.0)), np.nan)
    iw = np.nonzero(wet)[0]
    s_l, s_r = s[iw[0]], s[iw[-1]]
    if s_l == s_r:
        return front, at_boundary, float("nan"), 0.0, 0.0, 0.0
    theta = np.where(wet, (s - s_l) / (s_r - s_l), np.nan)
    i_c, contact = _first_crossing(x, theta, 0.5, iw[0])
    if i_c is None:
        return front, at_boundary, float("nan"), 0.0, 0.0, 0.0
    left = i_c
    while left > iw[0] and theta[left] > 0.1:
        left -= 1
    right = i_c + 1
    while right < iw[-1] and theta[right] < 0.9:
        right += 1
    jumps = [float(p[left, m] - p[right, m]) for m in (H, SXX, SZZ)]
    return front, at_boundary, float(contact), *jumps


def run_trend(base: RunConfig, param: str, values: Sequence[float],
              threshold: float = 0.01) -> list[TrendRow]:
    """Sweep ``eta_p`` or ``lam`` and measure front and contact at the final time."""
    param = _KEY_ALIASES.get(param, param)
    if param not in ("eta_p", "lam"):
        raise ValueError(f"param: expected 'eta_p' or 'lambda', got {param!r}")
    rows = []
    for v in values:
        cfg = replace(base, **{param: float(v)}, snapshot_times=())
        res = simulate(cfg, keep_reports=False)
        if res.error:
            raise RuntimeError(f"{param}={v} run failed: {res.error}")
        init = cfg.resolve_scenario().initial_state(res.grid, cfg.params())
        h_right = float(init.cells[-1, H])
        rows.append(TrendRow(float(v), *measure_structure(res.state, res.grid, h_right, threshold)))
    return rows


# -- command line ---------------------------------------------------------------------------


def _add_config_flags(ap: argparse.ArgumentParser):
    ap.add_argument("--config", help="key=value configuration file")
    for name in _CONFIG_KEYS:
        flag = "--lambda" if name == "lam" else f"--{name}"
        ap.add_argument(flag, dest=name, type=str, default=None)


def _config_from_args(args) -> RunConfig:
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    overrides = {k: _convert(k, getattr(args, k)) for k in _CONFIG_KEYS
                 if getattr(args, k, None) is not None}
    return parse_config(text, overrides)


def _float_list(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="viscoswe", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="simulate one configuration and write CSV files")
    _add_config_flags(p_run)
    p_conv = sub.add_parser("converge", help="L1 distances between nested resolutions")
    _add_config_flags(p_conv)
    p_conv.add_argument("--cell_list", default="50,100,200,400")
    p_tr = sub.add_parser("trend", help="front/contact measurements over a parameter sweep")
    _add_config_flags(p_tr)
    p_tr.add_argument("--param", default="eta_p")
    p_tr.add_argument("--values", default="0.1,10,1000")
    p_tr.add_argument("--threshold", type=float, default=0.01)
    args = ap.parse_args(argv)

    try:
        config = _config_from_args(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64

    if args.command == "run":
        result = run(config)
        print(f"steps={result.steps} t={result.state.time:.17g} status={result.status}")
        for v in result.violations[:10]:
            print(f"violation: {v}", file=sys.stderr)
        if result.error:
            print(f"error: {result.error}", file=sys.stderr)
        return result.status

    out = csv.writer(sys.stdout, lineterminator="\n")
    if args.command == "converge":
        rows = run_convergence(config, [int(v) for v in _float_list(args.cell_list)])
        out.writerow(["coarse", "fine", "l1_h", "l1_hu", "l1_hsxx", "l1_hszz"])
        for r in rows:
            out.writerow([r.coarse, r.fine, *("%.17g" % v for v in r.l1)])
        return 0

    rows = run_trend(config, args.param, _float_list(args.values), args.threshold)
    out.writerow(["value", "front", "front_at_boundary", "contact", "h_jump", "sxx_jump", "szz_jump"])
    for r in rows:
        out.writerow(["%.17g" % r.value, "%.17g" % r.front, int(r.front_at_boundary),
                      "%.17g" % r.contact, "%.17g" % r.h_jump, "%.17g" % r.sxx_jump,
                      "%.17g" % r.szz_jump])
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
