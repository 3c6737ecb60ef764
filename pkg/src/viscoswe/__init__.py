"""Finite-volume solver for the 1-D shallow viscoelastic (reduced UCM) system."""

from .model import DRY_THRESHOLD, Params, to_conservative, to_primitive
from .riemann import interface_fluxes, solve_fan
from .scenarios import Scenario, test_case
from .timestepper import BoundaryCondition, Grid, SimState, advance

__all__ = [
    "DRY_THRESHOLD",
    "BoundaryCondition",
    "Grid",
    "Params",
    "Scenario",
    "SimState",
    "advance",
    "interface_fluxes",
    "solve_fan",
    "test_case",
    "to_conservative",
    "to_primitive",
]
