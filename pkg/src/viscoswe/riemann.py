"""Suliciu-type relaxation Riemann solver for the pseudo-conservative system.

The pressure is replaced by a relaxed pressure ``pi`` transported with a
speed parameter ``c``; the resulting system has only linearly degenerate
fields, so the fan is made of three contact-like waves

    Sigma1 = u_l - c_l/h_l  <=  Sigma2 = u*  <=  Sigma3 = u_r + c_r/h_r

separating the constant states l, l*, r*, r.  Every function works on a
single interface (states of shape ``(4,)``) or on a batch ``(M, 4)``.

Dry sides (h below the dry threshold) are handled by the limit c -> 0 of
the wet formulas: the intermediate state next to vacuum has zero pressure,
and the waves on the dry side collapse onto the contact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    DRY_THRESHOLD,
    H,
    HSXX,
    HSZZ,
    HU,
    SXX,
    SZZ,
    U,
    Params,
    dP_dh,
    internal_energy,
    physical_flux,
    pressure,
    to_conservative,
    to_primitive,
)


class DegenerateFanError(ArithmeticError):
    """An intermediate depth of the relaxation fan is not positive."""


class RelaxSpeeds(NamedTuple):
    c_l: np.ndarray
    c_r: np.ndarray


class FluxPair(NamedTuple):
    f_l: np.ndarray
    f_r: np.ndarray
    energy_flux: np.ndarray


@dataclass
class RiemannFan:
    """Resolved relaxation fan.  States are primitive ``(h, u, sxx, szz)``."""

    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma3: np.ndarray
    state_l: np.ndarray
    state_lstar: np.ndarray
    state_rstar: np.ndarray
    state_r: np.ndarray
    pi_l: np.ndarray
    pi_lstar: np.ndarray
    pi_rstar: np.ndarray
    pi_r: np.ndarray
    c: RelaxSpeeds
    e_l: np.ndarray
    ehat_lstar: np.ndarray
    ehat_rstar: np.ndarray
    e_r: np.ndarray

    def regions(self):
        """States, relaxed pressures and auxiliary energies of the four regions, left to right."""
        return (
            (self.state_l, self.pi_l, self.e_l),
            (self.state_lstar, self.pi_lstar, self.ehat_lstar),
            (self.state_rstar, self.pi_rstar, self.ehat_rstar),
            (self.state_r, self.pi_r, self.e_r),
        )


def _speed_ratios(p_l, p_r, params: Params, wet_l, wet_r):
    """c_l/h_l and c_r/h_r together with the left/right pressures."""
    a_l = np.sqrt(dP_dh(p_l, params))
    a_r = np.sqrt(dP_dh(p_r, params))
    P_l = pressure(p_l, params)
    P_r = pressure(p_r, params)
    h_l, h_r = p_l[..., H], p_r[..., H]
    # no compression against vacuum
    du = np.where(wet_l & wet_r, np.maximum(0.0, p_l[..., U] - p_r[..., U]), 0.0)
    ha = h_l * a_l + h_r * a_r
    safe_ha = np.where(ha > 0, ha, 1.0)
    r_l = a_l + 2.0 * (du + np.maximum(0.0, P_r - P_l) / safe_ha)
    r_r = a_r + 2.0 * (du + np.maximum(0.0, P_l - P_r) / safe_ha)
    return r_l, r_r, P_l, P_r


def relaxation_speeds(p_l, p_r, params: Params) -> RelaxSpeeds:
    """Relaxation parameters c_l, c_r from primitive left/right states.

    The choice guarantees positive intermediate depths and the discrete
    energy inequality.  A dry side gets ``c = 0``.
    """
    p_l = np.asarray(p_l, dtype=float)
    p_r = np.asarray(p_r, dtype=float)
    if not (np.all(np.isfinite(p_l)) and np.all(np.isfinite(p_r))):
        raise ValueError("non-finite Riemann data")
    wet_l = p_l[..., H] > 0
    wet_r = p_r[..., H] > 0
    r_l, r_r, _, _ = _speed_ratios(p_l, p_r, params, wet_l, wet_r)
    return RelaxSpeeds(p_l[..., H] * r_l, p_r[..., H] * r_r)


def solve_fan(q_l, q_r, params: Params, dry_threshold: float = DRY_THRESHOLD) -> RiemannFan:
    """Solve the relaxation Riemann problem between conservative states q_l, q_r."""
    return solve_fan_primitive(
        to_primitive(q_l, dry_threshold), to_primitive(q_r, dry_threshold), params
    )


def solve_fan_primitive(p_l, p_r, params: Params) -> RiemannFan:
    """Same as :func:`solve_fan` for primitive states; ``h == 0`` marks a dry side."""
    p_l = np.asarray(p_l, dtype=float)
    p_r = np.asarray(p_r, dtype=float)
    if not (np.all(np.isfinite(p_l)) and np.all(np.isfinite(p_r))):
        raise ValueError("non-finite Riemann data")
    h_l, u_l = p_l[..., H], p_l[..., U]
    h_r, u_r = p_r[..., H], p_r[..., U]
    wet_l = h_l > 0
    wet_r = h_r > 0
    both = wet_l & wet_r
    any_wet = wet_l | wet_r

    r_l, r_r, pi_l, pi_r = _speed_ratios(p_l, p_r, params, wet_l, wet_r)
    c_l = h_l * r_l
    c_r = h_r * r_r
    csum = c_l + c_r
    safe_csum = np.where(any_wet, csum, 1.0)

    du = u_r - u_l
    dpi = pi_r - pi_l
    u_star = np.where(any_wet, u_l + (c_r * du - dpi) / safe_csum, 0.0)
    # anchor pi* on the smaller side pressure so its rounding stays at the scale of both waves
    pi_from_l = pi_l + (c_l * dpi - c_l * c_r * du) / safe_csum
    pi_from_r = pi_r - (c_r * dpi + c_l * c_r * du) / safe_csum
    pi_star = np.where(both, np.where(np.abs(pi_l) <= np.abs(pi_r), pi_from_l, pi_from_r), 0.0)

    # h/h* = 1 + h X; written this way so that X = 0 reproduces h exactly
    safe_cl = np.where(wet_l, c_l, 1.0)
    safe_cr = np.where(wet_r, c_r, 1.0)
    ratio_l = np.where(wet_l, 1.0 + h_l * (c_r * du - dpi) / (safe_cl * safe_csum), 1.0)
    ratio_r = np.where(wet_r, 1.0 + h_r * (c_l * du + dpi) / (safe_cr * safe_csum), 1.0)
    if np.any(ratio_l[wet_l] <= 0) or np.any(ratio_r[wet_r] <= 0):
        raise DegenerateFanError("nonpositive intermediate depth in relaxation fan")

    state_lstar = _star_state(p_l, ratio_l, u_star, wet_l)
    state_rstar = _star_state(p_r, ratio_r, u_star, wet_r)

    sigma2 = u_star
    sigma1 = np.where(wet_l, u_l - r_l, sigma2)
    sigma3 = np.where(wet_r, u_r + r_r, sigma2)

    e_l = np.where(wet_l, internal_energy(p_l, params), 0.0)
    e_r = np.where(wet_r, internal_energy(p_r, params), 0.0)
    ehat_lstar = np.where(wet_l, e_l + (pi_star**2 - pi_l**2) / (2.0 * safe_cl**2), 0.0)
    ehat_rstar = np.where(wet_r, e_r + (pi_star**2 - pi_r**2) / (2.0 * safe_cr**2), 0.0)

    return RiemannFan(
        sigma1=sigma1,
        sigma2=sigma2,
        sigma3=sigma3,
        state_l=p_l,
        state_lstar=state_lstar,
        state_rstar=state_rstar,
        state_r=p_r,
        pi_l=pi_l,
        pi_lstar=pi_star,
        pi_rstar=pi_star.copy(),
        pi_r=pi_r,
        c=RelaxSpeeds(c_l, c_r),
        e_l=e_l,
        ehat_lstar=ehat_lstar,
        ehat_rstar=ehat_rstar,
        e_r=e_r,
    )


def _star_state(p, ratio, u_star, wet):
    """Intermediate state next to side ``p``: s is transported, so sigma scales with (h/h*)^(+-2)."""
    star = np.empty_like(p)
    r2 = ratio * ratio
    star[..., H] = np.where(wet, p[..., H] / ratio, 0.0)
    star[..., U] = np.where(wet, u_star, 0.0)
    star[..., SXX] = np.where(wet, p[..., SXX] * r2, 1.0)
    star[..., SZZ] = np.where(wet, p[..., SZZ] / r2, 1.0)
    return star


def _select(xi, fan: RiemannFan, values):
    """Pick one of four per-region values at self-similar coordinate xi.

    A point lying exactly on a wave takes the value on the left of that wave.
    """
    v_l, v_ls, v_rs, v_r = values
    xi = np.asarray(xi, dtype=float)
    s1, s2, s3 = fan.sigma1, fan.sigma2, fan.sigma3
    if np.ndim(v_l) > np.ndim(s1):
        xi, s1, s2, s3 = (np.expand_dims(a, -1) for a in np.broadcast_arrays(xi, s1, s2, s3))
    return np.where(xi <= s1, v_l, np.where(xi <= s2, v_ls, np.where(xi <= s3, v_rs, v_r)))


def sample(fan: RiemannFan, xi) -> np.ndarray:
    """Conservative state of the approximate solution at x/t = xi."""
    states = [to_conservative(s) for s, _, _ in fan.regions()]
    return _select(xi, fan, states)


def _at_origin(fan: RiemannFan):
    prims = [s for s, _, _ in fan.regions()]
    p0 = _select(0.0, fan, prims)
    pi0 = _select(0.0, fan, [pi for _, pi, _ in fan.regions()])
    e0 = _select(0.0, fan, [e for _, _, e in fan.regions()])
    return p0, pi0, e0


def _hsigma_flux(fan: RiemannFan, comp: int, left: bool):
    """Transported-variable flux: point flux plus signed wave jumps."""
    w = [s[..., H] * s[..., comp] for s, _, _ in fan.regions()]
    jumps = (w[1] - w[0], w[2] - w[1], w[3] - w[2])
    speeds = (fan.sigma1, fan.sigma2, fan.sigma3)
    if left:
        p = fan.state_l
        f = p[..., H] * p[..., comp] * p[..., U]
        for s, d in zip(speeds, jumps):
            f = f + np.minimum(0.0, s) * d
    else:
        p = fan.state_r
        f = p[..., H] * p[..., comp] * p[..., U]
        for s, d in zip(speeds, jumps):
            f = f - np.maximum(0.0, s) * d
    return f


def interface_fluxes(fan: RiemannFan, params: Params | None = None) -> FluxPair:
    """Left and right numerical fluxes plus the numerical energy flux.

    The (h, hu) components are shared and equal (h u, h u^2 + pi) at x/t = 0.
    """
    p0, pi0, e0 = _at_origin(fan)
    h0, u0 = p0[..., H], p0[..., U]
    shape = np.shape(fan.sigma1) + (4,)
    f_l = np.empty(shape)
    f_r = np.empty(shape)
    f_l[..., H] = f_r[..., H] = h0 * u0
    f_l[..., HU] = f_r[..., HU] = h0 * u0 * u0 + pi0
    f_l[..., HSXX] = _hsigma_flux(fan, SXX, left=True)
    f_l[..., HSZZ] = _hsigma_flux(fan, SZZ, left=True)
    f_r[..., HSXX] = _hsigma_flux(fan, SXX, left=False)
    f_r[..., HSZZ] = _hsigma_flux(fan, SZZ, left=False)
    G = (0.5 * h0 * u0 * u0 + h0 * e0 + pi0) * u0
    return FluxPair(f_l, f_r, G)


def energy_flux_numerical(fan: RiemannFan, params: Params | None = None):
    """Numerical energy flux (h u^2/2 + h e_hat + pi) u at x/t = 0."""
    p0, pi0, e0 = _at_origin(fan)
    h0, u0 = p0[..., H], p0[..., U]
    return (0.5 * h0 * u0 * u0 + h0 * e0 + pi0) * u0


def max_speed(fan: RiemannFan):
    return np.maximum(np.abs(fan.sigma1), np.maximum(np.abs(fan.sigma2), np.abs(fan.sigma3)))


def consistent_flux(q, params: Params, dry_threshold: float = DRY_THRESHOLD) -> np.ndarray:
    """Exact pseudo-conservative flux of a conservative state (for consistency checks)."""
    return physical_flux(to_primitive(q, dry_threshold), params)
