"""Brute-force checks used by the test suite.

Nothing here reuses the closed-form flux expressions of :mod:`riemann`:
fluxes are recovered by integrating the piecewise-constant fan, jump
conditions are evaluated wave by wave, and convexity of the energy is
probed with a finite-difference Hessian in extended precision.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import H, HU, SXX, SZZ, U, Params, to_conservative
from .riemann import RiemannFan, interface_fluxes


def _relax_flux(p, pi):
    """Flux of the relaxation system in conservative form for a primitive state and relaxed pressure."""
    h, u = p[..., H], p[..., U]
    return np.stack([h * u, h * u * u + pi, h * p[..., SXX] * u, h * p[..., SZZ] * u], axis=-1)


def _integrate(fan: RiemannFan):
    regions = fan.regions()
    q = [to_conservative(s) for s, _, _ in regions]
    inf = np.full(np.shape(fan.sigma1), np.inf)
    edges = [-inf, fan.sigma1, fan.sigma2, fan.sigma3, inf]

    F_l = _relax_flux(regions[0][0], regions[0][1])
    F_r = _relax_flux(regions[3][0], regions[3][1])
    size_l, size_r = np.abs(F_l), np.abs(F_r)
    for k in range(4):
        a, b = edges[k], edges[k + 1]
        neg = np.minimum(b, 0.0) - np.minimum(a, 0.0)
        pos = np.maximum(b, 0.0) - np.maximum(a, 0.0)
        # an empty (collapsed) region contributes nothing, even next to an infinite edge
        neg = np.where(b > a, neg, 0.0)[..., None]
        pos = np.where(b > a, pos, 0.0)[..., None]
        if k > 0:
            F_l = F_l - neg * (q[k] - q[0])
            size_l = size_l + np.abs(neg * (q[k] - q[0]))
        if k < 3:
            F_r = F_r + pos * (q[k] - q[3])
            size_r = size_r + np.abs(pos * (q[k] - q[3]))
    return F_l, F_r, size_l, size_r


def integrate_fan_fluxes(fan: RiemannFan, params: Params | None = None):
    """``(F_l, F_r)`` from exact integration of the fan over each half line.

    F_l = F(q_l) - int_{-inf}^0 (R - q_l),   F_r = F(q_r) + int_0^{inf} (R - q_r)
    """
    F_l, F_r, _, _ = _integrate(fan)
    return F_l, F_r


class FanAudit(NamedTuple):
    """Scaled residuals of one fan (or a batch).

    flux_gap:       (...,)       max |closed-form flux - integrated flux| / scale
    rh_residuals:   (..., 3, 2)  jump conditions for (h, hu) across waves 1, 2, 3
    invariant_gaps: (..., 10)    [u, pi] across wave 2, then [c, pi + c^2/h, s_xx, s_zz]
                                 across wave 1 and the same four across wave 3
    """

    flux_gap: np.ndarray
    rh_residuals: np.ndarray
    invariant_gaps: np.ndarray

    def worst(self) -> float:
        return float(max(np.max(self.flux_gap, initial=0.0), np.max(self.rh_residuals, initial=0.0),
                         np.max(self.invariant_gaps, initial=0.0)))


def _scaled(diff, *terms):
    scale = np.maximum.reduce(np.abs(np.broadcast_arrays(diff, *terms)[1:]))
    scale = np.where(scale > 0, scale, 1.0)
    return np.abs(diff) / scale


def audit_fan(fan: RiemannFan, params: Params | None = None) -> FanAudit:
    """Check the fan wave by wave; every entry is a residual divided by the size of its terms."""
    regions = fan.regions()
    prims = [s for s, _, _ in regions]
    pis = [pi for _, pi, _ in regions]
    speeds = (fan.sigma1, fan.sigma2, fan.sigma3)

    f_form = interface_fluxes(fan, params)
    # relative to the sum of magnitudes entering the integral, not to the (possibly cancelled) result
    F_l, F_r, size_l, size_r = _integrate(fan)
    gap_l = _scaled(f_form.f_l - F_l, size_l)
    gap_r = _scaled(f_form.f_r - F_r, size_r)
    flux_gap = np.maximum(np.max(gap_l, axis=-1), np.max(gap_r, axis=-1))

    rh = []
    for k, s in enumerate(speeds):
        a, b = prims[k], prims[k + 1]
        qa, qb = to_conservative(a), to_conservative(b)
        fa, fb = _relax_flux(a, pis[k]), _relax_flux(b, pis[k + 1])
        comps = []
        for m in (H, HU):
            lhs = s * (qb[..., m] - qa[..., m])
            rhs = fb[..., m] - fa[..., m]
            comps.append(_scaled(lhs - rhs, s * qb[..., m], s * qa[..., m], fb[..., m], fa[..., m]))
        rh.append(np.stack(comps, axis=-1))
    rh = np.stack(rh, axis=-2)

    ls, rs = prims[1], prims[2]
    # a dry star state carries the (0, 0, 1, 1) convention, not the contact values
    both = (ls[..., H] > 0) & (rs[..., H] > 0)
    gaps = [
        np.where(both, _scaled(ls[..., U] - rs[..., U], ls[..., U], rs[..., U], 1.0), 0.0),
        np.where(both, _scaled(pis[1] - pis[2], pis[1], pis[2]), 0.0),
    ]
    for side, star, c, sigma, sign in ((prims[0], prims[1], fan.c.c_l, fan.sigma1, 1.0),
                                       (prims[3], prims[2], fan.c.c_r, fan.sigma3, -1.0)):
        wet = side[..., H] > 0
        h0 = np.where(wet, side[..., H], 1.0)
        h1 = np.where(wet, star[..., H], 1.0)
        pi0 = pis[0] if sign > 0 else pis[3]
        pi1 = pis[1] if sign > 0 else pis[2]
        # Lagrangian wave speed: c = h (u - Sigma) on both sides of wave 1, h (Sigma - u) for wave 3
        c0 = sign * h0 * (side[..., U] - sigma)
        c1 = sign * h1 * (star[..., U] - sigma)
        g_c = np.maximum(_scaled(c0 - c, c0, c), _scaled(c1 - c, c1, c))
        inv0 = pi0 + c * c / h0
        inv1 = pi1 + c * c / h1
        g_pi = _scaled(inv0 - inv1, pi0, pi1, c * c / h0, c * c / h1)
        sx0, sx1 = 1.0 / (np.sqrt(side[..., SXX]) * h0), 1.0 / (np.sqrt(star[..., SXX]) * h1)
        sz0, sz1 = np.sqrt(side[..., SZZ]) / h0, np.sqrt(star[..., SZZ]) / h1
        g_sx = _scaled(sx0 - sx1, sx0, sx1)
        g_sz = _scaled(sz0 - sz1, sz0, sz1)
        gaps += [np.where(wet, g, 0.0) for g in (g_c, g_pi, g_sx, g_sz)]
    return FanAudit(flux_gap, rh, np.stack(gaps, axis=-1))


# -- convexity of the energy in the update variables ------------------------------------------


def _energy_q(q, g, k):
    """E as a function of q = (h, hu, h sxx, h szz), evaluated in the dtype of ``q``."""
    h, m, wx, wz = q
    return m * m / (2 * h) + g * h * h / 2 + k / 2 * (wx + wz - h * np.log(wx * wz / (h * h)) - 2 * h)


def _fd_hessian(q, g, k, steps):
    Hm = np.empty((4, 4), dtype=np.longdouble)
    e = np.eye(4, dtype=np.longdouble)
    for i in range(4):
        for j in range(i, 4):
            di, dj = steps[i] * e[i], steps[j] * e[j]
            v = (_energy_q(q + di + dj, g, k) - _energy_q(q + di - dj, g, k)
                 - _energy_q(q - di + dj, g, k) + _energy_q(q - di - dj, g, k))
            Hm[i, j] = Hm[j, i] = v / (4 * steps[i] * steps[j])
    return Hm


class HessianCheck(NamedTuple):
    min_eig: float
    norm: float
    reliable: bool


def hessian_check(q, params: Params, step: float = 1e-5) -> HessianCheck:
    """Finite-difference Hessian of E(q) with a 2x-step cross-check.

    Steps are ``step * max(|q_j|, h)`` per component.  The sample is flagged
    unreliable when the two Hessians differ by more than 10% in norm.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4,) or not np.all(np.isfinite(q)):
        raise ValueError("expected one finite state of length 4")
    if q[H] <= 0 or q[2] <= 0 or q[3] <= 0:
        raise ValueError("Hessian requires a wet state with positive h*sigma")
    ql = q.astype(np.longdouble)
    steps = step * np.maximum(np.abs(ql), ql[H])
    if 2 * steps[H] >= ql[H] or 2 * steps[2] >= ql[2] or 2 * steps[3] >= ql[3]:
        raise ValueError("step too large for this state")
    g = np.longdouble(params.g)
    k = np.longdouble(params.k)
    h1 = _fd_hessian(ql, g, k, steps)
    h2 = _fd_hessian(ql, g, k, 2 * steps)
    a1 = np.asarray(h1, dtype=float)
    norm = float(np.linalg.norm(a1, 2))
    gap = float(np.linalg.norm(np.asarray(h1 - h2, dtype=float), 2))
    return HessianCheck(float(np.min(np.linalg.eigvalsh(a1))), norm, gap <= 0.1 * norm)


def hessian_min_eig(q, params: Params, step: float = 1e-5) -> float:
    """Smallest eigenvalue of the finite-difference Hessian of E with respect to q."""
    return hessian_check(q, params, step).min_eig
