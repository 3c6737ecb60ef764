"""Fused per-interface flux kernel used by the time stepper.

Mirrors ``wellbalanced.topo_fluxes_primitive`` operation for operation (same
evaluation order, so well-balancing and contact preservation stay bit-exact);
the numpy implementation remains the reference and the two are compared in
the test suite.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _interface_kernel(p, b, g, k, thr, f_l, f_r, G, A):
    n = p.shape[0] - 1
    g2 = 0.5 * g
    for j in range(n):
        hl0 = p[j, 0]
        hr0 = p[j + 1, 0]
        bl = b[j]
        br = b[j + 1]
        db = br - bl

        # hydrostatic reconstruction
        hl = max(0.0, hl0 - max(0.0, db))
        hr = max(0.0, hr0 - max(0.0, -db))
        if hl <= thr:
            hl, ul, sxl, szl = 0.0, 0.0, 1.0, 1.0
        else:
            ul, sxl, szl = p[j, 1], p[j, 2], p[j, 3]
        if hr <= thr:
            hr, ur, sxr, szr = 0.0, 0.0, 1.0, 1.0
        else:
            ur, sxr, szr = p[j + 1, 1], p[j + 1, 2], p[j + 1, 3]
        wl = hl > 0.0
        wr = hr > 0.0

        if not (wl or wr):
            for m in range(4):
                f_l[j, m] = 0.0
                f_r[j, m] = 0.0
            f_l[j, 1] = (0.0 - 0.0) + g2 * hl0 * hl0
            f_r[j, 1] = (0.0 - 0.0) + g2 * hr0 * hr0
            G[j] = 0.0
            A[j] = 0.0
            continue

        a_l = math.sqrt(g * hl + k * (3.0 * szl + sxl))
        a_r = math.sqrt(g * hr + k * (3.0 * szr + sxr))
        pil = g2 * hl * hl + k * hl * (szl - sxl)
        pir = g2 * hr * hr + k * hr * (szr - sxr)
        du_c = max(0.0, ul - ur) if (wl and wr) else 0.0
        ha = hl * a_l + hr * a_r
        if not ha > 0.0:
            ha = 1.0
        r_l = a_l + 2.0 * (du_c + max(0.0, pir - pil) / ha)
        r_r = a_r + 2.0 * (du_c + max(0.0, pil - pir) / ha)
        c_l = hl * r_l
        c_r = hr * r_r
        csum = c_l + c_r

        du = ur - ul
        dpi = pir - pil
        ustar = ul + (c_r * du - dpi) / csum
        if not (wl and wr):
            pistar = 0.0
        elif abs(pil) <= abs(pir):
            pistar = pil + (c_l * dpi - c_l * c_r * du) / csum
        else:
            pistar = pir - (c_r * dpi + c_l * c_r * du) / csum

        e_l = 0.0
        e_r = 0.0
        # intermediate states (h, sxx, szz) and auxiliary energies
        if wl:
            rat = 1.0 + hl * (c_r * du - dpi) / (c_l * csum)
            if rat <= 0.0:
                raise ArithmeticError("nonpositive intermediate depth in relaxation fan")
            h_ls = hl / rat
            sx_ls = sxl * (rat * rat)
            sz_ls = szl / (rat * rat)
            u_ls = ustar
            e_l = 0.5 * g * hl + 0.5 * k * (sxl + szl - math.log(sxl * szl) - 2.0)
            eh_ls = e_l + (pistar * pistar - pil * pil) / (2.0 * (c_l * c_l))
            s1 = ul - r_l
        else:
            h_ls, u_ls, sx_ls, sz_ls, eh_ls = 0.0, 0.0, 1.0, 1.0, 0.0
            s1 = ustar
        if wr:
            rat = 1.0 + hr * (c_l * du + dpi) / (c_r * csum)
            if rat <= 0.0:
                raise ArithmeticError("nonpositive intermediate depth in relaxation fan")
            h_rs = hr / rat
            sx_rs = sxr * (rat * rat)
            sz_rs = szr / (rat * rat)
            u_rs = ustar
            e_r = 0.5 * g * hr + 0.5 * k * (sxr + szr - math.log(sxr * szr) - 2.0)
            eh_rs = e_r + (pistar * pistar - pir * pir) / (2.0 * (c_r * c_r))
            s3 = ur + r_r
        else:
            h_rs, u_rs, sx_rs, sz_rs, eh_rs = 0.0, 0.0, 1.0, 1.0, 0.0
            s3 = ustar
        s2 = ustar

        # state at x/t = 0, ties go to the left state of the wave
        if 0.0 <= s1:
            h0, u0, pi0, e0 = hl, ul, pil, e_l
        elif 0.0 <= s2:
            h0, u0, pi0, e0 = h_ls, u_ls, pistar, eh_ls
        elif 0.0 <= s3:
            h0, u0, pi0, e0 = h_rs, u_rs, pistar, eh_rs
        else:
            h0, u0, pi0, e0 = hr, ur, pir, e_r

        fh = h0 * u0
        fhu = h0 * u0 * u0 + pi0
        m1 = min(0.0, s1)
        m2 = min(0.0, s2)
        m3 = min(0.0, s3)
        p1 = max(0.0, s1)
        p2 = max(0.0, s2)
        p3 = max(0.0, s3)

        wx0 = hl * sxl
        wx1 = h_ls * sx_ls
        wx2 = h_rs * sx_rs
        wx3 = hr * sxr
        wz0 = hl * szl
        wz1 = h_ls * sz_ls
        wz2 = h_rs * sz_rs
        wz3 = hr * szr

        fxl = hl * sxl * ul
        fxl = fxl + m1 * (wx1 - wx0)
        fxl = fxl + m2 * (wx2 - wx1)
        fxl = fxl + m3 * (wx3 - wx2)
        fzl = hl * szl * ul
        fzl = fzl + m1 * (wz1 - wz0)
        fzl = fzl + m2 * (wz2 - wz1)
        fzl = fzl + m3 * (wz3 - wz2)
        fxr = hr * sxr * ur
        fxr = fxr - p1 * (wx1 - wx0)
        fxr = fxr - p2 * (wx2 - wx1)
        fxr = fxr - p3 * (wx3 - wx2)
        fzr = hr * szr * ur
        fzr = fzr - p1 * (wz1 - wz0)
        fzr = fzr - p2 * (wz2 - wz1)
        fzr = fzr - p3 * (wz3 - wz2)

        f_l[j, 0] = fh
        f_r[j, 0] = fh
        f_l[j, 1] = (fhu - g2 * hl * hl) + g2 * hl0 * hl0
        f_r[j, 1] = (fhu - g2 * hr * hr) + g2 * hr0 * hr0
        f_l[j, 2] = fxl
        f_l[j, 3] = fzl
        f_r[j, 2] = fxr
        f_r[j, 3] = fzr
        G[j] = (0.5 * h0 * u0 * u0 + h0 * e0 + pi0) * u0 + fh * g * max(bl, br)
        A[j] = max(abs(s1), max(abs(s2), abs(s3)))


if njit is not None:
    _compiled = njit(cache=True)(_interface_kernel)
else:  # pragma: no cover
    _compiled = None


def fused_interface_fluxes(p_ext: np.ndarray, b_ext: np.ndarray, g: float, k: float,
                           dry_threshold: float):
    """Fluxes at all interfaces between consecutive rows of ``p_ext`` (primitive, ghosts included).

    Returns ``(f_l, f_r, energy_flux, max_speed)``.
    """
    if _compiled is None:  # pragma: no cover
        raise RuntimeError("numba is not available")
    n = p_ext.shape[0] - 1
    f_l = np.empty((n, 4))
    f_r = np.empty((n, 4))
    G = np.empty(n)
    A = np.empty(n)
    _compiled(np.ascontiguousarray(p_ext, dtype=np.float64),
              np.ascontiguousarray(b_ext, dtype=np.float64),
              float(g), float(k), float(dry_threshold), f_l, f_r, G, A)
    return f_l, f_r, G, A
