"""State variables, pressure law and energy of the reduced viscoelastic
shallow-water system.

The evolved vector is the pseudo-conservative state

    q = (h, h u, h sigma_xx, h sigma_zz)

with h the layer depth, u the depth-averaged velocity and sigma the diagonal
of the conformation tensor (sigma = I at equilibrium).  The total pressure is

    P = g h^2 / 2 + (eta_p / 2 lambda) h (sigma_zz - sigma_xx)

All functions are vectorised: a state is any array whose last axis has
length 4, so a single cell is shape ``(4,)`` and a mesh is ``(N, 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DRY_THRESHOLD = 1e-10

H, HU, HSXX, HSZZ = 0, 1, 2, 3
U, SXX, SZZ = 1, 2, 3


@dataclass(frozen=True)
class Params:
    """Physical parameters.

    ``eta_p = 0`` recovers the plain Saint-Venant pressure law.
    """

    g: float = 9.81
    eta_p: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.eta_p >= 0:
            raise ValueError(f"eta_p must be non-negative, got {self.eta_p}")

    @property
    def k(self) -> float:
        """Elastic modulus eta_p / (2 lambda) multiplying h (sigma_zz - sigma_xx)."""
        return self.eta_p / (2.0 * self.lam)


class ConsState(NamedTuple):
    h: float
    hu: float
    hsxx: float
    hszz: float


class PrimState(NamedTuple):
    h: float
    u: float
    sxx: float
    szz: float


class SVars(NamedTuple):
    s_xx: np.ndarray
    s_zz: np.ndarray


def to_primitive(q, dry_threshold: float = DRY_THRESHOLD) -> np.ndarray:
    """Convert ``(h, hu, hsxx, hszz)`` to ``(h, u, sxx, szz)``.

    Cells with ``h <= dry_threshold`` read back as the dry state (0, 0, 1, 1).
    """
    q = np.asarray(q, dtype=float)
    if np.any(q[..., [H, HSXX, HSZZ]] < 0):
        raise ValueError("state outside the invariant domain (negative h or h*sigma)")
    h = q[..., H]
    wet = h > dry_threshold
    safe_h = np.where(wet, h, 1.0)
    p = np.empty_like(q)
    p[..., H] = np.where(wet, h, 0.0)
    p[..., U] = np.where(wet, q[..., HU] / safe_h, 0.0)
    p[..., SXX] = np.where(wet, q[..., HSXX] / safe_h, 1.0)
    p[..., SZZ] = np.where(wet, q[..., HSZZ] / safe_h, 1.0)
    return p


def to_conservative(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    h = p[..., H]
    q = np.empty_like(p)
    q[..., H] = h
    q[..., HU] = h * p[..., U]
    q[..., HSXX] = h * p[..., SXX]
    q[..., HSZZ] = h * p[..., SZZ]
    return q


def pressure(p, params: Params):
    """Total pressure; negative values are allowed when sigma_xx > sigma_zz."""
    p = np.asarray(p, dtype=float)
    h = p[..., H]
    return 0.5 * params.g * h * h + params.k * h * (p[..., SZZ] - p[..., SXX])


def dP_dh(p, params: Params):
    """Derivative of the pressure in h at fixed transported variables s."""
    p = np.asarray(p, dtype=float)
    return params.g * p[..., H] + params.k * (3.0 * p[..., SZZ] + p[..., SXX])


def sound_speed(p, params: Params):
    return np.sqrt(dP_dh(p, params))


def eigenvalues(p, params: Params):
    p = np.asarray(p, dtype=float)
    a = sound_speed(p, params)
    u = p[..., U]
    return u - a, u, u + a


def elastic_energy(p, params: Params):
    """Elastic part of the internal energy, (eta_p/4 lambda) tr(sigma - ln sigma - I)."""
    p = np.asarray(p, dtype=float)
    sxx, szz = p[..., SXX], p[..., SZZ]
    if np.any(sxx <= 0) or np.any(szz <= 0):
        raise ValueError("conformation components must be positive")
    return 0.5 * params.k * (sxx + szz - np.log(sxx * szz) - 2.0)


def internal_energy(p, params: Params):
    p = np.asarray(p, dtype=float)
    return 0.5 * params.g * p[..., H] + elastic_energy(p, params)


def total_energy(p, b, params: Params):
    """Return ``(E, E_tilde)``: energy without and with the potential term g h b."""
    p = np.asarray(p, dtype=float)
    h, u = p[..., H], p[..., U]
    E = 0.5 * h * u * u + h * internal_energy(p, params)
    return E, E + params.g * h * np.asarray(b, dtype=float)


def energy_flux(p, params: Params):
    """Exact energy flux (E + P) u."""
    p = np.asarray(p, dtype=float)
    E, _ = total_energy(p, 0.0, params)
    return (E + pressure(p, params)) * p[..., U]


def physical_flux(p, params: Params) -> np.ndarray:
    """Pseudo-conservative flux (h u, h u^2 + P, h sigma_xx u, h sigma_zz u)."""
    p = np.asarray(p, dtype=float)
    h, u = p[..., H], p[..., U]
    f = np.empty_like(p)
    f[..., H] = h * u
    f[..., HU] = h * u * u + pressure(p, params)
    f[..., HSXX] = h * p[..., SXX] * u
    f[..., HSZZ] = h * p[..., SZZ] * u
    return f


def s_vars(p) -> SVars:
    """Transported variables s_xx = sigma_xx^(-1/2)/h and s_zz = sigma_zz^(1/2)/h."""
    p = np.asarray(p, dtype=float)
    h = p[..., H]
    if np.any(h <= 0):
        raise ValueError("transported variables are undefined for a dry state")
    return SVars(1.0 / (np.sqrt(p[..., SXX]) * h), np.sqrt(p[..., SZZ]) / h)


def extra_stress(p, params: Params):
    """Diagonal extra-stress (tau_xx, tau_zz) = (eta_p / 2 lambda)(sigma - 1)."""
    p = np.asarray(p, dtype=float)
    return params.k * (p[..., SXX] - 1.0), params.k * (p[..., SZZ] - 1.0)
