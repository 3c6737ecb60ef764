import numpy as np
import pytest

from viscoswe.model import Params
from viscoswe.riemann import interface_fluxes, solve_fan
from viscoswe.wellbalanced import hydrostatic_reconstruct, reconstruct_primitive, topo_fluxes


def test_reconstruct_flat_is_identity():
    ql = np.array([2.0, 1.0, 3.0, 1.0])
    qr = np.array([1.0, -0.5, 0.7, 1.4])
    a, b = hydrostatic_reconstruct(ql, qr, 0.0)
    np.testing.assert_allclose(a, ql, rtol=1e-15)
    np.testing.assert_allclose(b, qr, rtol=1e-15)


def test_reconstruct_step_up():
    a, b = hydrostatic_reconstruct([2.0, 0, 2.0, 2.0], [1.0, 0, 1.0, 1.0], 0.5)
    assert a[0] == 1.5 and b[0] == 1.0
    # sigma, not h*sigma, is kept
    np.testing.assert_array_equal(a, [1.5, 0.0, 1.5, 1.5])


def test_reconstruct_goes_dry():
    a, _ = hydrostatic_reconstruct([0.3, 0.6, 0.9, 0.3], [1.0, 0, 1.0, 1.0], 0.5)
    np.testing.assert_array_equal(a, 0.0)
    p, _ = reconstruct_primitive([0.3, 2.0, 3.0, 1.0], [1.0, 0, 1, 1], 0.5)
    np.testing.assert_array_equal(p, [0.0, 0.0, 1.0, 1.0])


def test_flat_bottom_matches_riemann():
    prm = Params(g=9.81, eta_p=1.0)
    ql = np.array([2.0, 1.0, 3.0, 1.0])
    qr = np.array([1.0, -0.5, 0.7, 1.4])
    tf = topo_fluxes(ql, qr, 0.3, 0.3, prm)
    ref = interface_fluxes(solve_fan(ql, qr, prm), prm)
    np.testing.assert_allclose(tf.f_l, ref.f_l, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(tf.f_r, ref.f_r, rtol=1e-14, atol=1e-14)
    assert tf.energy_flux == pytest.approx(ref.energy_flux + ref.f_l[0] * 9.81 * 0.3, rel=1e-14)


@pytest.mark.parametrize("hl, hr, bl, br, g", [
    (2.0, 1.5, 0.0, 0.5, 1.0),
    (1.0, 2.0, 1.0, 0.0, 9.81),
    (1.0, 0.0, 0.0, 1.5, 9.81),  # shoreline: right cell dry and above the surface
])
def test_lake_at_rest_fluxes_exact(hl, hr, bl, br, g):
    prm = Params(g=g, eta_p=0.3)
    tf = topo_fluxes([hl, 0, hl, hl], [hr, 0, hr, hr], bl, br, prm)
    np.testing.assert_array_equal(tf.f_l, [0.0, 0.5 * g * hl * hl, 0.0, 0.0])
    np.testing.assert_array_equal(tf.f_r, [0.0, 0.5 * g * hr * hr, 0.0, 0.0])
    assert tf.energy_flux == 0.0


def test_lake_at_rest_fluxes_inexact_inputs():
    # 0.37 - 0.25 != 0.12 in binary, so the balance only holds to round-off
    hl, hr, bl, br, g = 0.37, 0.12, 0.1, 0.35, 9.81
    tf = topo_fluxes([hl, 0, hl, hl], [hr, 0, hr, hr], bl, br, Params(g=g, eta_p=0.3))
    scale = 0.5 * g * hl * hl
    np.testing.assert_allclose(tf.f_l, [0.0, 0.5 * g * hl * hl, 0.0, 0.0], rtol=0, atol=1e-15 * scale)
    np.testing.assert_allclose(tf.f_r, [0.0, 0.5 * g * hr * hr, 0.0, 0.0], rtol=0, atol=1e-15 * scale)


def test_small_step_is_continuous():
    prm = Params(g=9.81, eta_p=1.0)
    ql = np.array([2.0, 1.0, 3.0, 1.0])
    qr = np.array([1.0, -0.5, 0.7, 1.4])
    ref = topo_fluxes(ql, qr, 0.0, 0.0, prm)
    near = topo_fluxes(ql, qr, 0.0, 1e-9, prm)
    np.testing.assert_allclose(near.f_l, ref.f_l, atol=1e-7)
    np.testing.assert_allclose(near.f_r, ref.f_r, atol=1e-7)


def test_reconstruction_stays_in_domain():
    rng = np.random.default_rng(5)
    ql = np.column_stack([rng.uniform(0, 2, 500), rng.normal(size=500),
                          rng.uniform(0, 2, 500), rng.uniform(0, 2, 500)])
    qr = ql[::-1].copy()
    db = rng.normal(size=500)
    a, b = hydrostatic_reconstruct(ql, qr, db)
    assert np.all(a[:, [0, 2, 3]] >= 0) and np.all(b[:, [0, 2, 3]] >= 0)
    assert np.all(a[:, 0] <= ql[:, 0]) and np.all(b[:, 0] <= qr[:, 0])
