import math

import numpy as np
import pytest

from viscoswe.model import (
    Params,
    dP_dh,
    eigenvalues,
    elastic_energy,
    energy_flux,
    extra_stress,
    internal_energy,
    physical_flux,
    pressure,
    s_vars,
    sound_speed,
    to_conservative,
    to_primitive,
    total_energy,
)

P = np.array


def test_params_validation():
    assert Params().g == 9.81
    assert Params(eta_p=2.0, lam=1.0).k == 1.0
    for bad in ({"g": 0.0}, {"lam": 0.0}, {"eta_p": -1.0}, {"g": float("nan")}):
        with pytest.raises(ValueError):
            Params(**bad)


@pytest.mark.parametrize("q, p", [
    ((1, 0, 1, 1), (1, 0, 1, 1)),
    ((2, 4, 6, 2), (2, 2, 3, 1)),
    ((1e-14, 0, 0, 0), (0, 0, 1, 1)),
])
def test_to_primitive(q, p):
    np.testing.assert_array_equal(to_primitive(P(q, float)), P(p, float))


def test_to_primitive_rejects_negative():
    with pytest.raises(ValueError):
        to_primitive(P([1.0, 0.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        to_primitive(P([-1.0, 0.0, 1.0, 1.0]))


@pytest.mark.parametrize("p, q", [
    ((1, 0, 1, 1), (1, 0, 1, 1)),
    ((2, 2, 3, 1), (2, 4, 6, 2)),
    ((0, 0, 1, 1), (0, 0, 0, 0)),
])
def test_to_conservative(p, q):
    np.testing.assert_array_equal(to_conservative(P(p, float)), P(q, float))


def test_pressure_examples():
    assert pressure(P([2.0, 0.0, 5.0, 5.0]), Params()) == pytest.approx(19.62, rel=1e-15)
    assert pressure(P([1.0, 0.0, 3.0, 1.0]), Params(g=1, eta_p=1, lam=1)) == -0.5
    assert pressure(P([0.0, 0.0, 1.0, 1.0]), Params(eta_p=3)) == 0.0


def test_pressure_equal_sigma_is_hydrostatic_exactly():
    p = P([1.7, 0.3, 2.5, 2.5])
    prm = Params(g=9.81, eta_p=5.0)
    assert pressure(p, prm) == 0.5 * 9.81 * 1.7 * 1.7


def test_pressure_swap_symmetry():
    prm = Params(g=2.0, eta_p=3.0, lam=0.7)
    p = P([1.3, 0.0, 0.4, 2.2])
    swapped = P([1.3, 0.0, 2.2, 0.4])
    hydro = 0.5 * prm.g * 1.3**2
    assert pressure(p, prm) - hydro == pytest.approx(-(pressure(swapped, prm) - hydro), rel=1e-14)


def test_dP_dh_examples():
    assert dP_dh(P([1.0, 0, 1, 1]), Params(g=1)) == 1.0
    assert dP_dh(P([1.0, 0, 1, 1]), Params(g=1, eta_p=2, lam=1)) == 5.0
    assert dP_dh(P([0.0, 0, 1, 1]), Params(g=1, eta_p=2, lam=1)) == 4.0


def test_sound_speed_examples():
    assert sound_speed(P([1.0, 0, 1, 1]), Params(g=1)) == 1.0
    assert sound_speed(P([1.0, 0, 1, 1]), Params(g=1, eta_p=2, lam=1)) == pytest.approx(math.sqrt(5))
    assert sound_speed(P([0.0, 0, 1, 1]), Params(g=1)) == 0.0


def test_eigenvalues_examples():
    assert eigenvalues(P([1.0, 0, 1, 1]), Params(g=1)) == (-1.0, 0.0, 1.0)
    l1, l2, l3 = eigenvalues(P([1.0, 2.0, 1, 1]), Params(g=1, eta_p=2, lam=1))
    assert (l1, l2, l3) == pytest.approx((2 - math.sqrt(5), 2, 2 + math.sqrt(5)))
    assert eigenvalues(P([0.0, 0, 1, 1]), Params(g=1)) == (0.0, 0.0, 0.0)


def test_internal_energy_examples():
    prm = Params(g=9.81, eta_p=3.0)
    assert internal_energy(P([2.0, 0, 1, 1]), prm) == 0.5 * 9.81 * 2.0
    assert internal_energy(P([0.0, 0, 1, 1]), prm) == 0.0
    # the elastic part alone (the g-free example of the energy)
    assert elastic_energy(P([1.0, 0, math.e, 1]), Params(g=1, eta_p=4, lam=1)) == pytest.approx(math.e - 2)
    with pytest.raises(ValueError):
        internal_energy(P([1.0, 0, 0.0, 1]), prm)


def test_internal_energy_minimum_at_identity():
    prm = Params(g=1.0, eta_p=2.0)
    rng = np.random.default_rng(3)
    p = np.column_stack([rng.uniform(0.1, 3, 200), np.zeros(200),
                         10 ** rng.uniform(-2, 2, 200), 10 ** rng.uniform(-2, 2, 200)])
    assert np.all(internal_energy(p, prm) > 0.5 * p[:, 0])


def test_total_energy_examples():
    E, Et = total_energy(P([2.0, 0, 1, 1]), 0.0, Params())
    assert E == Et == pytest.approx(0.5 * 9.81 * 4.0)
    # kinetic only: with g = 1 the potential part g h^2/2 = 0.5 is subtracted
    E, _ = total_energy(P([1.0, 2.0, 1, 1]), 0.0, Params(g=1))
    assert E - 0.5 == 2.0
    _, Et = total_energy(P([1.0, 0.0, 1, 1]), 3.0, Params(g=1))
    assert Et == 3.5


def test_energy_flux_examples():
    assert energy_flux(P([1.0, 0.0, 1, 1]), Params()) == 0.0
    assert energy_flux(P([1.0, 1.0, 1, 1]), Params(g=1)) == 1.5
    assert energy_flux(P([0.0, 0.0, 1, 1]), Params()) == 0.0


def test_physical_flux():
    f = physical_flux(P([2.0, 3.0, 1.5, 0.5]), Params(g=1, eta_p=2, lam=1))
    # P = 2 + 2 (0.5 - 1.5) = 0
    np.testing.assert_allclose(f, [6.0, 18.0, 9.0, 3.0])


def test_s_vars_examples():
    assert s_vars(P([1.0, 0, 1, 1])) == (1.0, 1.0)
    assert s_vars(P([2.0, 0, 4, 4])) == (0.25, 1.0)
    assert s_vars(P([0.5, 0, 1, 1])) == (2.0, 2.0)
    with pytest.raises(ValueError):
        s_vars(P([0.0, 0, 1, 1]))


def test_extra_stress_examples():
    assert extra_stress(P([1.0, 0, 1, 1]), Params(eta_p=2)) == (0.0, 0.0)
    assert extra_stress(P([1.0, 0, 3, 1]), Params(eta_p=2, lam=1))[0] == 2.0
    assert extra_stress(P([1.0, 0, 3, 5]), Params(eta_p=0)) == (0.0, 0.0)


def test_vectorised_shapes():
    q = np.tile([2.0, 4.0, 6.0, 2.0], (5, 3, 1))
    assert to_primitive(q).shape == (5, 3, 4)
    assert pressure(to_primitive(q), Params()).shape == (5, 3)
