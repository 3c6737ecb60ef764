import math

import numpy as np
import pytest

from viscoswe.model import to_primitive
from viscoswe.scenarios import heaviside, synolakis_profile
from viscoswe.scenarios import test_case as scenario


def test_heaviside():
    assert heaviside(-1.0) == 0.0 and heaviside(1.0) == 1.0 and heaviside(0.0) == 1.0


def test_case1_values():
    sc = scenario(1)
    q = sc.init_fn(np.array([-1.0, 1.0]), sc.default_params)
    np.testing.assert_array_equal(q, [[3, 0, 3, 3], [1, 0, 1, 1]])
    assert sc.t_final == 0.2 and sc.default_params.eta_p == 1.0 and sc.default_params.lam == 1.0


def test_case2_dry_right():
    sc = scenario(2)
    np.testing.assert_array_equal(sc.init_fn(np.array([1.0]), sc.default_params), [[0, 0, 0, 0]])
    assert sc.t_final == 0.5


def test_case3_values():
    sc = scenario(3)
    assert sc.topo_fn(np.array([10.0]))[0] == 1.0
    np.testing.assert_array_equal(sc.init_fn(np.array([10.0]), sc.default_params),
                                  [[9, -350, 9, 9]])
    assert sc.default_params.eta_p / sc.default_params.lam == 1e-4


def test_case4_beach_and_wave():
    sc = scenario(4)
    x = np.array([40.0, 59.85])
    np.testing.assert_allclose(sc.topo_fn(x), [0.0, 1.0])
    assert sc.t_final == 32.5 and sc.domain == (0.0, 100.0)


def test_invalid_case():
    for n in (0, 5, "x", None):
        with pytest.raises(ValueError):
            scenario(n)


def test_synolakis_profile():
    alpha = 0.19
    center = math.acosh(math.sqrt(20.0)) / (0.75 * alpha)
    assert center == pytest.approx(15.28, abs=0.01)
    assert synolakis_profile(center) == pytest.approx(alpha, rel=1e-15)
    x = np.linspace(-200, 300, 2000001)
    assert np.max(synolakis_profile(x)) == pytest.approx(alpha, rel=1e-8)
    assert synolakis_profile(1e4) < 1e-30
    with pytest.raises(ValueError):
        synolakis_profile(0.0, alpha=0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_initial_data_in_domain(n):
    sc = scenario(n)
    grid = sc.grid()
    q = sc.initial_state(grid).cells
    assert np.all(q[:, [0, 2, 3]] >= 0)
    p = to_primitive(q)
    assert np.all(p[:, 2] > 0) and np.all(p[:, 3] > 0)


@pytest.mark.parametrize("n", [1, 2])
def test_riemann_data_two_values(n):
    sc = scenario(n)
    q = sc.initial_state(sc.grid(400)).cells
    assert len(np.unique(q, axis=0)) == 2


def test_case3_free_surface_flat():
    sc = scenario(3)
    grid = sc.grid(400)
    h = sc.initial_state(grid).cells[:, 0]
    np.testing.assert_array_equal((h + grid.topo)[h > 0], 10.0)


def test_with_params():
    sc = scenario(1).with_params(eta_p=5.0)
    assert sc.default_params.eta_p == 5.0 and scenario(1).default_params.eta_p == 1.0
