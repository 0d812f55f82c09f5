import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revprandtl import prandtl, profiles


@pytest.fixture(scope="module")
def zero_state(reversed_profile, bg):
    zero = lambda z: np.zeros_like(np.asarray(z, dtype=float))
    data = profiles.BoundaryData(zero, zero)
    return prandtl.iterate(data, reversed_profile, 1e-3, 0.2, bg=bg)


def test_zero_data_gives_zero(zero_state):
    assert np.max(np.abs(zero_state.u)) < 1e-14
    assert np.max(np.abs(zero_state.psi)) < 1e-14
    assert np.max(np.abs(zero_state.Lambda - zero_state.Lambda_G)) < 1e-14


def test_zero_state_norms(zero_state):
    rep = prandtl.norms(zero_state).to_dict()
    for k in ("M", "I", "X_I", "X_O", "Y_Max", "Z", "calZ", "E_Max"):
        assert rep[k] < 1e-12, k


def test_contraction(state):
    r = np.array(state.diagnostics["decrement_ratios"])
    assert np.all(r[2:] <= 0.5)
    assert state.diagnostics["converged"]


def test_newton_residual(state):
    assert state.diagnostics["newton_residual"] <= 1e-12


def test_reversal_structure(state):
    rep = prandtl.verify_reversal(state)
    assert rep["n_violations"] == 0
    assert rep["Lambda_increasing"]


def test_reversal_negative_control(state):
    bad = state.u.copy()
    bad[:, -5:] = -1e6
    assert prandtl.verify_reversal(state, u_override=bad)["n_violations"] > 0


def test_linear_response_in_eps(reversed_profile, bg, boundary_data, state):
    half = prandtl.iterate(boundary_data, reversed_profile, 5e-4, 0.2, bg=bg)
    # the perturbation is O(1) in eps, so Lambda - Lambda_G scales linearly
    a, b = prandtl.lambda_deviation(state), prandtl.lambda_deviation(half)
    assert abs(a - b) <= 0.2 * b
    assert np.max(np.abs(state.u - half.u)) < 0.05 * np.max(np.abs(half.u))


def test_free_boundary_newton(bg):
    x = np.linspace(1.0, 1.2, 11)
    u1 = 0.3 * np.cos(5 * x)
    mu, Lam, info = prandtl.free_boundary_update(u1, x, bg, 1e-3)
    assert np.max(np.abs(bg.u_fs(x, Lam) + 1e-3 * u1)) <= 1e-12
    assert info["prefactor_negative"]
    mu0, Lam0, _ = prandtl.free_boundary_update(u1, x, bg, 0.0)
    assert np.allclose(Lam0, bg.Lambda_G(x))
    assert np.max(np.abs(mu - mu0)) < 1e-2 * np.max(np.abs(mu0))


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_von_mise_round_trip(a, b):
    psi = lambda z: a * np.sin(z) + b * z ** 2 + 0.3
    u = lambda z: a * np.cos(z) + 2 * b * z
    wbar = lambda z: (z - 1.0) * (1.0 + z)
    wbar_z = lambda z: 2.0 * z
    U = lambda z: wbar(z) * u(z) - wbar_z(z) * psi(z)
    z = np.linspace(1.0, 3.0, 81)
    got = prandtl.invert_von_mise(U, psi(1.0), u(1.0), wbar, wbar_z, z)
    assert np.max(np.abs(got - psi(z))) < 1e-10


def test_von_mise_singular_path():
    z = np.linspace(1.0, 3.0, 11)
    with pytest.raises(prandtl.SingularPath):
        prandtl.invert_von_mise(lambda z: z, 0.0, 0.0, lambda z: np.sin(4 * (z - 1)),
                                lambda z: 4 * np.cos(4 * (z - 1)), z)


def test_config_limits(reversed_profile, bg, boundary_data):
    with pytest.raises(ValueError):
        prandtl.iterate(boundary_data, reversed_profile, 0.5, 0.2, bg=bg)
    with pytest.raises(ValueError):
        prandtl.iterate(boundary_data, reversed_profile, 1e-3, -1.0, bg=bg)
