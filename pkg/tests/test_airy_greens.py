import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from revprandtl import airy_greens as ag
from revprandtl import specfun as sf


def test_multiplier_identity():
    xi = np.concatenate([-np.logspace(-2, 3, 400), np.logspace(-2, 3, 400)])
    lhs = ag.cube_root(xi) * ag.wronskian_multiplier(xi)
    err = np.abs(lhs - ag.C0 * np.abs(xi) ** (1 / 3)) / np.abs(xi) ** (1 / 3)
    assert err.max() <= 1e-8


def test_c0_from_rotated_wronskian():
    W = sf.wronskian_ai_rotated(-1)
    assert abs(ag.C0 - abs(W) / sf.AI0 ** 2) < 1e-14


def test_multiplier_rejects_zero():
    with pytest.raises(ValueError):
        ag.wronskian_multiplier(np.array([0.0, 1.0]))


def _manufactured(xi, gamma, sign):
    # decaying profile with w(0) = gamma on the half line sign * Z >= 0
    w = lambda Z: gamma * np.exp(-Z ** 2) + Z ** 2 * np.exp(-Z ** 2)
    wzz = lambda Z: gamma * (4 * Z ** 2 - 2) * np.exp(-Z ** 2) + (2 - 10 * Z ** 2 + 4 * Z ** 4) * np.exp(-Z ** 2)
    F = lambda Z: 1j * xi * Z * w(Z) - wzz(Z)
    return w, F


@pytest.mark.parametrize("xi", [-30.0, -1.0, 0.5, 7.0])
def test_solve_upper_manufactured(xi):
    gamma = 0.3 - 0.2j
    w, F = _manufactured(xi, gamma, 1)
    Z = np.linspace(0, 8, 401)
    sol = ag.solve_upper(xi, gamma, F(Z), Z)
    assert np.max(np.abs(sol.omega - w(Z))) < 1e-6
    assert abs(sol.dirichlet - gamma) < 1e-12


@pytest.mark.parametrize("xi", [-4.0, 2.0, 25.0])
def test_solve_lower_manufactured(xi):
    gamma = 1.1
    w, F = _manufactured(xi, gamma, -1)
    Z = np.linspace(-8, 0, 401)
    sol = ag.solve_lower(xi, gamma, F(Z), Z)
    assert np.max(np.abs(sol.omega - w(Z))) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.floats(-50, 50).filter(lambda x: abs(x) > 1e-2), st.floats(-2, 2), st.floats(-2, 2))
def test_homogeneous_trace_matches_dn_symbol(xi, gr, gi):
    t = np.linspace(0, 6, 61)
    for side in ("+", "-"):
        om, omz, _ = ag.half_line_batch(side, [xi], [complex(gr, gi)], t, np.zeros((1, len(t))))
        assert abs(omz[0, 0] - ag.dn_symbol(side, xi) * complex(gr, gi)) < 1e-9 * (1 + abs(complex(gr, gi)) * abs(xi) ** (1 / 3))


@pytest.mark.parametrize("xi", [-3.0, 0.7, 12.0])
def test_smoothing_upper_against_quad(xi):
    c = ag.cube_root(xi)
    f = lambda Z: np.exp(-Z) * np.cos(2 * Z)
    t = np.linspace(0, 30, 1201)
    G = ag.smoothing_G("+", np.array([xi]), t, f(t)[None])[0]
    re = integrate.quad(lambda z: (special.airy(c * z)[0] * f(z)).real, 0, 30, limit=400)[0]
    im = integrate.quad(lambda z: (special.airy(c * z)[0] * f(z)).imag, 0, 30, limit=400)[0]
    assert abs(G - complex(re, im) / sf.AI0) < 1e-6


def test_zero_mode_closed_form():
    t = np.linspace(0, 40, 2001)
    w, wz, G = ag.zero_mode("+", 0.0, t, lambda q: np.exp(-q))
    assert abs(G - 1.0) < 1e-10
    assert np.max(np.abs(w - (1 - np.exp(-t)))) < 1e-9
