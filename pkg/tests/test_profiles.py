import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revprandtl import profiles


def rk4_residual(beta, a, eta_max=10.0, h=0.005):
    """Independent RK4 shooting: f'(eta_max) - 1 for f''(0) = a."""
    y = np.array([0.0, 0.0, a])
    rhs = lambda y: np.array([y[1], y[2], -y[0] * y[2] - beta * (1 - y[1] ** 2)])
    for _ in range(int(round(eta_max / h))):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[1] - 1.0


def bisect(fun, lo, hi, n=50):
    flo = fun(lo)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_blasius_shape_factor():
    prof = profiles.solve_fs(0.0, "attached")
    oracle = bisect(lambda a: rk4_residual(0.0, a), 0.3, 0.6)
    assert abs(prof.fpp0 - 0.469600) <= 1e-4
    assert abs(prof.fpp0 - oracle) <= 1e-4


def test_sweep_brackets_blasius():
    a, r = profiles.sweep(0.0, 0.3, 0.6, 61)
    i = np.flatnonzero(np.sign(r[:-1]) != np.sign(r[1:]))
    assert len(i) == 1
    assert a[i[0]] <= 0.4696 <= a[i[0] + 1]


def test_reversed_profile(reversed_profile):
    p = reversed_profile
    oracle = bisect(lambda a: rk4_residual(-0.1, a, 12.0), p.fpp0 - 0.02, p.fpp0 + 0.02)
    assert p.fpp0 < 0
    assert abs(p.fpp0 - oracle) < 1e-5
    assert p.diagnostics["residual"] <= 1e-6
    eta = np.linspace(1e-3, p.eta_max, 4000)
    fp = p.f(eta, 1)
    assert np.count_nonzero(np.sign(fp[1:]) != np.sign(fp[:-1])) == 1
    assert abs(p.f(p.eta_star, 1)) < 1e-10
    assert p.diagnostics["doubling_shift"] < 1e-4


def test_ode_residual(reversed_profile):
    p = reversed_profile
    eta = np.linspace(0, p.eta_max, 300)
    f, f2, f3 = p.f(eta), p.f(eta, 2), p.f(eta, 3)
    fp = p.f(eta, 1)
    h = 1e-4
    f3_fd = (p.f(np.clip(eta + h, 0, p.eta_max), 2) - p.f(np.clip(eta - h, 0, p.eta_max), 2))
    f3_fd /= (np.clip(eta + h, 0, p.eta_max) - np.clip(eta - h, 0, p.eta_max))
    assert np.max(np.abs(f3_fd - f3)) < 1e-6
    assert np.max(np.abs(f3 + f * f2 + p.beta * (1 - fp ** 2))) < 1e-12


def test_branch_errors():
    with pytest.raises(profiles.BranchUnavailable):
        profiles.solve_fs(0.1, "reversed")
    with pytest.raises(ValueError):
        profiles.solve_fs(-0.1, "sideways")
    with pytest.raises(ValueError):
        profiles.solve_fs(-0.1, eta_max=5)


def test_background_zero_curve(bg):
    x = np.linspace(0.5, 2.0, 7)
    assert np.max(np.abs(bg.u_fs(x, bg.Lambda_G(x)))) < 1e-10
    s = np.linspace(1, 1.5, 5)
    assert np.max(np.abs(bg.ubar(s, 1.0))) < 1e-10


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0.2, 5.0))
def test_self_similar_map_roundtrip(bg, x):
    assert abs(bg.x_of_s(bg.s_of_x(x)) - x) < 1e-12 * x


def test_default_data_compatible(bg, boundary_data):
    c = boundary_data.compatibility()
    assert abs(c["u_right_at_1"]) < 1e-14
    assert abs(c["u_right_zz_at_0"]) < 1e-6
    assert abs(c["u_right_zzz_at_0"]) < 1e-4
    assert np.isfinite(c["F_left_weighted_sup"])
