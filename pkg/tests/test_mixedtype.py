import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revprandtl import mixedtype as mt

zero = lambda Z: np.zeros_like(np.asarray(Z, dtype=float))


@pytest.fixture(scope="module")
def data_case():
    man = mt.manufactured(1.0, "data")
    sol = mt.solve_toy(man["F"], man["omega_left"], man["omega_right"], 1.0, Ns=96, NZ=96,
                       omega_left_zz=man["omega_left_zz"], omega_right_zz=man["omega_right_zz"])
    return man, sol


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3))
def test_chi_levels(p):
    v = mt.chi(p)
    assert 0.0 <= v <= 1.0
    if abs(p) < 0.9:
        assert v == 1.0
    if abs(p) > 1.0:
        assert v == 0.0
    assert mt.chi(-p) == v


def test_chi_derivative_matches_fd():
    p = np.linspace(-1.2, 1.2, 241)
    h = 1e-6
    fd = (mt.chi(p + h) - mt.chi(p - h)) / (2 * h)
    assert np.max(np.abs(fd - mt.chi(p, 1))) < 1e-5


def test_cutoff_nesting():
    cf = mt.CutoffFamily()
    Z = np.linspace(-2e-3, 2e-3, 4001)
    nest = cf.nesting(Z)
    assert nest["supp_j_in_level_jp1"]
    assert nest["supp_O_in_level_O4"]
    # the opposite inclusion cannot hold for growing scales
    assert not nest["supp_jp1_in_level_j"]


def test_cutoff_family_rejects_bad_ell():
    with pytest.raises(ValueError):
        mt.CutoffFamily(Lbar=0.5, ell=1.0)


def test_manufactured_forcing_consistent():
    man = mt.manufactured(1.0, "data")
    s = np.linspace(1.05, 1.95, 9)[:, None]
    Z = np.linspace(-3, 3, 61)[None, :]
    h = 1e-5
    om = man["omega"]
    lhs = Z * (om(s + h, Z) - om(s - h, Z)) / (2 * h) - (om(s, Z + h) - 2 * om(s, Z) + om(s, Z - h)) / h ** 2
    assert np.max(np.abs(lhs - man["F"](s, Z))) < 1e-3


def test_data_case_error_and_traces(data_case):
    man, sol = data_case
    ex = man["omega"](sol.s[:, None], sol.Z[None, :])
    assert np.max(np.abs(sol.omega - ex)) < 5e-4
    Z = sol.Z
    assert np.max(np.abs(sol.omega[0, Z > 0] - man["omega_left"](Z[Z > 0]))) < 5e-5
    assert np.max(np.abs(sol.omega[-1, Z < 0] - man["omega_right"](Z[Z < 0]))) < 5e-5
    assert sol.diagnostics["interface_residual"] < 1e-10
    assert sol.diagnostics["neumann_jump"] < 1e-10


def test_zero_problem_gives_zero():
    sol = mt.solve_toy(lambda s, Z: 0 * s * Z, zero, zero, 1.0, Ns=48, NZ=48)
    assert np.max(np.abs(sol.omega)) == 0.0


def test_linearity():
    man = mt.manufactured(1.0, "bump")
    F2 = lambda s, Z: np.exp(-(Z - 0.3) ** 2) * mt.bump((s - 1.1) / 0.7)
    kw = dict(Ns=48, NZ=48)
    a = mt.solve_toy(man["F"], zero, zero, 1.0, **kw).omega
    b = mt.solve_toy(F2, zero, zero, 1.0, **kw).omega
    c = mt.solve_toy(lambda s, Z: 2 * man["F"](s, Z) - 3 * F2(s, Z), zero, zero, 1.0, **kw).omega
    assert np.max(np.abs(c - 2 * a + 3 * b)) < 1e-12


def test_i_norm_finite(data_case):
    parts = mt.i_norm(data_case[1])
    assert all(np.isfinite(v) and v >= 0 for v in parts.values())
    assert abs(parts["total"] - sum(v for k, v in parts.items() if k != "total")) < 1e-12


def test_outflow_change_stays_below_interface():
    # two exact cases that differ only through the lower-half term q(-Z) b(s)
    kw = dict(Ns=96, NZ=96)
    sols = []
    for b0 in (-0.7, 0.5):
        man = mt.manufactured(1.0, "data", b0=b0)
        sols.append(mt.solve_toy(man["F"], man["omega_left"], man["omega_right"], 1.0,
                                 omega_left_zz=man["omega_left_zz"],
                                 omega_right_zz=man["omega_right_zz"], **kw))
    Z = sols[0].Z
    d = np.abs(sols[0].omega - sols[1].omega)
    assert np.max(d[:, Z > 0]) < 1e-5
    assert np.max(d[:, Z < 0]) > 1e-2
