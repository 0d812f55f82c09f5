import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from revprandtl import validators as v


def test_multiplier_norm_of_constant():
    assert v.multiplier_norm(lambda x: 1.0 + 0 * x) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.0))
def test_multiplier_norm_of_power(a):
    # xi^j d^j xi^a = (a)_j xi^a, so the sum is a fixed multiple of the largest |xi|^a
    xi, du = v.log_grid(-2, 2, 401)
    m = lambda x: np.abs(x) ** a
    got = v.multiplier_norm(m, xi, du)
    factor = 1 + abs(a) + abs(a * (a - 1)) + abs(a * (a - 1) * (a - 2))
    inner = xi[3:-3]
    assert got == pytest.approx(factor * np.max(inner ** a), rel=1e-6)


def test_unbounded_symbol_grows():
    m = lambda x: np.abs(x) ** 0.5
    assert v.multiplier_norm(m, hi=6) > 5 * v.multiplier_norm(m, hi=4)


@pytest.mark.parametrize("kind", ["z", "zexp"])
def test_hardy_closed_form_against_quad(kind):
    cm = lambda z: float(v.chi_minus(np.array([z]))[0])
    if kind == "z":
        F, f1, f0 = (lambda z: 1.0), (lambda z: 1.0), (lambda z: z)
    else:
        F, f1, f0 = (lambda z: np.exp(-z)), (lambda z: (1 - z) * np.exp(-z)), (lambda z: z * np.exp(-z))
    n2 = lambda g: np.sqrt(integrate.quad(lambda z: g(z) ** 2, 0, 1, points=[0.8, 0.9], limit=200)[0])
    lhs = n2(lambda z: F(z) * cm(z))
    rhs = n2(lambda z: f1(z) * cm(z)) + n2(f0)
    got = v.hardy_closed_form(kind, n=400)
    assert got[0] == pytest.approx(lhs, rel=1e-4)
    assert got[1] == pytest.approx(rhs, rel=1e-4)
    assert got[0] <= got[1]


def test_hardy_suite_passes():
    reps = v.hardy_suite(n_funcs=8)
    assert all(r.passed for r in reps)


def test_hls_and_commutator_pass():
    for r in (v.hls_check(p=2.0, n=1024), v.hls_check(p=4.0, n=1024),
              v.commutator_check(n=512, n_funcs=6)):
        assert r.passed, r.to_dict()


def test_bi_primitive_on_real_axis():
    for x in (0.5, 3.0, 9.0):
        ref = integrate.quad(lambda t: special.airy(t)[2], 0, x, epsabs=0, epsrel=1e-13)[0]
        got = v.B_fn("bi")(np.array([x + 0j]))[0] * np.exp((2 / 3) * x ** 1.5)
        assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


def test_rho_integral_grows_as_sigma_shrinks():
    vals = [v.rho_integral(s) for s in (0.2, 0.1, 0.05)]
    assert all(np.isfinite(vals))
    assert vals[0] < vals[1] < vals[2]


def test_admissibility_sigma_range():
    with pytest.raises(ValueError):
        v.admissibility_scan(sigma=0.3)


def test_admissibility_values_finite():
    a = v.admissibility_scan(("ai", "bi"), 0.1, Z=(0.5, 2.0), n_xi=201, n_rho=8)
    for key in ("varphi", "phi", "p_integral"):
        assert np.isfinite(a[key]) and a[key] > 0


def test_single_mode_J1_against_quad():
    s = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    Z = np.linspace(0.0, 3.0, 1201)
    F = np.cos(s)[:, None] * np.exp(-Z ** 2)[None, :]
    J1, _, _ = v.airy_kernel_ops(F, s, Z)
    k = 400
    ref = 0.0
    for xi in (1.0, -1.0):
        c = abs(xi) ** (1 / 3) * np.exp(1j * np.sign(xi) * np.pi / 6)
        g = lambda t: special.airy(c * Z[k])[0] * c * special.airy(c * t)[2] * np.exp(-t ** 2)
        re = integrate.quad(lambda t: g(t).real, 0, Z[k], epsrel=1e-12)[0]
        im = integrate.quad(lambda t: g(t).imag, 0, Z[k], epsrel=1e-12)[0]
        ref += 0.5 * complex(re, im)
    assert abs(J1[0, k] - ref) < 1e-6


def test_smoothing_decay_slope():
    slope, vals = v.smoothing_decay()
    assert abs(slope + 1 / 3) <= 0.02
    assert np.all(np.diff(vals) < 0)


def test_report_drift_rule():
    ok = v._report("x", "f", 1.0, 1.05)
    bad = v._report("x", "f", 1.0, 1.5)
    assert ok.passed and not bad.passed
    assert bad.drift == pytest.approx(0.5)


def test_unknown_suite():
    with pytest.raises(ValueError):
        v.run_suite("nope")
