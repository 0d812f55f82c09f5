import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from revprandtl import specfun as sf


def test_constants_match_scipy():
    a, ap, b, bp = special.airy(0.0)
    assert np.allclose([sf.AI0, sf.AIP0, sf.BI0, sf.BIP0], [a, ap, b, bp], rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_wronskian_ai_bi(x, y):
    w = complex(x, y)
    if abs(w) > 20:
        w = 20 * w / abs(w)
    W = sf.airy(w).wronskian()
    assert abs(W - 1 / np.pi) <= 1e-10 * max(1.0, abs(sf.airy(w).ai * sf.airy(w).bi_prime))


def test_rotated_wronskian_value():
    assert abs(sf.wronskian_ai_rotated(-1) - np.exp(-1j * np.pi / 6) / (2 * np.pi)) < 1e-14
    assert abs(sf.wronskian_ai_rotated(1) - np.exp(1j * np.pi / 6) / (2 * np.pi)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_rotated_wronskian_constant(x, y):
    w = complex(x, y)
    for sign in (-1, 1):
        b, bp = sf.rotated_basis(sign, w)
        e = sf.airy(w)
        assert abs(e.ai * bp - e.ai_prime * b - sf.wronskian_ai_rotated(sign)) < 1e-12 * max(1, abs(e.ai * bp))


def test_three_term_relation():
    w = np.array([0.3 + 0.2j, -2.0 + 1.0j, 3.0 - 4.0j])
    s = sf.ai(w) + sf.rot(1) * sf.ai(sf.rot(1) * w) + sf.rot(-1) * sf.ai(sf.rot(-1) * w)
    assert np.max(np.abs(s)) < 1e-13


def test_series_agrees_with_scipy():
    w = np.array([0.5, -1.5 + 0.5j, 2.0j, 3.0])
    ref = special.airy(w)
    got = sf.airy_series(w)
    for r, g in zip(ref, got):
        assert np.max(np.abs(r - g) / np.maximum(1, np.abs(r))) < 1e-12


def test_asymptotic_agrees_with_scipy():
    w = np.array([15.0, 12 * np.exp(1j * 2.5), -18.0, 14j])
    ref = special.airy(w)
    got = sf.airy_asymptotic(w)
    for r, g in zip(ref[:2], got[:2]):
        assert np.max(np.abs(r - g) / np.abs(r)) < 1e-10


def test_primitive_against_quadrature():
    from scipy.integrate import quad
    for x in (0.7, 3.5, -6.0):
        ref = quad(lambda t: special.airy(t)[0], 0, x, epsabs=1e-14)[0]
        assert abs(sf.airy_primitive("ai", x) - ref) < 1e-11


def test_ray_table_matches_direct():
    th = 2 * np.pi / 3
    tab = sf.ray_table(th, 30.0)
    r = np.linspace(0, 30, 57)
    got = tab(r, (0,))[0]
    ref = special.airye(r * np.exp(1j * th))[0]
    assert np.max(np.abs(got - ref)) < 1e-9


def test_rot_rejects_bad_sign():
    with pytest.raises(ValueError):
        sf.rot(0)


def test_airy_rejects_nonfinite():
    with pytest.raises(ValueError):
        sf.airy(np.nan)


def test_overflow_is_reported():
    with pytest.raises(sf.AiryOverflowError):
        sf.airy(400.0)
