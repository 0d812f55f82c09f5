"""Complex Airy functions and the rotated decaying bases.

The public evaluator wraps the AMOS routines shipped with scipy. A Maclaurin
series and the large-argument asymptotic expansions are kept as independent
paths so the two can be cross-checked in the overlap band.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840
BI0 = 0.61492662744600073515
BIP0 = 0.44828835735382635791

CROSSOVER = 6.0
TWO_PI_3 = 2.0 * np.pi / 3.0


class AiryOverflowError(OverflowError):
    """Raised when e^{(2/3)w^{3/2}} leaves the double range."""


class Sector(Enum):
    SIGMA0 = 0
    SIGMA_PLUS1 = 1
    SIGMA_MINUS1 = -1


@dataclass(frozen=True)
class AiryEval:
    ai: complex
    ai_prime: complex
    bi: complex
    bi_prime: complex

    def wronskian(self):
        return self.ai * self.bi_prime - self.ai_prime * self.bi


def zeta(w):
    """(2/3) w^{3/2} on the principal branch."""
    w = np.asarray(w, dtype=complex)
    return (2.0 / 3.0) * w * np.sqrt(w)


def airy(w):
    """ai, ai', bi, bi' at complex w (scalar or array)."""
    w = np.asarray(w, dtype=complex)
    if not np.all(np.isfinite(w)):
        raise ValueError("non-finite Airy argument")
    with np.errstate(over="ignore", invalid="ignore"):
        ai, aip, bi, bip = special.airy(w)
    bad = ~(np.isfinite(ai) & np.isfinite(aip) & np.isfinite(bi) & np.isfinite(bip))
    if np.any(bad):
        raise AiryOverflowError("Airy evaluation overflows at |w| = %.3g"
                                % np.max(np.abs(w[bad])))
    if w.ndim == 0:
        return AiryEval(complex(ai), complex(aip), complex(bi), complex(bip))
    return AiryEval(ai, aip, bi, bip)


def airye(w):
    """Scaled values: ai*e^{zeta}, ai'*e^{zeta}, bi*e^{-|Re zeta|}, bi'*e^{-|Re zeta|}."""
    w = np.asarray(w, dtype=complex)
    eai, eaip, ebi, ebip = special.airye(w)
    return eai, eaip, ebi, ebip


def ai(w):
    return special.airy(np.asarray(w, dtype=complex))[0]


def ai_prime(w):
    return special.airy(np.asarray(w, dtype=complex))[1]


def rot(sign):
    """Phase e^{-sign 2 pi i/3} with B_sign(w) = ai(rot(sign) w)."""
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    return np.exp(-sign * 1j * TWO_PI_3)


def rotated_basis(sign, w):
    """(B, B') for B_{-1}(w) = ai(e^{2pi i/3}w) and B_{+1}(w) = ai(e^{-2pi i/3}w)."""
    r = rot(sign)
    a, ap = special.airy(r * np.asarray(w, dtype=complex))[:2]
    return a, r * ap


def wronskian_ai_rotated(sign):
    """W[ai, B_sign] = ai B' - ai' B, constant in w; evaluated at w = 0."""
    b, bp = rotated_basis(sign, 0.0)
    return AI0 * bp - AIP0 * b


def sector(w):
    """Sector of w; rays go to the sector counterclockwise of them."""
    w = complex(w)
    if w == 0:
        raise ValueError("sector undefined at the origin")
    a = np.angle(w)
    if a == -np.pi:
        a = np.pi
    if -np.pi / 3 <= a < np.pi / 3:
        return Sector.SIGMA0
    if np.pi / 3 <= a < np.pi:
        return Sector.SIGMA_PLUS1
    return Sector.SIGMA_MINUS1


# ---------------------------------------------------------------- series path

def _series_fg(w, nterms=80):
    """The two Maclaurin solutions f, g and their derivatives."""
    w = np.asarray(w, dtype=complex)
    z3 = w ** 3
    f = np.ones_like(w)
    g = w.copy()
    fp = np.zeros_like(w)
    gp = np.ones_like(w)
    tf = np.ones_like(w)
    tg = w.copy()
    for k in range(1, nterms):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        f = f + tf
        g = g + tg
        fp = fp + 3 * k * tf / np.where(w == 0, 1, w)
        gp = gp + (3 * k + 1) * tg / np.where(w == 0, 1, w)
    return f, fp, g, gp


def airy_series(w, nterms=80):
    """Maclaurin evaluation; accurate for moderate |w| only."""
    f, fp, g, gp = _series_fg(w, nterms)
    c1, c2 = AI0, -AIP0
    ai_ = c1 * f - c2 * g
    aip = c1 * fp - c2 * gp
    s3 = np.sqrt(3.0)
    return ai_, aip, s3 * (c1 * f + c2 * g), s3 * (c1 * fp + c2 * gp)


def airy_series_second(w, nterms=80):
    """ai'' from termwise differentiation of the series."""
    w = np.asarray(w, dtype=complex)
    z3 = w ** 3
    c1, c2 = AI0, -AIP0
    out = np.zeros_like(w)
    tf = np.ones_like(w)
    tg = w.copy()
    for k in range(1, nterms):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        m = 3 * k
        out = out + c1 * tf * m * (m - 1) / np.where(w == 0, 1, w * w)
        out = out - c2 * tg * (m + 1) * m / np.where(w == 0, 1, w * w)
    return out


# ------------------------------------------------------------ asymptotic path

def _uv(k):
    u = np.ones(k + 1)
    for j in range(1, k + 1):
        num = np.prod(np.arange(2 * j + 1, 6 * j, 2, dtype=float))
        u[j] = num / (216.0 ** j * np.prod(np.arange(1, j + 1, dtype=float)))
    v = np.array([1.0] + [-(6 * j + 1) / (6 * j - 1) * u[j] for j in range(1, k + 1)])
    return u, v


def _truncated(coef, x, sgn):
    """Sum sgn^k c_k x^{-k}, stopped at the smallest term."""
    x = np.asarray(x, dtype=complex)
    total = np.zeros_like(x)
    prev = np.full(x.shape, np.inf)
    live = np.ones(x.shape, dtype=bool)
    for k, c in enumerate(coef):
        term = c * (sgn ** k) / x ** k
        mag = np.abs(term)
        live &= mag <= prev
        total = total + np.where(live, term, 0)
        prev = np.where(live, mag, prev)
    return total


def airy_asymptotic(w, nterms=40):
    """Large-|w| expansions for ai, with bi rebuilt through connection formulas.

    The raw ai expansion is used on |arg w| <= 2pi/3 only; beyond that the
    three-term relation between rotated arguments takes over.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    u, v = _uv(nterms)

    def ai_direct(x):
        z = zeta(x)
        pre = np.exp(-z) / (2.0 * np.sqrt(np.pi))
        q = x ** 0.25
        return (pre / q * _truncated(u, z, -1.0),
                -pre * q * _truncated(v, z, -1.0))

    def ai_pair(x):
        # near the negative axis use ai(x) = -om ai(om x) - om^2 ai(om^2 x)
        a_, ap_ = np.empty_like(x), np.empty_like(x)
        far = np.abs(np.angle(x)) > TWO_PI_3
        a_[~far], ap_[~far] = ai_direct(x[~far])
        if np.any(far):
            om = np.exp(1j * TWO_PI_3)
            a1, ap1 = ai_direct(om * x[far])
            a2, ap2 = ai_direct(om * om * x[far])
            a_[far] = -om * a1 - om * om * a2
            ap_[far] = -om * om * ap1 - om * ap2
        return a_, ap_

    a, ap = ai_pair(w)
    # bi(w) = s i ai(w) + 2 e^{-s i pi/6} ai(e^{-s 2pi i/3} w), s = sign(Im w)
    s = np.where(np.imag(w) >= 0, 1.0, -1.0)
    r = np.exp(-s * 1j * TWO_PI_3)
    ar, apr = ai_pair(r * w)
    c = 2.0 * np.exp(-s * 1j * np.pi / 6)
    b = s * 1j * a + c * ar
    bp = s * 1j * ap + c * r * apr
    return a, ap, b, bp


def envelope(w):
    """|w|^{-1/4} |e^{-(2/3) w^{3/2}}|."""
    w = np.asarray(w, dtype=complex)
    return np.abs(w) ** -0.25 * np.abs(np.exp(-zeta(w)))


# ------------------------------------------------------------------ primitive

_GX, _GW = np.polynomial.legendre.leggauss(24)


def _basis_values(basis, w):
    w = np.asarray(w, dtype=complex)
    if basis == "ai":
        return special.airy(w)[0]
    if basis == "bi":
        return special.airy(w)[2]
    if basis in ("B-1", "B+1"):
        return rotated_basis(-1 if basis == "B-1" else 1, w)[0]
    raise ValueError("unknown basis %r" % (basis,))


def _primitive_series(basis, w, nterms=90):
    """Termwise integration of the Maclaurin series."""
    w = np.asarray(w, dtype=complex)
    if basis in ("B-1", "B+1"):
        r = rot(-1 if basis == "B-1" else 1)
        return _primitive_series("ai", r * w, nterms) / r
    z3 = w ** 3
    If = w.copy()
    Ig = w * w / 2
    tf = np.ones_like(w)
    tg = w.copy()
    for k in range(1, nterms):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        If = If + tf * w / (3 * k + 1)
        Ig = Ig + tg * w / (3 * k + 2)
    c1, c2 = AI0, -AIP0
    if basis == "ai":
        return c1 * If - c2 * Ig
    return np.sqrt(3.0) * (c1 * If + c2 * Ig)


def airy_primitive(basis, w, panels=None):
    """Integral of the basis function from 0 to w along the straight segment."""
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    out = np.empty_like(w)
    small = np.abs(w) <= 2.0
    if np.any(small):
        out[small] = _primitive_series(basis, w[small])
    for i in np.flatnonzero(~small):
        m = panels or int(8 + 4 * np.abs(w[i]))
        edges = np.linspace(0.0, 1.0, m + 1)
        a, b = edges[:-1, None], edges[1:, None]
        tau = 0.5 * (a + b) + 0.5 * (b - a) * _GX[None, :]
        wt = 0.5 * (b - a) * _GW[None, :]
        out[i] = w[i] * np.sum(wt * _basis_values(basis, w[i] * tau))
    return out[0] if scalar else out


# ---------------------------------------------------------------- ray tables

class RayTable:
    """Cubic-spline tables of scaled ai (and bi) along a fixed ray r e^{i theta}.

    Scaled values are smooth in sqrt(r) (the exponent is a power r^{3/2}), so
    dense splines in that variable are far cheaper than pointwise complex
    evaluation at near double accuracy.
    """

    def __init__(self, theta, rmax, density=400):
        from scipy.interpolate import CubicSpline
        n = int(max(4000, density * rmax)) + 1
        rho = np.linspace(0.0, np.sqrt(rmax), n)
        w = rho ** 2 * np.exp(1j * theta)
        vals = list(special.airye(w))
        # strip the oscillating phase left in the scaled bi
        ph = np.exp(-1j * zeta(w).imag)
        vals[2] = vals[2] * ph
        vals[3] = vals[3] * ph
        self.theta = theta
        self.rmax = rmax
        self._sp = [CubicSpline(rho, v) for v in vals]

    def __call__(self, r, which=(0, 1, 2, 3)):
        r = np.asarray(r, dtype=float)
        if np.any(r > self.rmax * (1 + 1e-12)):
            raise ValueError("ray table range exceeded")
        rho = np.sqrt(r)
        out = [self._sp[k](rho) for k in which]
        if any(k >= 2 for k in which):
            ph = np.exp(1j * zeta(r * np.exp(1j * self.theta)).imag)
            out = [o * ph if k >= 2 else o for o, k in zip(out, which)]
        return out


_TABLES = {}


def ray_table(theta, rmax):
    """Cached RayTable covering at least [0, rmax]."""
    key = round(theta, 12)
    tab = _TABLES.get(key)
    if tab is None or tab.rmax < rmax:
        tab = RayTable(theta, max(rmax, 1.0) * 1.25)
        _TABLES[key] = tab
    return tab
