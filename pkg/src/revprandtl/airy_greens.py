"""Half-line Airy boundary-value problems in the frequency variable.

For a frequency xi the ODE is  i xi Z w - w'' = F  on Z > 0 (upper) or Z < 0
(lower) with w(0) = gamma and decay at infinity. Writing c = (i xi)^{1/3} on the
principal branch, the upper problem decays like ai(cZ) and the lower one like
B_{-sgn xi}(cZ). Particular solutions use variation of parameters; the growing
exponentials are carried in log form so large |xi| and long half-lines stay in
range.
"""
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from . import specfun as sf

C0 = 1.0 / (2.0 * np.pi * sf.AI0 ** 2)
NQ = 8
_GX, _GW = np.polynomial.legendre.leggauss(NQ)


@dataclass
class HalfLineSolution:
    xi: float
    Z: np.ndarray
    omega: np.ndarray
    omega_Z: np.ndarray
    dirichlet: complex
    neumann: complex


def cube_root(xi):
    """(i xi)^{1/3} = |xi|^{1/3} e^{i sgn(xi) pi/6}."""
    xi = np.asarray(xi, dtype=float)
    return np.abs(xi) ** (1.0 / 3.0) * np.exp(1j * np.sign(xi) * np.pi / 6)


def dn_symbol(side, xi):
    """Homogeneous Dirichlet-to-Neumann symbol: d_Z w(0) = dn_symbol * gamma."""
    xi = np.asarray(xi, dtype=float)
    c = cube_root(xi)
    if side == "+":
        return c * sf.AIP0 / sf.AI0
    r = np.where(xi > 0, sf.rot(-1), sf.rot(1))
    return c * r * sf.AIP0 / sf.AI0


def wronskian_multiplier(xi):
    """M(xi) = B'(0)/B(0) - ai'(0)/ai(0) with B = B_{-sgn xi}.

    This is the jump of the two homogeneous Neumann traces per unit c gamma;
    (i xi)^{1/3} M(xi) = C0 |xi|^{1/3}.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0):
        raise ValueError("the multiplier is defined for xi != 0")
    r = np.where(xi > 0, sf.rot(-1), sf.rot(1))
    return (sf.AIP0 / sf.AI0) * (r - 1.0)


def side_multipliers(xi):
    """(M_+, M_-) = (ai'(0)/ai(0), B'(0)/B(0))."""
    xi = np.asarray(xi, dtype=float)
    r = np.where(xi > 0, sf.rot(-1), sf.rot(1))
    mp_ = np.full(xi.shape, sf.AIP0 / sf.AI0, dtype=complex)
    return mp_, r * sf.AIP0 / sf.AI0


# -------------------------------------------------------------- core solver

def gauss_nodes(t, nsub=1):
    """Gauss nodes and weights on each cell of the grid t (shape (cells, q))."""
    t = np.asarray(t, dtype=float)
    edges = np.concatenate([np.linspace(a, b, nsub + 1)[:-1] for a, b in zip(t[:-1], t[1:])]
                           + [t[-1:]])
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * _GX
    wts = 0.5 * (b - a) * _GW * np.ones_like(nodes)
    return nodes.reshape(len(t) - 1, nsub * NQ), wts.reshape(len(t) - 1, nsub * NQ)


def _factors(side, xi):
    """Per-frequency constants for the generic half-line form in t = |Z|.

    y_d(t) = ai(a t) decays, y_g grows; returns a, the growing-argument
    multiplier g, the normaliser K and y_d(0).
    """
    c = cube_root(xi)
    if side == "+":
        return c, c, np.pi / c
    sgn = np.sign(xi)
    r = np.where(sgn > 0, sf.rot(-1), sf.rot(1))
    w0 = sf.AI0 * r * sf.AIP0 - sf.AIP0 * sf.AI0
    return -r * c, -c, 1.0 / (c * w0)


def _scaled(kind, mult, t):
    """airye-scaled (f, f') for f = ai or bi at mult[:, None] * t[None, :].

    Every argument lies on one of the rays arg = +-pi/6, +-5pi/6, so large
    batches go through cached spline tables along those rays.
    """
    mult = np.asarray(mult, dtype=complex)
    t = np.asarray(t, dtype=float)
    k = (0, 1) if kind == "ai" else (2, 3)
    if mult.size * t.size < 20000:
        out = special.airye(mult[:, None] * t[None, :])
        return out[k[0]], out[k[1]]
    f = np.empty((mult.size, t.size), dtype=complex)
    fp = np.empty_like(f)
    ang = np.angle(mult)
    r = np.abs(mult)[:, None] * t[None, :]
    for th in np.unique(np.round(np.abs(ang), 10)):
        tab = sf.ray_table(float(th), float(np.max(r)))
        for sgn in (1, -1):
            rows = np.isclose(ang, sgn * th)
            if not np.any(rows):
                continue
            v0, v1 = tab(r[rows], which=k)
            if sgn < 0:
                v0, v1 = np.conj(v0), np.conj(v1)
            f[rows], fp[rows] = v0, v1
    return f, fp


def _scaled_pair(side, a, g, t):
    """Scaled y_d, y_d', y_g, y_g' and exponents zeta_d (complex), rho (real).

    y_d = Ds e^{-zeta_d}, y_g = Gs e^{rho}, rho = Re zeta_d; derivatives in the
    argument (chain factors a, g applied by the caller).
    """
    wd = a[:, None] * t[None, :]
    eai, eaip = _scaled("ai", a, t)
    zd = sf.zeta(wd)
    rho = zd.real
    if side == "+":
        ebi, ebip = _scaled("bi", g, t)
        return eai, eaip, ebi, ebip, zd, rho
    gai, gaip = _scaled("ai", g, t)
    zg = sf.zeta(g[:, None] * t[None, :])
    # ai(wg) = gai e^{-zg}; -Re zg equals rho on these rays
    ph = np.exp(-1j * zg.imag)
    return eai, eaip, gai * ph, gaip * ph, zd, rho


def choose_nsub(xi, t):
    """Cell subdivision keeping |c| h below about 0.6 on every Gauss panel."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.size == 0:
        return 1
    h = np.max(np.diff(np.asarray(t, dtype=float)))
    cmax = np.max(np.abs(xi)) ** (1.0 / 3.0)
    return int(max(1, np.ceil(cmax * h / 0.6)))


def half_line_batch(side, xi, gamma, t, F=None, Fq=None, nsub=None):
    """Solve the upper ('+') or lower ('-') problem for many frequencies.

    t is the grid of |Z| values (starting at 0, increasing). The forcing is
    given either as a callable F(t_nodes) returning (n, cells, q) or (cells, q),
    as samples of shape (n, len(t)) interpolated by cubic splines, or directly
    as values Fq at gauss_nodes(t, nsub). Returns omega, d omega/dZ on t and
    the smoothing functional G_side for each frequency.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    gamma = np.broadcast_to(np.asarray(gamma, dtype=complex), xi.shape)
    t = np.asarray(t, dtype=float)
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t must start at 0 and increase")
    if np.any(xi == 0):
        raise ValueError("xi = 0 is handled by zero_mode")
    a, g, K = _factors(side, xi)
    if nsub is None:
        nsub = choose_nsub(xi, t)
    tq, wq = gauss_nodes(t, nsub)
    if Fq is not None:
        Fq = np.broadcast_to(np.asarray(Fq, dtype=complex), (len(xi),) + tq.shape)
    elif callable(F):
        Fq = np.asarray(F(tq), dtype=complex)
        if Fq.shape[-2:] != tq.shape:
            raise ValueError("callable F must return (n, cells, q)")
        Fq = np.broadcast_to(Fq, (len(xi),) + tq.shape)
    else:
        Fs = np.asarray(F, dtype=complex)
        Fs = np.broadcast_to(Fs, (len(xi), len(t)))
        Fq = (CubicSpline(t, Fs.real, axis=1)(tq.ravel())
              + 1j * CubicSpline(t, Fs.imag, axis=1)(tq.ravel())).reshape((len(xi),) + tq.shape)

    n, m = len(xi), len(t)
    Ds, Dps, Gs, Gps, zd, rho = _scaled_pair(side, a, g, t)
    Dq, _, Gq, _, zq, rq = _scaled_pair(side, a, g, tq.ravel())
    Dq = Dq.reshape(Fq.shape)
    Gq = Gq.reshape(Fq.shape)
    zq = zq.reshape(Fq.shape)
    rq = rq.reshape(Fq.shape)

    S = np.zeros((n, m), dtype=complex)
    T = np.zeros((n, m), dtype=complex)
    for j in range(m - 1):
        S[:, j + 1] = (S[:, j] * np.exp(-(zd[:, j + 1] - zd[:, j]))
                       + np.sum(wq[j] * Gq[:, j] * Fq[:, j]
                                * np.exp(rq[:, j] - zd[:, j + 1, None]), axis=1))
    for j in range(m - 2, -1, -1):
        T[:, j] = (T[:, j + 1] * np.exp(rho[:, j] - rho[:, j + 1])
                   + np.sum(wq[j] * Dq[:, j] * Fq[:, j]
                            * np.exp(rho[:, j, None] - zq[:, j]), axis=1))

    Kc = K[:, None]
    up = Kc * (Ds * S + Gs * T)
    dup = Kc * (a[:, None] * Dps * S + g[:, None] * Gps * T)
    yd0 = sf.AI0
    c1 = (gamma - up[:, 0]) / yd0
    ed = np.exp(-zd)
    omega = c1[:, None] * Ds * ed + up
    omega_t = c1[:, None] * a[:, None] * Dps * ed + dup
    G = T[:, 0] / yd0
    if side == "-":
        omega_t = -omega_t
        G = -G
    return omega, omega_t, G


def homogeneous_batch(side, xi, t):
    """Decaying solutions normalised to 1 at Z = 0, and their Z-derivatives."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    t = np.asarray(t, dtype=float)
    a, g, _ = _factors(side, xi)
    Ds, Dps, _, _, zd, _ = _scaled_pair(side, a, g, t)
    ed = np.exp(-zd) / sf.AI0
    y = Ds * ed
    yz = a[:, None] * Dps * ed
    return y, (-yz if side == "-" else yz)


def _wrap(side, xi, gamma, Z, F):
    Z = np.asarray(Z, dtype=float)
    if side == "+":
        t = Z
        Fz = F
    else:
        order = np.argsort(-Z)
        t = -Z[order]
        Fz = F if callable(F) else np.asarray(F)[order]
    if callable(F):
        fun = (lambda tq: F(tq)[None]) if side == "+" else (lambda tq: F(-tq)[None])
    else:
        fun = np.asarray(Fz, dtype=complex)[None]
    om, omz, _ = half_line_batch(side, [xi], [gamma], t, fun)
    om, omz = om[0], omz[0]
    if side == "-":
        inv = np.empty_like(order)
        inv[order] = np.arange(len(order))
        om, omz = om[inv], omz[inv]
        i0 = np.argmin(np.abs(Z))
    else:
        i0 = 0
    return HalfLineSolution(float(xi), Z, om, omz, complex(om[i0]), complex(omz[i0]))


def solve_upper(xi, gamma, F, Z):
    """i xi Z w - w'' = F on Z >= 0, w(0) = gamma, decaying.

    F may be a callable of Z or samples on the grid Z (which starts at 0).
    """
    if xi == 0:
        raise ValueError("xi = 0 is handled separately")
    return _wrap("+", xi, gamma, Z, F)


def solve_lower(xi, gamma, F, Z):
    """i xi Z w - w'' = F on Z <= 0, w(0) = gamma, decaying as Z -> -inf."""
    if xi == 0:
        raise ValueError("xi = 0 is handled separately")
    return _wrap("-", xi, gamma, Z, F)


def zero_mode(side, gamma, t, F=None, Fq=None, nsub=1):
    """The xi = 0 problem -w'' = F with bounded w; returns (w, w_Z, G)."""
    t = np.asarray(t, dtype=float)
    tq, wq = gauss_nodes(t, nsub)
    if Fq is None:
        Fq = np.asarray(F(tq), dtype=complex) if callable(F) else \
            CubicSpline(t, np.asarray(F, dtype=complex))(tq)
    Fq = np.asarray(Fq, dtype=complex).reshape(tq.shape)
    m = len(t)
    A = np.zeros(m, dtype=complex)    # int_0^t tau F
    B = np.zeros(m, dtype=complex)    # int_t^inf F
    A[1:] = np.cumsum(np.sum(wq * tq * Fq, axis=1))
    B[:-1] = np.cumsum(np.sum(wq * Fq, axis=1)[::-1])[::-1]
    w = gamma + A + t * B
    if side == "-":
        return w, -B, -B[0]
    return w, B, B[0]


def smoothing_G(side, xi, t, F):
    """G_+ = (1/ai0) int_0^inf ai(cZ) F dZ, G_- = -(1/ai0) int_{-inf}^0 B(cZ) F dZ.

    F is given on t = |Z| (callable returning (n, cells, q) or samples (n, len(t))).
    xi = 0 entries use the limits int F and -int F.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.zeros(len(xi), dtype=complex)
    nz = xi != 0
    if callable(F):
        tq, _ = gauss_nodes(t)
        full = np.asarray(F(tq), dtype=complex)
        full = np.broadcast_to(full, (len(xi),) + tq.shape) if full.ndim == 2 else full
        sub = lambda tq_, m=nz: np.broadcast_to(F(tq_), (len(xi),) + tq_.shape)[m]
    else:
        full = np.broadcast_to(np.asarray(F, dtype=complex), (len(xi), len(t)))
        sub = full[nz]
    if np.any(nz):
        out[nz] = half_line_batch(side, xi[nz], 0.0, t, sub)[2]
    for i in np.flatnonzero(~nz):
        f = (lambda tq_, i=i: np.broadcast_to(F(tq_), (len(xi),) + tq_.shape)[i]) if callable(F) else full[i]
        out[i] = zero_mode(side, 0.0, t, f)[2]
    return out


def T_minus_third(side, s, t, F):
    """Trace operator R F^{-1}[+-G_side[F]] on the periodic s-grid.

    F has shape (len(s), len(t)) with t = |Z|; the sign is chosen so that the
    two sides add up to C0 (-Delta)^{1/6} of the matching trace.
    """
    s = np.asarray(s, dtype=float)
    ds = s[1] - s[0]
    xi = 2 * np.pi * np.fft.fftfreq(len(s), d=ds)
    Fh = np.fft.fft(np.asarray(F, dtype=complex), axis=0)
    G = smoothing_G(side, xi, t, Fh)
    sign = 1.0 if side == "+" else -1.0
    return sign * np.fft.ifft(G)
