"""Coordinate ladder (x, y) -> (s, z) -> (s, Y) -> (s, Z) and the coefficient
fields of the localised vorticity equation.

s is defined by ds/dx = 1/Lambda(x)^2 with s(1) = 1 and z = y/Lambda(x).
Near the zero curve the background is straightened by Y = wbar(s, z), and
the Eikonal map Z = p(s, Y) turns the degenerate diffusion into Airy form.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline


class NonmonotoneMap(ValueError):
    pass


class NonmonotoneProfile(ValueError):
    pass


class DegenerateShear(ValueError):
    pass


_GX, _GW = np.polynomial.legendre.leggauss(20)


# ------------------------------------------------------------ free boundary

class FreeBoundary:
    """Lambda(x) = Lambda_G(x) + eps Xi(x) on [1, 1 + L] and the s(x) map.

    Lambda_G and Xi are callables of x. s(x) is built by composite Gauss
    quadrature of Lambda^{-2} on a fine x-grid; x(s) by bracketed root finding.
    """

    def __init__(self, Lambda_G, L, Xi=None, eps=0.0, nx=400):
        self.Lambda_G = Lambda_G
        self.Xi = Xi if Xi is not None else (lambda x: np.zeros_like(np.asarray(x, float)))
        self.eps = float(eps)
        self.L = float(L)
        self.x = np.linspace(1.0, 1.0 + self.L, nx + 1)
        a, b = self.x[:-1, None], self.x[1:, None]
        xq = 0.5 * (a + b) + 0.5 * (b - a) * _GX
        lam_q = self.Lambda(xq)
        lam_x = self.Lambda(self.x)
        if np.any(lam_q <= 0) or np.any(lam_x <= 0):
            raise NonmonotoneMap("Lambda must stay positive")
        inc = np.sum(0.5 * (b - a) * _GW / lam_q ** 2, axis=1)
        self.s = 1.0 + np.concatenate([[0.0], np.cumsum(inc)])
        self.Lbar = float(self.s[-1] - 1.0)
        # fine interpolant only used to bracket the inverse
        self._spl = CubicSpline(self.x, self.s)

    def Lambda(self, x):
        return self.Lambda_G(x) + self.eps * self.Xi(x)

    def s_of_x(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            k = min(max(np.searchsorted(self.x, xi) - 1, 0), len(self.x) - 2)
            a = self.x[k]
            t = 0.5 * (a + xi) + 0.5 * (xi - a) * _GX
            out[i] = self.s[k] + np.sum(0.5 * (xi - a) * _GW / self.Lambda(t) ** 2)
        return out

    def x_of_s(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        for i, si in enumerate(s):
            k = min(max(np.searchsorted(self.s, si) - 1, 0), len(self.s) - 2)
            lo, hi = self.x[k], self.x[k + 1]
            if si <= self.s[0]:
                out[i] = 1.0
                continue
            if si >= self.s[-1]:
                out[i] = self.x[-1]
                continue
            out[i] = optimize.brentq(lambda x: self.s_of_x(x)[0] - si, lo, hi, xtol=1e-13)
        return out

    def lam(self, s):
        """lambda(s) = Lambda(x(s))."""
        return self.Lambda(self.x_of_s(s))

    def lam_prime(self, s, h=1e-6):
        """d lambda/ds = Lambda'(x) Lambda(x)^2 (Lambda' by central differences)."""
        x = self.x_of_s(s)
        dL = (self.Lambda(x + h) - self.Lambda(x - h)) / (2 * h)
        return dL * self.Lambda(x) ** 2


def build_selfsimilar(fb, f_xy, s, z):
    """Resample f(x, y) onto (s, z): f(x(s), lambda(s) z)."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    x = fb.x_of_s(s)
    lam = fb.Lambda(x)
    return f_xy(x[:, None], lam[:, None] * z[None, :])


def d_dx(fb, s, z, f_s, f_z):
    """d_x f = f_s/lambda^2 - (lambda'/lambda^3) z f_z in (s, z) variables."""
    s = np.asarray(s, dtype=float)
    lam = fb.lam(s)[:, None]
    lp = fb.lam_prime(s)[:, None]
    return f_s / lam ** 2 - lp / lam ** 3 * np.asarray(z)[None, :] * f_z


# -------------------------------------------------------------- straighten

@dataclass
class Straightened:
    s: np.ndarray
    Y: np.ndarray          # (ns, nY) common Y-grid per row
    z_of_Y: np.ndarray     # (ns, nY)
    phi: np.ndarray        # psi(s, z(Y))
    V: np.ndarray          # good unknown at z(Y)


def straighten(w, w_z, w_zz, s, z, psi=None, u=None, u_z=None, delta1=0.25, c0=0.1, nY=101):
    """Straighten by Y = wbar(s, z) on the strip |z - 1| < delta1.

    w, w_z, w_zz are callables of (s, z); psi, u, u_z optional callables for
    the perturbation. The returned V uses the good-unknown identity
    V = (u_z - (w_zz/w_z) u)/w_z^2.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    zs = np.asarray(z, dtype=float)
    zs = zs[np.abs(zs - 1.0) < delta1 + 1e-14]
    wz = w_z(s[:, None], zs[None, :])
    if np.any(wz < c0):
        raise NonmonotoneProfile("wbar_z drops below c0 inside the strip")
    lo, hi = 1.0 - delta1, 1.0 + delta1
    ylo = np.max(w(s, np.full_like(s, lo)))
    yhi = np.min(w(s, np.full_like(s, hi)))
    Y = np.linspace(ylo, yhi, nY)
    zY = np.empty((len(s), nY))
    for i, si in enumerate(s):
        for j, yj in enumerate(Y):
            zY[i, j] = optimize.brentq(lambda q: w(si, q) - yj, lo, hi, xtol=1e-14)
    S = np.repeat(s[:, None], nY, axis=1)
    phi = psi(S, zY) if psi is not None else None
    V = None
    if u is not None and u_z is not None:
        wz = w_z(S, zY)
        V = (u_z(S, zY) - w_zz(S, zY) / wz * u(S, zY)) / wz ** 2
    return Straightened(s, np.repeat(Y[None, :], len(s), axis=0), zY, phi, V)


# ------------------------------------------------------------------ Eikonal

@dataclass
class EikonalMap:
    """Z = p(s, Y) and its derivatives on the sample grid."""
    s: np.ndarray
    Y: np.ndarray
    p: np.ndarray
    p_Y: np.ndarray
    p_YY: np.ndarray
    p_s: np.ndarray
    variant: str
    diagnostics: dict = field(default_factory=dict)


def _primitive(g, Y, nq=24):
    """int_0^Y g(Y') sqrt|Y'| dY' for each entry of Y using Y' = Y r^2."""
    r, wr = np.polynomial.legendre.leggauss(nq)
    r = 0.5 * (r + 1.0)
    wr = 0.5 * wr
    Y = np.asarray(Y, dtype=float)
    Yq = Y[..., None] * r ** 2
    # dY' = 2 Y r dr, sqrt|Y'| = sqrt|Y| r
    return np.sum(wr * g(Yq) * 2 * r ** 2, axis=-1) * Y * np.sqrt(np.abs(Y))


def eikonal_p(Wp, Y, variant="formula"):
    """p(Y) for one s-slice; Wp is a callable of Y.

    variant='formula': p = sign(Y)(3/2)^{2/3} |int_0^Y W sqrt|Y'||^{2/3},
      solving p_Y = (Y/p)^{1/2} W.
    variant='conjugating': the same with W replaced by 1/W, solving
      p_Y^2 p = Y/W^2, which is the map that conjugates Y d_s - W^2 d_Y^2
      to a multiple of Z d_s - d_Z^2.
    """
    g = Wp if variant == "formula" else (lambda q: 1.0 / Wp(q))
    I = _primitive(g, Y)
    return np.sign(Y) * (1.5 * np.abs(I)) ** (2.0 / 3.0)


def eikonal(Wp, Y, s=None, c0=0.1, variant="formula", h_s=1e-5):
    """Build the Eikonal map on the grid Y (1-D) for each s.

    Wp(s, Y) is the shear as a function of the straightened variable. If
    s is None, Wp is treated as a function of Y only.
    """
    Y = np.asarray(Y, dtype=float)
    if variant not in ("formula", "conjugating"):
        raise ValueError("variant must be 'formula' or 'conjugating'")
    has_s = s is not None
    if not has_s:
        fun = lambda si: (lambda q: Wp(q))
        s = np.array([0.0])
    else:
        fun = lambda si: (lambda q: Wp(si, q))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = {k: np.zeros((len(s), len(Y))) for k in ("p", "pY", "pYY", "ps")}
    for i, si in enumerate(s):
        W = fun(si)
        wv = W(Y)
        if np.any(wv < c0):
            raise DegenerateShear("shear drops below c0 on the Eikonal strip")
        p = eikonal_p(W, Y, variant)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(Y != 0, Y / p, np.nan)
        if variant == "formula":
            pY = np.sqrt(q) * wv
        else:
            pY = np.sqrt(q) / wv
        # value at Y = 0 from the series p ~ W(0)^{2/3} Y (or W^{-2/3})
        z0 = Y == 0
        pY[z0] = W(np.zeros(1))[0] ** (2.0 / 3.0 if variant == "formula" else -2.0 / 3.0)
        hY = 1e-4 * max(1.0, np.max(np.abs(Y)))
        pYp = eikonal_p(W, Y + hY, variant)
        pYm = eikonal_p(W, Y - hY, variant)
        out["p"][i], out["pY"][i] = p, pY
        out["pYY"][i] = (pYp - 2 * p + pYm) / hY ** 2
        if has_s:
            Wp_ = lambda q, si=si: Wp(si + h_s, q)
            Wm_ = lambda q, si=si: Wp(si - h_s, q)
            out["ps"][i] = (eikonal_p(Wp_, Y, variant) - eikonal_p(Wm_, Y, variant)) / (2 * h_s)
    diag = {"min_pY": float(np.min(out["pY"])), "max_abs_p": float(np.max(np.abs(out["p"])))}
    return EikonalMap(s, Y, out["p"], out["pY"], out["pYY"], out["ps"], variant, diag)


def eikonal_residual(Wp, Y, variant="formula", h=1e-3):
    """Residual of p_Y = (Y/p)^{1/2} W (or its conjugating analogue), with p_Y
    from sixth-order central differences of the closed form."""
    Y = np.asarray(Y, dtype=float)
    c = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
    dp = sum(ck * eikonal_p(Wp, Y + (k - 3) * h, variant) for k, ck in enumerate(c)) / h
    p = eikonal_p(Wp, Y, variant)
    W = Wp(Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = np.sqrt(Y / p) * (W if variant == "formula" else 1.0 / W)
    return np.abs(dp - rhs)


# -------------------------------------------------------------- coefficients

@dataclass
class CoeffSet:
    under: dict
    tau: dict
    alpha: dict
    bounds: dict


def _dz(X, z):
    return CubicSpline(z, X, axis=-1)(z, 1)


def coefficients(fields, z, lam, lamG_ratio, emap=None, paper_first_order=False):
    """Coefficient fields on an (s, z) strip grid.

    fields: dict of arrays (ns, nz) with keys w, w_s, w_z, w_zz, w_zzz, w_sz,
    u_s (d_s of the background part), v (vbar), psi, psi_zz, psi_zzz.
    lam = lambda(s), lamG_ratio = lambda_G'(s)/lambda(s) as arrays (ns,).
    emap: optional EikonalMap-like object exposing p, p_Y, p_YY, p_s on the same
    grid; then the transformed tau, alpha are returned as well. With
    paper_first_order=True the first-order term uses W^2 p_Y in place of the
    chain-rule term W^2 p_YY.
    """
    f = fields
    lam = np.asarray(lam, dtype=float)[:, None]
    r = np.asarray(lamG_ratio, dtype=float)[:, None]
    w, ws, wz, wzz, wzzz, wsz = f["w"], f["w_s"], f["w_z"], f["w_zz"], f["w_zzz"], f["w_sz"]
    if np.any(wz <= 0):
        raise DegenerateShear("wbar_z must be positive on the strip")
    us, v, psi, psizz, psizzz = f["u_s"], f["v"], f["psi"], f["psi_zz"], f["psi_zzz"]
    Dz = lambda X: _dz(X, z) / wz
    A = (w * ws * wz - 3 * wz * wzz) / wz + v * wz ** 2
    B = (w * wsz - ws * wz - wzzz) / wz + us * wz + v * wzz
    under = {
        "tau1": -2 * wzz + A - r * psi * wz ** 2,
        "tau0": Dz(A) + B - r * (Dz(psi * wz ** 2) + psi * wzz),
        "taum1": Dz(B) - r * (psizz + Dz(psi * wzz)),
        "taum2": -r * psizzz / wz,
        "alpha1": psi * wz ** 2 / lam,
        "alpha0": (Dz(psi * wz ** 2) + psi * wzz) / lam,
        "alpham1": (psizz + Dz(psi * wzz)) / lam,
        "alpham2": psizzz / (lam * wz),
    }
    tau, alpha = {}, {}
    if emap is not None:
        pY, pYY, ps, Z = emap.p_Y, emap.p_YY, emap.p_s, emap.p
        W2 = wz ** 2
        den = pY ** 2 * W2
        first = W2 * (pY if paper_first_order else pYY)
        tau["tau1"] = (pY * under["tau1"] - den * Z * ps + first) / den
        for k in ("tau0", "taum1", "taum2"):
            tau[k] = under[k] / den
        alpha["alpha1"] = under["alpha1"] * pY / den
        for k in ("alpha0", "alpham1", "alpham2"):
            alpha[k] = under[k] / den
    bounds = {**{"under_" + k: float(np.max(np.abs(x))) for k, x in under.items()},
              **{k: float(np.max(np.abs(x))) for k, x in tau.items()},
              **{k: float(np.max(np.abs(x))) for k, x in alpha.items()}}
    return CoeffSet(under, tau, alpha, bounds)


def fs_strip_fields(bg, s, z):
    """Background-only (eps = 0) strip fields for coefficients()."""
    S, Zz = np.meshgrid(np.asarray(s, float), np.asarray(z, float), indexing="ij")
    es = bg.eta_star
    fd = lambda k: bg.profile.f(es * Zz, k)
    xn = bg.x_of_s(S) ** bg.n
    nes2 = bg.n * es ** 2
    return {
        "w": xn * fd(1), "w_s": nes2 * fd(1),
        "w_z": xn * es * fd(2), "w_zz": xn * es ** 2 * fd(3), "w_zzz": xn * es ** 3 * fd(4),
        "w_sz": nes2 * es * fd(2), "u_s": nes2 * fd(1),
        "v": -bg.n * es * fd(0),
        "psi": xn * fd(0) / es, "psi_zz": xn * es * fd(2), "psi_zzz": xn * es ** 2 * fd(3),
    }
