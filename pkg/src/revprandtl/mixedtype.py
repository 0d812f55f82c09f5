"""Toy mixed-type problem  Z d_s w - d_Z^2 w = F  on (1, 1 + Lbar) x R.

Data are prescribed at the inflow ends: w(1, Z) for Z > 0 and w(1 + Lbar, Z)
for Z < 0. The solver extends everything to a periodic s-window, removes the
corner values with cutoffs, transforms in s, solves the two half-line Airy
problems per frequency, fixes the common trace on Z = 0 from the fractional
interface equation and lifts back.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import airy_greens as ag


class InterfaceSolveFailed(RuntimeError):
    pass


class ExtensionMismatch(ValueError):
    pass


# ----------------------------------------------------------------- cutoffs

def smoothstep(x, der=0):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1 (and derivatives up to 2)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if der == 0:
        out[x >= 1] = 1.0
    m = (x > 0) & (x < 1)
    y = x[m]
    g = 1.0 / y - 1.0 / (1.0 - y)
    S = 0.5 * (1.0 - np.tanh(0.5 * g))         # 1/(1 + e^g) without overflow
    if der == 0:
        out[m] = S
        return out
    g1 = -1.0 / y ** 2 - 1.0 / (1.0 - y) ** 2
    S1 = -S * (1 - S) * g1
    if der == 1:
        out[m] = S1
        return out
    g2 = 2.0 / y ** 3 - 2.0 / (1.0 - y) ** 3
    out[m] = -S1 * (1 - 2 * S) * g1 - S * (1 - S) * g2
    return out


def chi(p, der=0):
    """Even bump equal to 1 on |p| < 9/10 and 0 for |p| > 1."""
    p = np.asarray(p, dtype=float)
    x = (1.0 - np.abs(p)) / 0.1
    if der == 0:
        return smoothstep(x)
    if der == 1:
        return -np.sign(p) * smoothstep(x, 1) / 0.1
    return smoothstep(x, 2) / 0.01


@dataclass
class CutoffFamily:
    """The cutoffs used to localise near Z = 0 and near the corners.

    ell is the s-scale of the corner cutoffs; it must not exceed Lbar so the
    left cutoff vanishes at the right end and vice versa.
    """
    delta: float = 0.5
    Lbar: float = 1.0
    ell: float = None

    def __post_init__(self):
        if self.ell is None:
            self.ell = min(self.Lbar, 1.0)
        if not 0 < self.ell <= self.Lbar:
            raise ValueError("need 0 < ell <= Lbar")

    def chi_I(self, Z, der=0):
        return chi(np.asarray(Z) / self.delta, der) / self.delta ** der

    def chi_O(self, Z, der=0):
        k = 500.0
        v = self.chi_I(k * np.asarray(Z), der) * k ** der
        return 1.0 - v if der == 0 else -v

    def chi_Oj(self, Z, j, der=0):
        k = 1000.0 * j
        v = self.chi_I(k * np.asarray(Z), der) * k ** der
        return 1.0 - v if der == 0 else -v

    def chi_left(self, s, der=0):
        return chi((np.asarray(s) - 1.0) / self.ell, der) / self.ell ** der

    def chi_right(self, s, der=0):
        return chi((np.asarray(s) - 1.0 - self.Lbar) / self.ell, der) / self.ell ** der

    @staticmethod
    def chi_plus(z):
        """1 for z > 1/4, 0 for z < 1/8."""
        return smoothstep((np.asarray(z, dtype=float) - 0.125) / 0.125)

    @staticmethod
    def chi_minus(z):
        """1 for z < 4/5, 0 for z > 9/10."""
        return 1.0 - smoothstep((np.asarray(z, dtype=float) - 0.8) / 0.1)

    def phi(self, which, s, Z):
        """phi = chi(Z) chi_side(s) and (Z d_s - d_Z^2) phi, broadcast over s and Z."""
        cs = self.chi_left if which == "left" else self.chi_right
        s = np.asarray(s, dtype=float)[:, None]
        Z = np.asarray(Z, dtype=float)[None, :]
        val = chi(Z) * cs(s)
        op = Z * chi(Z) * cs(s, 1) - chi(Z, 2) * cs(s)
        return val, op

    def nesting(self, Z, jmax=8):
        """Pointwise support/level-set inclusions on the sample points Z.

        Returns a dict of booleans for supp chi_{O,j} inside {chi_{O,j+1} = 1}
        (j < jmax), the reverse inclusion, and supp chi_O inside {chi_{O,4} = 1}.
        """
        Z = np.asarray(Z, dtype=float)
        out = {}
        fwd, rev = True, True
        for j in range(1, jmax):
            a, b = self.chi_Oj(Z, j), self.chi_Oj(Z, j + 1)
            fwd &= bool(np.all(np.abs(b[a > 0] - 1) < 1e-14))
            rev &= bool(np.all(np.abs(a[b > 0] - 1) < 1e-14))
        out["supp_j_in_level_jp1"] = fwd
        out["supp_jp1_in_level_j"] = rev
        o, o4 = self.chi_O(Z), self.chi_Oj(Z, 4)
        out["supp_O_in_level_O4"] = bool(np.all(np.abs(o4[o > 0] - 1) < 1e-14))
        return out


# --------------------------------------------------------- localised forcing

def assemble_FI(Omega, Omega_Z, phi, phi_Y, coeffs, mu_prime, eps, Z, cutoffs,
                form="commuted"):
    """Forcing of the localised vorticity Omega_I = chi_I Omega.

    coeffs holds 'tau1', 'tau0', 'taum1', 'taum2', 'alpha1', 'alpha0',
    'alpham1', 'alpham2' on the (s, Z) grid; mu_prime is a function of s.
    form='direct' multiplies the full equation by chi_I; form='commuted'
    works with Omega_I and collects the cutoff commutators separately.
    """
    Z = np.asarray(Z, dtype=float)[None, :]
    mu_prime = np.asarray(mu_prime, dtype=float).reshape(-1, 1)
    d = cutoffs.delta
    cI, c1, c2 = cutoffs.chi_I(Z), chi(Z / d, 1), chi(Z / d, 2)
    k = coeffs
    S = cI * (k["alpha1"] * Omega_Z + k["alpha0"] * Omega
              + k["alpham1"] * phi_Y + k["alpham2"] * phi)
    if form == "direct":
        return (cI * (k["tau1"] * Omega_Z + k["tau0"] * Omega
                      + k["taum1"] * phi_Y + k["taum2"] * phi)
                - eps * mu_prime * S
                - c2 * Omega / d ** 2 - (2.0 / d) * c1 * Omega_Z)
    if form != "commuted":
        raise ValueError("form must be 'direct' or 'commuted'")
    OI = cI * Omega
    OI_Z = cI * Omega_Z + c1 * Omega / d
    F1 = k["tau1"] * OI_Z + k["tau0"] * OI
    F2 = cI * (k["taum1"] * phi_Y + k["taum2"] * phi)
    Fcut = -(c2 / d ** 2 + k["tau1"] * c1 / d) * Omega - (2.0 / d) * c1 * Omega_Z
    return F1 + F2 - eps * mu_prime * S + Fcut


# ------------------------------------------------------------ extended data

def _d2(f, Z, h=1e-3):
    w = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
    return sum(wk * f(Z + (k - 3) * h) for k, wk in enumerate(w)) / h ** 2


@dataclass
class ExtendedField:
    """Forcing continued to the periodic s-window.

    Region tags: s < 1 uses (Z d_s - d_Z^2)(chi_left w_left) on Z > 0 and 0
    below; s > 1 + Lbar uses the chi_right w_right analogue on Z < 0 and 0
    above; in between it is F. The corner homogenisation forcing is removed.
    """
    F: callable
    omega_left: callable
    omega_right: callable
    cutoffs: CutoffFamily
    s: np.ndarray
    omega_left_zz: callable = None
    omega_right_zz: callable = None
    omega1: float = 0.0
    omegaL: float = 0.0

    def __post_init__(self):
        Lbar = self.cutoffs.Lbar
        eps = 1e-12 * max(1.0, Lbar)
        self.region = np.where(self.s < 1 - eps, -1, np.where(self.s > 1 + Lbar + eps, 1, 0))
        if self.omega_left_zz is None:
            self.omega_left_zz = lambda Z: _d2(self.omega_left, Z)
        if self.omega_right_zz is None:
            self.omega_right_zz = lambda Z: _d2(self.omega_right, Z)

    def __call__(self, Z, homogenized=True):
        """Samples on (s, Z) with Z of any shape; returns (len(s),) + Z.shape."""
        Z = np.asarray(Z, dtype=float)
        shp = Z.shape
        Zf = Z.ravel()
        out = np.zeros((len(self.s), Zf.size))
        cut = self.cutoffs
        mid = self.region == 0
        if np.any(mid):
            out[mid] = self.F(self.s[mid, None], Zf[None, :])
        left = self.region < 0
        up = Zf > 0
        if np.any(left) and np.any(up):
            sl, zu = self.s[left, None], Zf[None, up]
            out[np.ix_(left, up)] = (zu * cut.chi_left(sl, 1) * self.omega_left(zu)
                                     - cut.chi_left(sl) * self.omega_left_zz(zu))
        right = self.region > 0
        dn = Zf < 0
        if np.any(right) and np.any(dn):
            sr, zd = self.s[right, None], Zf[None, dn]
            out[np.ix_(right, dn)] = (zd * cut.chi_right(sr, 1) * self.omega_right(zd)
                                      - cut.chi_right(sr) * self.omega_right_zz(zd))
        if homogenized:
            out -= self.homogenization(Zf)
        return out.reshape((len(self.s),) + shp)

    def homogenization(self, Z):
        Z = np.asarray(Z, dtype=float).ravel()
        out = np.zeros((len(self.s), Z.size))
        if self.omega1 != 0:
            out += self.omega1 * self.cutoffs.phi("left", self.s, Z)[1]
        if self.omegaL != 0:
            out += self.omegaL * self.cutoffs.phi("right", self.s, Z)[1]
        return out

    def corrector(self, Z):
        """omega1 phi_left + omega_{1+Lbar} phi_right on (s, Z)."""
        Z = np.asarray(Z, dtype=float).ravel()
        return (self.omega1 * self.cutoffs.phi("left", self.s, Z)[0]
                + self.omegaL * self.cutoffs.phi("right", self.s, Z)[0])


# ------------------------------------------------------------------- solver

@dataclass
class TraceSet:
    s: np.ndarray
    gamma1: np.ndarray
    gamma2_upper: np.ndarray
    gamma2_lower: np.ndarray
    gamma3_identity: np.ndarray
    gamma3_difference: np.ndarray = None


@dataclass
class ToySolution:
    s: np.ndarray
    Z: np.ndarray
    omega: np.ndarray
    traces: TraceSet
    diagnostics: dict = field(default_factory=dict)
    problem: object = None

    def evaluate(self, Z):
        """omega on the interval nodes at arbitrary heights Z."""
        return self.problem.evaluate(Z)


def _fft_grid(Lbar, Ns, margin):
    ds = Lbar / (Ns - 1)
    m = int(np.ceil(margin / ds))
    Nw = Ns + 2 * m
    mr = m + (1 - Nw % 2)              # odd window: no unpaired Nyquist mode
    Nw = Ns + m + mr
    s = 1.0 + ds * (np.arange(Nw) - m)
    return s, ds, m


class ToyProblem:
    """Setup, interface solve and lift for one set of data."""

    def __init__(self, F, omega_left, omega_right, Lbar, Ns=256, NZ=256, Zcut=12.0,
                 delta=0.5, margin=2.0, ell=None, omega_left_zz=None,
                 omega_right_zz=None):
        if Ns < 4 or NZ < 4:
            raise ValueError("grid too small")
        self.Lbar = float(Lbar)
        self.cutoffs = CutoffFamily(delta, self.Lbar, ell)
        self.sw, self.ds, self.m = _fft_grid(self.Lbar, Ns, margin)
        self.Ns = Ns
        self.Nw = len(self.sw)
        self.xi = 2 * np.pi * np.fft.rfftfreq(self.Nw, d=self.ds)
        self.t = np.linspace(0.0, Zcut, NZ // 2 + 1)
        o1 = float(np.asarray(omega_left(np.array([0.0])))[0])
        oL = float(np.asarray(omega_right(np.array([0.0])))[0])
        if not (np.isfinite(o1) and np.isfinite(oL)):
            raise ExtensionMismatch("corner values must be finite")
        self.field = ExtendedField(F, omega_left, omega_right, self.cutoffs, self.sw,
                                   omega_left_zz, omega_right_zz, o1, oL)
        self.nsub = ag.choose_nsub(self.xi[-1:], self.t)
        self.gamma_hat = None

    @property
    def interior(self):
        return slice(self.m, self.m + self.Ns)

    def _particular(self, side, t):
        sg = 1.0 if side == "+" else -1.0
        tq, _ = ag.gauss_nodes(t, self.nsub)
        Fh = np.fft.rfft(self.field(sg * tq), axis=0)
        om = np.zeros((len(self.xi), len(t)), dtype=complex)
        omz = np.zeros_like(om)
        G = np.zeros(len(self.xi), dtype=complex)
        om[0], omz[0], G[0] = ag.zero_mode(side, 0.0, t, Fq=Fh[0], nsub=self.nsub)
        om[1:], omz[1:], G[1:] = ag.half_line_batch(side, self.xi[1:], 0.0, t,
                                                    Fq=Fh[1:], nsub=self.nsub)
        return om, omz, G

    def interface_matrix(self):
        col = np.fft.irfft(ag.C0 * self.xi ** (1.0 / 3.0), n=self.Nw)
        idx = np.arange(self.m + 1, self.m + self.Ns - 1)
        return col[(idx[:, None] - idx[None, :]) % self.Nw], idx

    def solve(self):
        up = self._particular("+", self.t)
        dn = self._particular("-", self.t)
        rhs_full = np.fft.irfft(up[2] - dn[2], n=self.Nw)
        A, idx = self.interface_matrix()
        try:
            gam = linalg.solve(A, rhs_full[idx], assume_a="pos")
        except (linalg.LinAlgError, ValueError) as exc:
            raise InterfaceSolveFailed(str(exc)) from exc
        if not np.all(np.isfinite(gam)):
            raise InterfaceSolveFailed("non-finite interface trace")
        gw = np.zeros(self.Nw)
        gw[idx] = gam
        self.gamma_Q = gw
        self.gamma_hat = np.fft.rfft(gw)
        self._cache = {"+": up, "-": dn, "t": self.t}
        self.interface_residual = float(np.max(np.abs(A @ gam - rhs_full[idx]))) if gam.size else 0.0
        return self

    def lift_modes(self, side, t):
        """Mode-wise omega and omega_Z on |Z| = t for the solved trace."""
        if self.gamma_hat is None:
            raise RuntimeError("call solve() first")
        if t is self.t:
            om, omz, _ = self._cache[side]
        else:
            om, omz, _ = self._particular(side, t)
        om = om.copy()
        omz = omz.copy()
        y, yz = ag.homogeneous_batch(side, self.xi[1:], t)
        om[1:] += self.gamma_hat[1:, None] * y
        omz[1:] += self.gamma_hat[1:, None] * yz
        om[0] += self.gamma_hat[0]
        return om, omz

    def window_field(self, Z):
        """omega, omega_Z and omega_ZZ (identity path) on the window at heights Z."""
        Z = np.asarray(Z, dtype=float)
        out = [np.zeros((self.Nw, len(Z))) for _ in range(3)]
        for side, mask in (("+", Z >= 0), ("-", Z < 0)):
            if not np.any(mask):
                continue
            tz = np.abs(Z[mask])
            t = np.union1d(self.t, tz)
            if np.array_equal(t, self.t):
                t = self.t
            om, omz = self.lift_modes(side, t)
            pos = np.searchsorted(t, tz)
            w = np.fft.irfft(om[:, pos], n=self.Nw, axis=0)
            wz = np.fft.irfft(omz[:, pos], n=self.Nw, axis=0)
            ws = np.fft.irfft(1j * self.xi[:, None] * om[:, pos], n=self.Nw, axis=0)
            Zs = Z[mask][None, :]
            wzz = Zs * ws - self.field(Z[mask])
            out[0][:, mask], out[1][:, mask], out[2][:, mask] = w, wz, wzz
        # add back the corner corrector (its Z-derivatives vanish near Z = 0)
        corr = self.field.corrector(Z)
        out[0] += corr
        return out

    def evaluate(self, Z):
        return self.window_field(Z)[0][self.interior]

    def d_s(self, values):
        """Spectral s-derivative of window samples (first axis)."""
        vh = np.fft.rfft(values, axis=0)
        return np.fft.irfft(1j * self.xi.reshape((-1,) + (1,) * (values.ndim - 1)) * vh,
                            n=self.Nw, axis=0)


def solve_toy(F, omega_left, omega_right, Lbar, Ns=256, NZ=256, Zcut=12.0, delta=0.5,
              margin=2.0, ell=None, omega_left_zz=None, omega_right_zz=None, fd_step=0.01):
    """Solve the toy problem and return the field on the interval nodes.

    F(s, Z) must broadcast; omega_left is used on Z > 0, omega_right on Z < 0.
    """
    prob = ToyProblem(F, omega_left, omega_right, Lbar, Ns, NZ, Zcut, delta, margin, ell,
                      omega_left_zz, omega_right_zz).solve()
    t = prob.t
    Z = np.concatenate([-t[:0:-1], t])
    omega = prob.evaluate(Z)
    s = prob.sw[prob.interior]

    # traces at Z = 0 from both sides
    up_om, up_omz = prob.lift_modes("+", prob.t)
    dn_om, dn_omz = prob.lift_modes("-", prob.t)
    irf = lambda v: np.fft.irfft(v, n=prob.Nw)[prob.interior]
    gamma1 = irf(up_om[:, 0]) + prob.field.corrector([0.0])[prob.interior, 0]
    g2u, g2d = irf(up_omz[:, 0]), irf(dn_omz[:, 0])
    g3_id = -prob.field(np.array([0.0]), homogenized=False)[prob.interior, 0]
    h = fd_step
    near = prob.evaluate(h * np.arange(-3, 4))
    w = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
    g3_fd = near @ w / h ** 2
    traces = TraceSet(s, gamma1, g2u, g2d, g3_id, g3_fd)

    diag = {
        "window": [float(prob.sw[0]), float(prob.sw[-1])],
        "n_window": prob.Nw,
        "interface_residual": prob.interface_residual,
        "corner_left": prob.field.omega1,
        "corner_right": prob.field.omegaL,
        "corner_mismatch": float(abs(gamma1[0] - prob.field.omega1)
                                 + abs(gamma1[-1] - prob.field.omegaL)),
        "neumann_jump": float(np.max(np.abs(g2u - g2d)[1:-1])),
        "gamma3_gap": float(np.max(np.abs(g3_id - g3_fd))),
    }
    return ToySolution(s, Z, omega, traces, diag, prob)


def lift(gamma, field, t, nsub=None):
    """Lift an exterior-zero trace gamma (window samples) with forcing field.

    field is an ExtendedField on the same periodic window. Returns the upper
    and lower (omega, omega_Z, omega_ZZ) arrays of shape (len(s), len(t)),
    the second derivatives by the local identity omega_ZZ = Z d_s omega - F.
    """
    s = field.s
    ds = s[1] - s[0]
    xi = 2 * np.pi * np.fft.rfftfreq(len(s), d=ds)
    if nsub is None:
        nsub = ag.choose_nsub(xi[-1:], t)
    gh = np.fft.rfft(np.asarray(gamma, dtype=float))
    out = {}
    for side, sg in (("+", 1.0), ("-", -1.0)):
        tq, _ = ag.gauss_nodes(t, nsub)
        Fh = np.fft.rfft(field(sg * tq), axis=0)
        om = np.zeros((len(xi), len(t)), dtype=complex)
        omz = np.zeros_like(om)
        om[0], omz[0], _ = ag.zero_mode(side, gh[0], t, Fq=Fh[0], nsub=nsub)
        if len(xi) > 1:
            om[1:], omz[1:], _ = ag.half_line_batch(side, xi[1:], gh[1:], t, Fq=Fh[1:], nsub=nsub)
        w = np.fft.irfft(om, n=len(s), axis=0)
        wz = np.fft.irfft(omz, n=len(s), axis=0)
        ws = np.fft.irfft(1j * xi[:, None] * om, n=len(s), axis=0)
        wzz = sg * t[None, :] * ws - field(sg * t)
        out[side] = (w, wz, wzz)
    return out


def i_norm(solution, delta=None):
    """Discrete I-norm of chi_I omega on the window: L^inf_Z of the s-norms."""
    prob = solution.problem
    delta = prob.cutoffs.delta if delta is None else delta
    Z = solution.Z[np.abs(solution.Z) < delta]
    w, wz, wzz = prob.window_field(Z)
    cI = prob.cutoffs.chi_I(Z)[None, :]
    cI1 = prob.cutoffs.chi_I(Z, 1)[None, :]
    cI2 = prob.cutoffs.chi_I(Z, 2)[None, :]
    O = cI * w
    O1 = cI * wz + cI1 * w
    O2 = cI * wzz + 2 * cI1 * wz + cI2 * w
    mult = (1 + prob.xi ** 2) ** (-1.0 / 6.0)
    O2m = np.fft.irfft(mult[:, None] * np.fft.rfft(O2, axis=0), n=prob.Nw, axis=0)
    lp = lambda v, p: (np.sum(np.abs(v) ** p, axis=0) * prob.ds) ** (1.0 / p)
    parts = {
        "Linf_Z_L6_s": float(np.max(lp(O, 6))),
        "Linf_Z_L52_s_dZ": float(np.max(lp(O1, 2.5))),
        "Linf_Z_L52_s_dZZ_m13": float(np.max(lp(O2m, 2.5))),
    }
    parts["total"] = sum(parts.values())
    return parts


# ------------------------------------------------------- manufactured cases

def bump(x):
    """Smooth bump supported in (0, 1)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = (x > 0) & (x < 1)
    out[m] = np.exp(4.0 - 1.0 / (x[m] * (1.0 - x[m])))
    return out


def manufactured(Lbar=1.0, kind="bump", a0=1.0, b0=-0.7):
    """Exact solutions for testing: returns dict with omega, F, data callables.

    kind='bump':  omega = exp(-Z^2) g(s) with g a bump inside the interval,
                  zero inflow data.
    kind='data':  adds q(Z) a(s) + q(-Z) b(s) with q(Z) = Z^5 e^{-Z^2} on Z > 0,
                  giving nonzero inflow data with zero corner values.
    """
    c = 1.0 + 0.5 * Lbar

    def g(s, der=0):
        x = (s - 1.0) / Lbar
        if der == 0:
            return bump(x)
        y = np.zeros_like(x)
        m = (x > 0) & (x < 1)
        xm = x[m]
        y[m] = bump(xm) * (1 - 2 * xm) / (xm * (1 - xm)) ** 2 / Lbar
        return y

    def q(Z, der=0):
        Z = np.asarray(Z, dtype=float)
        Zp = np.maximum(Z, 0.0)
        e = np.exp(-Zp ** 2)
        if der == 0:
            return Zp ** 5 * e
        return (20 * Zp ** 3 - 22 * Zp ** 5 + 4 * Zp ** 7) * e

    # a: a0 near s = 1, zero beyond the middle; b: zero near 1, b0 near 1 + Lbar
    def a(s, der=0):
        x = (c - s) / (0.25 * Lbar)
        return a0 * (smoothstep(x) if der == 0 else -smoothstep(x, 1) / (0.25 * Lbar))

    def b(s, der=0):
        x = (s - c) / (0.25 * Lbar)
        return b0 * (smoothstep(x) if der == 0 else smoothstep(x, 1) / (0.25 * Lbar))

    data = kind == "data"
    if kind not in ("bump", "data"):
        raise ValueError("kind must be 'bump' or 'data'")

    def omega(s, Z):
        s, Z = np.broadcast_arrays(np.asarray(s, float), np.asarray(Z, float))
        out = np.exp(-Z ** 2) * g(s)
        if data:
            out = out + q(Z) * a(s) + q(-Z) * b(s)
        return out

    def F(s, Z):
        s, Z = np.broadcast_arrays(np.asarray(s, float), np.asarray(Z, float))
        e = np.exp(-Z ** 2)
        out = Z * e * g(s, 1) - (4 * Z ** 2 - 2) * e * g(s)
        if data:
            out = out + Z * (q(Z) * a(s, 1) + q(-Z) * b(s, 1)) - (q(Z, 2) * a(s) + q(-Z, 2) * b(s))
        return out

    left = (lambda Z: a0 * q(Z)) if data else (lambda Z: np.zeros_like(np.asarray(Z, float)))
    right = (lambda Z: b0 * q(-Z)) if data else (lambda Z: np.zeros_like(np.asarray(Z, float)))
    left_zz = (lambda Z: a0 * q(Z, 2)) if data else left
    right_zz = (lambda Z: b0 * q(-Z, 2)) if data else right
    return {"omega": omega, "F": F, "omega_left": left, "omega_right": right,
            "omega_left_zz": left_zz, "omega_right_zz": right_zz}
