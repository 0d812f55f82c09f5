"""Fractional Dirichlet Laplacian of order 1/6 on an interval and the
interface Poisson solve.

Functions live on (0, ell) (callers shift to (1, 1 + Lbar)) and vanish outside.
Grid values are the N interior samples x_i = i h, h = ell/(N+1).

Two independent evaluation routes are provided:
  * 'multiplier': the function is upsampled by local cubics, its piecewise
    linear interpolant is hit with the exact (aliased) symbol |xi|^{1/3} on a
    periodic window, and the image contributions are subtracted in closed form;
  * 'kernel': product integration of local cubics against the principal-value
    kernel |x - y|^{-4/3}, with the exterior part integrated exactly.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

S_FRAC = 1.0 / 6.0
KERNEL_CONST = (4.0 ** S_FRAC * special.gamma(0.5 + S_FRAC)
                / (np.sqrt(np.pi) * abs(special.gamma(-S_FRAC))))


class SingularSystemError(RuntimeError):
    pass


@dataclass
class TraceFunction:
    """Interior samples of an exterior-zero trace on (a, a + ell)."""
    values: np.ndarray
    ell: float
    a: float = 0.0
    norms: dict = field(default_factory=dict)

    @property
    def h(self):
        return self.ell / (len(self.values) + 1)

    @property
    def x(self):
        return self.a + self.h * np.arange(1, len(self.values) + 1)


def grid(N, ell):
    h = ell / (N + 1)
    return h * np.arange(1, N + 1), h


# ----------------------------------------------------------- local cubics

def _cubic_weights(N, r):
    """Matrix mapping the N+2 node values (ends included) to the r-fold
    refined grid through local 4-point Lagrange cubics."""
    M = (N + 1) * r + 1
    W = np.zeros((M, N + 2))
    for k in range(N + 1):
        st = min(max(k - 1, 0), N - 2) if N >= 2 else 0
        nodes = np.arange(st, st + 4)
        nodes = nodes[nodes <= N + 1]
        for q in range(r + (1 if k == N else 0)):
            y = k + q / r
            for j, nj in enumerate(nodes):
                others = np.delete(nodes, j)
                W[k * r + q, nj] += np.prod((y - others) / (nj - others))
    return W


def upsample(u, r):
    """Local cubic refinement of interior samples (zero ends) by factor r."""
    u = np.asarray(u)
    N = u.shape[0]
    full = np.concatenate([np.zeros((1,) + u.shape[1:]), u, np.zeros((1,) + u.shape[1:])])
    return _cubic_weights(N, r) @ full


# ------------------------------------------------------- multiplier route

def p1_symbol(theta, h):
    """Aliased symbol of |xi|^{1/3} acting on piecewise linear interpolants,
    sampled back on the nodes; theta = xi h / 2 in [-pi/2, pi/2]."""
    th = np.abs(np.asarray(theta, dtype=float))
    out = np.zeros_like(th)
    nz = th > 0
    q = th[nz] / np.pi
    out[nz] = ((2.0 / h) ** (1.0 / 3.0) * np.sin(th[nz]) ** 2 * np.pi ** (-5.0 / 3.0)
               * (special.zeta(5.0 / 3.0, q) + special.zeta(5.0 / 3.0, 1.0 - q)))
    return out


def _apply_multiplier(u, ell, r=8, window=4.0):
    u = np.asarray(u, dtype=float)
    N = u.shape[0]
    h = ell / (N + 1)
    hf = h / r
    v = upsample(u, r)                      # (N+1) r + 1 fine values on [0, ell]
    nf = v.shape[0]
    M = int(round(window * (N + 1) * r))
    P = M * hf
    pad = np.zeros((M,) + v.shape[1:])
    pad[:nf] = v
    xi = 2 * np.pi * np.fft.fftfreq(M, d=hf)
    sym = p1_symbol(xi * hf / 2, hf)
    per = np.real(np.fft.ifft(sym.reshape((-1,) + (1,) * (v.ndim - 1)) * np.fft.fft(pad, axis=0), axis=0))
    # add back the image contributions removed by periodization
    xf = hf * np.arange(nf)
    idx = r * np.arange(1, N + 1)
    xi_nodes = xf[idx]
    d = (xi_nodes[:, None] - xf[None, :]) / P
    ker = special.zeta(4.0 / 3.0, 1.0 + d) + special.zeta(4.0 / 3.0, 1.0 - d)
    wts = np.full(nf, hf)
    wts[[0, -1]] = hf / 2
    corr = KERNEL_CONST * P ** (-4.0 / 3.0) * (ker * wts) @ v
    return per[idx] + corr


# ------------------------------------------------------------ kernel route

def _moment(m, a, b):
    """int_a^b t^m |t|^{-4/3} dt for an interval not straddling 0 (m >= 1 if 0 is an end)."""
    p = m - 1.0 / 3.0
    if a >= 0:
        return (b ** p - a ** p) / p if p != 0 else np.log(b / a)
    # t < 0: t^m |t|^{-4/3} = (-1)^m |t|^{p-1}
    return (-1) ** m * ((-a) ** p - (-b) ** p) / p


_KX, _KW = np.polynomial.legendre.leggauss(10)


def kernel_matrix(N, ell):
    """Matrix of the principal-value kernel route on N interior nodes."""
    h = ell / (N + 1)
    nodes_all = np.arange(N + 2)
    A = np.zeros((N, N + 2))
    starts = np.clip(np.arange(N + 1) - 1, 0, max(N - 2, 0))
    # Lagrange weights at Gauss nodes, per cell (in units of h)
    tau = 0.5 * (1 + _KX)                              # cell-local position in [0, 1]
    Lw = np.zeros((N + 1, len(tau), 4))
    for k in range(N + 1):
        nd = np.arange(starts[k], starts[k] + 4)
        y = k + tau
        for j in range(4):
            others = np.delete(nd, j)
            Lw[k, :, j] = np.prod((y[:, None] - others) / (nd[j] - others), axis=1)
    for i in range(1, N + 1):
        row = np.zeros(N + 2)
        diag = 0.0
        near = {i - 2, i - 1, i, i + 1}
        far = np.array([k for k in range(N + 1) if k not in near])
        if far.size:
            y = far[:, None] + tau[None, :]
            K = np.abs(y - i) ** (-4.0 / 3.0) * (0.5 * _KW)[None, :] * h ** (-1.0 / 3.0)
            diag += K.sum()
            contrib = np.einsum("cq,cqj->cj", K, Lw[far])
            for j in range(4):
                np.add.at(row, starts[far] + j, -contrib[:, j])
        for k in near:
            if k < 0 or k > N:
                continue
            nd = np.arange(starts[k], starts[k] + 4)
            t = (nd - i).astype(float)
            V = np.vander(t, 4, increasing=True)
            Cinv = np.linalg.inv(V)                    # coefficients c_m = Cinv[m] @ u
            a, b = float(k - i), float(k + 1 - i)
            ms = range(1, 4) if k in (i - 1, i) else range(0, 4)
            for m in ms:
                mom = _moment(m, a, b) * h ** (-1.0 / 3.0)
                row[nd] -= Cinv[m] * mom
                if m == 0:
                    diag += mom
        x = i * h
        diag += 3.0 * (x ** (-1.0 / 3.0) + (ell - x) ** (-1.0 / 3.0))
        row[i] += diag
        A[i - 1] = row
    return KERNEL_CONST * A[:, 1:-1]


# --------------------------------------------------- closed-form P1 matrix

def p1_matrix(N, ell):
    """Galerkin-free collocation of (-Delta)^{1/6} on piecewise linear hats.

    Uses (-Delta)^{1/6}|x| = -|x|^{2/3}/(Gamma(5/3) sin(pi/3)); the resulting
    matrix is symmetric Toeplitz and positive definite.
    """
    h = ell / (N + 1)
    k = np.arange(N, dtype=float)
    a = (np.abs(k + 1) ** (2 / 3) - 2 * k ** (2 / 3) + np.abs(k - 1) ** (2 / 3))
    a *= h ** (-1.0 / 3.0) / (2 * special.gamma(5.0 / 3.0) * np.sin(np.pi / 3))
    return linalg.toeplitz(a)


# -------------------------------------------------------------- public API

def frac_laplacian_apply(u, ell=None, method="multiplier", r=8):
    """(-Delta)^{1/6} of an exterior-zero function, sampled at interior nodes."""
    if isinstance(u, TraceFunction):
        ell, vals = u.ell, u.values
    else:
        vals = np.asarray(u, dtype=float)
    if method == "multiplier":
        return _apply_multiplier(vals, ell, r)
    if method == "kernel":
        return kernel_matrix(len(vals), ell) @ vals
    if method == "p1":
        return p1_matrix(len(vals), ell) @ vals
    raise ValueError("method must be 'multiplier', 'kernel' or 'p1'")


def frac_laplacian_matrix(N, ell, method="multiplier", r=8):
    if method == "multiplier":
        return _apply_multiplier(np.eye(N), ell, r)
    if method == "p1":
        return p1_matrix(N, ell)
    return kernel_matrix(N, ell)


def solve_interface(G, ell, method="multiplier", r=8, A=None):
    """Exterior-zero gamma with (-Delta_D)^{1/6} gamma = G at the interior nodes."""
    G = np.asarray(G, dtype=float)
    if A is None:
        A = frac_laplacian_matrix(len(G), ell, method, r)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            lu = linalg.lu_factor(A, check_finite=True)
    except linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    piv = np.abs(np.diag(lu[0]))
    if piv.min() <= 1e-14 * piv.max() or piv.max() == 0:
        raise SingularSystemError("fractional matrix is numerically singular")
    gam = linalg.lu_solve(lu, G)
    res = np.sqrt(np.mean((A @ gam - G) ** 2))
    return gam, res


def riesz_lp_ratio(H, ell, p=2.5, N=256, pad=40.0):
    """||F^{-1}|xi|^{1/3} gamma^||_{L^p(R)} / ||G||_{L^p(0, ell)} for G = H(s/ell).

    The exterior part of (-Delta)^{1/6} gamma is the tail integral
    -C int gamma(y)|x - y|^{-4/3} dy, evaluated on a padded window plus an
    analytic far tail.
    """
    x, h = grid(N, ell)
    G = H(x / ell)
    gam, _ = solve_interface(G, ell)
    # interior: (-Delta)^{1/6} gamma = G
    inner = np.sum(np.abs(G) ** p) * h
    mass = np.sum(gam) * h
    ext = 0.0
    for side in (-1, 1):
        d = ell * np.logspace(-3, np.log10(pad), 400)
        xs = (ell + d) if side > 0 else -d
        vals = -KERNEL_CONST * (np.abs(xs[:, None] - x[None, :]) ** (-4.0 / 3.0)) @ gam * h
        ext += np.trapezoid(np.abs(vals) ** p, d)
        # far tail ~ C mass |x|^{-4/3}
        D = pad * ell
        ext += (KERNEL_CONST * abs(mass)) ** p * D ** (1 - 4 * p / 3) / (4 * p / 3 - 1)
    lhs = (inner + ext) ** (1.0 / p)
    return lhs / inner ** (1.0 / p)


# ------------------------------------------------------------ homogenization

def homogenize(omega1, omegaL, s, Z, cutoffs):
    """Corner correction that makes the interface trace vanish at both ends.

    omega1 and omegaL are the corner values of the trace at s = 1 and
    s = 1 + Lbar. Returns (Omega_hom, F_hom): the corrector omega1 phi_left +
    omegaL phi_right on the (s, Z) grid and its forcing (Z d_s - d_Z^2) of it.
    Subtracting the corrector from a solution leaves a trace with zero
    end values.
    """
    vl, fl = cutoffs.phi("left", s, Z)
    vr, fr = cutoffs.phi("right", s, Z)
    return omega1 * vl + omegaL * vr, omega1 * fl + omegaL * fr


# -------------------------------------------------------- resonance scan

@dataclass
class SpectralOperator:
    """Discretised L = (-Delta_D)^{1/6} + K_L on N interior nodes.

    Both matrices are in the rescaled variable t = (s - 1)/Lbar, where the
    fractional part is Lbar^{1/3} times its s-version.
    """
    L: float
    Lbar: float
    frac: np.ndarray
    K: np.ndarray

    @property
    def matrix(self):
        return self.frac + self.K

    @property
    def sigma_min(self):
        return float(linalg.svdvals(self.matrix)[-1])

    @property
    def floor(self):
        return float(linalg.svdvals(self.frac)[-1])

    @property
    def K_norm(self):
        return float(linalg.svdvals(self.K)[0])

    @property
    def det_sign(self):
        sign, _ = np.linalg.slogdet(self.matrix)
        return float(sign)


def _lift_problem(bg, s, z):
    """Linearised lift with zero side data and a unit Robin row per node."""
    from . import prandtl as pr

    S, Zg = np.meshgrid(s, z, indexing="ij")
    ub = bg.ubar(S, Zg)
    ubz, ubzz = bg.ubar(S, Zg, 1), bg.ubar(S, Zg, 2)
    ubs = bg.ubar(S, Zg, 0, 1)
    psib, vb = bg.psibar(S, Zg), bg.vbar(S, Zg)
    zero = lambda zz: 0.0
    lam = bg.lambda_G_log_derivative(s)

    class Lift(pr.LinearProblem):
        def _pde_row(self, i, j):
            row, rv = super()._pde_row(i, j)
            # - (lambda'/lambda) (psibar_zz psi + psibar psi_zz) on the left
            h = self.h
            row.append((("p", i, j), -lam[i] * ubz[i, j]))
            row.append((("u", i, j + 1), -lam[i] * psib[i, j] / (2 * h)))
            row.append((("u", i, j - 1), lam[i] * psib[i, j] / (2 * h)))
            return row, rv

        def _rows_global(self, i, j):
            nx = len(self.x)
            if j == self.j1 and 0 < i < nx - 1:
                h, wz, wzz = self.h, ubz[i, j], ubzz[i, j]
                return [(("u", i, j + 1), 0.5 / h / wz ** 2),
                        (("u", i, j - 1), -0.5 / h / wz ** 2),
                        (("u", i, j), -wzz / wz ** 3)], 0.0
            if i == 0 and j > self.j1:
                return [(("u", i, j), 1.0)], 0.0
            return super()._rows_global(i, j)

    # x = s with Lambda = 1 turns the x-differences into s-differences
    lp = Lift(s, z, np.ones_like(s), ub, ubz, ubzz, ubs, vb, np.zeros_like(ub), zero, zero)
    return lp, dict(u=ub, uz=ubz, uzz=ubzz, uzzz=bg.ubar(S, Zg, 3), us=ubs,
                    usz=bg.ubar(S, Zg, 1, 1), psi=psib, v=vb, lam=lam)


def lift_columns(bg, s, z):
    """u-fields of the lift for each unit interface value at interior nodes.

    Returns (u, psi, lp, fields) with u, psi of shape (N, len(s), len(z)).
    """
    from scipy.sparse.linalg import splu

    lp, f = _lift_problem(bg, s, z)
    A, _ = lp.assemble()
    N = len(s) - 2
    rhs = np.zeros((A.shape[0], N))
    for k in range(N):
        rhs[lp.lay.u(k + 1, lp.j1), k] = 1.0
    sol = splu(A).solve(rhs)
    u = sol[:lp.lay.N].T.reshape(N, len(s), len(z))
    psi = sol[lp.lay.N:].T.reshape(N, len(s), len(z))
    return u, psi, lp, f


def tau_tilde(f, z):
    """Linearised coefficients tau2 .. tau_{-2} on the (s, z) grid."""
    g = lambda X: np.gradient(X, z, axis=-1, edge_order=2)
    u, uz, uzz, uzzz, us, usz = f["u"], f["uz"], f["uzz"], f["uzzz"], f["us"], f["usz"]
    psi, v = f["psi"], f["v"]
    r = f["lam"][:, None]
    j1 = int(np.argmin(np.abs(z - 1.0)))
    P = (u * us * uz - 3 * uz * uzz) / uz + v * uz ** 2
    Q = (u * usz - us * uz - uzzz) / uz + us * uz + v * uzz
    return {
        "tau2": -(uz ** 2 - uz[:, j1:j1 + 1] ** 2),
        "tau1": -2 * uzz + P - r * psi * uz ** 2,
        "tau0": g(P) / uz + Q - r * (g(psi * uz ** 2) / uz + psi * uzz),
        "taum1": g(Q) / uz - r * (uz + g(psi * uzz) / uz),
        "taum2": -r * uzz / uz,
    }


def _y_derivatives(u, uz_bar, z):
    """d_Y^k Psi for k = 1..4 with Y = ubar(s, z) and psi_z = u."""
    q = 1.0 / uz_bar
    g = lambda X: np.gradient(X, z, axis=-1, edge_order=2)
    D1 = u * q
    D2 = g(D1) * q
    D3 = g(D2) * q
    D4 = g(D3) * q
    return D1, D2, D3, D4


def _airy_weights(side, xi, t):
    """Quadrature weights w(xi, t) with G_side(xi) = sum_t w F(t), Simpson in t."""
    from . import airy_greens as ag
    from . import specfun as sf

    nt = len(t)
    w = np.ones(nt)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    w *= (t[1] - t[0]) / 3.0
    c = ag.cube_root(xi)[:, None]
    if side == "+":
        K = sf.ai(c * t[None, :]) / sf.AI0
    else:
        r = np.where(xi > 0, sf.rot(-1), sf.rot(1))[:, None]
        K = -sf.ai(-r * c * t[None, :]) / sf.AI0
    K[xi == 0] = 1.0 if side == "+" else -1.0
    return K * w[None, :]


def spectral_operator(L, bg, N, hz=0.025, z_max=6.0, delta=0.12, nt=201, pad=4):
    """Assemble the scan operator for the x-length L (strip s in (1, 1 + Lbar)).

    The lift is computed once per interior node, straightened with Y = ubar,
    mapped to Z = Y/ubar_z(s,1)^{2/3}, multiplied by the linearised
    coefficients and cutoffs, and projected onto the trace by the two Airy
    kernels. K_L = -(sum of the projections)/C0 in the t variable.
    """
    from scipy.interpolate import CubicSpline
    from . import airy_greens as ag
    from .mixedtype import chi

    Lbar = float(bg.s_of_x(1.0 + L) - 1.0)
    s = 1.0 + np.linspace(0.0, Lbar, N + 2)
    nz = int(round(z_max / hz)) + 1
    z = np.linspace(0.0, z_max, nz)
    u, psi, lp, f = lift_columns(bg, s, z)
    tau = tau_tilde(f, z)
    j1 = lp.j1
    cs = f["uz"][:, j1] ** (2.0 / 3.0)
    # window of z where ubar_z > 0 and the cutoff region fits
    pos = np.all(f["uz"] > 0.25 * f["uz"][:, j1:j1 + 1], axis=0)
    lo = j1
    while lo > 2 and pos[lo - 1]:
        lo -= 1
    sl = slice(lo + 2, j1 + int(np.ceil(1.0 / hz)))
    zs = z[sl]
    if np.any(f["u"][:, sl.start] > -delta * cs):
        raise ValueError("ubar_z degenerates inside the cutoff region; lower delta")
    D1, D2, D3, D4 = _y_derivatives(u[:, :, sl], f["uz"][None, :, sl], zs)
    D0 = psi[:, :, sl]
    tw = {k: v[:, sl] for k, v in tau.items()}
    t = np.linspace(0.0, delta, nt)
    ds = s[1] - s[0]
    P = pad * (N + 2)
    xi = 2 * np.pi * np.fft.fftfreq(P, d=ds)
    total = np.zeros((N, N))
    zf = np.linspace(zs[0], zs[-1], 40 * len(zs))
    for side, sg in (("+", 1.0), ("-", -1.0)):
        Zt = sg * t
        F = np.zeros((N, P, nt))
        for i in range(N + 2):
            Yf = bg.ubar(s[i], zf)
            zq = np.interp(Zt * cs[i], Yf, zf)
            ev = lambda X: CubicSpline(zs, X, axis=-1)(zq)
            d0, d1, d2 = ev(D0[:, i]), ev(D1[:, i]), ev(D2[:, i])
            d3, d4 = ev(D3[:, i]), ev(D4[:, i])
            k = {n: ev(tw[n][i]) for n in tw}
            c0, c1, c2 = chi(Zt / delta), chi(Zt / delta, 1), chi(Zt / delta, 2)
            T1 = c0 * (k["tau2"] * d4 + k["tau1"] * d3 + k["tau0"] * d2)
            T2 = c0 * (k["taum1"] * d1 + k["taum2"] * d0)
            Tc = (-(c2 / delta ** 2 * (1 + k["tau2"]) + k["tau1"] * c1 / delta) * d2
                  - (2.0 / delta) * c1 * (1 + k["tau2"]) * d1)
            F[:, i, :] = (T1 + T2 + Tc) / cs[i]
        Fh = np.fft.fft(F, axis=1)
        W = _airy_weights(side, xi, t)
        G = np.einsum("kpt,pt->kp", Fh, W)
        total += sg * np.real(np.fft.ifft(G, axis=1))[:, 1:N + 1].T
    from .airy_greens import C0
    frac = Lbar ** (1.0 / 3.0) * frac_laplacian_matrix(N, Lbar, "multiplier")
    K = -Lbar ** (1.0 / 3.0) * total / C0
    return SpectralOperator(float(L), Lbar, frac, K)


@dataclass
class ScanResult:
    L: np.ndarray
    sigma_min: np.ndarray
    floor: np.ndarray
    K_norm: np.ndarray
    det_sign: np.ndarray
    flagged: np.ndarray


def flag_resonances(L, sigma, det_sign=None, rel=1e-3):
    """Candidate resonant lengths: sigma below rel * median, or a change of
    det sign between neighbours (the smaller-sigma neighbour is flagged)."""
    L, sigma = np.asarray(L, dtype=float), np.asarray(sigma, dtype=float)
    flags = sigma < rel * np.median(sigma)
    if det_sign is not None:
        d = np.asarray(det_sign)
        for k in np.flatnonzero(d[1:] != d[:-1]):
            flags[k if sigma[k] <= sigma[k + 1] else k + 1] = True
    return L[flags]


def resonance_scan(L_grid, background, N, details=False, **kw):
    """Smallest singular value of the discretised interface operator for each L.

    background is an FsProfile or BackgroundFields. With details=True a
    ScanResult carrying the pure fractional floor, ||K_L||, det signs and
    the flagged candidate lengths is returned instead.
    """
    from .profiles import BackgroundFields

    bg = background if isinstance(background, BackgroundFields) else BackgroundFields(background)
    L_grid = np.atleast_1d(np.asarray(L_grid, dtype=float))
    rows = []
    for L in L_grid:
        op = spectral_operator(L, bg, N, **kw)
        rows.append((op.sigma_min, op.floor, op.K_norm, op.det_sign))
    sig, floor, kn, det = (np.array(c) for c in zip(*rows))
    if not details:
        return sig
    return ScanResult(L_grid, sig, floor, kn, det, flag_resonances(L_grid, sig, det))
