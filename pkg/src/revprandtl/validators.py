"""Numerical checks of the harmonic-analysis inequalities used by the solver.

Every check returns an InequalityReport whose constant is the largest
LHS/RHS ratio over a seeded test family; the check passes when that constant
is finite and moves by at most 10% when the grid is doubled.
"""
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import integrate, special

DRIFT_TOL = 0.10
PAD = 4


@dataclass
class InequalityReport:
    id: str
    family: str
    constant: float
    constant_refined: float
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def drift(self):
        return abs(self.constant_refined - self.constant) / max(abs(self.constant), 1e-300)

    def to_dict(self):
        d = asdict(self)
        d["drift"] = self.drift
        return d


def _report(id_, family, c0, c1, **details):
    ok = bool(np.isfinite(c0) and np.isfinite(c1) and c0 > 0
              and abs(c1 - c0) <= DRIFT_TOL * c0)
    return InequalityReport(id_, family, float(c0), float(c1), ok, details)


# ------------------------------------------------------------ cutoffs

def chi_minus(z):
    from .mixedtype import CutoffFamily
    return CutoffFamily.chi_minus(z)


def chi_plus(z):
    from .mixedtype import CutoffFamily
    return CutoffFamily.chi_plus(z)


def _l2(f, w):
    return float(np.sqrt(np.sum(w * np.abs(f) ** 2)))


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def random_family(n, seed=42, degree=10):
    """Seeded Chebyshev series on [0, 1] with decaying random coefficients."""
    rng = np.random.default_rng(seed)
    decay = 1.0 / (1.0 + np.arange(degree + 1)) ** 1.5
    return [rng.standard_normal(degree + 1) * decay for _ in range(n)]


def _cheb_eval(c, z, der=0):
    """Series in t = 2z - 1 evaluated at z, d_z^der."""
    cd = C.chebder(c, der) * 2.0 ** der if der else c
    return C.chebval(2 * z - 1, cd)


# --------------------------------------------------------------- Hardy

def _hardy_ratio(c, order, j, n):
    """LHS/RHS for f = z^order p(z) with p given by the series c."""
    z, w = _gauss01(n)
    pz = lambda k: _cheb_eval(c, z, k)
    # f = z^m p, derivatives by Leibniz
    def df(k):
        m = order
        out = np.zeros_like(z)
        for i in range(0, min(k, m) + 1):
            coef = special.comb(k, i) * special.poch(m - i + 1, i)
            out += coef * z ** (m - i) * pz(k - i)
        return out
    cm = chi_minus(z)
    lhs = _l2(pz(j) * cm, w)
    rhs = _l2(df(j + order) * cm, w) + _l2(df(j + order - 1), w)
    return lhs / rhs


def _uvm_ratio(c, j, n, wbar):
    """Von Mise Hardy inequality with R[f] = wbar f_z - wbar_z f on (0, 1)."""
    z, w = _gauss01(n)
    wb, wz, wzz = wbar(z, 0), wbar(z, 1), wbar(z, 2)
    f = [_cheb_eval(c, z, k) for k in range(j + 2)]
    R = [wb * f[1] - wz * f[0]]
    if j >= 1:
        R.append(wb * f[2] - wzz * f[0])
    cp, cm = chi_plus(z), chi_minus(z)
    lhs = _l2(f[j] * cp, w)
    rhs = sum(_l2(R[k] * cp, w) + _l2(f[k] * cm, w) for k in range(j + 1))
    return lhs / rhs


def default_wbar():
    """A smooth shear vanishing simply at z = 1: the beta = -0.1 background."""
    from .profiles import solve_fs
    p = solve_fs(-0.1)
    es = p.eta_star
    return lambda z, k=0: p.f(es * np.asarray(z), k + 1) * es ** k


def hardy_suite(family=None, n=64, seed=42, n_funcs=50, wbar=None):
    """Hardy-type inequalities of order one and two plus the von Mise version."""
    fam = family if family is not None else random_family(n_funcs, seed)
    reports = []
    for order in (1, 2):
        for j in (0, 1):
            c0 = max(_hardy_ratio(c, order, j, n) for c in fam)
            c1 = max(_hardy_ratio(c, order, j, 2 * n) for c in fam)
            reports.append(_report(f"hardy_order{order}_j{j}",
                                   f"z^{order} x random Chebyshev, {len(fam)} funcs", c0, c1))
    wbar = wbar or default_wbar()
    for j in (0, 1):
        c0 = max(_uvm_ratio(c, j, n, wbar) for c in fam)
        c1 = max(_uvm_ratio(c, j, 2 * n, wbar) for c in fam)
        reports.append(_report(f"hardy_uvm_j{j}", f"random Chebyshev, {len(fam)} funcs", c0, c1))
    return reports


def hardy_closed_form(kind="z", n=64):
    """(LHS, RHS) of the order-one j = 0 inequality for f = z or z e^{-z}."""
    z, w = _gauss01(n)
    cm = chi_minus(z)
    if kind == "z":
        F, f1, f0 = np.ones_like(z), np.ones_like(z), z
    else:
        F, f1, f0 = np.exp(-z), (1 - z) * np.exp(-z), z * np.exp(-z)
    return _l2(F * cm, w), _l2(f1 * cm, w) + _l2(f0, w)


# --------------------------------------------------------- spectral tools

def _window(n, width):
    x = (np.arange(n) - n // 2) * (PAD * width / n)
    xi = 2 * np.pi * np.fft.fftfreq(n, d=x[1] - x[0])
    return x, xi


def bracket(f, xi, alpha):
    """<d_x>^alpha f by the multiplier (1 + xi^2)^{alpha/2}."""
    return np.fft.ifft((1 + xi ** 2) ** (alpha / 2) * np.fft.fft(f))


def _lp(f, dx, p):
    if np.isinf(p):
        return float(np.max(np.abs(f)))
    return float((np.sum(np.abs(f) ** p) * dx) ** (1.0 / p))


def hls_check(ks=(1, 2, 4, 8, 16, 32, 64), n=2048, alpha=1.0 / 3.0, p=2.0, width=8.0):
    """||f||_q / ||<d>^alpha f||_p on single modes e^{ikx} eta(x), 1/q = 1/p - alpha.

    p > 1/alpha gives the L^infinity endpoint.
    """
    q = np.inf if p * alpha > 1 else 1.0 / (1.0 / p - alpha)

    def ratios(nn):
        x, xi = _window(nn, width)
        eta = np.exp(-x ** 2)
        out = []
        for k in ks:
            f = np.exp(1j * k * x) * eta
            out.append(_lp(f, x[1] - x[0], q) / _lp(bracket(f, xi, alpha), x[1] - x[0], p))
        return np.array(out)

    r0, r1 = ratios(n), ratios(2 * n)
    tag = "HLS_inf" if np.isinf(q) else "HLS_p"
    return _report(tag, f"e^(ikx) e^(-x^2), k in {list(ks)}, p={p}, q={q}",
                   r0.max(), r1.max(), ratios=r0.tolist())


def _bandlimited(rng, x, kmax, terms=6):
    out = np.zeros_like(x)
    for _ in range(terms):
        k = rng.uniform(0, kmax)
        out += rng.standard_normal() * np.cos(k * x + rng.uniform(0, 2 * np.pi))
    return out * np.exp(-(x / 3) ** 2)


def w5inf(a, xi):
    ah = np.fft.fft(a)
    return max(float(np.max(np.abs(np.fft.ifft((1j * xi) ** k * ah)))) for k in range(6))


def commutator_check(n=1024, seed=42, n_funcs=20, p=2.0, width=8.0):
    """||[<d>^{-1/3}, a] f||_p / (||a||_{W^{5,inf}} ||<d>^{-4/3} f||_p)."""
    def ratios(nn):
        rng = np.random.default_rng(seed)
        x, xi = _window(nn, width)
        dx = x[1] - x[0]
        out = []
        for _ in range(n_funcs):
            a = _bandlimited(rng, x, 3.0)
            f = _bandlimited(rng, x, 20.0)
            comm = bracket(a * f, xi, -1 / 3) - a * bracket(f, xi, -1 / 3)
            out.append(_lp(comm, dx, p) / (w5inf(a, xi) * _lp(bracket(f, xi, -4 / 3), dx, p)))
        return np.array(out)

    r0, r1 = ratios(n), ratios(2 * n)
    return _report("commutator", f"{n_funcs} band-limited pairs (a, f)", r0.max(), r1.max())


# ------------------------------------------------------- multiplier norm

def _fd_weights(offsets, der):
    """Finite-difference weights on integer offsets for the der-th derivative."""
    offsets = np.asarray(offsets, dtype=float)
    V = np.vander(offsets, increasing=True).T
    b = np.zeros(len(offsets))
    b[der] = special.factorial(der)
    return np.linalg.solve(V, b)


_STENCIL = np.arange(-3, 4)
_W = [_fd_weights(_STENCIL, d) for d in (1, 2, 3)]


def _euler_sum(g, du):
    """sum_{j<=3} |xi^j d_xi^j m| from samples on a uniform grid in u = log|xi|.

    xi d = E, xi^2 d^2 = E^2 - E, xi^3 d^3 = E^3 - 3E^2 + 2E with E = d/du.
    """
    n = len(g)
    idx = np.arange(3, n - 3)
    E = [sum(w * g[idx + o] for w, o in zip(_W[d], _STENCIL)) / du ** (d + 1) for d in range(3)]
    g0 = g[idx]
    return (np.abs(g0) + np.abs(E[0]) + np.abs(E[1] - E[0])
            + np.abs(E[2] - 3 * E[1] + 2 * E[0]))


def log_grid(lo=-3.0, hi=4.0, n=701):
    """Positive log-spaced xi with uniform spacing in log xi."""
    u = np.linspace(lo * np.log(10), hi * np.log(10), n)
    return np.exp(u), u[1] - u[0]


def multiplier_norm(m, xi=None, du=None, lo=-3.0, hi=4.0, n=701):
    """sup over the grid of sum_{j<=3} |xi|^j |d_xi^j m(xi)|.

    m is either a callable or a pair (m(xi), m(-xi)) of samples on the positive
    log grid xi (uniform spacing du in log xi). Derivatives use 7-point finite
    differences in log|xi|, so the three end points on each side are dropped.
    """
    if xi is None:
        xi, du = log_grid(lo, hi, n)
    if callable(m):
        gp, gm = m(xi), m(-xi)
    else:
        gp, gm = m
    return float(max(np.max(_euler_sum(np.asarray(gp), du)),
                     np.max(_euler_sum(np.asarray(gm), du))))


# ------------------------------------------------------ Airy products

def _zeta(w):
    return (2.0 / 3.0) * w ** 1.5


def _airy_scaled(w):
    """Scaled (ai, ai', bi, bi') with ai = eai e^{-zeta}, bi = ebi e^{|Re zeta|}."""
    return special.airye(np.asarray(w, dtype=complex))


def alpha_fn(name):
    """alpha in scaled form: returns (values * e^{zeta}) for ai, ai', ai''."""
    def f(w):
        eai, eaip, _, _ = _airy_scaled(w)
        return {"ai": eai, "ai'": eaip, "ai''": w * eai}[name]
    return f


def beta_fn(name):
    """beta in scaled form (values * e^{-|Re zeta|}) for bi, bi', bi''."""
    def f(w):
        _, _, ebi, ebip = _airy_scaled(w)
        return {"bi": ebi, "bi'": ebip, "bi''": w * ebi}[name]
    return f


_BI_CUM = {}


def _bi_primitive_scaled(theta, r):
    """e^{-|Re zeta(w)|} int_0^w bi on the ray w = r e^{i theta}."""
    key = round(theta, 12)
    if key not in _BI_CUM:
        R = np.linspace(0.0, 64.0, 25601)
        e = np.exp(1j * theta)
        x, wq = np.polynomial.legendre.leggauss(8)
        a, b = R[:-1, None], R[1:, None]
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        wt = 0.5 * (b - a) * wq
        # scale each panel by its right end to keep exponents <= 0
        tw = t * e
        _, _, ebi, _ = _airy_scaled(tw)
        g = np.abs(np.real(_zeta(tw)))
        gR = np.abs(np.real(_zeta(b[:, 0] * e)))
        panel = np.sum(wt * ebi * np.exp(g - gR[:, None]), axis=1) * e
        cum = np.zeros(len(R), dtype=complex)
        for k in range(len(panel)):
            cum[k + 1] = cum[k] * np.exp(np.abs(np.real(_zeta(R[k] * e))) - gR[k]) + panel[k]
        _BI_CUM[key] = (R, cum)
    R, cum = _BI_CUM[key]
    if np.any(r > R[-1]):
        raise ValueError("argument beyond the tabulated primitive")
    return np.interp(r, R, cum.real) + 1j * np.interp(r, R, cum.imag)


def B_fn(name):
    """Primitive of beta vanishing at 0, in the scaled form of beta."""
    def f(w):
        w = np.asarray(w, dtype=complex)
        sc = np.exp(-np.abs(np.real(_zeta(w))))
        if name == "bi'":
            return beta_fn("bi")(w) - special.airy(0.0)[2] * sc
        if name == "bi''":
            return beta_fn("bi'")(w) - special.airy(0.0)[3] * sc
        th = np.angle(w)
        out = np.zeros(w.shape, dtype=complex)
        for t in np.unique(np.round(th, 12)):
            m = np.isclose(th, t)
            out[m] = _bi_primitive_scaled(t, np.abs(w[m]))
        return out
    return f


def _product(a_s, b_s, wa, wb):
    """alpha(wa) beta(wb) from scaled factors."""
    return a_s * b_s * np.exp(-_zeta(wa) + np.abs(np.real(_zeta(wb))))


CHOICES = [("ai", "bi"), ("ai'", "bi"), ("ai", "bi'"), ("ai''", "bi"), ("ai", "bi''")]


def _cube(xi):
    xi = np.asarray(xi, dtype=float)
    return np.abs(xi) ** (1 / 3) * np.exp(1j * np.sign(xi) * np.pi / 6)


def phi_symbol(choice, Z, Zp):
    """xi -> alpha((i xi)^{1/3} Z) B((i xi)^{1/3} Z')."""
    al, be = alpha_fn(choice[0]), B_fn(choice[1])
    def m(xi):
        c = _cube(xi)
        return _product(al(c * Z), be(c * Zp), c * Z, c * Zp)
    return m


def p_symbol(choice, Z, Zp, sigma):
    al, be = alpha_fn(choice[0]), beta_fn(choice[1])
    def m(xi):
        c = _cube(xi)
        return (_product(al(c * Z), be(c * Zp), c * Z, c * Zp)
                * c ** (1 - 3 * sigma) * Zp ** (1 - sigma))
    return m


def rho_integral(sigma):
    """int_{1/2}^1 rho^{-(1/4 - sigma)} (1 - rho^{3/2})^{-(1 - 2 sigma)} d rho."""
    f = lambda r: r ** (-(0.25 - sigma)) * (1 - r ** 1.5) ** (-(1 - 2 * sigma))
    val, err = integrate.quad(f, 0.5, 1.0, limit=200)
    return val


def admissibility_scan(choice=("ai", "bi"), sigma=0.1, Z=(0.25, 0.5, 1.0, 2.0, 4.0),
                       n_xi=701, n_rho=24, xi_range=(-3.0, 3.0)):
    """sup_Z phi, sup_{Z' <= Z} phi(Z, Z') and sup_Z int_0^Z Z'^{sigma-1} p dZ'.

    The last integral is done in rho = Z'/Z by Gauss-Legendre.
    """
    if not 0 < sigma <= 0.25:
        raise ValueError("sigma must lie in (0, 1/4]")
    xi, du = log_grid(*xi_range, n_xi)
    rho, wr = _gauss01(n_rho)
    vphi, phimax, pint = 0.0, 0.0, 0.0
    for z in Z:
        vphi = max(vphi, multiplier_norm(phi_symbol(choice, z, z), xi, du))
        for r in rho:
            phimax = max(phimax, multiplier_norm(phi_symbol(choice, z, r * z), xi, du))
        pv = np.array([multiplier_norm(p_symbol(choice, z, r * z, sigma), xi, du) for r in rho])
        pint = max(pint, float(np.sum(wr * z * (r_ := rho * z) ** (sigma - 1) * pv)))
    return {"choice": list(choice), "sigma": sigma, "varphi": vphi, "phi": phimax,
            "p_integral": pint, "rho_integral": rho_integral(sigma)}


def admissibility_reports(sigma=0.1, n_xi=351):
    out = []
    for ch in CHOICES:
        a = admissibility_scan(ch, sigma, n_xi=n_xi)
        b = admissibility_scan(ch, sigma, n_xi=2 * n_xi - 1)
        for key in ("varphi", "phi", "p_integral"):
            out.append(_report(f"admissible_{key}[{ch[0]},{ch[1]}]",
                               f"xi log grid, sigma={sigma}", a[key], b[key]))
    return out


# ------------------------------------------------------- kernel operators

def airy_kernel_ops(F, s, Z, choice=("ai", "bi"), m=None):
    """J1[F], J2[F] and T_m[F] evaluated on the frequency side.

    F has shape (len(s), len(Z)) on a periodic s-grid and Z >= 0 starting at
    0. Operators use the multiplier convention F^{-1}[symbol * F^]:
      J1 = int_0^Z alpha(cZ) c beta(cZ') F^ dZ',
      J2 = int_Z^inf beta(cZ) c alpha(cZ') F^ dZ',
      T_m = int_0^inf m c ai(cZ) F^ dZ,
    with c = (i xi)^{1/3}. Z' integrals use the trapezoid rule.
    """
    F = np.asarray(F, dtype=complex)
    s, Z = np.asarray(s, dtype=float), np.asarray(Z, dtype=float)
    xi = 2 * np.pi * np.fft.fftfreq(len(s), d=s[1] - s[0])
    Fh = np.fft.fft(F, axis=0)
    c = _cube(xi)[:, None]
    w = c * Z[None, :]
    A = alpha_fn(choice[0])(w)
    Bv = beta_fn(choice[1])(w)
    za, zb = _zeta(w), np.abs(np.real(_zeta(w)))
    dZ = np.diff(Z)
    J1 = np.zeros_like(Fh)
    J2 = np.zeros_like(Fh)
    nz = len(Z)
    for k in range(nz):
        # J1: Z' in [0, Z_k], weight alpha(cZ_k) beta(cZ')
        ex = np.exp(-za[:, k:k + 1] + zb[:, :k + 1])
        g = A[:, k:k + 1] * c * Bv[:, :k + 1] * ex * Fh[:, :k + 1]
        J1[:, k] = np.sum(0.5 * (g[:, 1:] + g[:, :-1]) * dZ[:k], axis=1) if k else 0.0
        ex2 = np.exp(zb[:, k:k + 1] - za[:, k:])
        g2 = Bv[:, k:k + 1] * c * A[:, k:] * ex2 * Fh[:, k:]
        J2[:, k] = np.sum(0.5 * (g2[:, 1:] + g2[:, :-1]) * dZ[k:], axis=1) if k < nz - 1 else 0.0
    mm = np.ones(len(xi)) if m is None else np.asarray(m(xi))
    gT = mm[:, None] * c * A * np.exp(-za) * Fh
    T = np.sum(0.5 * (gT[:, 1:] + gT[:, :-1]) * dZ, axis=1)
    J1[xi == 0] = 0.0
    J2[xi == 0] = 0.0
    return np.fft.ifft(J1, axis=0), np.fft.ifft(J2, axis=0), np.fft.ifft(T)


def kernel_ratio(J, F, Z, ds):
    """||J||_{L^inf_Z L^2_s} / (||F||_{L^inf_Z L^2_s} + ||F_Z||_{L^1_Z L^2_s})."""
    n2 = lambda X: np.sqrt(np.sum(np.abs(X) ** 2, axis=0) * ds)
    FZ = np.gradient(F, Z, axis=1)
    return float(np.max(n2(J)) / (np.max(n2(F)) + np.trapezoid(n2(FZ), Z)))


def kernel_suite(choices=CHOICES, n_s=128, n_z=161, seed=42):
    """Norm ratios of J1 and J2 on a smooth random field, refined in Z."""
    out = []
    rng = np.random.default_rng(seed)
    s = np.linspace(0, 2 * np.pi, n_s, endpoint=False)
    a = rng.standard_normal(4)
    for ch in choices:
        vals = []
        for nz in (n_z, 2 * n_z - 1):
            Z = np.linspace(0.0, 6.0, nz)
            F = (a[0] * np.cos(s)[:, None] + a[1] * np.sin(3 * s)[:, None]
                 + a[2] * np.cos(7 * s + a[3])[:, None]) * np.exp(-Z ** 2)[None, :]
            J1, J2, _ = airy_kernel_ops(F, s, Z, ch)
            vals.append(max(kernel_ratio(J1, F, Z, s[1] - s[0]),
                            kernel_ratio(J2, F, Z, s[1] - s[0])))
        out.append(_report(f"airy_kernel[{ch[0]},{ch[1]}]", "three-mode field x e^{-Z^2}",
                           vals[0], vals[1]))
    return out


def smoothing_decay(ks=(1e3, 1e4, 1e5, 1e6), nt=200001, tmax=40.0):
    """Fitted exponent of |int_0^inf ai(c_k Z) eta(Z) dZ| in k for eta = e^{-Z}.

    The integral is done in t = |c_k| Z so the boundary layer at Z = 0 is
    resolved uniformly in k. The smoothing functional behaves like k^{-1/3}.
    """
    t = np.linspace(0.0, tmax, nt)
    ray = special.airy(t * np.exp(1j * np.pi / 6))[0]
    vals = []
    for k in ks:
        c = abs(_cube(np.array([float(k)]))[0])
        vals.append(abs(integrate.simpson(ray * np.exp(-t / c), x=t)) / c)
    slope = np.polyfit(np.log(ks), np.log(vals), 1)[0]
    return float(slope), np.array(vals)


# ------------------------------------------------------------- driver

SUITES = ("hardy", "hls", "commutator", "admissibility", "kernels")


def run_suite(suite="all", seed=42):
    """Run one validator group (or all) and return a list of reports."""
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        if name == "hardy":
            out += hardy_suite(seed=seed)
        elif name == "hls":
            out += [hls_check(p=2.0), hls_check(p=4.0)]
        elif name == "commutator":
            out.append(commutator_check(seed=seed))
        elif name == "admissibility":
            out += admissibility_reports()
        elif name == "kernels":
            out += kernel_suite(seed=seed)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
