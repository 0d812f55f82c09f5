"""Nonlinear free-boundary solver around a reversed Falkner-Skan background.

The perturbation u(s, z) of u_P = ubar + eps u solves

    wbar u_s + v wbar_z - u_zz + A[psibar, psi] - (lambda'/lambda) B[psibar, psi] = 0

on (1, 1 + Lbar) x (0, z_max), where z = y/Lambda(x), ds/dx = Lambda^-2 and
the free boundary Lambda = Lambda_G + eps Xi is the zero set of u_P. Fields
are stored on a fixed x-grid; every s-derivative is taken as Lambda^2 d_x.

Each fixed-point step freezes wbar_n = ubar + eps u_n and lambda_n, solves
the linear mixed-type problem (forward parabolic above z = 1, backward below),
then updates the free boundary by Newton's method.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu


class NewtonDiverged(RuntimeError):
    def __init__(self, msg, where=()):
        super().__init__(msg)
        self.where = list(where)


class SingularPath(ValueError):
    pass


class IterationDiverged(RuntimeError):
    pass


@dataclass
class PrandtlConfig:
    nx: int = 41
    hz: float = 0.05
    z_max: float = 8.0
    tol: float = 1e-8          # relative to the first increment
    max_iter: int = 50
    M_max: int = 6
    k_star: int = 3
    delta: float = 0.5
    eps_max: float = 1e-2
    degenerate: float = 1e-6


# ------------------------------------------------------------------ helpers

def _dz(f, h, k=1):
    for _ in range(k):
        f = np.gradient(f, h, axis=-1, edge_order=2)
    return f


def _dx(f, x, k=1):
    for _ in range(k):
        f = np.gradient(f, x, axis=0, edge_order=2)
    return f


def cumtrapz0(f, h):
    """Cumulative trapezoid along the last axis, starting from zero."""
    out = np.zeros_like(f)
    out[..., 1:] = np.cumsum(0.5 * h * (f[..., 1:] + f[..., :-1]), axis=-1)
    return out


def operators_AB(psibar, psi, h, ds):
    """A = psi_z psibar_sz + vbar psi_zz and B = psibar_zz psi + psibar psi_zz.

    Inputs are (n_s, n_z) arrays on a uniform z-grid of step h; ds is either a
    scalar step or the s-node array. vbar = -d_s psibar.
    """
    psibar = np.asarray(psibar, dtype=float)
    psi = np.asarray(psi, dtype=float)
    d_s = (lambda f: np.gradient(f, ds, axis=0, edge_order=2)) if psi.shape[0] > 2 else \
        (lambda f: np.zeros_like(f))
    vbar = -d_s(psibar)
    A = _dz(psi, h) * _dz(d_s(psibar), h) + vbar * _dz(psi, h, 2)
    B = _dz(psibar, h, 2) * psi + psibar * _dz(psi, h, 2)
    return A, B


# -------------------------------------------------------------- background

@dataclass
class StripFields:
    """Background quantities in the lambda-scaled (x, z) frame."""
    x: np.ndarray
    z: np.ndarray
    Lam: np.ndarray
    Lam_x: np.ndarray
    ubar: np.ndarray
    ubar_z: np.ndarray
    ubar_zz: np.ndarray
    ubar_s: np.ndarray
    psibar: np.ndarray
    vbar: np.ndarray

    @property
    def lam_ratio(self):
        """lambda'(s)/lambda(s) = Lambda Lambda_x."""
        return self.Lam * self.Lam_x


def strip_fields(bg, x, z, Lam, Lam_x):
    """ubar(s, z) = u_FS(x, z Lambda(x)) and its relatives."""
    X = x[:, None] * np.ones_like(z)[None, :]
    L = Lam[:, None]
    Lx = Lam_x[:, None]
    Y = z[None, :] * L
    u = bg.u_fs(X, Y)
    uy = bg.u_fs(X, Y, dy=1)
    uyy = bg.u_fs(X, Y, dy=2)
    ux = bg.u_fs_x(X, Y)
    psi = bg.psi_fs(X, Y)
    psi_x = -bg.v_fs(X, Y)
    ubar_s = L ** 2 * (ux + z[None, :] * Lx * uy)
    vbar = -L ** 2 * ((psi_x + z[None, :] * Lx * u) / L - psi * Lx / L ** 2)
    return StripFields(x, z, Lam, Lam_x, u, L * uy, L ** 2 * uyy, ubar_s, psi / L, vbar)


# ------------------------------------------------------------ free boundary

def free_boundary_update(u1, x, bg, eps, tol=1e-14, max_iter=60):
    """Solve u_FS(x, Lambda_G + eps mu) + eps u(s, 1) = 0 for mu at each x.

    Newton in m = eps mu, seeded with the first-order value and damped so the
    iterate stays in the shear-positive neighbourhood of Lambda_G.
    Returns (mu, Lambda, info).
    """
    x = np.asarray(x, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    LG = bg.Lambda_G(x)
    uy0 = bg.u_fs(x, LG, dy=1)
    if np.any(uy0 <= 0):
        raise NewtonDiverged("background shear at the zero curve is not positive",
                             x[uy0 <= 0])
    prefactor = -1.0 / uy0
    mu_lin = prefactor * u1
    if eps == 0:
        return mu_lin, LG.copy(), {"residual": 0.0, "prefactor_negative": bool(np.all(prefactor < 0)),
                                  "newton_steps": 0}
    m = eps * mu_lin
    bad = np.zeros(x.shape, dtype=bool)
    steps = 0
    for steps in range(1, max_iter + 1):
        g = bg.u_fs(x, LG + m) + eps * u1
        gp = bg.u_fs(x, LG + m, dy=1)
        if np.all(np.abs(g) <= tol):
            break
        step = np.where(gp > 0, g / np.where(gp > 0, gp, 1.0), 0.0)
        step = np.clip(step, -0.25 * LG, 0.25 * LG)
        m = m - step
    g = bg.u_fs(x, LG + m) + eps * u1
    bad = ~(np.abs(g) <= 1e-12) | (LG + m <= 0)
    if np.any(bad):
        raise NewtonDiverged("free-boundary Newton failed", x[bad])
    return m / eps, LG + m, {"residual": float(np.max(np.abs(g))),
                             "prefactor_negative": bool(np.all(prefactor < 0)),
                             "newton_steps": steps}


# -------------------------------------------------------------- von Mise

_GX, _GW = np.polynomial.legendre.leggauss(12)


def invert_von_mise(U, gamma_m1, gamma0, wbar, wbar_z, z):
    """psi(z) = g_{-1} + (wbar/wbar_z(1)) g_0 + wbar int_1^z V2 wbar_z / wbar^2

    with V2 = U/wbar_z + g_{-1}. U, wbar and wbar_z are callables of z for a
    fixed x; z is an increasing grid starting at 1. Gauss panels never touch
    z = 1 itself, where the integrand has a removable singularity.
    """
    z = np.asarray(z, dtype=float)
    if z[0] != 1.0 or np.any(np.diff(z) <= 0):
        raise ValueError("z must start at 1 and increase")
    a, b = z[:-1, None], z[1:, None]
    zq = 0.5 * (a + b) + 0.5 * (b - a) * _GX
    wq = 0.5 * (b - a) * _GW
    wz_all = wbar(z)
    if np.any(wz_all[1:] <= 0) or np.any(wbar(zq) <= 0):
        raise SingularPath("wbar vanishes on the integration path")
    wzq = wbar_z(zq)
    V2 = U(zq) / wzq + gamma_m1
    integrand = V2 * wzq / wbar(zq) ** 2
    I = np.concatenate([[0.0], np.cumsum(np.sum(wq * integrand, axis=1))])
    return gamma_m1 + wz_all / wbar_z(np.array([1.0]))[0] * gamma0 + wz_all * I


# ------------------------------------------------------- linear sub-solver

class _Layout:
    def __init__(self, nx, nz):
        self.nx, self.nz = nx, nz
        self.N = nx * nz

    def u(self, i, j):
        return i * self.nz + j

    def p(self, i, j):
        return self.N + i * self.nz + j


S_ORDER = 2


def _ds_stencil(i, nx, forward):
    """One-sided second-order d/dx weights (first order next to the edge)."""
    if forward:
        if i + 2 < nx and S_ORDER == 2:
            return [(i, -1.5), (i + 1, 2.0), (i + 2, -0.5)]
        if i + 1 < nx:
            return [(i, -1.0), (i + 1, 1.0)]
        return _ds_stencil(i, nx, False)
    if i - 2 >= 0 and S_ORDER == 2:
        return [(i, 1.5), (i - 1, -2.0), (i - 2, 0.5)]
    if i - 1 >= 0:
        return [(i, 1.0), (i - 1, -1.0)]
    return _ds_stencil(i, nx, True)


class LinearProblem:
    """One frozen-coefficient step on the (x, z) grid.

    Unknowns are u and psi at every node, tied by the trapezoid rule
    psi_j - psi_{j-1} = h (u_j + u_{j-1})/2. Transport differences are upwind:
    forward in s for z <= 1, backward for z > 1.
    """

    def __init__(self, x, z, Lam, wbar, wbar_z, wbar_zz, ubar_s, vbar, rhs, F_left, u_right):
        self.x, self.z = x, z
        self.h = z[1] - z[0]
        self.dx = x[1] - x[0]
        self.j1 = int(np.argmin(np.abs(z - 1.0)))
        self.Lam = Lam
        self.wbar, self.wbar_z, self.wbar_zz = wbar, wbar_z, wbar_zz
        self.ubar_s, self.vbar, self.rhs = ubar_s, vbar, rhs
        self.F_left, self.u_right = F_left, u_right
        self.lay = _Layout(len(x), len(z))
        wz = wbar_z[0]
        small = np.abs(wz) < 1e-12 * np.max(np.abs(wz))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(small, 0.0, wbar_zz[0] / np.where(small, 1.0, wz))
        self.robin_ratio = r
        self.split_trace = True
        # transport coefficient: trapezoid primitive of wbar_z anchored at
        # z = 1, so that u = c(s) wbar_z is annihilated exactly above the
        # interface, as it is by w u - w_z (psi - psi(1)) in the continuum
        W = cumtrapz0(wbar_z, self.h)
        self.wbar_t = W - W[:, self.j1:self.j1 + 1]

    # rows are lists of ((kind, i, j), coeff) with a rhs value
    def _pde_row(self, i, j):
        h, s2 = self.h, self.Lam[i] ** 2 / self.dx
        fwd = self.z[j] <= 1.0 + 1e-12
        row = []
        nx = len(self.x)
        for ii, c in _ds_stencil(i, nx, fwd):
            row.append((("u", ii, j), self.wbar_t[i, j] * s2 * c))
            row.append((("p", ii, j), -self.wbar_z[i, j] * s2 * c))
        if not fwd and self.split_trace:
            # psi(s, 1) belongs to the lower region: move its s-difference
            # from the upper stencil to the lower one
            for ii, c in _ds_stencil(i, nx, False):
                row.append((("p", ii, self.j1), self.wbar_z[i, j] * s2 * c))
            for ii, c in _ds_stencil(i, nx, True):
                row.append((("p", ii, self.j1), -self.wbar_z[i, j] * s2 * c))
        row.append((("u", i, j), self.ubar_s[i, j] + 2.0 / h ** 2))
        row.append((("u", i, j + 1), self.vbar[i, j] / (2 * h) - 1.0 / h ** 2))
        row.append((("u", i, j - 1), -self.vbar[i, j] / (2 * h) - 1.0 / h ** 2))
        return row, self.rhs[i, j]

    def _robin_left(self, j):
        h = self.h
        return [(("u", 0, j + 1), 1 / (2 * h)), (("u", 0, j - 1), -1 / (2 * h)),
                (("u", 0, j), -self.robin_ratio[j])], float(self.F_left(self.z[j]))

    def _robin_gamma(self, i, side, gamma):
        """(u_z - (wbar_zz/wbar_z) u)/wbar_z^2 = gamma at z = 1, one-sided."""
        j, h = self.j1, self.h
        wz, wzz = self.wbar_z[i, j], self.wbar_zz[i, j]
        sg = 1.0 if side == "+" else -1.0
        row = [(("u", i, j), (-1.5 * sg / h - wzz / wz) / wz ** 2),
               (("u", i, j + int(sg)), 2.0 * sg / h / wz ** 2),
               (("u", i, j + 2 * int(sg)), -0.5 * sg / h / wz ** 2)]
        return row, gamma

    def trace_gamma(self, u, side="0"):
        """gamma_{1,Omega}(s) from a u field, centred or one-sided."""
        j, h = self.j1, self.h
        if side == "0":
            uz = (u[:, j + 1] - u[:, j - 1]) / (2 * h)
        else:
            sg = 1 if side == "+" else -1
            uz = sg * (-1.5 * u[:, j] + 2 * u[:, j + sg] - 0.5 * u[:, j + 2 * sg]) / h
        wz, wzz = self.wbar_z[:, j], self.wbar_zz[:, j]
        return (uz - wzz / wz * u[:, j]) / wz ** 2

    def _rows_global(self, i, j):
        nz, nx = len(self.z), len(self.x)
        if j == 0 or j == nz - 1:
            return [(("u", i, j), 1.0)], 0.0
        if i == 0 and j > self.j1:
            return self._robin_left(j)
        if i == nx - 1 and j <= self.j1:
            return [(("u", i, j), 1.0)], float(self.u_right(self.z[j]))
        return self._pde_row(i, j)

    def _psi_row(self, i, j):
        if j == 0:
            return [(("p", i, 0), 1.0)], 0.0
        h = self.h
        return [(("p", i, j), 1.0), (("p", i, j - 1), -1.0),
                (("u", i, j), -0.5 * h), (("u", i, j - 1), -0.5 * h)], 0.0

    def assemble(self):
        """Sparse matrix and right-hand side of the global system."""
        lay = self.lay
        rows, cols, vals = [], [], []
        b = np.zeros(2 * lay.N)
        for i in range(lay.nx):
            for j in range(lay.nz):
                for k, (row, rv) in enumerate((self._rows_global(i, j), self._psi_row(i, j))):
                    r = lay.u(i, j) if k == 0 else lay.p(i, j)
                    b[r] = rv
                    for (kind, ii, jj), c in row:
                        rows.append(r)
                        cols.append(lay.u(ii, jj) if kind == "u" else lay.p(ii, jj))
                        vals.append(c)
        A = sparse.csc_matrix((vals, (rows, cols)), shape=(2 * lay.N, 2 * lay.N))
        self.matrix = A
        return A, b

    def solve(self):
        lay = self.lay
        A, b = self.assemble()
        sol = splu(A).solve(b)
        u = sol[:lay.N].reshape(lay.nx, lay.nz)
        psi = sol[lay.N:].reshape(lay.nx, lay.nz)
        return u, psi

    # ---- decoupled marching with the interface trace known
    def _march(self, order, jset, rowfun, known_u, known_p):
        """Column-by-column implicit march; columns not yet visited are unused."""
        u, p = known_u.copy(), known_p.copy()
        idx = {j: k for k, j in enumerate(jset)}
        n = len(jset)
        for i in order:
            A = np.zeros((2 * n, 2 * n))
            b = np.zeros(2 * n)
            for j in jset:
                for k, (row, rv) in enumerate(rowfun(i, j)):
                    r = idx[j] + k * n
                    b[r] = rv
                    for (kind, ii, jj), c in row:
                        if ii == i and jj in idx:
                            A[r, idx[jj] + (0 if kind == "u" else n)] += c
                        else:
                            b[r] -= c * (u[ii, jj] if kind == "u" else p[ii, jj])
            sol = np.linalg.solve(A, b)
            u[i, jset] = sol[:n]
            p[i, jset] = sol[n:]
        return u, p

    def solve_decoupled(self, gamma_minus, gamma_plus):
        """Lower region backward from s = 1 + Lbar, upper region forward from
        s = 1, each closed by the one-sided Robin trace at z = 1."""
        nx, nz, j1 = len(self.x), len(self.z), self.j1
        u = np.zeros((nx, nz))
        p = np.zeros((nx, nz))

        def lower(i, j):
            if j == j1:
                if i == nx - 1:
                    ur = [(("u", i, j), 1.0)], float(self.u_right(self.z[j]))
                else:
                    ur = self._robin_gamma(i, "-", gamma_minus[i])
            else:
                ur = self._rows_global(i, j)
            return ur, self._psi_row(i, j)

        u, p = self._march(range(nx - 1, -1, -1), list(range(0, j1 + 1)), lower, u, p)
        p_lower = p[:, j1].copy()
        u_lower = u.copy()

        def upper(i, j):
            if j == j1:
                return self._robin_gamma(i, "+", gamma_plus[i]), ([(("p", i, j), 1.0)], p_lower[i])
            return self._rows_global(i, j), self._psi_row(i, j)

        u2, p2 = self._march(range(nx), list(range(j1, nz)), upper, u, p)
        u_out = u2.copy()
        u_out[:, :j1] = u_lower[:, :j1]
        return u_out, p2, u_lower[:, j1]


# ------------------------------------------------------------ state types

@dataclass
class GoodUnknowns:
    U: np.ndarray
    calU: np.ndarray
    Omega: np.ndarray
    g: np.ndarray


@dataclass
class SolutionState:
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    u: np.ndarray
    psi: np.ndarray
    v: np.ndarray
    Lambda: np.ndarray
    Lambda_G: np.ndarray
    mu: np.ndarray
    eps: float
    L: float
    traces: dict
    history: list
    diagnostics: dict
    fields: StripFields = field(repr=False)
    config: PrandtlConfig = field(default_factory=PrandtlConfig)
    profile: object = field(default=None, repr=False)

    @property
    def wbar(self):
        return self.fields.ubar + self.eps * self.u

    def good_unknowns(self):
        h = self.z[1] - self.z[0]
        wb = self.wbar
        wz = _dz(wb, h)
        wzz = _dz(wb, h, 2)
        uz = _dz(self.u, h)
        U = wb * self.u - wz * self.psi
        gp = self.mu / (self.Lambda_G + self.eps * self.mu)
        # g' is with respect to s; ds = dx/Lambda^2
        g = cumtrapz0(gp / self.Lambda ** 2, self.x[1] - self.x[0])
        _, B = operators_AB(self.fields.psibar, self.psi, h, self.s)
        with np.errstate(divide="ignore", invalid="ignore"):
            Om = (uz - wzz / wz * self.u) / wz ** 2
        return GoodUnknowns(U, U - self.eps * g[:, None] * B, Om, g)


def _config_check(eps, L, config):
    if not (0 <= eps <= config.eps_max):
        raise ValueError(f"eps must lie in [0, {config.eps_max}]")
    if L <= 0:
        raise ValueError("L must be positive")


def z_increment_norm(du, dpsi, h, M_max):
    """Discrete size of an increment: sup of psi plus <z>^M_max-weighted
    L^inf_s L^2_z norms of u and u_z (psi tends to a constant as z grows,
    so it is not weighted)."""
    z = np.arange(du.shape[1]) * h
    wgt = (1 + z ** 2) ** (M_max / 2)
    out = float(np.max(np.abs(dpsi)))
    for q in (du, _dz(du, h)):
        out += float(np.sqrt(np.max(np.sum((q * wgt) ** 2, axis=1) * h)))
    return out


def iterate(data, profile, eps, L, config=None, bg=None):
    """Fixed-point iteration started from psi_0 = 0."""
    from .profiles import background

    config = config or PrandtlConfig()
    _config_check(eps, L, config)
    bg = bg or background(profile)
    x = np.linspace(1.0, 1.0 + L, config.nx)
    nz = int(round(config.z_max / config.hz)) + 1
    z = np.linspace(0.0, config.z_max, nz)
    h = z[1] - z[0]
    LG = bg.Lambda_G(x)
    LGx = bg.a * bg.eta_star * x ** (bg.a - 1)
    Lam, Lam_x = LG.copy(), LGx.copy()
    mu = np.zeros_like(x)
    u = np.zeros((config.nx, nz))
    psi = np.zeros_like(u)
    history, growth = [], 0
    info = {}
    lp = None
    for n in range(config.max_iter):
        sf = strip_fields(bg, x, z, Lam, Lam_x)
        wb = sf.ubar + eps * u
        wz = sf.ubar_z + eps * _dz(u, h)
        wzz = sf.ubar_zz + eps * _dz(u, h, 2)
        s_nodes = _s_nodes(x, Lam)
        _, B = operators_AB(sf.psibar, psi, h, s_nodes)
        rhs = sf.lam_ratio[:, None] * B
        lp = LinearProblem(x, z, Lam, wb, wz, wzz, sf.ubar_s, sf.vbar, rhs,
                           data.F_Left, data.u_Right)
        u_new, psi_new = lp.solve()
        mu_new, Lam_new, info = free_boundary_update(u_new[:, lp.j1], x, bg, eps)
        inc = z_increment_norm(u_new - u, psi_new - psi, h, config.M_max)
        history.append(inc)
        u, psi = u_new, psi_new
        mu = mu_new
        if eps > 0:
            Lam = Lam_new
            Lam_x = LGx + eps * np.gradient(mu, x, edge_order=2)
        if len(history) > 1 and history[-1] > history[-2]:
            growth += 1
            if growth >= 3:
                raise IterationDiverged(f"increment grew three times in a row: {history}")
        else:
            growth = 0
        if inc < config.tol * max(history[0], 1e-300):
            break
    sf = strip_fields(bg, x, z, Lam, Lam_x)
    s_nodes = _s_nodes(x, Lam)
    v = -np.gradient(psi, s_nodes, axis=0, edge_order=2)
    # dual route: march each side with the extracted interface trace
    gm, gp_ = lp.trace_gamma(u, "-"), lp.trace_gamma(u, "+")
    u_dec, psi_dec, u1_lower = lp.solve_decoupled(gm, gp_)
    ratios = [history[k + 1] / history[k] for k in range(len(history) - 1) if history[k] > 0]
    traces = {
        "gamma_m1": psi[:, lp.j1].copy(),
        "gamma_0": u[:, lp.j1].copy(),
        "gamma_1": (u[:, lp.j1 + 1] - u[:, lp.j1 - 1]) / (2 * h),
        "gamma_1_Omega": lp.trace_gamma(u, "0"),
    }
    diag = {
        "iterations": len(history),
        "converged": bool(history[-1] < config.tol * max(history[0], 1e-300)),
        "decrement_ratios": ratios,
        "newton_residual": info.get("residual", 0.0),
        "prefactor_negative": info.get("prefactor_negative", True),
        "decoupling_gap": float(np.max(np.abs(u_dec - u))),
        "robin_stencil": "one-sided second order at z = 1",
        "interface_index": lp.j1,
        "Lbar": float(s_nodes[-1] - 1.0),
    }
    return SolutionState(x, s_nodes, z, u, psi, v, Lam, LG, mu, float(eps), float(L),
                         traces, history, diag, sf, config, profile)


def _s_nodes(x, Lam):
    """s(x) = 1 + int_1^x Lambda^-2 by the trapezoid rule on the x-grid."""
    return 1.0 + cumtrapz0(1.0 / Lam ** 2, x[1] - x[0])


# -------------------------------------------------------------- reversal

def verify_reversal(state, u_override=None):
    """Sign structure of u_P = ubar + eps u about z = 1 in the lambda frame.

    The wall row z = 0 (where u_P = 0) and one cell either side of z = 1 are
    skipped. Returns a dict listing violations and the monotonicity of Lambda.
    """
    u = state.u if u_override is None else u_override
    uP = state.fields.ubar + state.eps * u
    z = state.z
    j1 = int(np.argmin(np.abs(z - 1.0)))
    above = np.zeros(uP.shape, dtype=bool)
    below = np.zeros(uP.shape, dtype=bool)
    above[:, j1 + 2:] = True
    below[:, 1:j1 - 1] = True
    bad_above = np.argwhere(above & ~(uP > 0))
    bad_below = np.argwhere(below & ~(uP < 0))
    dL = np.diff(state.Lambda)
    viol = [("above", float(state.x[i]), float(z[j])) for i, j in bad_above] + \
           [("below", float(state.x[i]), float(z[j])) for i, j in bad_below]
    return {
        "violations": viol,
        "n_violations": len(viol),
        "Lambda_increasing": bool(np.all(dL > 0)),
        "collar_cells": 1,
        "ok": len(viol) == 0 and bool(np.all(dL > 0)),
    }


# ------------------------------------------------------------------ norms

@dataclass
class NormReport:
    M: float
    I: float
    X_I: float
    X_O: float
    X_Max: float
    Y_Max: float
    B_max: float
    Z: float
    calZ: float
    E_Max: float
    bootstrap: float
    pieces: dict = field(default_factory=dict)

    def to_dict(self):
        d = {k: getattr(self, k) for k in ("M", "I", "X_I", "X_O", "X_Max", "Y_Max", "B_max",
                                           "Z", "calZ", "E_Max", "bootstrap")}
        d["pieces"] = self.pieces
        return d


def bessel_potential(g, ds, alpha, pad=4):
    """<d_s>^alpha g on a zero-padded window (pad times the support on each side)."""
    g = np.asarray(g, dtype=float)
    n = len(g)
    m = (2 * pad + 1) * n
    G = np.zeros(m)
    G[pad * n:pad * n + n] = g
    xi = 2 * np.pi * np.fft.rfftfreq(m, ds)
    out = np.fft.irfft((1 + xi ** 2) ** (alpha / 2) * np.fft.rfft(G), m)
    return out


def lp_norm(f, ds, p):
    return float((np.sum(np.abs(f) ** p) * ds) ** (1.0 / p))


def _layer_norms(u, psi, ubar, ubar_z, ubar_zz, eps, g, psibar, s, z, delta, M_max):
    h = z[1] - z[0]
    ds = max(float(s[-1] - s[0]) / max(len(s) - 1, 1), 1e-300)
    j1 = int(np.argmin(np.abs(z - 1.0)))
    wb = ubar + eps * u
    wz = ubar_z + eps * _dz(u, h)
    wzz = ubar_zz + eps * _dz(u, h, 2)
    uz = _dz(u, h)
    with np.errstate(divide="ignore", invalid="ignore"):
        Om = (uz - wzz / wz * u) / wz ** 2
    c13 = np.abs(wz[:, j1]) ** (1.0 / 3.0)
    Zg = c13[:, None] * (z[None, :] - 1.0)
    inner = np.abs(Zg) < delta
    # traces of Omega and its Z-derivatives (local map Z = wz(1)^(1/3)(z - 1))
    Om_Z = _dz(Om, h) / c13[:, None]
    Om_ZZ = _dz(Om, h, 2) / c13[:, None] ** 2
    g1, g2, g3 = Om[:, j1], Om_Z[:, j1], Om_ZZ[:, j1]
    M = lp_norm(bessel_potential(g1, ds, 1 / 3), ds, 2.5) + lp_norm(bessel_potential(g2, ds, 0), ds, 2.5) \
        + lp_norm(bessel_potential(g3, ds, -1 / 3), ds, 2.5)
    band = np.flatnonzero(np.any(inner, axis=0))
    I = 0.0
    for j in band:
        I = max(I, lp_norm(Om[:, j], ds, 6) + lp_norm(Om_Z[:, j], ds, 2.5)
                + lp_norm(bessel_potential(Om_ZZ[:, j], ds, -1 / 3), ds, 2.5))
    dZ = h * c13[:, None]
    XI = float(np.sqrt(np.max(np.sum((Om ** 2 + Om_Z ** 2) * inner * dZ, axis=1)))
               + np.sqrt(np.sum(np.sum(Om_Z ** 2 * inner * dZ, axis=1)) * ds))
    _, B = operators_AB(psibar, psi, h, s)
    U = wb * u - wz * psi
    cU = U - eps * g[:, None] * B
    wgt = (1 + z ** 2) ** M_max
    XO = 0.0
    for j in range(5):
        Uj = _dz(cU, h, j) if j else cU
        uj1 = _dz(u, h, j + 1)
        lo = np.sum(Uj[:, :j1] ** 2, axis=1) * h
        Dlo = -np.sum(wb[:, :j1] * uj1[:, :j1] ** 2, axis=1) * h
        chi = np.ones_like(z) if j == 0 else np.where(z > 1 + 0.2 * j, 1.0, 0.0)
        hi = np.sum((Uj[:, j1:] * chi[j1:]) ** 2 * wgt[j1:], axis=1) * h
        Dhi = np.sum(wb[:, j1:] * (uj1[:, j1:] * chi[j1:]) ** 2 * wgt[j1:], axis=1) * h
        XO += np.max(lo) + np.sum(Dlo ** 2) * ds + np.max(hi) + np.sum(Dhi ** 2) * ds
    XO = float(np.sqrt(XO))
    Y_Max = lp_norm(bessel_potential(u[:, j1], ds, 2 / 3), ds, 2.5) \
        + lp_norm(bessel_potential(psi[:, j1], ds, 2 / 3), ds, 2.5)
    u4 = _dz(u, h, 4)
    B_max = max(lp_norm(bessel_potential(u4[:, j], ds, -2 / 3), ds, 15) for j in range(len(z)))
    Zn = float(M + I + XI + XO + Y_Max + B_max)
    return {"M": float(M), "I": float(I), "X_I": XI, "X_O": XO, "Y_Max": float(Y_Max),
            "B_max": float(B_max), "Z": Zn, "Omega": Om}


def norms(state):
    """Discrete versions of the trace, lifted, energy and maximal-regularity norms."""
    cfg = state.config
    sf = state.fields
    gu = state.good_unknowns()
    eps = state.eps
    args = (sf.ubar, sf.ubar_z, sf.ubar_zz, eps, gu.g, sf.psibar, state.s, state.z,
            cfg.delta, cfg.M_max)
    base = _layer_norms(state.u, state.psi, *args)
    ks = cfg.k_star
    calZ = 0.0
    per_k = []
    omegas = []
    for k in range(ks + 1):
        uk = _dx_s(state.u, state.s, k)
        pk = _dx_s(state.psi, state.s, k)
        nk = base if k == 0 else _layer_norms(uk, pk, *args)
        dk = 1.0 / (100 + ks - k)
        calZ += (eps ** dk if eps > 0 else 0.0 ** dk) * nk["Z"]
        per_k.append(nk["Z"])
        omegas.append(nk["Omega"])
    h = state.z[1] - state.z[0]
    j1 = int(np.argmin(np.abs(state.z - 1.0)))
    band = slice(max(j1 - 10, 0), j1 + 11)
    E = 0.0
    for kp in range(1, ks + 1):
        Om = omegas[ks - kp]
        E += np.max(np.sqrt(np.sum(_dz(Om, h, 3 * kp)[:, band] ** 2, axis=1) * h))
        uk = _dx_s(state.u, state.s, ks - kp)
        E += np.max(np.sqrt(np.sum(_dz(uk, h, 3 * kp + 1)[:, band] ** 2, axis=1) * h))
    boot = 0.0
    for a in range(6):
        pa = _dx_s(state.psi, state.s, a)
        for b in range(11):
            boot = max(boot, float(np.max(np.abs(_dz(pa, h, b) if b else pa))))
    pieces = {"Z_by_k": per_k}
    return NormReport(base["M"], base["I"], base["X_I"], base["X_O"],
                      base["Y_Max"] + base["B_max"], base["Y_Max"], base["B_max"],
                      base["Z"], float(calZ), float(E), boot, pieces)


def _dx_s(f, s, k):
    for _ in range(k):
        f = np.gradient(f, s, axis=0, edge_order=2)
    return f


def lambda_deviation(state):
    """||Lambda - Lambda_G||_inf / eps."""
    return float(np.max(np.abs(state.Lambda - state.Lambda_G)) / state.eps)
