"""Falkner-Skan profiles, the self-similar background and boundary data.

f''' + f f'' + beta (1 - f'^2) = 0,  f(0) = f'(0) = 0,  f'(inf) = 1.

For beta < 0 there are two solutions: the attached one with f''(0) > 0 and
the reversed one with f''(0) < 0, where f' changes sign once at eta*.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp


class NoConvergence(RuntimeError):
    pass


class BranchUnavailable(ValueError):
    pass


class DegenerateWeight(ValueError):
    pass


def _rhs(beta):
    def f(eta, y):
        return [y[1], y[2], -y[0] * y[2] - beta * (1.0 - y[1] ** 2)]
    return f


def _blowup(eta, y):
    return 60.0 - abs(y[1])


_blowup.terminal = True


def shoot(beta, fpp0, eta_max, dense=False, rtol=1e-12, atol=1e-13):
    """Integrate from the wall with f''(0) = fpp0; returns the solve_ivp result."""
    return solve_ivp(_rhs(beta), (0.0, eta_max), [0.0, 0.0, fpp0], method="DOP853",
                     rtol=rtol, atol=atol, dense_output=dense, events=_blowup)


def _residual(beta, a, eta_max):
    sol = shoot(beta, a, eta_max)
    return sol.y[1, -1] - 1.0, sol


@dataclass(frozen=True)
class FsProfile:
    beta: float
    n: float
    fpp0: float
    eta_star: float
    eta_max: float
    branch: str
    sol: object = field(repr=False, compare=False)
    diagnostics: dict = field(default_factory=dict, compare=False)

    def f(self, eta, k=0):
        """k-th derivative of f (k <= 5), continued by f' = 1 past eta_max."""
        eta = np.asarray(eta, dtype=float)
        e = np.clip(eta, 0.0, self.eta_max)
        y = self.sol.sol(e.ravel()).reshape((3,) + e.shape)
        f0, f1, f2 = y
        b = self.beta
        if k == 0:
            return f0 + np.where(eta > self.eta_max, (eta - self.eta_max) * f1, 0.0)
        if k == 1:
            return f1
        if k == 2:
            return f2
        f3 = -f0 * f2 - b * (1 - f1 ** 2)
        if k == 3:
            return f3
        f4 = -(f1 * f2 + f0 * f3) + 2 * b * f1 * f2
        if k == 4:
            return f4
        if k == 5:
            return -(f2 ** 2 + 2 * f1 * f3 + f0 * f4) + 2 * b * (f2 ** 2 + f1 * f3)
        raise ValueError("k must be between 0 and 5")

    def samples(self, num=241):
        """Graded grid clustered at the wall, with f, f', f''."""
        x = np.linspace(0.0, 1.0, num)
        eta = self.eta_max * x ** 1.5
        return {"eta": eta, "f": self.f(eta), "fp": self.f(eta, 1), "fpp": self.f(eta, 2)}

    def to_dict(self):
        d = {"beta": self.beta, "n": self.n, "branch": self.branch, "fpp0": self.fpp0,
             "eta_star": self.eta_star, "eta_max": self.eta_max}
        d.update({k: v.tolist() for k, v in self.samples().items()})
        d["diagnostics"] = self.diagnostics
        return d


def sweep(beta, lo, hi, num=200, eta_max=12.0, h=0.02):
    """Residual f'(eta_max) - 1 on a uniform grid of f''(0) values.

    All samples are advanced together with classical RK4; trajectories whose
    f' exceeds 60 in size are stopped and reported as nan, since a sign
    change across a blow-up is not a root.
    """
    a = np.linspace(lo, hi, num)
    y = np.zeros((3, num))
    y[2] = a
    rhs = lambda y: np.array([y[1], y[2], -y[0] * y[2] - beta * (1.0 - y[1] ** 2)])
    steps = int(np.ceil(eta_max / h))
    h = eta_max / steps
    live = np.ones(num, dtype=bool)
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = np.where(live, y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), y)
        live &= np.abs(y[1]) < 60.0
    return a, np.where(live, y[1] - 1.0, np.nan)


def _reversal_zeros(sol, eta_max):
    eta = np.linspace(0.0, eta_max, 4001)[1:]
    fp = sol.sol(eta)[1]
    return eta, fp, np.flatnonzero(np.sign(fp[1:]) != np.sign(fp[:-1]))


def _solve(beta, branch, eta_max, tol):
    lo, hi = (-0.6, 0.0) if branch == "reversed" else (1e-3, 2.0)
    a, r = sweep(beta, lo, hi, 200, eta_max)
    cands = []
    for i in np.flatnonzero(np.isfinite(r[:-1]) & np.isfinite(r[1:])
                            & (np.sign(r[:-1]) != np.sign(r[1:]))):
        try:
            root = optimize.brentq(lambda x: _residual(beta, x, eta_max)[0], a[i], a[i + 1],
                                   xtol=1e-15, rtol=1e-15, maxiter=200)
        except ValueError:
            continue
        sol = shoot(beta, root, eta_max, dense=True)
        if sol.status != 0:
            continue
        res = abs(sol.y[1, -1] - 1.0)
        tail = abs(sol.y[2, -1])
        _, _, z = _reversal_zeros(sol, eta_max)
        ok = res <= tol and (len(z) == 1 if branch == "reversed" else len(z) == 0)
        if ok:
            cands.append((tail, root, sol))
    if not cands:
        raise NoConvergence(f"no {branch} profile found for beta={beta}")
    cands.sort(key=lambda c: c[0])
    return cands[0][1], cands[0][2]


def solve_fs(beta, branch="reversed", eta_max=12.0, tol=1e-6, check_doubling=True):
    """Shoot on f''(0) after bracketing by a 200-point sweep."""
    beta = float(beta)
    if branch not in ("attached", "reversed"):
        raise ValueError("branch must be 'attached' or 'reversed'")
    if branch == "reversed" and beta >= 0:
        raise BranchUnavailable("reversed profiles need beta < 0")
    if eta_max < 10:
        raise ValueError("eta_max must be at least 10")
    a, sol = _solve(beta, branch, eta_max, tol)
    eta_star = 0.0
    if branch == "reversed":
        eta, fp, z = _reversal_zeros(sol, eta_max)
        i = z[0]
        eta_star = optimize.brentq(lambda e: sol.sol(e)[1], eta[i], eta[i + 1], xtol=1e-15)
    diag = {"residual": float(abs(sol.y[1, -1] - 1.0)), "fpp_at_eta_max": float(sol.y[2, -1])}
    if check_doubling:
        a2, _ = _solve(beta, branch, 2 * eta_max, tol)
        diag["doubling_shift"] = float(abs(a2 - a))
    return FsProfile(beta, beta / (2.0 - beta), float(a), float(eta_star), float(eta_max),
                     branch, sol, diag)


# ------------------------------------------------------------- background

@dataclass(frozen=True)
class BackgroundFields:
    """u_FS(x, y) = x^n f'(y / x^a), a = (1 - n)/2, with zero curve eta* x^a.

    The (s, z) versions refer to the unperturbed map ds/dx = 1/Lambda_G^2,
    z = y/Lambda_G(x), under which eta = eta* z.
    """
    profile: FsProfile

    @property
    def n(self):
        return self.profile.n

    @property
    def a(self):
        return 0.5 * (1.0 - self.profile.n)

    @property
    def eta_star(self):
        return self.profile.eta_star

    def Lambda_G(self, x):
        return self.eta_star * np.asarray(x, dtype=float) ** self.a

    def eta(self, x, y):
        return np.asarray(y, dtype=float) * np.asarray(x, dtype=float) ** (-self.a)

    def u_fs(self, x, y, dy=0):
        """d_y^dy u_FS."""
        x = np.asarray(x, dtype=float)
        return x ** (self.n - dy * self.a) * self.profile.f(self.eta(x, y), dy + 1)

    def u_fs_x(self, x, y):
        x = np.asarray(x, dtype=float)
        e = self.eta(x, y)
        f = self.profile.f
        return x ** (self.n - 1) * (self.n * f(e, 1) - self.a * e * f(e, 2))

    def psi_fs(self, x, y):
        x = np.asarray(x, dtype=float)
        return x ** (self.n + self.a) * self.profile.f(self.eta(x, y))

    def v_fs(self, x, y):
        x = np.asarray(x, dtype=float)
        e = self.eta(x, y)
        f = self.profile.f
        return -x ** (self.n + self.a - 1) * ((self.n + self.a) * f(e) - self.a * e * f(e, 1))

    # unperturbed self-similar variables
    def x_of_s(self, s):
        s = np.asarray(s, dtype=float)
        es2 = self.eta_star ** 2
        if self.n == 0:
            return np.exp((s - 1.0) * es2)
        return (1.0 + self.n * es2 * (s - 1.0)) ** (1.0 / self.n)

    def s_of_x(self, x):
        x = np.asarray(x, dtype=float)
        es2 = self.eta_star ** 2
        if self.n == 0:
            return 1.0 + np.log(x) / es2
        return 1.0 + (x ** self.n - 1.0) / (self.n * es2)

    def ubar(self, s, z, dz=0, ds=0):
        """d_s^ds d_z^dz of ubar(s, z) = x(s)^n f'(eta* z) (ds <= 1)."""
        es = self.eta_star
        f = self.profile.f(es * np.asarray(z, dtype=float), dz + 1) * es ** dz
        if ds == 0:
            return self.x_of_s(s) ** self.n * f
        if ds == 1:
            return self.n * es ** 2 * f
        return 0.0 * f

    def psibar(self, s, z):
        es = self.eta_star
        return self.x_of_s(s) ** self.n * self.profile.f(es * np.asarray(z, dtype=float)) / es

    def vbar(self, s, z, dz=0):
        es = self.eta_star
        return -self.n * es * self.profile.f(es * np.asarray(z, dtype=float), dz) * es ** dz \
            + 0.0 * np.asarray(s, dtype=float)

    def lambda_G(self, s):
        return self.Lambda_G(self.x_of_s(s))

    def lambda_G_log_derivative(self, s):
        """lambda_G'(s)/lambda_G(s) in the s variable."""
        return self.a * self.eta_star ** 2 * self.x_of_s(s) ** (-self.n)


def background(profile):
    return BackgroundFields(profile)


# ---------------------------------------------------------- boundary data

@dataclass
class BoundaryData:
    """F_Left on z >= 1 and u_Right on [0, 1] (profile functions)."""
    F_Left: callable
    u_Right: callable
    M_max: int = 6

    def compatibility(self, h=1e-3):
        """Corner conditions u_Right(1) = 0, u_Right''(0) = u_Right'''(0) = 0,
        checked with one-sided differences, and weighted sup norms."""
        z = h * np.arange(6)
        u = self.u_Right(z)
        d2 = (45 * u[0] - 154 * u[1] + 214 * u[2] - 156 * u[3] + 61 * u[4] - 10 * u[5]) / (12 * h ** 2)
        d3 = (-17 * u[0] + 71 * u[1] - 118 * u[2] + 98 * u[3] - 41 * u[4] + 7 * u[5]) / (4 * h ** 3)
        zz = np.linspace(1.0, 60.0, 2000)
        zr = np.linspace(0.0, 1.0, 401)
        return {
            "u_right_at_1": float(self.u_Right(np.array([1.0]))[0]),
            "u_right_zz_at_0": float(d2),
            "u_right_zzz_at_0": float(d3),
            "u_right_sup": float(np.max(np.abs(self.u_Right(zr)))),
            "F_left_weighted_sup": float(np.max(np.abs(self.F_Left(zz)) * zz ** (3 * self.M_max))),
        }


def default_boundary_data(bg, amp_right=0.5, amp_left=0.5, M_max=6):
    """Smooth compatible data: u_Right = A (z - z^4) and an F_Left decaying
    like the background shear at s = 1."""
    def u_right(z):
        z = np.asarray(z, dtype=float)
        return amp_right * (z - z ** 4)

    def f_left(z):
        z = np.asarray(z, dtype=float)
        return amp_left * bg.ubar(1.0, z, dz=1) * (z - 1.0) * np.exp(-(z - 1.0) ** 2)

    return BoundaryData(f_left, u_right, M_max)


_GX, _GW = np.polynomial.legendre.leggauss(16)


def left_velocity_from_vorticity(data, gamma0_1, mu1=0.0, z=None, bg=None, eps=0.0,
                                 weight=None):
    """u(1, z) = (w_z(z)/w_z(1)) gamma0 + w_z(z) int_1^z F_Left/w_z  on z >= 1.

    The weight w_z is the background shear at s = 1, d_z f'(lambda_1 z) with
    lambda_1 = eta* + eps*mu1, unless a callable weight(z) is supplied.
    The integral is done in log form so the ratio of weights stays finite.
    """
    if z is None:
        z = np.linspace(1.0, 8.0, 281)
    z = np.asarray(z, dtype=float)
    if z[0] != 1.0 or np.any(np.diff(z) <= 0):
        raise ValueError("z must start at 1 and increase")
    if weight is None:
        lam = bg.eta_star + eps * mu1
        weight = lambda zz: lam * bg.profile.f(lam * zz, 2)
    a, b = z[:-1, None], z[1:, None]
    zq = 0.5 * (a + b) + 0.5 * (b - a) * _GX
    wq = 0.5 * (b - a) * _GW
    wz = weight(z)
    wzq = weight(zq)
    if np.any(wz <= 0) or np.any(wzq <= 0):
        raise DegenerateWeight("background shear vanishes on the integration path")
    lw, lwq = np.log(wz), np.log(wzq)
    # I(z_k) = int_1^{z_k} F/w_z, carried as exp(lw[k]) * I(z_k)
    out = np.zeros_like(z)
    acc = 0.0
    for k in range(len(z) - 1):
        acc = acc * np.exp(lw[k + 1] - lw[k]) + np.sum(
            wq[k] * data.F_Left(zq[k]) * np.exp(lw[k + 1] - lwq[k]))
        out[k + 1] = acc
    return wz / wz[0] * gamma0_1 + out
