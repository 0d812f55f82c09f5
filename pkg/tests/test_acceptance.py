"""Acceptance checks: one PASS/FAIL line per criterion, printed to the terminal."""
import time

import numpy as np
import pytest

from revprandtl import airy_greens as ag
from revprandtl import coords as co
from revprandtl import interface as itf
from revprandtl import mixedtype as mt
from revprandtl import prandtl, profiles
from revprandtl import specfun as sf
from revprandtl import validators as va


@pytest.fixture
def report(capsys):
    def emit(name, ok, measured, tol, elapsed, limit, note=""):
        in_time = elapsed <= limit
        tag = "PASS" if ok and in_time else "FAIL"
        line = (f"{tag}  {name:34s} measured={measured}  tol={tol}  "
                f"time={elapsed:.1f}s (limit {limit:g}s)")
        if note:
            line += f"  [{note}]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert in_time, line
    return emit


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ------------------------------------------------------------------ Airy

def test_airy_wronskian_ai_bi(report):
    def run():
        th = np.linspace(-np.pi, np.pi, 361)
        r = np.linspace(0, 20, 101)
        w = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
        e = sf.airy(w)
        d = np.abs(e.wronskian() - 1 / np.pi)
        scale = np.maximum(1.0, np.abs(e.ai * e.bi_prime) + np.abs(e.ai_prime * e.bi))
        return (d / scale).max(), d.max()
    (scaled, absolute), dt = _timed(run)
    report("airy: W[ai,bi] = 1/pi, |w|<=20", scaled <= 1e-10, f"{scaled:.2e}", "1e-10", dt, 1,
           note=f"scaled by max(1,|ai bi'|+|ai' bi|); unscaled {absolute:.1e}")


def test_airy_wronskian_rotated(report):
    val, dt = _timed(lambda: abs(sf.wronskian_ai_rotated(-1) - np.exp(-1j * np.pi / 6) / (2 * np.pi)))
    report("airy: W[ai,B_-1](0)", val <= 1e-10, f"{val:.2e}", "1e-10", dt, 1)


def test_multiplier_identity(report):
    def run():
        xi = np.concatenate([-np.logspace(-2, 3, 2001), np.logspace(-2, 3, 2001)])
        lhs = ag.cube_root(xi) * ag.wronskian_multiplier(xi)
        return np.max(np.abs(lhs - ag.C0 * np.abs(xi) ** (1 / 3)) / np.abs(xi) ** (1 / 3))
    val, dt = _timed(run)
    report("multiplier: (i xi)^(1/3) M = C0|xi|^(1/3)", val <= 1e-8, f"{val:.2e}", "1e-8", dt, 1)


# -------------------------------------------------------------- Eikonal

def test_eikonal_residual(report):
    def run():
        Y = np.linspace(-0.3, 0.3, 121)
        h = Y[1] - Y[0]
        W = lambda q: 1.0 + 0.8 * q + 0.5 * np.sin(3 * q)
        r = co.eikonal_residual(W, Y)
        return r[np.abs(Y) >= h - 1e-15].max()
    val, dt = _timed(run)
    report("eikonal: residual off the Y=0 cell", val <= 1e-8, f"{val:.2e}", "1e-8", dt, 1)


def test_eikonal_constant_shear(report):
    def run():
        Y = np.linspace(-0.5, 0.5, 201)
        return max(np.max(np.abs(co.eikonal_p(lambda q: c + 0 * q, Y) - c ** (2 / 3) * Y))
                   for c in (0.3, 1.0, 2.3, 7.0))
    val, dt = _timed(run)
    report("eikonal: constant shear exact", val <= 1e-12, f"{val:.2e}", "1e-12", dt, 1)


# --------------------------------------------------------- Falkner-Skan

def _bisect_oracle(beta, lo, hi, eta_max):
    # bracket from the independent RK4 sweep, then bisection on the same sweep
    for _ in range(40):
        a, r = profiles.sweep(beta, lo, hi, 5, eta_max, 0.005)
        k = np.flatnonzero(np.sign(r[:-1]) != np.sign(r[1:]))[0]
        lo, hi = a[k], a[k + 1]
    return 0.5 * (lo + hi)


def test_falkner_skan_blasius(report):
    p, dt = _timed(lambda: profiles.solve_fs(0.0, "attached"))
    fpp0, oracle = p.fpp0, _bisect_oracle(0.0, 0.3, 0.6, 12.0)
    err = max(abs(fpp0 - 0.469600), abs(fpp0 - oracle))
    report("falkner-skan: beta=0 f''(0)", err <= 1e-4, f"{fpp0:.6f} (oracle {oracle:.6f})",
           "0.469600 +- 1e-4", dt, 5)


def test_falkner_skan_reversed(report):
    def run():
        p = profiles.solve_fs(-0.1, "reversed")
        eta = np.linspace(1e-3, p.eta_max, 20001)
        fp = p.f(eta, 1)
        n_zero = int(np.count_nonzero(np.sign(fp[1:]) != np.sign(fp[:-1])))
        return p, n_zero, abs(p.f(p.eta_max, 1) - 1.0)
    (p, nz, far), dt = _timed(run)
    ok = p.fpp0 < 0 and nz == 1 and far <= 1e-6
    report("falkner-skan: beta=-0.1 reversed", ok,
           f"f''(0)={p.fpp0:.6f}, zeros={nz}, |f'-1|={far:.1e}", "f''<0, 1 zero, 1e-6", dt, 5,
           note=f"eta*={p.eta_star:.6f}")


# ---------------------------------------------------------- toy problem

@pytest.fixture(scope="module")
def toy():
    man = mt.manufactured(1.0, "data")
    t0 = time.perf_counter()
    sol = mt.solve_toy(man["F"], man["omega_left"], man["omega_right"], 1.0, Ns=256, NZ=256,
                       omega_left_zz=man["omega_left_zz"], omega_right_zz=man["omega_right_zz"])
    return man, sol, time.perf_counter() - t0


def test_toy_sup_error(report, toy):
    man, sol, dt = toy
    err = np.max(np.abs(sol.omega - man["omega"](sol.s[:, None], sol.Z[None, :])))
    report("toy: sup error at 256^2", err <= 5e-4, f"{err:.2e}", "5e-4", dt, 30)


def test_toy_residual(report, toy):
    man, sol, dt0 = toy

    def run():
        prob, h = sol.problem, 0.01
        Zc = np.array([-3, -2, -1, -0.5, 0.5, 1, 2, 3.0])
        w = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
        pts = (Zc[:, None] + h * np.arange(-3, 4)[None, :]).ravel()
        W = prob.window_field(pts)[0].reshape(prob.Nw, len(Zc), 7)
        res = Zc * prob.d_s(W[:, :, 3]) - W @ w / h ** 2 - prob.field(Zc, homogenized=False)
        return np.abs(res[prob.interior][1:-1]).max()
    val, dt = _timed(run)
    report("toy: PDE residual", val <= 1e-6, f"{val:.2e}", "1e-6", dt0 + dt, 30)


def test_toy_data_match(report, toy):
    man, sol, dt = toy
    Z = sol.Z
    err = max(np.max(np.abs(sol.omega[0, Z > 0] - man["omega_left"](Z[Z > 0]))),
              np.max(np.abs(sol.omega[-1, Z < 0] - man["omega_right"](Z[Z < 0]))))
    report("toy: inflow data matched", err <= 1e-6, f"{err:.2e}", "1e-6", dt, 30)


# ------------------------------------------------------------ interface

def test_interface_dual_path(report):
    def run():
        x, _ = itf.grid(256, 1.0)
        u = np.sin(np.pi * x) ** 2 * np.exp(x)
        a = itf.frac_laplacian_apply(u, 1.0, "multiplier")
        b = itf.frac_laplacian_apply(u, 1.0, "kernel")
        return np.max(np.abs(a - b)) / np.max(np.abs(a))
    val, dt = _timed(run)
    report("interface: multiplier vs kernel, N=256", val <= 1e-4, f"{val:.2e}", "1e-4", dt, 20)


def test_interface_inverse(report):
    def run():
        x, _ = itf.grid(256, 1.0)
        G = np.cos(3 * x) + x
        g, _ = itf.solve_interface(G, 1.0)
        return np.max(np.abs(itf.frac_laplacian_apply(g, 1.0) - G))
    val, dt = _timed(run)
    report("interface: inverse consistency", val <= 1e-6, f"{val:.2e}", "1e-6", dt, 20)


def test_interface_scaling(report):
    def run():
        worst = 0.0
        x1, _ = itf.grid(256, 1.0)
        g1, _ = itf.solve_interface(np.cos(3 * x1), 1.0)
        for ell in (0.1, 0.2, 5.0):
            xl, _ = itf.grid(256, ell)
            gl, _ = itf.solve_interface(np.cos(3 * xl / ell), ell)
            ratio = np.max(np.abs(gl)) / np.max(np.abs(g1))
            worst = max(worst, abs(ratio / ell ** (1 / 3) - 1))
        return worst
    val, dt = _timed(run)
    report("interface: L^(1/3) scaling", val <= 0.01, f"{val:.2e}", "1%", dt, 20)


# ------------------------------------------------------------- nonlinear

@pytest.fixture(scope="module")
def prandtl_runs():
    prof = profiles.solve_fs(-0.1)
    bg = profiles.background(prof)
    data = profiles.default_boundary_data(bg)
    runs, times = {}, {}
    for eps in (1e-3, 5e-4, 2.5e-4):
        t0 = time.perf_counter()
        runs[eps] = prandtl.iterate(data, prof, eps, 0.2, bg=bg)
        times[eps] = time.perf_counter() - t0
    return runs, times


def test_prandtl_decrement(report, prandtl_runs):
    runs, times = prandtl_runs
    st = runs[1e-3]
    r = st.diagnostics["decrement_ratios"]
    late = r[2:]
    ok = bool(late) and max(late) <= 0.5 and st.diagnostics["converged"]
    report("prandtl: decrement ratio after it. 3", ok, f"max {max(late):.3f}", "0.5",
           times[1e-3], 180, note="ratios " + ", ".join(f"{v:.3f}" for v in r)
           + f"; {st.diagnostics['iterations']} iterations")


def test_prandtl_reversal(report, prandtl_runs):
    runs, times = prandtl_runs
    rep = prandtl.verify_reversal(runs[1e-3])
    report("prandtl: verify_reversal", rep["ok"], f"{rep['n_violations']} violations",
           "0 outside collar", times[1e-3], 180,
           note=f"Lambda increasing: {rep['Lambda_increasing']}")


def test_prandtl_lambda_deviation(report, prandtl_runs):
    runs, times = prandtl_runs
    dev = {e: prandtl.lambda_deviation(s) for e, s in runs.items()}
    v = np.array(list(dev.values()))
    spread = (v.max() - v.min()) / v.min()
    report("prandtl: |Lambda-Lambda_G|/eps stable", spread <= 0.2, f"spread {spread:.2e}",
           "20%", sum(times.values()), 180,
           note=", ".join(f"eps={e:g}: {d:.4f}" for e, d in dev.items()))


# ------------------------------------------------------------- resonance

@pytest.fixture(scope="module")
def scan():
    bg = profiles.background(profiles.solve_fs(-0.1))
    L = np.linspace(0.1, 2.0, 16)
    t0 = time.perf_counter()
    res = itf.resonance_scan(L, bg, 128, details=True)
    return res, time.perf_counter() - t0


def test_resonance_small_L(report, scan):
    res, dt = scan
    small = res.L <= 0.1 + 1e-12
    ratio = np.min(res.sigma_min[small] / res.floor[small])
    ok = bool(np.all(res.sigma_min > 0)) and ratio >= 0.5
    report("resonance: sigma_min vs floor, L<=0.1", ok, f"ratio {ratio:.3f}", ">= 0.5, > 0", dt, 300,
           note=f"sigma_min(0.1)={res.sigma_min[0]:.4f}, floor={res.floor[0]:.4f}")


def test_resonance_scan_completes(report, scan):
    res, dt = scan
    ok = len(res.sigma_min) == len(res.L) and bool(np.all(np.isfinite(res.sigma_min)))
    flagged = "none" if len(res.flagged) == 0 else ", ".join(f"{v:.3f}" for v in res.flagged)
    report("resonance: scan L in [0.1, 2], N=128", ok,
           f"min sigma {res.sigma_min.min():.4f}", "completes", dt, 300,
           note=f"flagged: {flagged}")


# ------------------------------------------------------------ validators

def test_validators(report):
    reps, dt = _timed(lambda: va.run_suite("all"))
    bad = [r.id for r in reps if not r.passed]
    worst = max(r.drift for r in reps)
    report("validators: all inequality families", not bad, f"{len(reps)} checks, max drift {worst:.3f}",
           "drift <= 10%", dt, 60, note=("failed: " + ", ".join(bad)) if bad else "")
