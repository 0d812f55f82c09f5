"""Command-line front end: `revprandtl <subcommand> [options]`.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 failed
acceptance check (only with --check). Every run writes manifest.json next to
its outputs with the config hash and the measured quantities; nothing
time-dependent is recorded so identical runs give identical bytes.
"""
import os

_threads = os.environ.get("PRANDTL_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    beta: float = -0.1
    eps: float = 1e-3
    L: float = 0.2
    N_s: int = 41
    N_Z: int = 256
    N_z: int = 161
    tol: float = 1e-8
    M_max: int = 6
    k_star: int = 3
    seed: int = 42
    out: str = "."

    def validate(self, small_L_path=False):
        for name in ("L", "N_s", "N_Z", "N_z", "tol", "M_max", "k_star"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.eps < 0:
            raise ConfigError("eps must be non-negative")
        if small_L_path and not self.eps < self.L:
            raise ConfigError("the small-L path needs eps < L")
        return self

    def hash(self):
        d = {k: v for k, v in asdict(self).items() if k != "out"}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def load_config(path, overrides):
    data = {}
    if path:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {path} not found")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    known = {f.name: f.type for f in fields(RunConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None and k in known})
    cfg = RunConfig()
    for k, v in data.items():
        default = getattr(cfg, k)
        try:
            setattr(cfg, k, type(default)(v))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {k}: {v!r}") from exc
    return cfg


# ---------------------------------------------------------------- output

def _fmt(v):
    return format(float(v), ".17g")


def write_csv(path, columns, units=None):
    """Columns of equal length; complex columns become name_re, name_im."""
    names, cols = [], []
    units = units or {}
    for name, col in columns.items():
        col = np.ravel(np.asarray(col))
        u = units.get(name, "1")
        if np.iscomplexobj(col):
            names += [f"{name}_re [{u}]", f"{name}_im [{u}]"]
            cols += [col.real, col.imag]
        else:
            names.append(f"{name} [{u}]")
            cols.append(col)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def read_csv_column(path, name=None):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header = [h.split(" [")[0] for h in rows[0]]
    k = header.index(name) if name in header else 0
    return np.array([float(r[k]) for r in rows[1:]])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_manifest(out, sub, cfg, tolerances, measured, files, checks=None):
    write_json(out / "manifest.json", {
        "subcommand": sub, "version": __version__, "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
        "config_hash": cfg.hash(), "tolerances": tolerances,
        "measured": measured, "files": sorted(files), "checks": checks or {},
    })


# ----------------------------------------------------------- subcommands

def cmd_fs_profile(args, cfg, out):
    from .profiles import solve_fs
    p = solve_fs(cfg.beta, branch=args.branch)
    smp = p.samples()
    write_csv(out / "fs_profile.csv", {"eta": smp["eta"], "f": smp["f"], "fp": smp["fp"],
                                       "fpp": smp["fpp"]})
    meas = {"fpp0": p.fpp0, "eta_star": p.eta_star, "n": p.n, **p.diagnostics}
    checks = {"far_field": p.diagnostics["residual"] <= 1e-6}
    if args.branch == "reversed":
        checks["reversed_wall_shear"] = p.fpp0 < 0
    return meas, {"far_field": 1e-6}, ["fs_profile.csv"], checks


def cmd_coords_check(args, cfg, out):
    from . import coords
    # smooth positive shear on a strip around Y = 0
    W = lambda q: 1.0 + 0.8 * q + 0.5 * np.sin(3 * q)
    Y = np.linspace(-0.3, 0.3, args.n)
    h = Y[1] - Y[0]
    res = coords.eikonal_residual(W, Y)
    emap = coords.eikonal(W, Y)
    rmax = float(np.max(res[np.abs(Y) >= h - 1e-15]))
    c = 2.3
    exact = float(np.max(np.abs(coords.eikonal_p(lambda q: c + 0 * q, Y) - c ** (2 / 3) * Y)))
    write_csv(out / "eikonal.csv", {"Y": Y, "p": emap.p[0], "p_Y": emap.p_Y[0], "residual": res})
    meas = {"eikonal_residual": rmax, "constant_shear_error": exact}
    checks = {"eikonal_residual": rmax <= 1e-8, "constant_shear": exact <= 1e-12}
    return meas, {"eikonal_residual": 1e-8, "constant_shear": 1e-12}, ["eikonal.csv"], checks


def cmd_toy_solve(args, cfg, out):
    from . import mixedtype as mt
    Lbar = args.Lbar
    if args.kind == "zero":
        zero = lambda s, Z: 0.0 * s * Z
        sol = mt.solve_toy(zero, lambda s: 0.0 * s, lambda s: 0.0 * s, Lbar, cfg.N_s, cfg.N_Z)
        err = None
    else:
        ms = mt.manufactured(Lbar, kind=args.kind)
        sol = mt.solve_toy(ms["F"], ms["omega_left"], ms["omega_right"], Lbar, cfg.N_s, cfg.N_Z,
                           omega_left_zz=ms.get("omega_left_zz"),
                           omega_right_zz=ms.get("omega_right_zz"))
        S, Zg = np.meshgrid(sol.s, sol.Z, indexing="ij")
        err = float(np.max(np.abs(sol.omega - ms["omega"](S, Zg))))
    S, Zg = np.meshgrid(sol.s, sol.Z, indexing="ij")
    write_csv(out / "toy_field.csv", {"s": S, "Z": Zg, "omega": sol.omega})
    write_csv(out / "toy_traces.csv", {"s": sol.s, "gamma1": sol.traces.gamma1})
    meas = dict(sol.diagnostics)
    checks = {}
    if err is not None:
        meas["sup_error"] = err
        checks["sup_error"] = err <= 5e-4
    else:
        checks["zero_field"] = bool(np.all(sol.omega == 0))
    return meas, {"sup_error": 5e-4}, ["toy_field.csv", "toy_traces.csv"], checks


def cmd_interface(args, cfg, out):
    from . import interface as itf
    if args.scan:
        from .profiles import solve_fs
        L = np.linspace(args.l_min, args.l_max, args.num)
        res = itf.resonance_scan(L, solve_fs(cfg.beta), args.n, details=True)
        write_csv(out / "scan.csv", {"L": res.L, "sigma_min": res.sigma_min, "floor": res.floor,
                                     "K_norm": res.K_norm, "det_sign": res.det_sign})
        small = res.L <= 0.1
        ok = bool(np.all(res.sigma_min[small] >= 0.5 * res.floor[small])) if small.any() else True
        meas = {"sigma_min": res.sigma_min, "floor": res.floor, "flagged": res.flagged}
        return meas, {"small_L_ratio": 0.5}, ["scan.csv"], {"small_L_floor": ok,
                                                             "positive": bool(np.all(res.sigma_min > 0))}
    if args.solve:
        if not args.g_file or not Path(args.g_file).exists():
            raise ConfigError("--solve needs an existing --g-file")
        G = read_csv_column(args.g_file, "G")
        gam, resid = itf.solve_interface(G, args.ell, method=args.method)
        x, _ = itf.grid(len(G), args.ell)
        write_csv(out / "gamma.csv", {"s": 1.0 + x, "G": G, "gamma": gam})
        return {"residual": resid}, {"residual": 1e-6}, ["gamma.csv"], {"residual": resid <= 1e-6}
    raise ConfigError("interface needs --scan or --solve")


def cmd_prandtl(args, cfg, out):
    from . import prandtl as pr
    from .profiles import background, default_boundary_data, solve_fs
    prof = solve_fs(cfg.beta)
    bg = background(prof)
    pc = pr.PrandtlConfig(nx=cfg.N_s, hz=8.0 / (cfg.N_z - 1), tol=cfg.tol, M_max=cfg.M_max,
                          k_star=cfg.k_star)
    st = pr.iterate(default_boundary_data(bg, M_max=cfg.M_max), prof, cfg.eps, cfg.L, pc, bg)
    rev = pr.verify_reversal(st)
    nrm = pr.norms(st)
    S, Zg = np.meshgrid(st.s, st.z, indexing="ij")
    write_csv(out / "fields.csv", {"s": S, "z": Zg, "u": st.u, "psi": st.psi, "v": st.v})
    write_csv(out / "free_boundary.csv", {"x": st.x, "Lambda": st.Lambda,
                                          "Lambda_G": st.Lambda_G, "mu": st.mu})
    write_json(out / "norms.json", nrm.to_dict())
    dev = pr.lambda_deviation(st) if cfg.eps > 0 else 0.0
    meas = {"iterations": st.diagnostics["iterations"], "history": st.history,
            "decrement_ratios": st.diagnostics["decrement_ratios"],
            "lambda_deviation_over_eps": dev,
            "decoupling_gap": st.diagnostics["decoupling_gap"],
            "reversal_violations": rev["n_violations"]}
    late = st.diagnostics["decrement_ratios"][2:]
    checks = {"converged": st.diagnostics["converged"], "reversal": rev["ok"],
              "decrement_ratio": bool(late and max(late) <= 0.5)}
    return meas, {"tol": cfg.tol, "decrement_ratio": 0.5}, \
        ["fields.csv", "free_boundary.csv", "norms.json"], checks


def cmd_validate(args, cfg, out):
    from . import validators as va
    reps = va.run_suite(args.suite, seed=cfg.seed)
    write_json(out / "validators.json", [r.to_dict() for r in reps])
    meas = {r.id: r.constant for r in reps}
    return meas, {"drift": va.DRIFT_TOL}, ["validators.json"], {r.id: r.passed for r in reps}


COMMANDS = {"fs-profile": cmd_fs_profile, "coords-check": cmd_coords_check,
            "toy-solve": cmd_toy_solve, "interface": cmd_interface,
            "prandtl": cmd_prandtl, "validate": cmd_validate}


def build_parser():
    ap = argparse.ArgumentParser(prog="revprandtl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--out", help="output directory")
        p.add_argument("--check", action="store_true", help="exit 4 if a check fails")
        for name, typ in (("beta", float), ("eps", float), ("L", float), ("N_s", int),
                          ("N_Z", int), ("N_z", int), ("tol", float), ("seed", int)):
            p.add_argument(f"--{name}", type=typ, dest=name)
        return p

    p = common(sub.add_parser("fs-profile", help="Falkner-Skan profile"))
    p.add_argument("--branch", default="reversed", choices=["reversed", "attached"])
    p = common(sub.add_parser("coords-check", help="Eikonal map residuals"))
    p.add_argument("--n", type=int, default=121)
    p = common(sub.add_parser("toy-solve", help="mixed-type toy problem"))
    p.add_argument("--kind", default="bump", choices=["zero", "bump", "data"])
    p.add_argument("--Lbar", type=float, default=1.0)
    p = common(sub.add_parser("interface", help="fractional interface solve or scan"))
    p.add_argument("--scan", action="store_true")
    p.add_argument("--solve", action="store_true")
    p.add_argument("--l-min", type=float, default=0.1)
    p.add_argument("--l-max", type=float, default=2.0)
    p.add_argument("--num", type=int, default=16)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--g-file")
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--method", default="multiplier", choices=["multiplier", "kernel", "p1"])
    common(sub.add_parser("prandtl", help="nonlinear free-boundary iteration"))
    p = common(sub.add_parser("validate", help="harmonic-analysis validators"))
    p.add_argument("--suite", default="all")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in
                 ("beta", "eps", "L", "N_s", "N_Z", "N_z", "tol", "seed", "out")}
    try:
        cfg = load_config(args.config, overrides).validate(args.cmd == "prandtl")
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        meas, tols, files, checks = COMMANDS[args.cmd](args, cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surface the module error
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    write_manifest(out, args.cmd, cfg, tols, meas, files + ["manifest.json"], checks)
    failed = [k for k, v in checks.items() if not v]
    for k in failed:
        print(f"check failed: {k}", file=sys.stderr)
    if args.check and failed:
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
