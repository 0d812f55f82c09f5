import json

import numpy as np
import pytest

from revprandtl import cli


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def test_fs_profile_writes_outputs(tmp_path):
    assert run(tmp_path, "fs-profile", "--check") == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["checks"]["reversed_wall_shear"]
    assert man["measured"]["fpp0"] < 0
    eta = cli.read_csv_column(tmp_path / "fs_profile.csv", "eta")
    assert eta[0] == 0.0 and np.all(np.diff(eta) > 0)


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "coords-check", "--check") == 0
    assert run(b, "coords-check", "--check") == 0
    for name in ("eikonal.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_toy_zero_and_failed_check(tmp_path):
    assert run(tmp_path / "z", "toy-solve", "--kind", "zero", "--N_s", "16", "--N_Z", "16", "--check") == 0
    assert run(tmp_path / "f", "toy-solve", "--kind", "bump", "--N_s", "8", "--N_Z", "8", "--check") == 4
    # without --check a failed check is only reported
    assert run(tmp_path / "g", "toy-solve", "--kind", "bump", "--N_s", "8", "--N_Z", "8") == 0


def test_interface_solve_round_trip(tmp_path):
    x = np.linspace(0, 1, 66)[1:-1]
    g = tmp_path / "g.csv"
    cli.write_csv(g, {"s": 1 + x, "G": np.ones_like(x)})
    assert run(tmp_path, "interface", "--solve", "--g-file", str(g), "--check") == 0
    gam = cli.read_csv_column(tmp_path / "gamma.csv", "gamma")
    assert np.all(gam > 0)


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "fs-profile", "--config", str(bad)) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"gamma": 1}))
    assert run(tmp_path, "fs-profile", "--config", str(unknown)) == 2
    assert run(tmp_path, "prandtl", "--eps", "0.5", "--L", "0.2") == 2
    assert run(tmp_path, "interface") == 2
    assert run(tmp_path, "interface", "--solve", "--g-file", str(tmp_path / "missing.csv")) == 2


def test_solver_failure_exit_code(tmp_path):
    assert run(tmp_path, "fs-profile", "--beta", "0.5") == 3


def test_config_hash_ignores_out():
    a = cli.RunConfig(out="x")
    b = cli.RunConfig(out="y")
    assert a.hash() == b.hash()
    assert a.hash() != cli.RunConfig(eps=2e-3).hash()


def test_complex_columns_split(tmp_path):
    p = tmp_path / "c.csv"
    cli.write_csv(p, {"w": np.array([1 + 2j, 3 - 1j])})
    assert p.read_text().splitlines()[0] == "w_re [1],w_im [1]"


def test_validate_subset(tmp_path):
    assert run(tmp_path, "validate", "--suite", "hls", "--check") == 0
    reps = json.loads((tmp_path / "validators.json").read_text())
    assert {r["id"] for r in reps} == {"HLS_p", "HLS_inf"}
