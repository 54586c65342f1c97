import io
import json
import logging

import numpy as np
import pytest

from fractel.analytic import telegraph_density
from fractel.cli import RunConfig, cmd_compare, cmd_simulate, load_config, main
from fractel.errors import ConfigError
from fractel.fields import read_field_csv

TELEGRAPH = {
    "equation": "telegraph",
    "alpha": 0.4,
    "lambda": 1.0,
    "symbol": {"kind": "fractional_laplacian", "beta": 1.5},
    "initial": {"kind": "gaussian", "center": 0.0, "width": 1.0},
    "d": 1,
    "grid": {"min": -2.0, "max": 2.0, "points": 5},
    "times": [0.5, 1.0],
}


def write_config(tmp_path, raw, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_config_round_trip():
    raw = dict(TELEGRAPH, routes="all", mc={"n": 5000, "seed": 3})
    cfg = RunConfig.from_dict(raw)
    assert cfg.routes == ["analytic", "laplace-check", "monte-carlo"]
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    # 'all' drops the Monte Carlo route where no stochastic representation exists
    assert "monte-carlo" not in RunConfig.from_dict(dict(raw, alpha=0.6)).routes


@pytest.mark.parametrize(
    "patch,needle",
    [
        ({"alpha": 1.5}, "(0, 1]"),
        ({"alpha": 0.6, "routes": ["monte-carlo"]}, "alpha <= 1/2"),
        ({"bogus": 1}, "unknown config keys"),
        ({"mc": {"n": 10}}, "mc.n"),
        ({"routes": ["epd-bessel"]}, "not available"),
        ({"d": 2, "initial": {"kind": "gaussian", "center": 1.0, "width": 1.0},
          "grid": {"min": 0.0, "max": 1.0, "points": 3}}, "not radial"),
    ],
)
def test_invalid_configs_exit_2(tmp_path, capsys, patch, needle):
    path = write_config(tmp_path, dict(TELEGRAPH, **patch))
    assert main(["solve", "--config", path, "--out", str(tmp_path / "out")]) == 2
    assert needle in capsys.readouterr().err


def test_missing_and_malformed_files(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    assert main(["frobnicate"]) == 2


def test_solve_writes_fields_and_manifest(tmp_path):
    raw = {
        "equation": "telegraph", "alpha": 1.0, "lambda": 0.8,
        "symbol": {"kind": "laplacian"}, "initial": {"kind": "delta"},
        "grid": {"min": -1.0, "max": 1.0, "points": 9}, "times": [1.5],
    }
    out = tmp_path / "out"
    assert main(["solve", "--config", write_config(tmp_path, raw), "--out", str(out)]) == 0
    header, cols = read_field_csv(out / "analytic_t0.csv")
    ac, atom = telegraph_density(0.8, 1.5, cols["x"])
    assert np.array_equal(cols["value"], ac)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert manifest["files"][0]["meta"]["atoms"]["weight"] == atom
    assert "workers" not in manifest["config"]["mc"]
    # a field compared with itself
    f = str(out / "analytic_t0.csv")
    code, report = cmd_compare(f, f, out=io.StringIO())
    assert code == 0 and report["max"] == 0.0


def test_solve_requires_seed_for_monte_carlo(tmp_path):
    raw = dict(TELEGRAPH, routes=["analytic", "monte-carlo"])
    assert main(["solve", "--config", write_config(tmp_path, raw), "--out", str(tmp_path / "o")]) == 2


def test_solve_parallel_grid_matches_serial(tmp_path):
    raw = dict(TELEGRAPH, grid={"min": -2.0, "max": 2.0, "points": 8}, times=[1.0])
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "--config", write_config(tmp_path, raw), "--out", str(a)]) == 0
    raw["mc"] = {"workers": 3}
    assert main(["solve", "--config", write_config(tmp_path, raw, "w.json"), "--out", str(b)]) == 0
    assert tree(a) == tree(b)


def test_simulate_is_reproducible(tmp_path):
    path = write_config(tmp_path, TELEGRAPH)
    runs = {}
    for tag, workers in (("one", "1"), ("four", "4"), ("again", "1")):
        out = tmp_path / tag
        argv = ["simulate", "--config", path, "--seed", "99", "--n", "4000", "--workers", workers,
                "--out", str(out)]
        assert main(argv) == 0
        runs[tag] = tree(out)
    assert runs["one"] == runs["four"] == runs["again"]
    manifest = json.loads(runs["one"]["manifest.json"])
    assert manifest["seed"] == 99
    assert [j["stream_id"] for j in manifest["stream_layout"]["jobs"]] == [0, 1]
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "x")]) == 2


def test_compare_modes(tmp_path):
    path = write_config(tmp_path, dict(TELEGRAPH, times=[1.0], routes=["analytic"]))
    assert main(["solve", "--config", path, "--out", str(tmp_path / "det")]) == 0
    cfg = load_config(path)
    assert cmd_simulate(cfg, tmp_path / "mc", seed=5, n=20_000) == 0
    det, mc = str(tmp_path / "det" / "analytic_t0.csv"), str(tmp_path / "mc" / "monte-carlo_t0.csv")
    # the maximum over five correlated grid points, so a 4-sigma threshold
    code, report = cmd_compare(det, mc, mode="sigma", threshold=4.0, out=io.StringIO())
    assert code == 0 and report["mean"] < 3
    assert cmd_compare(det, mc, mode="abs", threshold=1e-12, out=io.StringIO())[0] == 1
    with pytest.raises(ConfigError):
        cmd_compare(det, det, mode="sigma", out=io.StringIO())

    other = dict(TELEGRAPH, grid={"min": -1.0, "max": 1.0, "points": 5}, times=[1.0])
    assert main(["solve", "--config", write_config(tmp_path, other, "o.json"),
                 "--out", str(tmp_path / "other")]) == 0
    assert main(["compare", det, str(tmp_path / "other" / "analytic_t0.csv")]) == 2


def test_convergence_failure_exit_3(tmp_path):
    # |x| = 2 is where the solution for this data is singular at t = 1
    raw = {
        "equation": "epd", "lambda_epd": 0.7, "symbol": {"kind": "laplacian"},
        "initial": {"kind": "indicator", "a": -1.0, "b": 1.0},
        "grid": {"min": 2.0, "max": 3.0, "points": 2}, "times": [1.0],
    }
    out = tmp_path / "out"
    assert main(["solve", "--config", write_config(tmp_path, raw), "--out", str(out)]) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "convergence-error"
    assert manifest["diagnostic"].startswith("ConvergenceError")


def test_selftest_suite(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["selftest", "--suite", "specfun", "--json", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["passed"] and data["suite"] == "specfun"
    assert "[PASS]" in capsys.readouterr().out
    assert main(["selftest", "--suite", "nope"]) == 2


def test_log_level_from_environment(monkeypatch):
    from fractel import cli

    monkeypatch.setenv("FRACTEL_LOG", "debug")
    root = logging.getLogger()
    old = root.level
    saved = root.handlers[:]
    root.handlers[:] = []
    try:
        cli._setup_logging()
        assert root.level == logging.DEBUG
    finally:
        root.handlers[:] = saved
        root.setLevel(old)
