"""``fractel`` command line: solve, simulate, compare, selftest.

A run is described by one JSON document, for example::

    {
      "equation": "telegraph",
      "alpha": 0.4, "lambda": 1.0,
      "symbol": {"kind": "laplacian"},
      "initial": {"kind": "gaussian", "center": 0.0, "width": 1.0},
      "d": 1,
      "grid": {"min": -3.0, "max": 3.0, "points": 61},
      "times": [1.0],
      "routes": ["analytic", "monte-carlo"],
      "mc": {"n": 100000, "seed": 42, "workers": 1, "tol_L": 1e-4, "chunks": 16},
      "tol": 1e-10
    }

EPD runs use ``"equation": "epd"`` and ``"lambda_epd"`` instead of alpha and
lambda.  Exit codes: 0 success, 1 failed check, 2 configuration or input
error, 3 numerical convergence failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from fractel import __version__
from fractel.analytic import solve_telegraph
from fractel.epd import EpdParams, solve_epd
from fractel.errors import (
    AccuracyError,
    BudgetError,
    ConfigError,
    ConvergenceError,
    FractelError,
)
from fractel.fields import (
    Delta,
    SolutionField,
    Tabulated,
    initial_condition_from_dict,
    read_field_csv,
    write_field_csv,
    write_json,
)
from fractel.hankel import HANKEL_TOL
from fractel.stochastic import DEFAULT_CHUNKS, TOL_L, RngStream, mc_solve_telegraph
from fractel.symbols import FracParams, symbol_from_dict

__all__ = ["RunConfig", "main", "cmd_solve", "cmd_simulate", "cmd_compare", "cmd_selftest"]

log = logging.getLogger("fractel")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3

EQUATION_ROUTES = {
    "telegraph": ("analytic", "laplace-check", "monte-carlo"),
    "epd": ("epd-bessel", "epd-ek", "epd-beta"),
}
MC_ROUTES = {"telegraph": "monte-carlo", "epd": "epd-beta"}
_KEYS = {
    "command", "equation", "alpha", "lambda", "lambda_epd", "symbol", "initial",
    "d", "grid", "times", "routes", "mc", "tol",
}
_MC_KEYS = {"n", "seed", "workers", "tol_L", "chunks"}


@dataclass
class MCSettings:
    n: int = 100_000
    seed: int | None = None
    workers: int = 1
    tol_L: float = TOL_L
    chunks: int = DEFAULT_CHUNKS


@dataclass
class RunConfig:
    """Validated run description; ``from_dict(cfg.to_dict()) == cfg``."""

    equation: str
    symbol: dict
    initial: dict
    d: int
    grid: dict
    times: list
    routes: list
    alpha: float | None = None
    lam: float | None = None
    lambda_epd: float | None = None
    mc: MCSettings = field(default_factory=MCSettings)
    tol: float = HANKEL_TOL
    command: str | None = None

    # -- parsing ---------------------------------------------------------------

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - _KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        eq = raw.get("equation")
        if eq not in EQUATION_ROUTES:
            raise ConfigError(f"equation must be one of {sorted(EQUATION_ROUTES)}, got {eq!r}")
        for key in ("symbol", "initial", "grid", "times"):
            if key not in raw:
                raise ConfigError(f"missing config key {key!r}")
        try:
            sym = symbol_from_dict(raw["symbol"])
            init = initial_condition_from_dict(raw["initial"])
        except (FractelError, TypeError, AttributeError) as exc:
            raise ConfigError(str(exc)) from None

        d = raw.get("d", 1)
        if not (isinstance(d, int) and not isinstance(d, bool) and d >= 1):
            raise ConfigError(f"d must be a positive integer, got {d!r}")

        grid = raw["grid"]
        if not isinstance(grid, dict) or set(grid) != {"min", "max", "points"}:
            raise ConfigError("grid must be {'min': .., 'max': .., 'points': ..}")
        gmin, gmax, pts = grid["min"], grid["max"], grid["points"]
        if not (isinstance(pts, int) and pts >= 2):
            raise ConfigError("grid.points must be an integer >= 2")
        if not (_is_num(gmin) and _is_num(gmax) and gmin < gmax):
            raise ConfigError("grid needs finite min < max")
        if d >= 2 and gmin < 0:
            raise ConfigError("radial grid (d >= 2) needs min >= 0")
        grid = {"min": float(gmin), "max": float(gmax), "points": int(pts)}

        times = raw["times"]
        if not isinstance(times, list) or not times or not all(_is_num(t) and t >= 0 for t in times):
            raise ConfigError("times must be a nonempty list of numbers >= 0")
        times = [float(t) for t in times]

        kw = {}
        if eq == "telegraph":
            if "lambda_epd" in raw:
                raise ConfigError("lambda_epd belongs to equation 'epd'")
            for key in ("alpha", "lambda"):
                if key not in raw:
                    raise ConfigError(f"telegraph config needs {key!r}")
            try:
                p = FracParams(float(raw["alpha"]), float(raw["lambda"]))
            except (FractelError, TypeError, ValueError) as exc:
                raise ConfigError(str(exc)) from None
            kw.update(alpha=p.alpha, lam=p.lam)
        else:
            if "alpha" in raw or "lambda" in raw:
                raise ConfigError("equation 'epd' takes lambda_epd, not alpha/lambda")
            if "lambda_epd" not in raw:
                raise ConfigError("epd config needs 'lambda_epd'")
            try:
                ep = EpdParams(float(raw["lambda_epd"]), sym, d)
            except (FractelError, TypeError, ValueError) as exc:
                raise ConfigError(str(exc)) from None
            kw.update(lambda_epd=ep.lambda_epd)

        allowed = EQUATION_ROUTES[eq]
        routes = raw.get("routes", [allowed[0]])
        if routes == "all":
            routes = list(allowed)
            if eq == "telegraph" and kw["alpha"] > 0.5:
                routes.remove("monte-carlo")
        if isinstance(routes, str):
            routes = [routes]
        if not isinstance(routes, list) or not routes:
            raise ConfigError("routes must be 'all' or a nonempty list")
        for r in routes:
            if r not in allowed:
                raise ConfigError(f"route {r!r} is not available for equation {eq!r} (choose from {list(allowed)})")
        if len(set(routes)) != len(routes):
            raise ConfigError("routes must not repeat")

        mc_raw = raw.get("mc", {})
        if not isinstance(mc_raw, dict) or set(mc_raw) - _MC_KEYS:
            raise ConfigError(f"mc must be an object with keys from {sorted(_MC_KEYS)}")
        mc = MCSettings(**mc_raw)
        _validate_mc(mc)

        tol = raw.get("tol", HANKEL_TOL)
        if not (_is_num(tol) and tol > 0):
            raise ConfigError("tol must be > 0")
        command = raw.get("command")
        if command is not None and command not in ("solve", "simulate"):
            raise ConfigError(f"command must be 'solve' or 'simulate', got {command!r}")

        cfg = cls(eq, sym.to_dict(), init.to_dict(), d, grid, times, list(routes),
                  mc=mc, tol=float(tol), command=command, **kw)
        cfg.check_routes()
        return cfg

    def to_dict(self):
        out = {
            "equation": self.equation,
            "symbol": self.symbol,
            "initial": self.initial,
            "d": self.d,
            "grid": dict(self.grid),
            "times": list(self.times),
            "routes": list(self.routes),
            "mc": asdict(self.mc),
            "tol": self.tol,
        }
        if self.equation == "telegraph":
            out.update({"alpha": self.alpha, "lambda": self.lam})
        else:
            out["lambda_epd"] = self.lambda_epd
        if self.command is not None:
            out["command"] = self.command
        return out

    # -- semantic checks ----------------------------------------------------------

    def check_routes(self):
        init = self.initial_condition()
        if "monte-carlo" in self.routes:
            if self.alpha > 0.5:
                raise ConfigError(
                    f"route monte-carlo needs alpha <= 1/2 (stochastic representation), got alpha={self.alpha}"
                )
            if isinstance(init, Tabulated):
                raise ConfigError("route monte-carlo needs gaussian, indicator or delta data")
            if isinstance(init, Delta) and self.d != 1:
                raise ConfigError("route monte-carlo with delta data is one-dimensional")
        if "epd-beta" in self.routes and isinstance(init, (Delta, Tabulated)):
            raise ConfigError("route epd-beta needs gaussian or indicator data")
        if self.equation == "epd" and isinstance(init, Tabulated):
            raise ConfigError("tabulated data is supported for equation 'telegraph' only")
        if isinstance(init, Tabulated) and self.d != 1:
            raise ConfigError("tabulated data is one-dimensional")
        if self.d >= 2 and not init.is_radial(self.d):
            raise ConfigError(f"initial data {init.kind} is not radial in d={self.d}")
        if isinstance(init, Delta) and 0.0 in self.times:
            raise ConfigError("delta initial data has no field at t = 0")

    def mc_routes(self):
        return [r for r in self.routes if r == MC_ROUTES[self.equation]]

    def symbol_obj(self):
        return symbol_from_dict(self.symbol)

    def initial_condition(self):
        return initial_condition_from_dict(self.initial)

    def grid_points(self):
        return np.linspace(self.grid["min"], self.grid["max"], self.grid["points"])


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _validate_mc(mc):
    if not (isinstance(mc.n, int) and mc.n >= 100):
        raise ConfigError("mc.n must be an integer >= 100")
    if mc.seed is not None and not (isinstance(mc.seed, int) and 0 <= mc.seed < 2**64):
        raise ConfigError("mc.seed must be an unsigned 64-bit integer")
    if not (isinstance(mc.workers, int) and mc.workers >= 1):
        raise ConfigError("mc.workers must be an integer >= 1")
    if not (_is_num(mc.tol_L) and mc.tol_L > 0):
        raise ConfigError("mc.tol_L must be > 0")
    if not (isinstance(mc.chunks, int) and mc.chunks >= 1):
        raise ConfigError("mc.chunks must be an integer >= 1")


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return RunConfig.from_dict(raw)


# -- running routes -------------------------------------------------------------------


def _deterministic_field(cfg: RunConfig, route, t, grid):
    sym, init = cfg.symbol_obj(), cfg.initial_condition()
    if cfg.equation == "telegraph":
        p = FracParams(cfg.alpha, cfg.lam)
        return solve_telegraph(p, sym, init, cfg.d, grid, t, route=route, tol=cfg.tol)
    params = EpdParams(cfg.lambda_epd, sym, cfg.d)
    return solve_epd(params, init, grid, t, route=route, tol=cfg.tol)


def _field_block(cfg_dict, route, t, grid):
    return _deterministic_field(RunConfig.from_dict(cfg_dict), route, t, grid)


def _solve_deterministic(cfg: RunConfig, route, t, workers):
    """Deterministic route on the config grid, split into contiguous blocks of
    grid points when ``workers > 1``; every point is computed independently,
    so the assembled field does not depend on the split."""
    grid = cfg.grid_points()
    init = cfg.initial_condition()
    nblocks = min(workers, grid.size // 2)
    if nblocks <= 1 or isinstance(init, Tabulated) or t == 0:
        return _deterministic_field(cfg, route, t, grid)
    blocks = np.array_split(grid, nblocks)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_field_block, [cfg.to_dict()] * nblocks, [route] * nblocks,
                            [t] * nblocks, blocks))
    meta = dict(parts[0].meta)
    diags = [p.meta.get("diagnostics", {}) for p in parts]
    if diags[0]:
        merged = dict(diags[0])
        for dg in diags[1:]:
            for k, v in dg.items():
                if isinstance(v, (int, float)) and not isinstance(v, bool) and k in merged:
                    merged[k] = max(merged[k], v)
        meta["diagnostics"] = merged
    values = np.concatenate([p.values for p in parts])
    return SolutionField(cfg.d, grid, values, t, route, meta=meta)


def _mc_field(cfg: RunConfig, route, t, rng: RngStream, n, workers):
    grid = cfg.grid_points()
    sym, init = cfg.symbol_obj(), cfg.initial_condition()
    mc = cfg.mc
    if route == "epd-beta":
        params = EpdParams(cfg.lambda_epd, sym, cfg.d)
        return solve_epd(params, init, grid, t, route=route, n=n, rng=rng, tol=cfg.tol,
                         chunks=mc.chunks, workers=workers)
    p = FracParams(cfg.alpha, cfg.lam)
    meta = {"alpha": p.alpha, "lambda": p.lam, "symbol": sym.to_dict(), "initial": init.to_dict(),
            "n": n, "seed": rng.seed, "stream_id": rng.stream_id, "tol_L": mc.tol_L}
    if isinstance(init, Delta):
        # grid points are histogram bin centres
        h = grid[1] - grid[0]
        edges = np.concatenate(([grid[0] - h / 2], 0.5 * (grid[1:] + grid[:-1]), [grid[-1] + h / 2]))
        hist = mc_solve_telegraph(p, sym, init, grid, t, n, rng, d=1, tol_L=mc.tol_L,
                                  chunks=mc.chunks, workers=workers, bins=edges)
        meta["estimator"] = "histogram"
        meta["bin_edges"] = "midpoints of the grid"
        return SolutionField(1, grid, hist.density, t, route, stderr=hist.stderr, meta=meta)
    est = mc_solve_telegraph(p, sym, init, grid, t, n, rng, d=cfg.d, tol_L=mc.tol_L,
                             chunks=mc.chunks, workers=workers)
    meta.update(est.meta)
    return SolutionField(cfg.d, grid, est.mean, t, route, stderr=est.stderr, meta=meta)


def _tolerances(cfg: RunConfig):
    from fractel.analytic import EPS_DEG, IMAG_TOL
    from fractel.epd import SERIES_TRUNCATION_TOL
    from fractel.numlab import TALBOT_TOL

    return {
        "hankel_tol": cfg.tol,
        "tol_L": cfg.mc.tol_L,
        "degenerate_band": EPS_DEG,
        "imaginary_residue": IMAG_TOL,
        "mittag_leffler_certified": 1e-6,
        "talbot_tol": TALBOT_TOL,
        "series_truncation": SERIES_TRUNCATION_TOL,
    }


def _manifest_config(cfg: RunConfig):
    # the worker count never changes results, so it stays out of the manifest
    out = cfg.to_dict()
    out["mc"].pop("workers")
    return out


def _run(cfg: RunConfig, out_dir, command, routes, n, seed, workers):
    """Evaluate ``routes`` at every time, write CSVs and the manifest.

    MC job j (times outer, routes inner) draws from RngStream(seed, j).
    The manifest holds no timings or worker counts, so runs with the same
    seed and config are byte-identical for any number of workers.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "fractel_version": __version__,
        "command": command,
        "config": _manifest_config(cfg),
        "tolerances": _tolerances(cfg),
        "files": [],
        "status": "ok",
    }
    if any(r in MC_ROUTES.values() for r in routes):
        manifest["seed"] = seed
        manifest["mc_n"] = n
        manifest["stream_layout"] = {
            "rule": "MC job j (times outer, routes inner) uses RngStream(seed, j); "
                    "it is cut into chunks with child streams merged in chunk order",
            "chunks": cfg.mc.chunks,
            "jobs": [],
        }
    job = 0
    code = EXIT_OK
    try:
        for i, t in enumerate(cfg.times):
            for route in routes:
                name = f"{route}_t{i}.csv"
                log.info("%s: route %s at t=%g", command, route, t)
                if route in MC_ROUTES.values():
                    rng = RngStream(seed, job)
                    fld = _mc_field(cfg, route, t, rng, n, workers)
                    layout = {"file": name, "t": t, "route": route, "seed": seed, "stream_id": job}
                    layout["chunk_sizes"] = fld.meta.get("chunk_sizes")
                    layout["chunk_stream_ids"] = fld.meta.get("stream_ids")
                    manifest["stream_layout"]["jobs"].append(layout)
                    job += 1
                else:
                    fld = _solve_deterministic(cfg, route, t, workers)
                write_field_csv(fld, out_dir / name)
                manifest["files"].append({"file": name, "t": t, "route": route, "meta": fld.meta})
    except (ConvergenceError, AccuracyError, BudgetError) as exc:
        manifest["status"] = "convergence-error"
        manifest["diagnostic"] = f"{type(exc).__name__}: {exc}"
        log.error("numerical failure: %s", exc)
        code = EXIT_CONVERGENCE
    except FractelError as exc:
        manifest["status"] = "config-error"
        manifest["diagnostic"] = f"{type(exc).__name__}: {exc}"
        log.error("configuration error: %s", exc)
        code = EXIT_CONFIG
    write_json(manifest, out_dir / "manifest.json")
    return code


def cmd_solve(cfg: RunConfig, out_dir):
    """Every configured route at every time; MC routes need ``mc.seed``."""
    if cfg.mc_routes() and cfg.mc.seed is None:
        raise ConfigError(f"route {cfg.mc_routes()[0]} needs an explicit mc.seed")
    return _run(cfg, out_dir, "solve", cfg.routes, cfg.mc.n, cfg.mc.seed, cfg.mc.workers)


def cmd_simulate(cfg: RunConfig, out_dir, seed=None, n=None, workers=None):
    """The Monte Carlo route of the equation; the seed is mandatory."""
    seed = cfg.mc.seed if seed is None else seed
    if seed is None:
        raise ConfigError("simulate needs an explicit seed (--seed or mc.seed)")
    n = cfg.mc.n if n is None else n
    workers = cfg.mc.workers if workers is None else workers
    mc = MCSettings(n, seed, workers, cfg.mc.tol_L, cfg.mc.chunks)
    _validate_mc(mc)
    route = MC_ROUTES[cfg.equation]
    raw = cfg.to_dict()
    raw.update({"routes": [route], "mc": asdict(mc), "command": "simulate"})
    sim = RunConfig.from_dict(raw)
    return _run(sim, out_dir, "simulate", [route], n, seed, workers)


def cmd_compare(file_a, file_b, mode="abs", threshold=None, out=None):
    """Max and mean discrepancy of two field CSVs; 0 iff max <= threshold."""
    out = sys.stdout if out is None else out
    if mode not in ("abs", "rel", "sigma"):
        raise ConfigError(f"mode must be abs, rel or sigma, got {mode!r}")
    if threshold is None:
        threshold = 3.0 if mode == "sigma" else 1e-8
    try:
        _, ca = read_field_csv(file_a)
        _, cb = read_field_csv(file_b)
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigError(f"cannot read fields: {exc}") from None
    xa, xb = ca.get("x"), cb.get("x")
    if xa is None or xb is None:
        raise ConfigError("field CSVs need an x column")
    if xa.shape != xb.shape or not np.allclose(xa, xb, rtol=1e-12, atol=1e-12):
        raise ConfigError(f"grid mismatch between {file_a} and {file_b}")
    va = ca.get("value", ca.get("mean"))
    vb = cb.get("value", cb.get("mean"))
    diff = np.abs(va - vb)
    if mode == "abs":
        disc = diff
    elif mode == "rel":
        scale = np.maximum(np.abs(va), np.abs(vb))
        disc = np.where(diff == 0, 0.0, diff / np.where(scale > 0, scale, 1.0))
    else:
        sa = ca.get("stderr", np.zeros_like(va))
        sb = cb.get("stderr", np.zeros_like(vb))
        if "stderr" not in ca and "stderr" not in cb:
            raise ConfigError("sigma mode needs a stderr column in at least one file")
        sig = np.sqrt(sa**2 + sb**2)
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.where(diff == 0, 0.0, diff / sig)
    worst = int(np.argmax(disc))
    report = {
        "mode": mode,
        "threshold": threshold,
        "max": float(disc.max()),
        "mean": float(disc.mean()),
        "argmax_x": float(xa[worst]),
        "points": int(xa.size),
        "within": bool(disc.max() <= threshold),
    }
    print(f"mode={mode} max={report['max']:.6g} mean={report['mean']:.6g} "
          f"at x={report['argmax_x']:.6g} threshold={threshold:g} "
          f"{'OK' if report['within'] else 'EXCEEDED'}", file=out)
    return (EXIT_OK if report["within"] else EXIT_FAIL), report


def cmd_selftest(suite="all", json_path=None, out=None):
    out = sys.stdout if out is None else out
    from fractel.selftest import SUITES, run_suite

    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r} (choose from {sorted(SUITES)})")
    results = run_suite(suite, out=out)
    report = {
        "suite": suite,
        "passed": all(r["passed"] for r in results),
        "checks": results,
    }
    if json_path:
        write_json(report, json_path)
    failed = [r["name"] for r in results if not r["passed"]]
    if failed:
        print("FAILED: " + ", ".join(failed), file=out)
    return (EXIT_OK if report["passed"] else EXIT_FAIL), report


# -- entry point -------------------------------------------------------------------------


def _setup_logging():
    level = os.environ.get("FRACTEL_LOG", "WARNING").upper()
    value = logging.getLevelName(level) if not level.isdigit() else int(level)
    if not isinstance(value, int):
        value = logging.WARNING
    logging.basicConfig(level=value, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def build_parser():
    ap = argparse.ArgumentParser(prog="fractel", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fractel {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="run every configured route")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    m = sub.add_parser("simulate", help="run the Monte Carlo route")
    m.add_argument("--config", required=True)
    m.add_argument("--seed", type=int)
    m.add_argument("--n", type=int)
    m.add_argument("--workers", type=int)
    m.add_argument("--out", required=True)

    c = sub.add_parser("compare", help="compare two field CSVs")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--mode", default="abs", choices=("abs", "rel", "sigma"))
    c.add_argument("--threshold", type=float)

    t = sub.add_parser("selftest", help="run a validation suite")
    t.add_argument("--suite", default="all")
    t.add_argument("--json")
    return ap


def main(argv=None):
    _setup_logging()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches the config code
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.cmd == "solve":
            return cmd_solve(load_config(args.config), args.out)
        if args.cmd == "simulate":
            cfg = load_config(args.config)
            return cmd_simulate(cfg, args.out, args.seed, args.n, args.workers)
        if args.cmd == "compare":
            return cmd_compare(args.a, args.b, args.mode, args.threshold)[0]
        return cmd_selftest(args.suite, args.json)[0]
    except ConfigError as exc:
        print(f"fractel: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
