"""Built-in validation suites.

Each check compares a route against an independent target (closed form,
another route, or an exact law) at a fixed tolerance, and returns a record
``{"criterion", "name", "passed", "metric", "tolerance", "detail", "seconds"}``.
Monte Carlo checks use fixed seeds, so every run is replayable.
"""

from __future__ import annotations

import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
from scipy import integrate, stats
from scipy import special as sp

from fractel.analytic import (
    halftime_atom_mass,
    phi_hat,
    phi_hat_laplace,
    phi_hat_one_exp,
    phi_hat_talbot,
    solve_telegraph,
    telegraph_halftime_density,
)
from fractel.epd import (
    EpdParams,
    dirichlet_sine_system,
    epd_beta_mc,
    epd_hat_bessel,
    epd_hat_ek,
    epd_hat_poisson,
    epd_inhomogeneous_telegraph_mc,
    solve_epd_series,
)
from fractel.fields import Gaussian
from fractel.hankel import hankel_inverse
from fractel.numlab import numeric_laplace
from fractel.specfun import _ml_contour, mittag_leffler, ml_series
from fractel.stochastic import (
    RngStream,
    mc_mean,
    mc_solve_halftime,
    mc_solve_telegraph,
    sample_inverse_L,
    sample_process,
)
from fractel.symbols import (
    BesselRieszProcess,
    BesselRiesz,
    FracParams,
    FractionalLaplacian,
    IsotropicStableProcess,
    Laplacian,
    Relativistic,
    RelativisticProcess,
)

__all__ = ["SUITES", "CHECKS", "run_suite", "run_check"]

SEED = 20240611
N_MC = 100_000


def _record(criterion, name, passed, metric, tolerance, detail=None):
    return {
        "criterion": criterion,
        "name": name,
        "passed": bool(passed),
        "metric": float(metric),
        "tolerance": float(tolerance),
        "detail": detail or {},
    }


def _max_z(est, target):
    z = (np.asarray(est.mean) - np.asarray(target)) / np.asarray(est.stderr)
    return float(np.max(np.abs(z))), z


# -- specfun --------------------------------------------------------------------------


def check_ml_half_identity():
    x = np.linspace(-3, 3, 601)
    t0 = time.perf_counter()
    got = mittag_leffler(0.5, 1.0, x).real
    dt = time.perf_counter() - t0
    want = np.exp(x * x) * (1 + sp.erf(x))
    err = float(np.max(np.abs(got - want)))
    rec = _record(1, "mittag-leffler half identity", err <= 1e-8 and dt < 1.0, err, 1e-8,
                  {"runtime_s": dt, "runtime_limit_s": 1.0})
    return rec


def check_ml_exponential():
    rng = np.random.default_rng(7)
    z = 10 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    # bypass the exp shortcut: series inside the unit disc, contour outside
    got = np.array([ml_series(1.0, 1.0, v) if abs(v) <= 1 else _ml_contour(1.0, 1.0, v) for v in z])
    err = float(np.max(np.abs(got - np.exp(z)) / np.maximum(1, np.abs(np.exp(z)))))
    return _record(None, "mittag-leffler E_{1,1} = exp", err <= 1e-10, err, 1e-10)


def check_ml_recurrence():
    worst = 0.0
    zs = [complex(a, b) for a in (-4, -1.5, -0.3, 0.6, 2.5) for b in (-2, 0, 1.5)]
    for a in (0.3, 0.5, 0.8):
        for z in zs:
            lhs = mittag_leffler(a, a + 1, z)
            rhs = (mittag_leffler(a, 1.0, z) - 1) / z
            worst = max(worst, abs(lhs - rhs) / max(1, abs(rhs)))
    return _record(None, "mittag-leffler recurrence", worst <= 1e-8, worst, 1e-8)


# -- analytic --------------------------------------------------------------------------


def check_laplace_consistency():
    t0 = time.perf_counter()
    worst = 0.0
    for a in (0.3, 0.5, 0.7, 1.0):
        for lam in (0.5, 2.0):
            for m in (0.25, 1.0, 9.0):
                p = FracParams(a, lam)
                for s in (1.0, 2.0, 5.0):
                    num = numeric_laplace(lambda t: phi_hat(p, m, t), s, tol=1e-10, bound=2.0)
                    ref = phi_hat_laplace(p, m, s)
                    worst = max(worst, abs(num - ref) / abs(ref))
    dt = time.perf_counter() - t0
    return _record(2, "laplace consistency", worst <= 1e-6 and dt < 30, worst, 1e-6,
                   {"runtime_s": dt, "runtime_limit_s": 30})


def check_alpha_one():
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        p = FracParams(1.0, lam)
        for m in (0.1, 0.5 * lam * lam, 2 * lam * lam, 10.0, 100.0):
            for t in (0.1, 1.0, 3.0, 10.0):
                worst = max(worst, abs(phi_hat(p, m, t) - phi_hat_one_exp(lam, m, t)))
    return _record(3, "alpha=1 exponential form", worst <= 1e-10, worst, 1e-10)


def check_hankel_reductions():
    p = FracParams(0.5, 1.0)
    sym = FractionalLaplacian(1.5)

    def kern(r):
        return phi_hat(p, sym(r), 1.0)

    worst = 0.0
    detail = {}
    for d, form in ((1, "cos"), (3, "sin")):
        for x in (0.25, 0.5, 1.0, 2.0):
            a = hankel_inverse(d, kern, x, form=form, tol=1e-11)
            b = hankel_inverse(d, kern, x, form="bessel", tol=1e-11)
            worst = max(worst, abs(a - b))
            detail[f"d{d}_x{x}"] = a
    return _record(4, "hankel d=1/d=3 reductions", worst <= 1e-9, worst, 1e-9, detail)


def check_degenerate_continuity():
    t = np.linspace(0, 5, 51)
    worst = 0.0
    for a in (0.4, 1.0):
        p = FracParams(a, 1.0)
        lo = phi_hat(p, 1 - 1e-4, t)
        hi = phi_hat(p, 1 + 1e-4, t)
        worst = max(worst, float(np.max(np.abs(hi - lo))))
    return _record(5, "degenerate-root continuity", worst <= 1e-3, worst, 1e-3)


# -- stochastic ---------------------------------------------------------------------------


def _laplace_L_chunk(gen, m, p, t, mval):
    return np.exp(-mval * sample_inverse_L(p, t, gen, size=m))


def check_inverse_clock():
    p = FracParams(0.4, 1.0)
    t0 = time.perf_counter()
    est = mc_mean(_laplace_L_chunk, N_MC, RngStream(SEED, 6), (p, 1.0, 1.0))
    dt = time.perf_counter() - t0
    target = phi_hat_talbot(p, 1.0, 1.0)
    z, _ = _max_z(est, target)
    return _record(6, "inverse-clock laplace target", z <= 3 and dt < 120, z, 3.0,
                   {"mc": float(est.mean[0]), "se": float(est.stderr[0]), "talbot": target,
                    "runtime_s": dt, "runtime_limit_s": 120})


def check_telegraph_routes():
    p = FracParams(0.4, 1.0)
    f = Gaussian(0.0, 1.0)
    xs = np.array([0.0, 0.5, 1.0, 2.0])
    t0 = time.perf_counter()
    an = solve_telegraph(p, Laplacian(), f, 1, xs, 1.0)
    est = mc_solve_telegraph(p, Laplacian(), f, xs, 1.0, N_MC, RngStream(SEED, 7))
    dt = time.perf_counter() - t0
    z, zs = _max_z(est, an.values)
    return _record(7, "telegraph analytic vs monte carlo", z <= 3 and dt < 180, z, 3.0,
                   {"z": zs.tolist(), "analytic": an.values.tolist(), "runtime_s": dt,
                    "runtime_limit_s": 180})


def check_halftime_law():
    lam, t, n = 1.0, 1.0, N_MC
    hist = mc_solve_halftime(lam, t, n, RngStream(SEED, 8))
    # analytic CDF: symmetric density integrated on [0, 12]
    x = np.linspace(0, 12, 1201)
    cdf_half = integrate.cumulative_simpson(telegraph_halftime_density(lam, t, x), x=x, initial=0)

    def cdf(v):
        return 0.5 + np.sign(v) * np.interp(np.abs(v), x, cdf_half, right=0.5)

    ks = stats.kstest(hist.samples, cdf).statistic
    crit = stats.kstwo.ppf(0.99, n)
    atom = halftime_atom_mass(lam, t)
    z_atom = abs(hist.atom_mass - atom) / hist.atom_stderr
    ok = ks < crit and z_atom <= 3
    return _record(8, "brownian-clock telegraph law", ok, ks, crit,
                   {"ks": ks, "ks_critical_1pct": crit, "atom_mc": hist.atom_mass,
                    "atom_exact": atom, "atom_z": z_atom, "cdf_tail_mass": 2 * cdf_half[-1]})


def _cf_chunk(gen, m, kind, t, xis):
    x = sample_process(kind, t, gen, size=m)
    proj = x.sum(axis=1) / math.sqrt(x.shape[1])  # frequency along the diagonal
    return np.cos(proj[:, None] * np.asarray(xis)[None, :])


def check_process_marginals():
    t, xis = 0.5, np.array([0.5, 1.0, 2.0])
    cases = [
        ("stable beta=1", lambda d: IsotropicStableProcess(d, 1.0), FractionalLaplacian(1.0)),
        ("stable beta=1.5", lambda d: IsotropicStableProcess(d, 1.5), FractionalLaplacian(1.5)),
        ("bessel-riesz (1,0.5)", lambda d: BesselRieszProcess(d, 1.0, 0.5), BesselRiesz(1.0, 0.5)),
        ("relativistic (1,1)", lambda d: RelativisticProcess(d, 1.0, 1.0), Relativistic(1.0, 1.0)),
    ]
    t0 = time.perf_counter()
    worst = 0.0
    detail = {}
    stream = 900
    for name, make, sym in cases:
        for d in (1, 2):
            est = mc_mean(_cf_chunk, N_MC, RngStream(SEED, stream), (make(d), t, xis))
            stream += 1
            z, zs = _max_z(est, np.exp(-t * sym(xis)))
            worst = max(worst, z)
            detail[f"{name} d={d}"] = [round(float(v), 3) for v in zs]
    dt = time.perf_counter() - t0
    detail["runtime_s"] = dt
    detail["runtime_limit_s"] = 180
    return _record(9, "process characteristic functions", worst <= 3 and dt < 180, worst, 3.0, detail)


# -- epd ---------------------------------------------------------------------------------


class _ModeWave:
    """cos(s sqrt(m)) on a single mode (picklable)."""

    def __init__(self, m, shape=None):
        self.rm = math.sqrt(m)
        self.shape = shape

    def __call__(self, s):
        c = np.cos(np.asarray(s, dtype=float) * self.rm)
        return c if self.shape is None else c[:, None] * self.shape[None, :]


def check_epd_quadrangle():
    worst_p = worst_ek = worst_z = 0.0
    stream = 1000
    for lam in (0.3, 0.7, 1.0, 2.0):
        for m in (0.5, 3.0):
            for t in (0.5, 2.0, 5.0):
                b = epd_hat_bessel(lam, m, t)
                worst_p = max(worst_p, abs(b - epd_hat_poisson(lam, m, t)))
                worst_ek = max(worst_ek, abs(b - epd_hat_ek(lam, m, t)))
                est = epd_beta_mc(EpdParams(lam), _ModeWave(m), t, N_MC, RngStream(SEED, stream))
                stream += 1
                worst_z = max(worst_z, _max_z(est, b)[0])
    z = np.linspace(0.01, 30, 300)
    worst_one = float(np.max(np.abs(epd_hat_bessel(1.0, 1.0, z) - np.sin(z) / z)))
    ok = worst_p <= 1e-8 and worst_ek <= 1e-6 and worst_z <= 3 and worst_one <= 1e-10
    return _record(10, "epd route quadrangle", ok, max(worst_p / 1e-8, worst_ek / 1e-6, worst_z / 3,
                                                        worst_one / 1e-10), 1.0,
                   {"bessel_vs_poisson": worst_p, "bessel_vs_ek": worst_ek, "beta_mc_max_z": worst_z,
                    "lambda1_vs_sinc": worst_one, "metric": "worst ratio to tolerance"})


def check_epd_series():
    grid = np.linspace(0, math.pi, 9)
    system = dirichlet_sine_system(np.sin, 4)
    worst = 0.0
    for lam in (0.3, 0.7, 2.0):
        for t in (0.5, 2.0, 5.0):
            fld = solve_epd_series(system, lam, t, grid)
            want = epd_hat_bessel(lam, 1.0, t) * np.sin(grid)
            worst = max(worst, float(np.max(np.abs(fld.values - want))))
    # one Beta-MC mode check, at the parameters of the eps-trend check
    lam, t = 0.7, 1.0
    fld = solve_epd_series(system, lam, t, grid)
    est = epd_beta_mc(EpdParams(lam), _ModeWave(1.0, np.sin(grid[1:-1])), t, N_MC, RngStream(SEED, 11))
    z = _max_z(est, fld.values[1:-1])[0]
    ok = worst <= 1e-10 and z <= 3
    return _record(11, "discrete-spectrum epd", ok, worst, 1e-10, {"beta_mc_z": z, "beta_mc_lambda_t": [lam, t]})


def check_eps_trend():
    lam, m, t = 0.7, 1.0, 1.0
    target = epd_hat_bessel(lam, m, t)
    gaps = []
    ses = []
    for eps in (1e-1, 1e-2, 1e-3):
        # one stream for every eps: common random numbers make the trend visible
        est = epd_inhomogeneous_telegraph_mc(lam, eps, _ModeWave(m), t, N_MC, RngStream(SEED, 12))
        gaps.append(abs(float(est.mean[0]) - target))
        ses.append(float(est.stderr[0]))
    monotone = gaps[0] > gaps[1] > gaps[2]
    rel = gaps[-1] / abs(target)
    return _record(12, "eps -> 0 trend", monotone and rel < 0.05, rel, 0.05,
                   {"gaps": gaps, "stderr": ses, "target": target, "monotone": monotone})


# -- reproducibility ------------------------------------------------------------------------


def _tree_bytes(path):
    return {p.name: p.read_bytes() for p in sorted(Path(path).iterdir())}


def check_reproducibility():
    from fractel.cli import RunConfig, cmd_simulate

    configs = [
        {"equation": "telegraph", "alpha": 0.4, "lambda": 1.0, "symbol": {"kind": "fractional_laplacian", "beta": 1.5},
         "initial": {"kind": "gaussian", "center": 0.0, "width": 1.0}, "d": 1,
         "grid": {"min": -2.0, "max": 2.0, "points": 9}, "times": [0.5, 1.0]},
        {"equation": "epd", "lambda_epd": 0.7, "symbol": {"kind": "laplacian"},
         "initial": {"kind": "indicator", "a": -1.0, "b": 1.0}, "d": 1,
         "grid": {"min": -2.0, "max": 2.0, "points": 9}, "times": [1.0]},
    ]
    same = True
    detail = {}
    with tempfile.TemporaryDirectory() as tmp:
        for i, raw in enumerate(configs):
            cfg = RunConfig.from_dict(raw)
            runs = {}
            for tag, workers in (("a", 2), ("b", 2), ("w1", 1), ("w4", 4)):
                out = Path(tmp) / f"{i}{tag}"
                code = cmd_simulate(cfg, out, seed=SEED, n=20_000, workers=workers)
                runs[tag] = (code, _tree_bytes(out))
            rerun = runs["a"] == runs["b"]
            workers_inv = runs["w1"] == runs["w4"]
            detail[raw["equation"]] = {"rerun_identical": rerun, "workers_1_vs_4_identical": workers_inv,
                                       "exit_code": runs["a"][0]}
            same = same and rerun and workers_inv and runs["a"][0] == 0
    return _record(13, "simulate reproducibility", same, 0.0 if same else 1.0, 0.0, detail)


CHECKS = {
    1: check_ml_half_identity,
    2: check_laplace_consistency,
    3: check_alpha_one,
    4: check_hankel_reductions,
    5: check_degenerate_continuity,
    6: check_inverse_clock,
    7: check_telegraph_routes,
    8: check_halftime_law,
    9: check_process_marginals,
    10: check_epd_quadrangle,
    11: check_epd_series,
    12: check_eps_trend,
    13: check_reproducibility,
}

SUITES = {
    "specfun": [check_ml_half_identity, check_ml_exponential, check_ml_recurrence],
    "analytic": [check_laplace_consistency, check_alpha_one, check_hankel_reductions, check_degenerate_continuity],
    "stochastic": [check_inverse_clock, check_telegraph_routes, check_halftime_law, check_process_marginals],
    "epd": [check_epd_quadrangle, check_epd_series, check_eps_trend],
}
SUITES["all"] = [CHECKS[k] for k in sorted(CHECKS)]


def format_record(rec):
    tag = "PASS" if rec["passed"] else "FAIL"
    crit = f"criterion {rec['criterion']:>2}" if rec["criterion"] is not None else "invariant   "
    return (f"[{tag}] {crit}  {rec['name']}: metric={rec['metric']:.3g} "
            f"(tolerance {rec['tolerance']:.3g}, {rec['seconds']:.1f}s)")


def run_check(fn):
    t0 = time.perf_counter()
    try:
        rec = fn()
    except Exception as exc:  # a crashing check is a failed check
        crit = next((k for k, v in CHECKS.items() if v is fn), None)
        rec = _record(crit, fn.__name__, False, float("nan"), float("nan"),
                      {"error": f"{type(exc).__name__}: {exc}"})
    rec["seconds"] = time.perf_counter() - t0
    return rec


def run_suite(suite, out=None):
    out = sys.stdout if out is None else out
    results = []
    for fn in SUITES[suite]:
        rec = run_check(fn)
        if out is not None:
            print(format_record(rec), file=out, flush=True)
        results.append(rec)
    return results
