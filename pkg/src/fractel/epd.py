"""Euler-Poisson-Darboux equation

    u'' + (2 lam / t) u' + A u = 0,   u(0) = f,  u'(0) = 0,

for an isotropic multiplier A with symbol m.  In Fourier variables the
solution multiplies f_hat by

    (2 / z)^(lam - 1/2) Gamma(lam + 1/2) J_{lam - 1/2}(z),   z = t sqrt(m),

which is also the average of the wave multiplier cos(t sqrt(m X)) over
X ~ Beta(1/2, lam), and an Erdelyi-Kober integral of the wave solution.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy import special as sp
from scipy.interpolate import BarycentricInterpolator

from fractel.errors import ConvergenceError, DimensionError, DomainError
from fractel.fields import Delta, SolutionField, Tabulated
from fractel.hankel import HANKEL_TOL, hankel_inverse
from fractel.specfun import bessel_j
from fractel.stochastic import DEFAULT_CHUNKS, MCEstimate, RngStream, mc_mean, sample_telegraph_inhomogeneous
from fractel.symbols import Laplacian, evaluate_symbol

__all__ = [
    "EpdParams",
    "EigenSystem",
    "dirichlet_sine_system",
    "wave_hat",
    "epd_hat_bessel",
    "epd_hat_poisson",
    "epd_hat_ek",
    "erdelyi_kober",
    "epd_beta_mc",
    "epd_shifted_ode",
    "solve_epd",
    "solve_epd_series",
    "epd_inhomogeneous_telegraph_mc",
    "epd_kernel_d1_laplacian",
]

log = logging.getLogger(__name__)

SERIES_TRUNCATION_TOL = 1e-8


@dataclass(frozen=True)
class EpdParams:
    lambda_epd: float
    symbol: object = field(default_factory=Laplacian)
    d: int = 1

    def __post_init__(self):
        if not self.lambda_epd > 0:
            raise DomainError(f"EPD lambda must be > 0, got {self.lambda_epd}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError("dimension must be a positive integer")


@dataclass
class EigenSystem:
    """Discrete spectrum x_k with coefficients <f, phi_k>.

    ``basis="dirichlet_sine"`` means phi_k(x) = sqrt(2/pi) sin(n_k x) on
    (0, pi), with wavenumbers n_k (default 1..K).
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    basis: str = "dirichlet_sine"
    wavenumbers: np.ndarray | None = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        k = self.eigenvalues.size
        if k < 1 or self.coefficients.shape != self.eigenvalues.shape:
            raise DomainError("eigenvalues and coefficients must be equal-length, K >= 1")
        if np.any(self.eigenvalues <= 0) or np.any(np.diff(self.eigenvalues) <= 0):
            raise DomainError("eigenvalues must be positive and strictly increasing")
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError("coefficients must be finite")
        if self.basis != "dirichlet_sine":
            raise DomainError(f"unknown basis {self.basis!r}")
        if self.wavenumbers is None:
            self.wavenumbers = np.arange(1, k + 1, dtype=float)
        self.wavenumbers = np.asarray(self.wavenumbers, dtype=float)

    def basis_values(self, x):
        """phi_k(x) as an array of shape (K, len(x))."""
        x = np.asarray(x, dtype=float)
        return math.sqrt(2 / math.pi) * np.sin(np.outer(self.wavenumbers, x))


def dirichlet_sine_system(f, K, symbol=None, points=4097):
    """Expand ``f`` on (0, pi) in the Dirichlet sine basis.

    Eigenvalues are m(k) for the given symbol (k^2 for the Laplacian).
    Coefficients are computed by Simpson's rule on ``points`` nodes.
    """
    symbol = Laplacian() if symbol is None else symbol
    x = np.linspace(0, math.pi, points)
    fx = np.asarray(f(x), dtype=float)
    k = np.arange(1, K + 1, dtype=float)
    phi = math.sqrt(2 / math.pi) * np.sin(np.outer(k, x))
    coef = integrate.simpson(phi * fx[None, :], x=x, axis=1)
    return EigenSystem(evaluate_symbol(symbol, k), coef, "dirichlet_sine", k)


def wave_hat(m, t):
    """cos(t sqrt(m)), the wave-equation multiplier."""
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise DomainError("symbol value m must be >= 0")
    out = np.cos(np.asarray(t, dtype=float) * np.sqrt(m))
    return float(out) if out.ndim == 0 else out


def _check_lam(lam):
    if not lam > 0:
        raise DomainError(f"EPD lambda must be > 0, got {lam}")


def _bessel_ratio(mu, z):
    # Gamma(mu + 1) (2/z)^mu J_mu(z); the 0F1 series is used for small z
    if z < 1.0:
        return float(sp.hyp0f1(mu + 1.0, -0.25 * z * z))
    return math.exp(sp.gammaln(mu + 1.0) + mu * math.log(2.0 / z)) * bessel_j(mu, z)


def epd_hat_bessel(lambda_epd, m, t):
    """(2 / z)^(lam - 1/2) Gamma(lam + 1/2) J_{lam - 1/2}(z), z = |t| sqrt(m).

    Even in ``t``; equals 1 at t = 0 or m = 0.  Vectorised over ``m`` and ``t``.
    """
    _check_lam(lambda_epd)
    mu = lambda_epd - 0.5
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise DomainError("symbol value m must be >= 0")
    z = np.abs(np.asarray(t, dtype=float)) * np.sqrt(m)
    if z.ndim == 0:
        return _bessel_ratio(mu, float(z))
    return np.vectorize(lambda v: _bessel_ratio(mu, v), otypes=[float])(z)


def epd_hat_poisson(lambda_epd, m, t, tol=1e-12):
    """Poisson integral  B(lam, 1/2)^(-1) int_{-1}^{1} (1 - w^2)^(lam - 1) cos(z w) dw.

    Folded onto [0, 1] and integrated by QUADPACK's algebraic-weight rule with
    weight (1 - w)^(lam - 1), which absorbs the endpoint singularity for
    every lam > 0.
    """
    _check_lam(lambda_epd)
    if not m >= 0:
        raise DomainError("symbol value m must be >= 0")
    z = abs(t) * math.sqrt(m)
    if z == 0:
        return 1.0
    e = lambda_epd - 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda w: (1.0 + w) ** e * math.cos(z * w), 0.0, 1.0, weight="alg",
                                    wvar=(0.0, e), epsabs=tol, epsrel=tol, limit=max(200, int(2 * z)))
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"Poisson integral not converged (z={z}): {exc}") from None
    return 2.0 * val / sp.beta(lambda_epd, 0.5)


def erdelyi_kober(alpha_ek, m_ek, f, x, tol=1e-12, breaks=(), y0_exponent=None):
    """(m / Gamma(a)) int_0^x (x^m - y^m)^(a - 1) y^(m - 1) f(y) dy.

    With y = x (1 - v^(1/a))^(1/m) the weight disappears and the integral is
    x^(m a) / Gamma(a + 1) int_0^1 f(x (1 - v^(1/a))^(1/m)) dv.  ``breaks``
    are y-points (e.g. sign changes of an oscillating f) where the
    v-integral is split into separate panels.  When f(y) ~ y^e at y = 0,
    passing ``y0_exponent=e`` integrates the panel ending at v = 1 with the
    algebraic weight (1 - v)^e.
    """
    if not (alpha_ek > 0 and m_ek > 0):
        raise DomainError("Erdelyi-Kober parameters must be > 0")
    if not x > 0:
        raise DomainError("Erdelyi-Kober integral needs x > 0")

    def integrand(v):
        # 1 - v^(1/a) without cancellation near v = 1
        w = -math.expm1(math.log(v) / alpha_ek) if v > 0 else 1.0
        return f(x * w ** (1.0 / m_ek))

    vb = [(1.0 - (y / x) ** m_ek) ** alpha_ek for y in breaks if 0 < y < x]
    edges = np.unique(np.concatenate([[0.0, 1.0], vb]))
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                if y0_exponent is not None and b == 1.0:
                    e = y0_exponent
                    top = math.nextafter(1.0, 0.0)  # the rule samples the endpoint itself
                    val, _ = integrate.quad(lambda v: integrand(min(v, top)) / (1.0 - min(v, top)) ** e, a, b,
                                            weight="alg", wvar=(0.0, e), epsabs=tol, epsrel=tol, limit=400)
                else:
                    val, _ = integrate.quad(integrand, a, b, epsabs=tol, epsrel=tol, limit=400)
            except integrate.IntegrationWarning as exc:
                raise ConvergenceError(f"Erdelyi-Kober quadrature failed on [{a}, {b}]: {exc}") from None
            total += val
    return x ** (m_ek * alpha_ek) / math.gamma(alpha_ek + 1.0) * total


def epd_hat_ek(lambda_epd, m, t, tol=1e-12):
    """EPD multiplier as Gamma(lam + 1/2)/sqrt(pi) * I^1_lam[cos(t sqrt(m y)) / sqrt(y)](1)."""
    _check_lam(lambda_epd)
    if not m >= 0:
        raise DomainError("symbol value m must be >= 0")
    if t == 0 or m == 0:
        return 1.0
    z = t * math.sqrt(m)

    def wave_over_root(y):
        return math.cos(z * math.sqrt(y)) / math.sqrt(y)

    # zeros of the cosine, y = ((k + 1/2) pi / z)^2
    k = np.arange(int(z / math.pi + 0.5) + 1)
    breaks = ((k + 0.5) * math.pi / z) ** 2
    val = erdelyi_kober(lambda_epd, 1.0, wave_over_root, 1.0, tol, breaks=breaks, y0_exponent=-0.5)
    return math.gamma(lambda_epd + 0.5) / math.sqrt(math.pi) * val


def _beta_chunk(gen, m, lam, wave_eval, t):
    x = gen.beta(0.5, lam, size=m)
    return np.asarray(wave_eval(t * np.sqrt(x)), dtype=float).reshape(m, -1)


def epd_beta_mc(params: EpdParams, wave_eval, t, n, rng: RngStream, chunks=DEFAULT_CHUNKS, workers=1):
    """E[wave_eval(t sqrt(X))] with X ~ Beta(1/2, lam).

    ``wave_eval`` maps an array of times (shape (k,)) to wave-solution values
    of shape (k,) or (k, G); mean and standard error are per grid point.
    """
    if n < 100:
        raise DomainError("epd_beta_mc needs n >= 100")
    if t == 0:
        v = np.atleast_1d(np.asarray(wave_eval(np.zeros(1)), dtype=float)).reshape(-1)
        return MCEstimate(v, np.zeros_like(v), n, rng.seed, rng.stream_id)
    return mc_mean(_beta_chunk, n, rng, (params.lambda_epd, wave_eval, t), chunks, workers)


def epd_shifted_ode(lambda_epd, eps, m, t, rtol=1e-11, atol=1e-13):
    """Solution of u'' + 2 lam / (s + eps) u' + m u = 0, u(0) = 1, u'(0) = 0, at s = t."""
    if not eps > 0:
        raise DomainError("eps must be > 0")

    def rhs(s, y):
        return [y[1], -2 * lambda_epd / (s + eps) * y[1] - m * y[0]]

    sol = integrate.solve_ivp(rhs, (0.0, t), [1.0, 0.0], method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise ConvergenceError(sol.message)
    return float(sol.y[0, -1])


def _inhom_chunk(gen, m, lam, eps, wave_eval, t):
    x = sample_telegraph_inhomogeneous(lam, eps, t, gen, size=m)
    return np.asarray(wave_eval(x), dtype=float).reshape(m, -1)


def epd_inhomogeneous_telegraph_mc(lambda_epd, eps, wave_eval, t, n, rng: RngStream,
                                   chunks=DEFAULT_CHUNKS, workers=1):
    """E[wave_eval(X_eps(t))] for the telegraph process with switching rate lam/(s + eps)."""
    if not eps > 0:
        raise DomainError("eps must be > 0")
    if n < 2:
        raise DomainError("n must be >= 2")
    est = mc_mean(_inhom_chunk, n, rng, (lambda_epd, eps, wave_eval, t), chunks, workers)
    est.meta["eps"] = eps
    return est


def epd_kernel_d1_laplacian(lambda_epd, t, x):
    """Fundamental solution in d = 1 for A = -Laplacian:
    (1 - x^2/t^2)^(lam - 1) / (t B(lam, 1/2)) on |x| < t, zero outside."""
    _check_lam(lambda_epd)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < t
    base = np.where(inside, 1.0 - (x / t) ** 2, 1.0)
    out = np.where(inside, base ** (lambda_epd - 1.0) / (t * sp.beta(lambda_epd, 0.5)), 0.0)
    return float(out) if out.ndim == 0 else out


# -- field solvers -------------------------------------------------------------------


def _dalembert_wave(f, grid):
    # wave solution for A = -Laplacian in d = 1: (f(x - s) + f(x + s)) / 2
    def wave_eval(s):
        s = np.asarray(s, dtype=float)[:, None]
        return 0.5 * (f(grid[None, :] - s, 1) + f(grid[None, :] + s, 1))

    return wave_eval


class _WaveTable:
    """Wave solution w(s, x) on [0, t] x grid, interpolated in s.

    Built from Hankel inversions of cos(s sqrt(m)) f_hat at Chebyshev nodes;
    the node count doubles until the interpolant changes by less than ``itol``.
    Picklable, so it can be shipped to worker processes.
    """

    def __init__(self, sym, f, d, grid, t, tol=HANKEL_TOL, itol=1e-9, max_nodes=129):
        self.t = float(t)
        form = {1: "cos", 3: "sin"}.get(d, "bessel")
        shift = f.shift(d) if d == 1 else 0.0
        radii = np.abs(np.asarray(grid, dtype=float) - shift)
        cache = {}

        def wave_at(s):
            if s not in cache:
                def kern(r):
                    return float(f.fourier(r, d)) * math.cos(s * math.sqrt(float(evaluate_symbol(sym, r))))
                cache[s] = np.array([hankel_inverse(d, kern, x, tol=tol, form=form) for x in radii])
            return cache[s]

        k = 17
        prev = None
        while True:
            nodes = 0.5 * self.t * (1 - np.cos(np.pi * np.arange(k) / (k - 1)))
            vals = np.array([wave_at(float(s)) for s in nodes])
            interp = BarycentricInterpolator(nodes, vals)
            if prev is not None:
                mid = 0.5 * (nodes[1:] + nodes[:-1])
                change = float(np.max(np.abs(interp(mid) - prev(mid))))
                if change < itol:
                    break
                if 2 * k - 1 > max_nodes:
                    raise ConvergenceError(f"wave table in s not converged (change {change:.2e})")
            prev = interp
            k = 2 * k - 1
        self.interp = interp
        self.nodes = k
        self.interp_change = change

    def __call__(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.t)
        return np.asarray(self.interp(s), dtype=float).reshape(s.size, -1)


def _beta_field_chunk(gen, m, lam, f, grid, t):
    x = gen.beta(0.5, lam, size=m)
    s = t * np.sqrt(x)[:, None]
    return 0.5 * (f(grid[None, :] - s, 1) + f(grid[None, :] + s, 1))


def solve_epd(params: EpdParams, f, grid, t, route="epd-bessel", n=100_000, rng=None,
              tol=HANKEL_TOL, chunks=DEFAULT_CHUNKS, workers=1):
    """EPD solution u(t, .) on ``grid`` (radii for d >= 2, radial data).

    ``route`` picks the multiplier: ``epd-bessel`` (Bessel closed form),
    ``epd-ek`` (Erdelyi-Kober quadrature) or ``epd-beta`` (Beta-subordinated
    wave solution, Monte Carlo; needs ``rng`` and pointwise data).  For the
    d = 1 Laplacian the wave solution is the d'Alembert average; otherwise it
    is tabulated in s by Hankel inversion and interpolated.
    """
    d = params.d
    grid = np.asarray(grid, dtype=float)
    if not t >= 0:
        raise DomainError("t must be >= 0")
    if d >= 2:
        if np.any(grid < 0):
            raise DomainError("radial grid must be nonnegative for d >= 2")
        if not f.is_radial(d):
            raise DimensionError(f"initial data {f.kind} is not radial in d={d}")
    if isinstance(f, Tabulated) and d != 1:
        raise DimensionError("tabulated initial data is one-dimensional")
    lam = params.lambda_epd
    sym = params.symbol
    meta = {"lambda_epd": lam, "symbol": sym.to_dict(), "initial": f.to_dict()}
    if t == 0:
        if isinstance(f, Delta):
            raise DomainError("delta initial data cannot be sampled at t = 0")
        return SolutionField(d, grid, f(grid, d), 0.0, route, meta=meta)

    if route == "epd-beta":
        if isinstance(f, (Delta, Tabulated)):
            raise DomainError("epd-beta route needs pointwise (gaussian or indicator) data")
        if rng is None:
            raise DomainError("epd-beta route needs an RngStream")
        if isinstance(sym, Laplacian) and d == 1:
            est = mc_mean(_beta_field_chunk, n, rng, (lam, f, grid, t), chunks, workers)
            meta["wave"] = "dalembert"
        else:
            table = _WaveTable(sym, f, d, grid, t, tol=tol)
            est = mc_mean(_beta_chunk, n, rng, (lam, table, t), chunks, workers)
            meta["wave"] = {"kind": "chebyshev-table", "nodes": table.nodes,
                            "interp_change": table.interp_change, "hankel_tol": tol}
        meta.update({"n": n, "seed": rng.seed, "stream_id": rng.stream_id, **est.meta})
        return SolutionField(d, grid, est.mean, t, route, stderr=est.stderr, meta=meta)

    if route == "epd-bessel":

        def mult(r):
            return _bessel_ratio(lam - 0.5, t * math.sqrt(float(evaluate_symbol(sym, r))))

    elif route == "epd-ek":

        def mult(r):
            return epd_hat_ek(lam, float(evaluate_symbol(sym, r)), t)

    else:
        raise DomainError(f"solve_epd does not provide route {route!r}")

    if isinstance(f, Tabulated):
        raise DimensionError("tabulated data is supported by the telegraph solver only")
    if isinstance(f, Delta):
        kern = mult
    else:

        def kern(r):
            return float(f.fourier(r, d)) * mult(r)

    form = {1: "cos", 3: "sin"}.get(d, "bessel")
    shift = f.shift(d) if d == 1 else 0.0
    values = np.empty(grid.size)
    panels = 0
    for i, x in enumerate(grid):
        res = hankel_inverse(d, kern, abs(x - shift), tol=tol, form=form, full_output=True)
        values[i] = res.value
        panels = max(panels, res.panels)
    meta["diagnostics"] = {"hankel_tol": tol, "hankel_form": form, "max_panels": panels}
    return SolutionField(d, grid, values, t, route, meta=meta)


def solve_epd_series(sys: EigenSystem, lambda_epd, t, grid, mode="epd"):
    """sum_k <f, phi_k> M(x_k, t) phi_k(x) with M the EPD multiplier
    (``mode="epd"``) or the wave multiplier cos(t sqrt(x_k)) (``mode="wave"``).

    A truncation diagnostic is recorded (and logged) when the last
    coefficient exceeds 1e-8 in magnitude.
    """
    grid = np.asarray(grid, dtype=float)
    if mode == "epd":
        mult = np.array([epd_hat_bessel(lambda_epd, xk, t) for xk in sys.eigenvalues])
    elif mode == "wave":
        mult = wave_hat(sys.eigenvalues, t)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    values = (sys.coefficients * np.atleast_1d(mult)) @ sys.basis_values(grid)
    last = abs(float(sys.coefficients[-1]))
    meta = {"lambda_epd": lambda_epd, "modes": int(sys.eigenvalues.size), "mode": mode,
            "last_coefficient": last, "truncated": last > SERIES_TRUNCATION_TOL}
    if last > SERIES_TRUNCATION_TOL:
        log.warning("eigen-series may be truncated: |c_K| = %.2e > %.0e", last, SERIES_TRUNCATION_TOL)
    return SolutionField(1, grid, values, t, "epd-series", meta=meta)
