"""Special functions: Gamma, erf, Bessel J and I0, and the two-parameter
Mittag-Leffler function.

The elementary functions are thin, domain-checked wrappers over
:mod:`scipy.special`.  The Mittag-Leffler function is evaluated by a Taylor
series close to the origin and by trapezoidal quadrature of its Laplace
inversion integral along an optimally placed parabolic contour elsewhere
(Garrappa, SIAM J. Numer. Anal. 53 (2015)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from fractel.errors import AccuracyError, DomainError

__all__ = [
    "MLQuery",
    "gamma_fn",
    "erf",
    "bessel_j",
    "bessel_i0",
    "bessel_i0e",
    "mittag_leffler",
    "ml_series",
]

GAMMA_MAX_ARG = 171.0
SERIES_RADIUS = 1.0

_LOG_EPS = math.log(np.finfo(float).eps)
_TARGET_LOG_EPS = math.log(1e-15)
_CERTIFY_LOG_EPS = math.log(1e-6)
_MAX_NODES = 200


def _reject_nan(x, name="x"):
    if np.any(np.isnan(x)):
        raise DomainError(f"{name} must not be NaN")


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    x = np.asarray(x, dtype=float)
    _reject_nan(x)
    if np.any(x <= 0):
        raise DomainError("gamma_fn requires x > 0")
    if np.any(x > GAMMA_MAX_ARG):
        raise OverflowError(f"gamma_fn overflows for x > {GAMMA_MAX_ARG}")
    out = sp.gamma(x)
    return float(out) if out.ndim == 0 else out


def erf(x):
    x = np.asarray(x, dtype=float)
    _reject_nan(x)
    out = sp.erf(x)
    return float(out) if out.ndim == 0 else out


def bessel_j(nu, x):
    """Bessel function of the first kind, J_nu(x), for nu >= -1/2 and x >= 0."""
    x = np.asarray(x, dtype=float)
    _reject_nan(x)
    if np.isnan(nu) or nu < -0.5:
        raise DomainError("bessel_j requires nu >= -1/2")
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    if nu == -0.5:
        # scipy's jv(-1/2, 0) is nan rather than +inf
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0, np.sqrt(2.0 / (np.pi * x)) * np.cos(x), np.inf)
    else:
        out = sp.jv(nu, x)
    return float(out) if out.ndim == 0 else out


def bessel_i0(x):
    """Modified Bessel function I_0(x) for 0 <= x <= ~713."""
    x = np.asarray(x, dtype=float)
    _reject_nan(x)
    if np.any(x < 0):
        raise DomainError("bessel_i0 requires x >= 0")
    out = sp.i0(x)
    if np.any(np.isinf(out)):
        raise OverflowError("I_0 overflows; use bessel_i0e")
    return float(out) if out.ndim == 0 else out


def bessel_i0e(x):
    """Exponentially scaled I_0: exp(-x) * I_0(x)."""
    x = np.asarray(x, dtype=float)
    _reject_nan(x)
    if np.any(x < 0):
        raise DomainError("bessel_i0e requires x >= 0")
    out = sp.i0e(x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MLQuery:
    alpha: float
    beta: float
    z: complex

    def __post_init__(self):
        _check_ml_params(self.alpha, self.beta)
        if cmath.isnan(complex(self.z)):
            raise DomainError("z must not be NaN")


def _check_ml_params(alpha, beta):
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"Mittag-Leffler alpha must lie in (0, 1], got {alpha}")
    if not beta > 0.0:
        raise DomainError(f"Mittag-Leffler beta must be > 0, got {beta}")


def mittag_leffler(alpha, beta=None, z=None):
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z).

    Accepts a scalar or an array of complex arguments; returns complex values
    of the same shape.  ``mittag_leffler(MLQuery(...))`` is also accepted.

    Raises :class:`AccuracyError` when the contour method cannot reach an
    accuracy of 1e-6 with its node budget.
    """
    if isinstance(alpha, MLQuery):
        q = alpha
        return _ml_scalar(q.alpha, q.beta, complex(q.z))
    _check_ml_params(alpha, beta)
    zz = np.asarray(z, dtype=complex)
    if np.any(np.isnan(zz)):
        raise DomainError("z must not be NaN")
    if zz.ndim == 0:
        return _ml_scalar(alpha, beta, complex(zz))
    out = np.empty(zz.shape, dtype=complex)
    flat = zz.ravel()
    res = out.ravel()
    for i, zi in enumerate(flat):
        res[i] = _ml_scalar(alpha, beta, complex(zi))
    return out


def _ml_scalar(alpha, beta, z):
    if z == 0:
        return complex(sp.rgamma(beta))
    if alpha == 1.0 and beta == 1.0:
        return cmath.exp(z)
    if abs(z) <= SERIES_RADIUS:
        return ml_series(alpha, beta, z)
    return _ml_contour(alpha, beta, z)


def ml_series(alpha, beta, z, kmax=None):
    """Truncated power series, summed with compensation (math.fsum).

    Only accurate where no cancellation occurs, i.e. for moderate |z|.
    """
    if z == 0:
        return complex(sp.rgamma(beta))
    if kmax is None:
        # terms peak near k ~ |z|^(1/alpha) / alpha and are negligible well past it
        kmax = int(math.ceil((28.0 + 2.0 * abs(z) ** (1.0 / alpha)) / alpha)) + 8
    k = np.arange(kmax)
    terms = np.exp(k * cmath.log(z) - sp.gammaln(alpha * k + beta))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _ml_contour(alpha, beta, z, log_eps=_TARGET_LOG_EPS):
    theta = cmath.phase(z)
    kmin = math.ceil(-alpha / 2.0 - theta / (2.0 * math.pi))
    kmax = math.floor(alpha / 2.0 - theta / (2.0 * math.pi))
    absz = abs(z)
    poles = [
        absz ** (1.0 / alpha) * cmath.exp(1j * (theta + 2.0 * k * math.pi) / alpha)
        for k in range(kmin, kmax + 1)
    ]
    phis = [(p.real + abs(p)) / 2.0 for p in poles]
    order = sorted(range(len(poles)), key=lambda i: phis[i])
    poles = [poles[i] for i in order if phis[i] > 1e-15]
    phis = [phis[i] for i in order if phis[i] > 1e-15]

    s_star = [0j] + poles
    phi_star = [0.0] + phis + [math.inf]
    J1 = len(s_star)
    p = [max(0.0, -2.0 * (alpha - beta + 1.0))] + [1.0] * (J1 - 1)
    q = [1.0] * (J1 - 1) + [math.inf]

    while True:
        admissible = [
            j
            for j in range(J1)
            if phi_star[j] < (log_eps - _LOG_EPS) and phi_star[j] < phi_star[j + 1]
        ]
        best = None
        for j in admissible:
            if j < J1 - 1:
                mu, h, N = _optimal_param_rb(phi_star[j], phi_star[j + 1], p[j], q[j], log_eps)
            else:
                mu, h, N = _optimal_param_ru(phi_star[j], p[j], log_eps)
            if best is None or N < best[2]:
                best = (mu, h, N, j)
        if best is not None and best[2] <= _MAX_NODES:
            break
        log_eps += math.log(10.0)
        if log_eps > _CERTIFY_LOG_EPS:
            raise AccuracyError(
                f"Mittag-Leffler contour cannot certify 1e-6 at z={z!r}, alpha={alpha}"
            )

    mu, h, N, j = best
    u = h * np.arange(-N, N + 1)
    s = mu * (1j * u + 1.0) ** 2
    ds = 2.0 * mu * (1j - u)
    F = np.exp(s) * s ** (alpha - beta) / (s**alpha - z) * ds
    integral = h * np.sum(F) / (2j * math.pi)
    residues = sum(
        (1.0 / alpha) * ss ** (1.0 - beta) * cmath.exp(ss) for ss in s_star[j + 1 :]
    )
    val = integral + residues
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise AccuracyError(f"non-finite Mittag-Leffler value at z={z!r}")
    if z.imag == 0.0:
        val = complex(val.real, 0.0)
    return val


def _optimal_param_rb(phi_j, phi_j1, pj, qj, log_eps):
    # region bounded by two singularities
    fac = 1.01
    f_max = math.exp(log_eps - _LOG_EPS)
    sq_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt(log_eps - _LOG_EPS)
    sq_j1 = min(math.sqrt(phi_j1), threshold - sq_j)
    f_bar = None
    if pj < 1e-14 and qj < 1e-14:
        bar_j, bar_j1 = sq_j, sq_j1
        adm = True
    elif pj < 1e-14:
        bar_j = sq_j
        f_min = fac * (sq_j / (sq_j1 - sq_j)) ** qj if sq_j > 0 else fac
        adm = f_min < f_max
        if adm:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fq = f_bar ** (-1.0 / qj)
            bar_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq)
    elif qj < 1e-14:
        bar_j1 = sq_j1
        f_min = fac * (sq_j1 / (sq_j1 - sq_j)) ** pj
        adm = f_min < f_max
        if adm:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            bar_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp)
    else:
        f_min = fac * (sq_j + sq_j1) / (sq_j1 - sq_j) ** max(pj, qj)
        adm = f_min < f_max
        if adm:
            f_min = max(f_min, 1.5)
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            fq = f_bar ** (-1.0 / qj)
            w = -phi_j1 / log_eps
            den = 2.0 + w - (1.0 + w) * fp + fq
            bar_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den
            bar_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den
    if not adm or bar_j1 <= bar_j:
        return 0.0, 0.0, math.inf
    if f_bar is not None:
        log_eps = log_eps - math.log(f_bar)
    w = -bar_j1**2 / log_eps
    mu = (((1.0 + w) * bar_j + bar_j1) / (2.0 + w)) ** 2
    h = -2.0 * math.pi / log_eps * (bar_j1 - bar_j) / ((1.0 + w) * bar_j + bar_j1)
    if mu <= 0 or h <= 0:
        return 0.0, 0.0, math.inf
    N = math.ceil(math.sqrt(1.0 - log_eps / mu) / h)
    return mu, h, N


def _optimal_param_ru(phi_j, pj, log_eps):
    # unbounded region to the right of the last singularity
    sq_phi = math.sqrt(phi_j)
    phibar = phi_j * 1.01 if phi_j > 0 else 0.01
    sq_phibar = math.sqrt(phibar)
    f_min, f_max, f_tar = 1.0, 10.0, 5.0
    for _ in range(100):
        log_eps_phi = log_eps / phibar
        N = math.ceil(phibar / math.pi * (1.0 - 1.5 * log_eps_phi + math.sqrt(1.0 - 2.0 * log_eps_phi)))
        A = math.pi * N / phibar
        sq_mu = sq_phibar * abs(4.0 - A) / abs(7.0 - math.sqrt(1.0 + 12.0 * A))
        fbar = ((sq_phibar - sq_phi) / sq_mu) ** (-pj)
        if pj < 1e-14 or f_min < fbar < f_max:
            break
        sq_phibar = f_tar ** (-1.0 / pj) * sq_mu + sq_phi
        phibar = sq_phibar**2
    mu = sq_mu**2
    h = (-3.0 * A - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * A)) / (4.0 - A) / N
    threshold = log_eps - _LOG_EPS
    if mu > threshold:
        Q = 0.0 if abs(pj) < 1e-14 else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phibar = (Q + sq_phi) ** 2
        if phibar < threshold:
            w = math.sqrt(_LOG_EPS / (_LOG_EPS - log_eps))
            u = math.sqrt(-phibar / _LOG_EPS)
            mu = threshold
            N = math.ceil(w * log_eps / (2.0 * math.pi * (u * w - 1.0)))
            h = math.sqrt(_LOG_EPS / (_LOG_EPS - log_eps)) / N
        else:
            return 0.0, 0.0, math.inf
    return mu, h, N
