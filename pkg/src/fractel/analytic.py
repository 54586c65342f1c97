"""Fundamental solution of the time-fractional telegraph equation

    (D_t^alpha)^2 u + 2 lam D_t^alpha u = -A u,   u(0) = f,  (u_t(0) = 0 for alpha > 1/2)

in Fourier variables, its Laplace transform, the alpha = 1/2 and alpha = 1
closed forms, and the spatial solution u(t, .) = f * Phi_alpha(t, .).

With roots r_{1,2} = -lam +- sqrt(lam^2 - m) of r^2 + 2 lam r + m,

    Phi_hat(t, m) = 1/2 [(1 + c) E_a(r1 t^a) + (1 - c) E_a(r2 t^a)],
    c = lam / sqrt(lam^2 - m),

where E_a = E_{a,1}.  Its Laplace transform in t is the rational form
(s^{2a-1} + 2 lam s^{a-1}) / (s^{2a} + 2 lam s^a + m).
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp

from fractel.errors import AccuracyError, ConvergenceError, DimensionError, DomainError
from fractel.fields import Delta, SolutionField, Tabulated
from fractel.hankel import HANKEL_TOL, hankel_inverse
from fractel.numlab import TALBOT_TOL, talbot_invert
from fractel.specfun import mittag_leffler
from fractel.symbols import FracParams, Laplacian, evaluate_symbol

__all__ = [
    "CharRoots",
    "char_roots",
    "phi_hat",
    "phi_hat_laplace",
    "phi_hat_half_erf",
    "phi_hat_one_exp",
    "phi_hat_talbot",
    "g_kernel_half",
    "telegraph_density",
    "telegraph_halftime_density",
    "halftime_atom_mass",
    "solve_telegraph",
    "EPS_DEG",
]

log = logging.getLogger(__name__)

EPS_DEG = 1e-6
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class CharRoots:
    r1: complex
    r2: complex


def _check_m_t(m, t):
    if not m >= 0:
        raise DomainError(f"symbol value m must be >= 0, got {m}")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")


def char_roots(p: FracParams, m) -> CharRoots:
    """Roots of r^2 + 2 lam r + m, principal branch i sqrt(m - lam^2) above lam^2."""
    if not m >= 0:
        raise DomainError(f"symbol value m must be >= 0, got {m}")
    disc = p.lam * p.lam - m
    sq = math.sqrt(disc) if disc >= 0 else 1j * math.sqrt(-disc)
    return CharRoots(complex(-p.lam + sq), complex(-p.lam - sq))


def _phi_hat_nondeg(alpha, lam, m, t, check):
    disc = lam * lam - m
    ta = t**alpha
    if disc > 0:
        sq = math.sqrt(disc)
        c = lam / sq
        # real roots, real arguments
        e1 = mittag_leffler(alpha, 1.0, (-lam + sq) * ta).real
        e2 = mittag_leffler(alpha, 1.0, (-lam - sq) * ta).real
        return 0.5 * ((1 + c) * e1 + (1 - c) * e2)
    sq = 1j * math.sqrt(-disc)
    c = lam / sq
    e1 = mittag_leffler(alpha, 1.0, (-lam + sq) * ta)
    if not check:
        # r2 = conj(r1) and E has real coefficients, so the two terms are conjugate
        return ((1 + c) * e1).real
    e2 = mittag_leffler(alpha, 1.0, (-lam - sq) * ta)
    v = 0.5 * ((1 + c) * e1 + (1 - c) * e2)
    if abs(v.imag) > IMAG_TOL * (1 + abs(v.real)):
        raise AccuracyError(f"imaginary residue {abs(v.imag):.2e} in Phi_hat at m={m}, t={t}")
    return v.real


def _phi_hat_scalar(alpha, lam, m, t, check):
    _check_m_t(m, t)
    if t == 0:
        return 1.0
    if m == 0:
        return 1.0
    lam2 = lam * lam
    if abs(m - lam2) < EPS_DEG * lam2:
        # the two-root formula is 0/0 at m = lam^2; interpolate across the band
        lo, hi = lam2 * (1 - EPS_DEG), lam2 * (1 + EPS_DEG)
        vlo = _phi_hat_nondeg(alpha, lam, lo, t, check)
        vhi = _phi_hat_nondeg(alpha, lam, hi, t, check)
        return vlo + (m - lo) / (hi - lo) * (vhi - vlo)
    return _phi_hat_nondeg(alpha, lam, m, t, check)


def phi_hat(p: FracParams, m, t, check=False):
    """Phi_hat_alpha(t, m) by the Mittag-Leffler formula.

    ``m`` and ``t`` may be scalars or arrays (broadcast).  With ``check=True``
    both conjugate terms are evaluated separately and an :class:`AccuracyError`
    is raised when the imaginary part of their sum exceeds 1e-9 (1 + |value|).
    """
    if np.ndim(m) == 0 and np.ndim(t) == 0:
        return _phi_hat_scalar(p.alpha, p.lam, float(m), float(t), check)
    mm, tt = np.broadcast_arrays(np.asarray(m, dtype=float), np.asarray(t, dtype=float))
    out = np.empty(mm.shape)
    for idx in np.ndindex(mm.shape):
        out[idx] = _phi_hat_scalar(p.alpha, p.lam, mm[idx], tt[idx], check)
    return out


def phi_hat_laplace(p: FracParams, m, s):
    """(s^{2a-1} + 2 lam s^{a-1}) / (s^{2a} + 2 lam s^a + m); accepts complex s."""
    s = np.asarray(s)
    if not np.iscomplexobj(s) and np.any(~(s > 0)):
        raise DomainError("phi_hat_laplace requires s > 0")
    a, lam = p.alpha, p.lam
    sa = s**a
    out =(s ** (2 * a - 1) + 2 * lam * s ** (a - 1)) / (sa * sa + 2 * lam * sa + m)
    return out.item() if np.ndim(out) == 0 else out


def _principal_poles(p: FracParams, m):
    """Poles s_k = r_k^(1/a) of the Laplace form and their residues.

    A root r_k of r^2 + 2 lam r + m gives a pole on the principal sheet of
    s^a only when |arg r_k| < a pi, which for a <= 1 needs complex roots
    (m > lam^2).  Residue: (r_k + 2 lam) / (a (2 r_k + 2 lam)).
    """
    lam2 = p.lam * p.lam
    if m <= lam2 * (1 + EPS_DEG):
        return []
    roots = char_roots(p, m)
    out = []
    for r in (roots.r1, roots.r2):
        if abs(cmath.phase(r)) < p.alpha * math.pi:
            sk = cmath.exp(cmath.log(r) / p.alpha)
            out.append((sk, (r + 2 * p.lam) / (p.alpha * (2 * r + 2 * p.lam))))
    return out


def phi_hat_talbot(p: FracParams, m, t, tol=TALBOT_TOL):
    """Phi_hat_alpha(t, m) by Talbot inversion of the rational Laplace form.

    Complex poles off the negative real axis can lie outside the Talbot
    contour, where the fixed rule silently misses them; their residue terms
    c_k e^{s_k t} are added explicitly and c_k / (s - s_k) is removed from
    the image before inversion, leaving only the branch cut on s <= 0.
    """
    if not m >= 0:
        raise DomainError("symbol value m must be >= 0")
    if t == 0:
        return 1.0
    poles = _principal_poles(p, m)

    def image(s):
        val = phi_hat_laplace(p, m, s)
        for sk, ck in poles:
            val = val - ck / (s - sk)
        return val

    smooth = talbot_invert(image, t, tol=tol)
    return smooth + sum((ck * cmath.exp(sk * t)).real for sk, ck in poles)


def _e_half(z):
    # E_{1/2,1}(z) = exp(z^2) erfc(-z) = w(-i z), Faddeeva function
    return sp.wofz(-1j * np.asarray(z, dtype=complex))


def _half_erf_nondeg(lam, m, t):
    roots = char_roots(FracParams(0.5, lam), m)
    sq = roots.r1 + lam
    c = lam / sq
    st = math.sqrt(t)
    v = 0.5 * ((1 + c) * _e_half(roots.r1 * st) + (1 - c) * _e_half(roots.r2 * st))
    return float(np.real(v))


def phi_hat_half_erf(lam, m, t):
    """Phi_hat_{1/2}(t, m) written with E_{1/2,1}(x) = e^{x^2}(1 + erf x)."""
    _check_m_t(m, t)
    if t == 0 or m == 0:
        return 1.0
    lam2 = lam * lam
    if abs(m - lam2) < EPS_DEG * lam2:
        lo, hi = lam2 * (1 - EPS_DEG), lam2 * (1 + EPS_DEG)
        vlo, vhi = _half_erf_nondeg(lam, lo, t), _half_erf_nondeg(lam, hi, t)
        return vlo + (m - lo) / (hi - lo) * (vhi - vlo)
    return _half_erf_nondeg(lam, m, t)


def g_kernel_half(lam, m, t):
    """e^{-lam t} [cosh(t q) + lam sinh(t q) / q],  q = sqrt(lam^2 - m).

    For m > lam^2 the hyperbolic functions become circular ones; at m = lam^2
    the limit e^{-lam t}(1 + lam t) is used.  Vectorised over ``t``.
    """
    if not lam > 0:
        raise DomainError("lambda must be > 0")
    if not m >= 0:
        raise DomainError("symbol value m must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    disc = lam * lam - m
    q = math.sqrt(abs(disc))
    qt = q * t
    small = qt < 1e-4
    if disc >= 0:
        # e^{-lam t} cosh(q t) and e^{-lam t} sinh(q t) without overflow
        ep = np.exp((q - lam) * t)
        em = np.exp(-(q + lam) * t)
        ch = 0.5 * (ep + em)
        with np.errstate(divide="ignore", invalid="ignore"):
            sh_q = np.where(small, 0.0, 0.5 * (ep - em) / np.where(q > 0, q, 1.0))
    else:
        damp = np.exp(-lam * t)
        ch = damp * np.cos(qt)
        sh_q = np.where(small, 0.0, damp * np.sin(qt) / q)
    # series for sinh(qt)/q near qt = 0, sign of q^2 = disc
    series = np.exp(-lam * t) * t * (1 + disc * t * t / 6)
    sh_q = np.where(small, series, sh_q)
    out = ch + lam * sh_q
    return float(out) if out.ndim == 0 else out


def phi_hat_one_exp(lam, m, t):
    """Phi_hat_1(t, m) in exponential form; the same function as g_kernel_half."""
    return g_kernel_half(lam, m, t)


# -- densities -----------------------------------------------------------------


def _ac_bracket_scaled(lam, z, w):
    """e^{-lam z} [lam I0(lam w) + lam z I1(lam w) / w] for 0 <= w <= z."""
    y = lam * w
    scale = np.exp(-lam * (z - w))
    with np.errstate(divide="ignore", invalid="ignore"):
        i1_over_w = np.where(y > 1e-8, sp.i1e(y) / np.where(w > 0, w, 1.0), 0.5 * lam)
    return scale * (lam * sp.i0e(y) + lam * z * i1_over_w)


def telegraph_density(lam, t, x):
    """Law of the unit-speed telegraph position at time t with switching rate lam.

    Returns ``(ac_part, atom_weight)``; ``ac_part`` is the density on |x| < t
    and ``atom_weight`` = e^{-lam t}/2 is the mass at each of x = +-t.
    Vectorised over ``x``.
    """
    if not lam > 0:
        raise DomainError("lambda must be > 0")
    if not t > 0:
        raise DomainError("t must be > 0")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < t
    w = np.sqrt(np.where(inside, t * t - x * x, 0.0))
    ac = np.where(inside, 0.5 * _ac_bracket_scaled(lam, t, w), 0.0)
    atom = 0.5 * math.exp(-lam * t)
    return (float(ac) if ac.ndim == 0 else ac), atom


def halftime_atom_mass(lam, t):
    """Probability that the telegraph run for time |B(t)| never switches:
    E[e^{-lam |B(t)|}] = e^{lam^2 t} erfc(lam sqrt t)."""
    return float(sp.erfcx(lam * math.sqrt(t)))


def _halftime_scalar(lam, t, x):
    ax = abs(x)
    c = 1.0 / (2.0 * math.sqrt(math.pi * t))

    def integrand(z):
        w = math.sqrt(max(z * z - ax * ax, 0.0))
        return math.exp(-z * z / (4 * t)) * float(_ac_bracket_scaled(lam, z, w))

    # mass sits within a few multiples of sqrt(t) past |x|
    width = 2.0 * math.sqrt(t)
    edges = [ax + width * k for k in (0, 0.25, 1, 3, 8)]
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for a, b in zip(edges[:-1], edges[1:]):
                total += integrate.quad(integrand, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            total += integrate.quad(integrand, edges[-1], math.inf, epsabs=1e-14, limit=200)[0]
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"halftime density quadrature failed at x={x}: {exc}") from None
    atoms = math.exp(-ax * ax / (4 * t) - lam * ax)
    return c * (total + atoms)


def telegraph_halftime_density(lam, t, x):
    """Density of T(|B(t)|): the telegraph process run for the time |B(t)|,
    where B(t) ~ N(0, 2t).  Vectorised over ``x``."""
    if not lam > 0:
        raise DomainError("lambda must be > 0")
    if not t > 0:
        raise DomainError("t must be > 0")
    if np.ndim(x) == 0:
        return _halftime_scalar(lam, t, float(x))
    xs = np.asarray(x, dtype=float)
    return np.array([_halftime_scalar(lam, t, v) for v in xs.ravel()]).reshape(xs.shape)


# -- spatial solution --------------------------------------------------------------


def _kernel_factory(p, sym, f, d, t, route):
    if route == "analytic":

        def phi(r):
            return _phi_hat_scalar(p.alpha, p.lam, float(evaluate_symbol(sym, r)), t, False)

    elif route == "laplace-check":

        def phi(r):
            return phi_hat_talbot(p, float(evaluate_symbol(sym, r)), t)

    else:
        raise DomainError(f"solve_telegraph does not provide route {route!r}")
    if isinstance(f, Delta):
        return phi

    def kern(r):
        return float(f.fourier(r, d)) * phi(r)

    return kern


def _hankel_form(d):
    return {1: "cos", 3: "sin"}.get(d, "bessel")


def _spectral_convolution(p, sym, f, grid, t, route, pad=None, max_log2=18):
    """Periodic spectral convolution of tabulated 1-D data with Phi_alpha(t)."""
    lo = min(f.grid[0], grid[0])
    hi = max(f.grid[-1], grid[-1])
    if pad is None:
        pad = 20.0 * max(1.0, t) + (hi - lo)
    period = hi - lo + 2 * pad
    h = 0.125 * min(np.min(np.diff(f.grid)), np.min(np.diff(grid)))
    n = 1 << int(min(max_log2, max(10, math.ceil(math.log2(period / h)))))
    h = period / n
    y = lo - pad + h * np.arange(n)
    samples = f(y)
    k = 2 * math.pi * np.fft.rfftfreq(n, h)
    m = evaluate_symbol(sym, k)
    if route == "analytic":
        mult = phi_hat(p, m, t)
    else:
        mult = np.array([phi_hat_talbot(p, float(mi), t) for mi in m])
    conv = np.fft.irfft(np.fft.rfft(samples) * mult, n)
    values = np.interp(grid, y, conv)
    return values, {"fft_points": n, "fft_step": h, "period": period}


def solve_telegraph(p: FracParams, sym, f, d, grid, t, route="analytic", tol=HANKEL_TOL):
    """Solution u(t, .) = f * Phi_alpha(t, .) on ``grid``.

    In d = 1 the grid is a coordinate line; in d >= 2 it holds radii |x| and
    ``f`` must be radial.  Delta data returns Phi_alpha(t, .) itself; for
    alpha = 1, the Laplacian and d = 1 this is the telegraph law, whose
    boundary atoms are reported in ``meta["atoms"]``.
    """
    if int(d) != d or d < 1:
        raise DomainError("dimension must be a positive integer")
    d = int(d)
    grid = np.asarray(grid, dtype=float)
    if not t >= 0:
        raise DomainError("t must be >= 0")
    if d >= 2:
        if np.any(grid < 0):
            raise DomainError("radial grid must be nonnegative for d >= 2")
        if not f.is_radial(d):
            raise DimensionError(f"initial data {f.kind} is not radial in d={d}")
    meta = {"alpha": p.alpha, "lambda": p.lam, "symbol": sym.to_dict(), "initial": f.to_dict()}
    if t == 0:
        if isinstance(f, Delta):
            raise DomainError("delta initial data cannot be sampled at t = 0")
        return SolutionField(d, grid, f(grid, d), 0.0, route, meta=meta)

    if isinstance(f, Tabulated):
        if d != 1:
            raise DimensionError("tabulated initial data is one-dimensional")
        values, diag = _spectral_convolution(p, sym, f, grid, t, route)
        meta["diagnostics"] = diag
        return SolutionField(d, grid, values, t, route, meta=meta)

    if (
        isinstance(f, Delta)
        and p.alpha == 1.0
        and isinstance(sym, Laplacian)
        and d == 1
        and route == "analytic"
    ):
        ac, atom = telegraph_density(p.lam, t, grid)
        meta["atoms"] = {"positions": [-t, t], "weight": atom}
        return SolutionField(d, grid, ac, t, route, meta=meta)

    kern = _kernel_factory(p, sym, f, d, t, route)
    if route == "laplace-check":
        # the radial integral cannot be resolved below the inversion noise
        tol = max(tol, TALBOT_TOL)
    form = _hankel_form(d)
    shift = f.shift(d) if d == 1 else 0.0
    values = np.empty(grid.size)
    panels = []
    for i, x in enumerate(grid):
        res = hankel_inverse(d, kern, abs(x - shift), tol=tol, form=form, full_output=True)
        values[i] = res.value
        panels.append(res.panels)
    log.debug("solve_telegraph: %d points, max panels %d", grid.size, max(panels))
    meta["diagnostics"] = {"hankel_tol": tol, "hankel_form": form, "max_panels": max(panels)}
    return SolutionField(d, grid, values, t, route, meta=meta)
