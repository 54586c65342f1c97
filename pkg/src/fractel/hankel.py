"""Radial inverse Fourier transform in R^d.

For an isotropic multiplier k(|xi|),

    F^{-1}k (x) = (2 pi)^(-d/2) |x|^(1-d/2) int_0^inf r^(d/2) J_{d/2-1}(r|x|) k(r) dr.

The integral is split at consecutive zeros of J_{d/2-1}(r|x|); each panel is
integrated adaptively and the sequence of partial sums is accelerated with
Wynn's epsilon algorithm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp

from fractel.errors import ConvergenceError, DomainError
from fractel.specfun import bessel_j

__all__ = ["hankel_inverse", "HankelResult", "bessel_zeros", "wynn_epsilon"]

HANKEL_TOL = 1e-10
MAX_PANELS = 1500


def bessel_zeros(nu, n):
    """First ``n`` positive zeros of J_nu for nu >= -1/2."""
    if nu == -0.5:
        return (np.arange(1, n + 1) - 0.5) * math.pi
    if nu == 0.5:
        return np.arange(1, n + 1) * math.pi
    if float(nu).is_integer() and nu >= 0:
        return sp.jn_zeros(int(nu), n)
    # McMahon's expansion refined by Newton's method
    mu = 4.0 * nu * nu
    k = np.arange(1, n + 1)
    b = (k + 0.5 * nu - 0.25) * math.pi
    z = b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
    for _ in range(50):
        step = sp.jv(nu, z) / sp.jvp(nu, z)
        z = z - step
        if np.all(np.abs(step) < 1e-15 * z):
            break
    return z


def wynn_epsilon(s):
    """Wynn epsilon extrapolation of the sequence ``s``; returns the last
    even-column estimate."""
    s = [float(v) for v in s]
    n = len(s)
    if n < 3:
        return s[-1]
    prev = [0.0] * (n + 1)
    cur = list(s)
    best = s[-1]
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                # sequence already converged at this depth
                return cur[i + 1] if k % 2 == 1 else best
            nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur:
            best = cur[-1]
        if len(cur) < 2:
            break
    return best


@dataclass
class HankelResult:
    value: float
    panels: int
    error_estimate: float
    form: str


def _quad(fun, a, b, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(fun, a, b, epsabs=tol, epsrel=1e-13, limit=200)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"panel quadrature failed on [{a}, {b}]: {exc}") from None
    return val, err


def hankel_inverse(d, kernel, x, tol=HANKEL_TOL, form="bessel", full_output=False):
    """Inverse Fourier transform of the radial multiplier ``kernel`` at radius ``x``.

    ``form`` selects the integrand: ``"bessel"`` (general d), ``"cos"``
    (the d = 1 cosine reduction) or ``"sin"`` (the d = 3 sine reduction).
    Raises :class:`ConvergenceError` when the accelerated tail has not settled
    below ``tol`` within the panel budget.
    """
    if int(d) != d or d < 1:
        raise DomainError("dimension must be a positive integer")
    d = int(d)
    if not x >= 0:
        raise DomainError("hankel_inverse requires x >= 0")
    if form == "cos" and d != 1:
        raise DomainError("cosine form applies to d = 1 only")
    if form == "sin" and d != 3:
        raise DomainError("sine form applies to d = 3 only")
    if form not in ("bessel", "cos", "sin"):
        raise DomainError(f"unknown form {form!r}")

    def k(r):
        return float(kernel(r))

    if x == 0:
        pref = (2 * math.pi) ** (-d / 2) * 2 ** (1 - d / 2) / math.gamma(d / 2)
        val, err = _integrate_halfline(lambda r: r ** (d - 1) * k(r), tol / pref)
        res = HankelResult(pref * val, 0, pref * err, "limit")
        return res if full_output else res.value

    nu = d / 2 - 1
    if form == "cos":
        pref = 1.0 / math.pi

        def h(r):
            return math.cos(r * x) * k(r)

    elif form == "sin":
        pref = 1.0 / (2 * math.pi**2 * x)

        def h(r):
            return r * math.sin(r * x) * k(r)

    else:
        pref = (2 * math.pi) ** (-d / 2) * x ** (1 - d / 2)

        def h(r):
            if r > 0:
                return r ** (d / 2) * bessel_j(nu, r * x) * k(r)
            # limit r -> 0: nonzero only for d = 1
            return math.sqrt(2 / (math.pi * x)) * k(0.0) if d == 1 else 0.0

    inner_tol = tol / (100 * pref) if pref > 0 else tol
    zeros = bessel_zeros(nu, 64) / x
    edges = [0.0]
    partial = []
    terms = []
    total = 0.0
    estimates = []
    n_zero = 64
    i = 0
    while True:
        if i >= len(zeros):
            n_zero *= 2
            zeros = bessel_zeros(nu, n_zero) / x
        a, b = edges[-1], zeros[i]
        i += 1
        c, _ = _quad(h, a, b, inner_tol)
        edges.append(b)
        terms.append(c)
        total += c
        partial.append(total)
        n = len(partial)
        est = wynn_epsilon(partial[-24:]) if n >= 3 else total
        estimates.append(est)
        if n >= 6:
            recent = abs(estimates[-1] - estimates[-2]) + abs(estimates[-2] - estimates[-3])
            tail_small = max(abs(v) for v in terms[-3:]) < inner_tol
            peak = max(abs(v) for v in terms)
            decaying = np.mean(np.abs(terms[-3:])) < 0.5 * peak
            if tail_small or (decaying and recent * pref < tol):
                value = total if tail_small else est
                res = HankelResult(pref * value, n, pref * recent, form)
                return res if full_output else res.value
        if n >= MAX_PANELS:
            raise ConvergenceError(
                f"Hankel inversion at x={x} not converged after {n} panels "
                f"(last change {pref * abs(estimates[-1] - estimates[-2]):.2e})"
            )


def _quad_split(fun, a, b, tol, depth=1):
    """_quad with a fallback that splits the panel in eight when the kernel
    itself oscillates faster than one adaptive pass resolves."""
    try:
        return _quad(fun, a, b, tol)
    except ConvergenceError:
        if depth == 0:
            raise
    edges = np.linspace(a, b, 9)
    parts = [_quad_split(fun, lo, hi, tol / 8, depth - 1) for lo, hi in zip(edges[:-1], edges[1:])]
    return sum(v for v, _ in parts), sum(e for _, e in parts)


def _integrate_halfline(fun, tol, max_panels=400):
    """int_0^inf fun over doubling panels [2^k, 2^(k+1)].

    An algebraic tail r^-p makes the panel sums geometric, which Wynn's
    epsilon algorithm sums to high accuracy.
    """
    partial = []
    estimates = []
    terms = []
    total = 0.0
    err = 0.0
    a = 0.0
    b = 1.0
    for _ in range(max_panels):
        v, e = _quad_split(fun, a, b, tol / 100)
        total += v
        err += e
        terms.append(v)
        partial.append(total)
        estimates.append(wynn_epsilon(partial[-16:]))
        a, b = b, 2 * b
        if len(partial) >= 8:
            change = abs(estimates[-1] - estimates[-2]) + abs(estimates[-2] - estimates[-3])
            shrinking = abs(terms[-1]) < 0.9 * abs(terms[-4]) or abs(terms[-1]) < tol / 100
            if shrinking and change < tol:
                return estimates[-1], change + err
    raise ConvergenceError(
        f"radial integral not converged after {max_panels} doubling panels "
        f"(last panel {terms[-1]:.2e}); the kernel may not be integrable"
    )
