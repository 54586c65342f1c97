import cmath
import math

import mpmath
import numpy as np
import pytest

from fractel.errors import DomainError
from fractel.specfun import (
    MLQuery,
    bessel_i0,
    bessel_i0e,
    bessel_j,
    erf,
    gamma_fn,
    mittag_leffler,
    ml_series,
)


def ml_oracle(alpha, beta, z):
    """Power series in extended precision, summed until the terms are
    negligible.  The working precision covers the cancellation of the
    largest term, about |z|^(1/alpha) in natural-log units."""
    peak = abs(z) ** (1.0 / alpha) / math.log(10) if z != 0 else 0.0
    with mpmath.workdps(int(peak) + 40):
        z = mpmath.mpc(z)
        # the exact binary values of the float parameters
        alpha, beta = mpmath.mpf(alpha), mpmath.mpf(beta)
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = z**k * mpmath.rgamma(alpha * k + beta)
            total += term
            if k > 10 and abs(term) < mpmath.mpf(10) ** (-30) and k * alpha > abs(z) ** (1 / alpha):
                return complex(total)
            k += 1


@pytest.mark.parametrize("alpha,beta", [(0.3, 1.0), (0.5, 1.0), (0.5, 0.7), (0.8, 1.5), (1.0, 2.0), (0.45, 0.45)])
def test_ml_matches_extended_precision_series(alpha, beta):
    gen = np.random.default_rng(11)
    rad = 5 * np.sqrt(gen.random(40))
    z = rad * np.exp(2j * np.pi * gen.random(40))
    z[:4] = [-5.0, -2.5, 4.9, 3j]
    got = mittag_leffler(alpha, beta, z)
    want = np.array([ml_oracle(alpha, beta, v) for v in z])
    rel = np.abs(got - want) / np.maximum(1.0, np.abs(want))
    assert rel.max() <= 1e-8


def test_ml_negative_real_axis():
    for alpha in (0.3, 0.6, 0.9):
        for x in (-0.5, -2.0, -5.0):
            assert mittag_leffler(alpha, 1.0, x) == pytest.approx(ml_oracle(alpha, 1.0, x), abs=1e-10)


def test_ml_exponential_grid():
    gen = np.random.default_rng(3)
    z = 10 * np.sqrt(gen.random(100)) * np.exp(2j * np.pi * gen.random(100))
    got = mittag_leffler(1.0, 1.0, z)
    assert np.max(np.abs(got - np.exp(z)) / np.maximum(1, np.abs(np.exp(z)))) <= 1e-10


def test_ml_half_identity():
    x = np.linspace(-3, 3, 601)
    got = mittag_leffler(0.5, 1.0, x).real
    want = np.exp(x * x) * (1 + erf(x))
    assert np.max(np.abs(got - want)) <= 1e-8


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_ml_recurrence(alpha):
    for z in (-3 + 1j, -0.4, 0.7 - 0.2j, 2.2 + 2j, -4.5 - 3j):
        lhs = mittag_leffler(alpha, alpha + 1, z)
        rhs = (mittag_leffler(alpha, 1.0, z) - 1) / z
        assert abs(lhs - rhs) <= 1e-8 * max(1, abs(rhs))


def test_ml_known_values():
    # E_{1,2}(z) = (e^z - 1)/z and E_{2,1}-type identities restricted to alpha <= 1
    z = 1.7 - 0.4j
    assert mittag_leffler(1.0, 2.0, z) == pytest.approx((cmath.exp(z) - 1) / z, rel=1e-12)
    assert mittag_leffler(0.5, 1.0, 0) == 1
    assert mittag_leffler(0.5, 2.0, 0) == pytest.approx(1.0)


def test_ml_query_and_domain():
    assert mittag_leffler(MLQuery(0.5, 1.0, -1.0)) == pytest.approx(mittag_leffler(0.5, 1.0, -1.0))
    with pytest.raises(DomainError):
        mittag_leffler(1.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        mittag_leffler(0.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        mittag_leffler(0.5, 1.0, float("nan"))
    with pytest.raises(DomainError):
        MLQuery(0.0, 1.0, 1.0)


def test_series_agrees_in_unit_disc():
    for z in (0.3, -0.9, 0.5j, 0.6 - 0.6j):
        assert ml_series(0.7, 1.2, z) == pytest.approx(ml_oracle(0.7, 1.2, z), abs=1e-14)


def test_bessel_half_integer_closed_forms():
    x = np.linspace(1e-3, 50, 2000)
    assert np.max(np.abs(bessel_j(0.5, x) - np.sqrt(2 / (np.pi * x)) * np.sin(x))) <= 1e-10
    assert np.max(np.abs(bessel_j(-0.5, x) - np.sqrt(2 / (np.pi * x)) * np.cos(x))) <= 1e-10
    j32 = np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))
    assert np.max(np.abs(bessel_j(1.5, x) - j32)) <= 1e-10


def test_bessel_series_oracle():
    for nu in (0.0, 0.3, 1.0, 2.7):
        for x in (0.1, 1.0, 4.0, 12.0):
            assert bessel_j(nu, x) == pytest.approx(float(mpmath.besselj(nu, x)), abs=1e-13)
    for x in (0.0, 0.5, 5.0, 50.0):
        assert bessel_i0(x) == pytest.approx(float(mpmath.besseli(0, x)), rel=1e-13)
        assert bessel_i0e(x) == pytest.approx(float(mpmath.besseli(0, x) * mpmath.exp(-x)), rel=1e-13)


def test_special_function_domains():
    assert gamma_fn(5.0) == pytest.approx(24.0)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))
    assert erf(0.5) == pytest.approx(math.erf(0.5))
    with pytest.raises(DomainError):
        gamma_fn(-1.0)
    with pytest.raises(OverflowError):
        gamma_fn(200.0)
    with pytest.raises(DomainError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0.5, -1.0)
    with pytest.raises(OverflowError):
        bessel_i0(1000.0)
    with pytest.raises(DomainError):
        erf(float("nan"))
