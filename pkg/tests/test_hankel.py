import math

import numpy as np
import pytest
from scipy import special as sp

from fractel.errors import ConvergenceError, DomainError
from fractel.hankel import bessel_zeros, hankel_inverse, wynn_epsilon


def gauss_kernel(r):
    return math.exp(-0.5 * r * r)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.5])
def test_gaussian_pair(d, x):
    expected = (2 * math.pi) ** (-d / 2) * math.exp(-0.5 * x * x)
    assert hankel_inverse(d, gauss_kernel, x) == pytest.approx(expected, abs=1e-11)


@pytest.mark.parametrize("x", [0.2, 1.0, 3.0])
def test_lorentzian_pairs(x):
    k = lambda r: 1.0 / (1.0 + r * r)
    # slowly decaying, oscillatory tails: relies on the epsilon acceleration
    assert hankel_inverse(1, k, x, form="cos") == pytest.approx(0.5 * math.exp(-x), abs=1e-9)
    assert hankel_inverse(3, k, x, form="sin") == pytest.approx(
        math.exp(-x) / (4 * math.pi * x), abs=1e-9
    )


@pytest.mark.parametrize("d,form", [(1, "cos"), (3, "sin")])
def test_trig_forms_match_bessel(d, form):
    k = lambda r: math.exp(-r) / (1 + r)
    for x in (0.1, 0.7, 2.0):
        a = hankel_inverse(d, k, x, form=form)
        b = hankel_inverse(d, k, x, form="bessel")
        assert a == pytest.approx(b, abs=1e-11)


def test_origin_uses_radial_integral():
    # d = 3, k = e^{-r}: (2 pi)^-3 * 4 pi * int r^2 e^{-r} dr = 1 / pi^2
    res = hankel_inverse(3, lambda r: math.exp(-r), 0.0, full_output=True)
    assert res.form == "limit"
    assert res.value == pytest.approx(1 / math.pi**2, rel=1e-10)


def test_origin_algebraic_tail():
    # d = 1, k = 1/(1+r^2) decays only like r^-2: value 1/2
    assert hankel_inverse(1, lambda r: 1 / (1 + r * r), 0.0) == pytest.approx(0.5, abs=1e-9)


def test_non_integrable_kernel_raises():
    with pytest.raises(ConvergenceError):
        hankel_inverse(3, lambda r: 1 / (1 + r * r), 0.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        hankel_inverse(1, gauss_kernel, -1.0)
    with pytest.raises(DomainError):
        hankel_inverse(2, gauss_kernel, 1.0, form="cos")
    with pytest.raises(DomainError):
        hankel_inverse(0, gauss_kernel, 1.0)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 1.5, 2.7])
def test_bessel_zeros(nu):
    z = bessel_zeros(nu, 40)
    assert np.all(np.diff(z) > 0)
    assert np.max(np.abs(sp.jv(nu, z))) < 1e-12
    # no zero skipped: successive gaps close to pi
    assert np.all(np.abs(np.diff(z)[5:] - math.pi) < 0.05)


def test_wynn_on_alternating_series():
    partial = np.cumsum([(-1) ** (k + 1) / k for k in range(1, 16)])
    assert abs(partial[-1] - math.log(2)) > 1e-2
    assert wynn_epsilon(partial) == pytest.approx(math.log(2), abs=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0])
def test_three_dimensional_poisson_kernel(x):
    expected = 1 / (math.pi**2 * (1 + x * x) ** 2)
    assert hankel_inverse(3, lambda r: math.exp(-r), x) == pytest.approx(expected, abs=1e-11)


def test_cos_form_matches_half_order_bessel_on_telegraph_kernel():
    from fractel.analytic import phi_hat
    from fractel.symbols import FracParams

    p = FracParams(0.5, 1.0)
    k = lambda r: float(phi_hat(p, r**1.5, 1.0))
    for x in (0.3, 1.0, 2.5):
        a = hankel_inverse(1, k, x, form="cos")
        b = hankel_inverse(1, k, x, form="bessel")
        assert a == pytest.approx(b, abs=1e-9)
