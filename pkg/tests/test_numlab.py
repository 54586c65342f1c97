import math

import numpy as np
import pytest
from scipy import special as sp

from fractel.errors import ConvergenceError, DomainError
from fractel.numlab import euler_invert, numeric_laplace, talbot_fixed, talbot_invert

PAIRS = [
    (lambda s: 1 / (s + 1), lambda t: math.exp(-t)),
    (lambda s: 1 / s**2, lambda t: t),
    (lambda s: 1 / np.sqrt(s), lambda t: 1 / math.sqrt(math.pi * t)),
    (lambda s: 1 / (s * s + 1), lambda t: math.sin(t)),
    (lambda s: np.exp(-np.sqrt(s)) / s, lambda t: math.erfc(1 / (2 * math.sqrt(t)))),
]


@pytest.mark.parametrize("i", range(len(PAIRS)))
def test_talbot_round_trip(i):
    F, f = PAIRS[i]
    for t in (0.3, 1.0, 4.0):
        assert talbot_invert(F, t) == pytest.approx(f(t), abs=1e-7)


@pytest.mark.parametrize("i", [0, 1, 2, 4])
def test_euler_round_trip(i):
    F, f = PAIRS[i]
    for t in (0.3, 1.0, 4.0):
        assert euler_invert(F, t) == pytest.approx(f(t), abs=1e-7, rel=1e-7)


def test_talbot_doubling_is_monotone():
    # successive changes shrink as M doubles, down to the roundoff floor
    for F, _ in PAIRS:
        vals = [talbot_fixed(F, 1.0, m) for m in (8, 16, 32)]
        changes = np.abs(np.diff(vals))
        for a, b in zip(changes[:-1], changes[1:]):
            assert b <= a or b < 1e-12


def test_talbot_vectorised_and_errors():
    t = np.array([0.5, 1.0, 2.0])
    assert np.allclose(talbot_invert(lambda s: 1 / (s + 1), t), np.exp(-t), atol=1e-9)
    with pytest.raises(DomainError):
        talbot_invert(lambda s: 1 / s, 0.0)
    with pytest.raises(ConvergenceError):
        # image of a function with a jump at t = 1: no stabilisation at the jump
        talbot_invert(lambda s: np.exp(-s) / s, 1.0, tol=1e-14)


def test_numeric_laplace():
    assert numeric_laplace(lambda t: math.exp(-t), 2.0) == pytest.approx(1 / 3, abs=1e-9)
    assert numeric_laplace(lambda t: math.sin(t), 1.0) == pytest.approx(0.5, abs=1e-9)
    # t^{-1/2} weight handled on the first panel
    val = numeric_laplace(lambda t: sp.erfc(1 / (2 * math.sqrt(t))) if t > 0 else 0.0, 1.5)
    assert val == pytest.approx(math.exp(-math.sqrt(1.5)) / 1.5, abs=1e-9)
    with pytest.raises(DomainError):
        numeric_laplace(math.exp, -1.0)
