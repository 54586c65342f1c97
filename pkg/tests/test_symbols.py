import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractel.errors import DomainError, UnsupportedError
from fractel.symbols import (
    BesselRiesz,
    BesselRieszProcess,
    BrownianMotion,
    FracParams,
    FractionalLaplacian,
    IsotropicStableProcess,
    Laplacian,
    Relativistic,
    RelativisticProcess,
    evaluate_symbol,
    process_for_symbol,
    symbol_from_dict,
)

CATALOG = [Laplacian(), FractionalLaplacian(0.7), FractionalLaplacian(1.5), BesselRiesz(1.0, 0.5),
           BesselRiesz(0.4, 1.9), Relativistic(1.0, 1.0), Relativistic(1.6, 0.3)]


@pytest.mark.parametrize("sym", CATALOG, ids=lambda s: repr(s))
def test_symbol_nondecreasing_and_continuous(sym):
    r = np.linspace(0, 20, 20001)
    m = evaluate_symbol(sym, r)
    assert m[0] == 0
    assert np.all(np.diff(m) >= 0)
    # continuity: no jumps beyond the local slope scale
    assert np.max(np.abs(np.diff(m))) < 1e-2 * (1 + m.max())


def test_reductions():
    r = np.linspace(0, 10, 101)
    assert np.array_equal(FractionalLaplacian(2.0)(r), Laplacian()(r))
    assert np.allclose(BesselRiesz(1.3, 0.0)(r), FractionalLaplacian(1.3)(r), rtol=1e-15, atol=0)
    # relativistic: small-mass limit is the fractional Laplacian of order nu
    assert np.allclose(Relativistic(1.2, 1e-9)(r), r**1.2, rtol=1e-6)
    # nu = 1: sqrt(mass^2 + r^2) - mass
    assert np.allclose(Relativistic(1.0, 2.0)(r), np.sqrt(4 + r * r) - 2, rtol=1e-14, atol=1e-15)


def test_relativistic_small_r_no_cancellation():
    assert Relativistic(1.0, 1.0)(1e-9) == pytest.approx(0.5e-18, rel=1e-10)


@given(st.floats(0.01, 2.0), st.floats(0.0, 3.0), st.floats(0.0, 50.0))
@settings(max_examples=60, deadline=None)
def test_symbol_dict_round_trip(beta, gamma, r):
    for sym in (FractionalLaplacian(beta), BesselRiesz(beta, gamma), Laplacian()):
        back = symbol_from_dict(sym.to_dict())
        assert back == sym
        assert evaluate_symbol(back, r) == evaluate_symbol(sym, r)


def test_parameter_validation():
    for bad in (lambda: FracParams(0.0, 1.0), lambda: FracParams(1.5, 1.0), lambda: FracParams(0.5, 0.0),
                lambda: FractionalLaplacian(2.5), lambda: BesselRiesz(1.0, -0.1),
                lambda: Relativistic(2.0, 1.0), lambda: Relativistic(1.0, 0.0),
                lambda: symbol_from_dict({"kind": "nope"}), lambda: symbol_from_dict({"kind": "laplacian", "x": 1})):
        with pytest.raises(DomainError):
            bad()
    with pytest.raises(DomainError):
        Laplacian()(-1.0)
    with pytest.raises(DomainError):
        Laplacian()(float("nan"))
    assert FracParams(0.5, 1).stochastic_regime and not FracParams(0.6, 1).stochastic_regime


def test_process_for_symbol():
    assert process_for_symbol(Laplacian(), 2) == BrownianMotion(2)
    assert process_for_symbol(FractionalLaplacian(2.0), 1) == BrownianMotion(1)
    assert process_for_symbol(FractionalLaplacian(1.5), 3) == IsotropicStableProcess(3, 1.5)
    assert process_for_symbol(BesselRiesz(1.0, 0.5), 1) == BesselRieszProcess(1, 1.0, 0.5)
    assert process_for_symbol(Relativistic(1.0, 2.0), 2) == RelativisticProcess(2, 1.0, 2.0)
    with pytest.raises(UnsupportedError):
        process_for_symbol(BesselRiesz(1.5, 1.0), 1)
    with pytest.raises(DomainError):
        process_for_symbol(Laplacian(), 0)
    assert Relativistic(1.5, 1.0).outside_proposition_range
    assert not BesselRiesz(1.5, 1.0).has_sampler
    assert math.isclose(BesselRiesz(1.0, 1.0)(1.0), math.sqrt(2))
