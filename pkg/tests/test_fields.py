import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from fractel.errors import DimensionError, DomainError
from fractel.fields import (
    Delta,
    Gaussian,
    Indicator,
    SolutionField,
    Tabulated,
    initial_condition_from_dict,
    read_field_csv,
    write_field_csv,
)


def fourier_1d(f, r):
    val, _ = integrate.quad(lambda x: f(np.array(x), 1) * math.cos(r * x), -30, 30, limit=400, points=[-1, 1])
    return val


@pytest.mark.parametrize("f", [Gaussian(0.0, 0.7), Indicator(-1.0, 1.0)])
def test_fourier_transform_d1_matches_quadrature(f):
    for r in (0.0, 0.4, 1.3, 5.0):
        assert float(f.fourier(r, 1)) == pytest.approx(fourier_1d(f, r), abs=1e-9)


def test_fourier_transform_d3_radial():
    # radial transform in d = 3: (4 pi / r) int_0^inf rho sin(r rho) f(rho) d rho
    for f in (Gaussian(0.0, 0.8), Indicator(0.0, 1.5)):
        for r in (0.5, 2.0):
            val, _ = integrate.quad(lambda p: p * math.sin(r * p) * f(np.array(p), 3), 0, 20, limit=400, points=[1.5])
            assert float(f.fourier(r, 3)) == pytest.approx(4 * math.pi / r * val, abs=1e-9)


def test_initial_condition_properties():
    g = Gaussian(0.3, 0.5)
    assert not g.is_radial(2) and g.is_radial(1)
    assert Gaussian(0.0, 1.0).is_radial(3)
    assert g.shift(1) == 0.3
    tab = Tabulated(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]))
    assert tab(np.array([0.5, 1.5, 3.0]), 1) == pytest.approx([0.5, 0.5, 0.0])
    with pytest.raises(DomainError):
        Gaussian(0, -1)
    with pytest.raises(DomainError):
        Indicator(1, 1)
    with pytest.raises(DomainError):
        initial_condition_from_dict({"kind": "bogus"})
    for f in (Delta(), g, Indicator(-1, 2), tab):
        back = initial_condition_from_dict(f.to_dict())
        assert back.to_dict() == f.to_dict()


def test_solution_field_validation():
    with pytest.raises(DomainError):
        SolutionField(1, [0.0, 0.0], [1.0, 1.0], 1.0, "analytic")
    with pytest.raises(DomainError):
        SolutionField(1, [0.0, 1.0], [1.0, np.nan], 1.0, "analytic")
    with pytest.raises(DomainError):
        SolutionField(1, [0.0, 1.0], [1.0, 1.0], 1.0, "not-a-route")


@given(arrays(np.float64, 6, elements=st.floats(-1e300, 1e300, allow_nan=False)))
@settings(max_examples=50, deadline=None)
def test_csv_round_trip_is_bit_exact(values):
    import tempfile
    from pathlib import Path

    grid = np.linspace(-1.0, 1.0, 6) * math.pi
    fld = SolutionField(1, grid, values, 0.7, "monte-carlo", stderr=np.abs(values) / 3,
                        meta={"alpha": 0.4, "lambda": 1.0, "symbol": {"kind": "laplacian"}})
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "f.csv"
        write_field_csv(fld, path)
        header, cols = read_field_csv(path)
    assert header.startswith("# route=monte-carlo,d=1,t=0.69999999999999996,alpha=0.4,lambda=1.0")
    assert np.array_equal(cols["x"], grid)
    assert np.array_equal(cols["mean"], values)
    assert np.array_equal(cols["stderr"], np.abs(values) / 3)


def test_csv_text_layout():
    fld = SolutionField(2, [0.0, 1.0], [1.0, 0.5], 1.0, "analytic", meta={"symbol": {"kind": "laplacian"}})
    text = write_field_csv(fld)
    lines = text.splitlines()
    assert lines[0] == '# route=analytic,d=2,t=1,symbol={"kind":"laplacian"}'
    assert lines[1] == "x,value"
    assert lines[3] == "1,0.5"
