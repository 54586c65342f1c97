import math

import numpy as np
import pytest
from scipy import stats

from fractel.analytic import phi_hat
from fractel.errors import BudgetError, DomainError, UnsupportedError
from fractel.fields import Delta, Gaussian
from fractel.stochastic import (
    MCEstimate,
    RngStream,
    bessel_riesz_table,
    histogram_density,
    mc_mean,
    mc_solve_halftime,
    mc_solve_telegraph,
    sample_halfnormal_clock,
    sample_inverse_L,
    sample_process,
    sample_stable_subordinator,
    sample_telegraph,
    sample_telegraph_inhomogeneous,
    stable_subordinator_path,
)
from fractel.symbols import (
    BesselRieszProcess,
    FracParams,
    IsotropicStableProcess,
    Laplacian,
    RelativisticProcess,
)

N = 200_000


def within(samples, target, k=4.0):
    s = np.asarray(samples, dtype=float)
    se = s.std(ddof=1) / math.sqrt(s.size)
    return abs(s.mean() - target) <= k * se + 1e-12


def test_stream_reproducible_and_distinct():
    a = RngStream(7, 3).generator.random(5)
    b = RngStream(7, 3).generator.random(5)
    c = RngStream(7, 4).generator.random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    kids = RngStream(7, 3).split(16)
    ids = [k.stream_id for k in kids]
    assert len(set(ids)) == 16 and 3 not in ids
    assert ids == [k.stream_id for k in RngStream(7, 3).split(16)]
    with pytest.raises(DomainError):
        RngStream(-1)


@pytest.mark.parametrize("a", [0.2, 0.5, 0.75])
def test_stable_subordinator_laplace(a):
    gen = RngStream(11, int(a * 100)).generator
    h = sample_stable_subordinator(a, 1.3, gen, size=N)
    assert np.all(h > 0)
    for u in (0.3, 1.0, 4.0):
        assert within(np.exp(-u * h), math.exp(-1.3 * u**a))


def test_half_stable_is_levy():
    t = 0.8
    h = sample_stable_subordinator(0.5, t, RngStream(12).generator, size=20_000)
    # E exp(-u H) = exp(-t sqrt u) is the Levy law with scale t^2 / 2
    assert stats.kstest(h, stats.levy(scale=t * t / 2).cdf).pvalue > 1e-3


def test_subordinator_path_increments():
    path = stable_subordinator_path(0.4, np.linspace(0, 2, 41), RngStream(13).generator)
    assert path.values[0] == 0.0
    assert np.all(np.diff(path.values) >= 0)


@pytest.mark.parametrize("alpha,lam,m,t", [(0.3, 1.0, 2.0, 1.5), (0.5, 0.4, 0.7, 3.0)])
def test_inverse_clock_laplace(alpha, lam, m, t):
    p = FracParams(alpha, lam)
    L = sample_inverse_L(p, t, RngStream(14).generator, size=N)
    assert np.all(L >= 0)
    assert within(np.exp(-m * L), phi_hat(p, m, t))


def test_inverse_clock_path_method_agrees():
    p = FracParams(0.4, 1.0)
    L = sample_inverse_L(p, 1.0, RngStream(15).generator, size=20_000, method="path", tol_L=1e-3)
    assert within(np.exp(-1.5 * L), phi_hat(p, 1.5, 1.0))
    with pytest.raises(BudgetError):
        sample_inverse_L(p, 50.0, RngStream(15).generator, size=10, method="path", max_steps=100)


def test_inverse_clock_monotone_in_t():
    p = FracParams(0.35, 1.0)
    # the same stream gives the same stable pair, hence a monotone passage time
    t = np.array([0.5, 1.0, 2.0])
    one = [sample_inverse_L(p, ti, RngStream(16).generator, size=500) for ti in t]
    assert np.all(np.diff(np.stack(one), axis=0) >= 0)


def test_inverse_clock_rejects_large_alpha():
    with pytest.raises(DomainError):
        sample_inverse_L(FracParams(0.7, 1.0), 1.0, RngStream(1).generator)


@pytest.mark.parametrize("lam,t", [(0.5, 1.0), (2.0, 1.5)])
def test_telegraph_sampler(lam, t):
    x, nsw = sample_telegraph(lam, t, RngStream(17).generator, size=N, return_switches=True)
    assert np.all(np.abs(x) <= t)
    assert np.all(np.abs(x[nsw == 0]) == t)
    assert within(nsw == 0, math.exp(-lam * t))
    assert within(nsw, lam * t)
    # E cos(xi X) is the exponential-form multiplier
    xi = 2.5
    q = math.sqrt(xi * xi - lam * lam)
    target = math.exp(-lam * t) * (math.cos(q * t) + lam * math.sin(q * t) / q)
    assert within(np.cos(xi * x), target)


def test_inhomogeneous_switch_count():
    lam, eps, t = 0.8, 0.3, 2.0
    x, nsw = sample_telegraph_inhomogeneous(
        lam, eps, t, RngStream(18).generator, size=N, return_switches=True
    )
    assert np.all(np.abs(x) <= t)
    # N is Poisson with mean lam log((t + eps) / eps)
    assert within(nsw, lam * math.log((t + eps) / eps))
    with pytest.raises(DomainError):
        sample_telegraph_inhomogeneous(lam, 0.0, t, RngStream(18).generator)


def test_halfnormal_clock_mean():
    z = sample_halfnormal_clock(1.5, RngStream(19).generator, N)
    assert np.all(z >= 0)
    assert within(z, math.sqrt(4 * 1.5 / math.pi))


@pytest.mark.parametrize(
    "kind,m",
    [
        (IsotropicStableProcess(1, 1.2), lambda r: r**1.2),
        (BesselRieszProcess(1, 1.0, 0.6), lambda r: r * (1 + r * r) ** 0.3),
        (RelativisticProcess(1, 0.8, 1.0), lambda r: (1 + r * r) ** 0.4 - 1),
    ],
)
def test_process_characteristic_function(kind, m):
    t = 0.7
    x = sample_process(kind, t, RngStream(20).generator, size=N)[:, 0]
    for xi in (0.5, 2.0):
        assert within(np.cos(xi * x), math.exp(-t * m(xi)))


def test_bessel_riesz_table_accuracy():
    table = bessel_riesz_table(1.0, 0.6, 0)
    assert table.inversion_error < 1e-4
    assert np.all(np.diff(table.cdf) >= 0)


def test_sampler_limits():
    with pytest.raises(UnsupportedError):
        sample_process(BesselRieszProcess(1, 1.0, 0.5), 200.0, RngStream(1).generator, size=4)
    with pytest.raises(BudgetError):
        sample_process(RelativisticProcess(1, 0.5, 30.0), 1.0, RngStream(1).generator, size=4)


def _square(gen, m):
    return gen.standard_normal(m) ** 2


def test_mc_mean_independent_of_workers():
    a = mc_mean(_square, 10_001, RngStream(21))
    b = mc_mean(_square, 10_001, RngStream(21), workers=2)
    assert a.mean.tobytes() == b.mean.tobytes()
    assert a.stderr.tobytes() == b.stderr.tobytes()
    assert a.n == 10_001 and sum(a.meta["chunk_sizes"]) == 10_001
    assert a.within(1.0, k=4)


def test_mc_estimate_validation():
    with pytest.raises(DomainError):
        MCEstimate([1.0], [-1.0], 10)
    assert MCEstimate([1.0], [0.0], 10).within(1.0)


def test_histogram_mass():
    x = np.concatenate([np.random.default_rng(0).normal(size=1000), np.ones(250)])
    mask = np.concatenate([np.zeros(1000, bool), np.ones(250, bool)])
    h = histogram_density(x, atom_mask=mask)
    assert h.atom_mass == pytest.approx(0.2)
    assert np.sum(h.density * np.diff(h.edges)) + h.atom_mass == pytest.approx(1.0)


def test_halftime_histogram_mass():
    h = mc_solve_halftime(1.0, 0.5, 20_000, RngStream(22))
    assert np.sum(h.density * np.diff(h.edges)) == pytest.approx(1.0)
    assert 0 < h.atom_mass < 1


def test_mc_solve_telegraph():
    p, f = FracParams(0.5, 1.0), Gaussian(0.0, 0.5)
    grid = np.array([0.0, 1.0])
    est0 = mc_solve_telegraph(p, Laplacian(), f, grid, 0.0, 1000, RngStream(23))
    assert np.array_equal(est0.mean, f(grid))
    hist = mc_solve_telegraph(p, Laplacian(), Delta(), None, 1.0, 20_000, RngStream(23))
    assert np.sum(hist.density * np.diff(hist.edges)) == pytest.approx(1.0)
