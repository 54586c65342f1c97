"""Euler-Poisson-Darboux multiplier by four routes (Bessel closed form,
Poisson integral, Erdelyi-Kober quadrature, Beta-subordinated wave
Monte Carlo), then the eigen-series solution on (0, pi) and the
shifted-coefficient limit eps -> 0."""

import math

import numpy as np

from fractel import EpdParams, RngStream
from fractel.epd import (
    dirichlet_sine_system,
    epd_beta_mc,
    epd_hat_bessel,
    epd_hat_ek,
    epd_hat_poisson,
    epd_shifted_ode,
    solve_epd_series,
)


class Mode:
    """cos(s sqrt(m)) as a function of the wave time s."""

    def __init__(self, m):
        self.rm = math.sqrt(m)

    def __call__(self, s):
        return np.cos(np.asarray(s) * self.rm)


print(f"{'lam':>5} {'m':>4} {'t':>4} {'bessel':>13} {'poisson-bes':>11} {'ek-bes':>9} {'beta z':>7}")
for k, (lam, m, t) in enumerate([(0.3, 0.5, 2.0), (0.7, 3.0, 0.5), (2.0, 3.0, 5.0)]):
    b = epd_hat_bessel(lam, m, t)
    est = epd_beta_mc(EpdParams(lam), Mode(m), t, 100_000, RngStream(10, k))
    z = (est.mean[0] - b) / est.stderr[0]
    print(f"{lam:5.2f} {m:4.1f} {t:4.1f} {b:13.10f} {epd_hat_poisson(lam, m, t) - b:11.1e} "
          f"{epd_hat_ek(lam, m, t) - b:9.1e} {z:7.2f}")

grid = np.linspace(0, math.pi, 5)
sys = dirichlet_sine_system(lambda x: x * (math.pi - x), 64)
fld = solve_epd_series(sys, 0.7, 1.0, grid)
print("\nseries solution, f = x(pi - x), lambda = 0.7, t = 1:", np.round(fld.values, 8))
print("truncated:", fld.meta["truncated"])

target = epd_hat_bessel(0.7, 1.0, 1.0)
for eps in (1e-1, 1e-2, 1e-3, 1e-4):
    print(f"eps={eps:7.0e}  shifted ODE gap {abs(epd_shifted_ode(0.7, eps, 1.0, 1.0) - target):.2e}")
