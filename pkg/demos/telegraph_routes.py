"""Fractional telegraph equation with Gaussian data: the Mittag-Leffler
route, the Talbot (Laplace-domain) route and the inverse-clock Monte Carlo
route at the same points."""

import numpy as np

from fractel import FracParams, Gaussian, Laplacian, RngStream, mc_solve_telegraph, solve_telegraph

p = FracParams(0.4, 1.0)
f = Gaussian(0.0, 1.0)
x = np.array([0.0, 0.5, 1.0, 2.0])
t = 1.0

ml = solve_telegraph(p, Laplacian(), f, 1, x, t)
lc = solve_telegraph(p, Laplacian(), f, 1, x, t, route="laplace-check")
mc = mc_solve_telegraph(p, Laplacian(), f, x, t, 100_000, RngStream(7))

print(f"alpha={p.alpha} lambda={p.lam} t={t}")
print(f"{'x':>5} {'analytic':>14} {'laplace-check':>14} {'monte-carlo':>12} {'stderr':>9} {'z':>6}")
for i, xi in enumerate(x):
    z = (mc.mean[i] - ml.values[i]) / mc.stderr[i]
    print(f"{xi:5.2f} {ml.values[i]:14.10f} {lc.values[i]:14.10f} {mc.mean[i]:12.6f} "
          f"{mc.stderr[i]:9.2e} {z:6.2f}")
