"""E_{1/2,1}(x) against its error-function form e^{x^2}(1 + erf x),
and the fractional telegraph multiplier at alpha = 1/2 written both ways."""

import numpy as np
from scipy import special as sp

from fractel import FracParams, mittag_leffler, phi_hat
from fractel.analytic import phi_hat_half_erf

x = np.linspace(-3, 3, 13)
ml = np.array([mittag_leffler(0.5, 1.0, v).real for v in x])
closed = np.exp(x**2) * (1 + sp.erf(x))
print(f"{'x':>6} {'E_1/2(x)':>22} {'erf form':>22} {'abs diff':>10}")
for v, a, b in zip(x, ml, closed):
    print(f"{v:6.2f} {a:22.15g} {b:22.15g} {abs(a - b):10.2e}")

p = FracParams(0.5, 1.0)
print("\nPhi_hat_{1/2}(t, m), lambda = 1")
for m in (0.25, 1.0, 4.0):
    for t in (0.5, 2.0):
        print(f"m={m:5.2f} t={t:4.1f}  ML {phi_hat(p, m, t):.15f}  erf {phi_hat_half_erf(1.0, m, t):.15f}")
