"""Heun's equation with epsilon = 0 collapses to the hypergeometric equation.

At lambda = alpha*beta*a the extra singular point drops out entirely, and for
alpha = -2 the solution regular at 0 is the shifted Legendre polynomial
1 - 6x + 6x^2.  This script recovers that case from the Wronskian root search.
"""

from __future__ import annotations

import numpy as np

from heunbasis import eval_heun, orthonormal_basis, validate

params = validate(alpha=-2, beta=3, gamma=1, delta=1, epsilon=0, a=2)
basis = orthonormal_basis(params, "I", -20.0, 0.0)

print("eigenvalues in [-20, 0]:", np.round(basis.eigenvalues, 10))

sol = min(basis, key=lambda s: abs(s.lambda_n + 12.0))
print(f"lambda = {sol.lambda_n:.15g}  (alpha*beta*a = {-2 * 3 * 2})")
print("leading series coefficients:", np.round(sol.series0.coeffs[:5], 12))

# the norm of 1 - 6x + 6x^2 with weight 1/(x - 2) has a closed form too
exact = 169 * np.log(2) - 117
print(f"closed-form norm  {sol.I_n:.15f}")
print(f"exact             {exact:.15f}")

x = np.linspace(0.05, 0.95, 7)
print("max |H - P| on a grid:", np.abs(eval_heun(sol, x) - (1 - 6 * x + 6 * x**2)).max())
