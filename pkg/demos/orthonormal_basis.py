"""Build an orthonormal Heun basis, check it, and expand a function in it.

The family alpha=1, beta=2, gamma=delta=3/2, epsilon=1, a=2 has the weight
sqrt(x (1-x)) on [0, 1].  Eigenvalues of the accessory parameter pile up
toward -infinity, so a window near the top of the spectrum picks out the
lowest modes.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from heunbasis import orthonormal_basis, validate, weight
from heunbasis.oracle import verify_basis, weighted_inner_product

params = validate(1, 2, 1.5, 1.5, 1, 2)

for cls, window in (("I", (-25.0, 5.0)), ("IV", (-15.0, 5.0))):
    basis = orthonormal_basis(params, cls, *window)
    print(f"class {cls}")
    for s in basis:
        print(f"  lambda_{s.n} = {s.lambda_n:+.12f}   I = {s.I_n:.12e}   A = {s.A_n:+.6f}")

    report = verify_basis(basis)
    off = np.abs(report.gram - np.eye(len(basis))).max()
    print(f"  Gram matrix deviation from identity: {off:.1e}")
    print(f"  worst closed-form vs quadrature norm: {max(report.norm_rel_errors):.1e}")

# Expansion coefficients of f(x) = x (1 - x) in the class I basis.  The
# truncated expansion is the best weighted L2 approximation by these modes.
basis = orthonormal_basis(params, "I", -40.0, 5.0)
f = lambda x: x * (1 - x)
coef = np.array(
    [weighted_inner_product(params, f, lambda x, n=n: float(basis.h(n, x))) for n in range(len(basis))]
)
print("\nexpansion of x(1-x), highest eigenvalue last:")
print(np.round(coef, 8))

x = np.linspace(0.02, 0.98, 200)
approx = coef @ basis.evaluate(x)
err = np.sqrt(trapezoid(weight(params, x) * (f(x) - approx) ** 2, x))
print(f"weighted L2 error with {len(basis)} modes: {err:.2e}")
