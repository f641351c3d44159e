"""How much work the closed-form norm takes compared with quadrature.

After the Newton iteration converges, the norm needs the lambda-derivative of
the Wronskian, which the iteration already produced.  The only extra work is a
consistency check at two more points.  A quadrature of weight * H^2 instead
calls the eigenfunction hundreds of times.
"""

from __future__ import annotations

from heunbasis import eval_heun, orthonormal_basis, validate
from heunbasis.frobenius import count_evaluations
from heunbasis.oracle import QuadratureConfig, integrate_weighted
from heunbasis.spectral import complete_solution, refine_eigenvalue

params = validate(1, 2, 1.5, 1.5, 1, 2)
basis = orthonormal_basis(params, "I", -25.0, 5.0)
fc = basis.fclass

print(" n   lambda_n          closed-form evals   quadrature evals   rel diff")
for sol in basis:
    it = refine_eigenvalue(params, fc, sol.lambda_n - 0.05, sol.lambda_n + 0.05)
    with count_evaluations() as counter:
        closed = complete_solution(params, fc, it, sol.n)
    q = integrate_weighted(
        params,
        lambda x: float(eval_heun(closed, x)) ** 2,
        config=QuadratureConfig(1e-13 * closed.I_n, 1e-13),
    )
    diff = abs(q.value - closed.I_n) / closed.I_n
    print(f"{sol.n:2d}  {sol.lambda_n:+.10f}   {counter.calls:17d}   {q.neval:16d}   {diff:.1e}")
