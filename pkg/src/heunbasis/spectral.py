"""Eigenvalues of the accessory parameter and closed-form normalization.

At an eigenvalue the two endpoint series are proportional, ``y0 = A y1``, and
the Wronskian ``W = y0 y1' - y1 y0'`` vanishes for every x.  Away from an
eigenvalue ``W * p_factor`` depends on lambda only, so roots are located on
``Wp(lambda) = W(lambda, x*) p(x*)`` at one fixed point ``x*`` of the
mutual-convergence region.

The normalization integral of ``H = y0`` then comes for free from the last
root-finding iterate::

    I = integral_0^1 weight(x) H(x)**2 dx = -s * p(x) * dW/dlambda(x) * A

where ``s`` is :func:`heunbasis.core.orientation`.  The right-hand side does
not depend on x, which is checked at two extra points.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import frobenius
from .core import (
    FunctionClass,
    HeunParameters,
    class_exponents,
    existence_ok,
    orientation,
    p_factor,
)
from .errors import (
    BracketFailure,
    DegenerateEigenvalue,
    DomainError,
    ExistenceViolated,
    InconsistentContinuation,
    InvarianceViolation,
    NonPositiveNorm,
    OutsideMutualRegion,
)
from .frobenius import Center, EvalBundle, FrobeniusSeries

__all__ = [
    "WronskianSample",
    "EigenSolution",
    "SpectralBasis",
    "wronskian",
    "find_eigenvalues",
    "refine_eigenvalue",
    "complete_solution",
    "continuation_coefficient",
    "normalization_integral",
    "eval_heun",
    "orthonormal_basis",
]

logger = logging.getLogger(__name__)

CONTINUATION_RTOL = 1e-8
INVARIANCE_RTOL = 1e-8
DEFAULT_SCAN_POINTS = 200
MAX_NEWTON = 200


@dataclass(frozen=True)
class WronskianSample:
    lam: float
    x: float
    W: float
    dW_dlambda: float
    Wp: float
    dWp_dlambda: float


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """One eigenvalue with everything needed to evaluate its Heun function.

    ``H(x) = y0(x)`` for ``x <= switch_point`` and ``A_n * y1(x)`` beyond it.
    """

    n: int
    lambda_n: float
    A_n: float
    I_n: float
    series0: FrobeniusSeries
    series1: FrobeniusSeries
    fclass: FunctionClass
    residual: float
    switch_point: float
    dWp_dlambda: float = float("nan")
    invariance_spread: float = 0.0


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Orthonormal Heun functions ``h_n = H_n / sqrt(I_n)`` for one problem."""

    params: HeunParameters
    fclass: FunctionClass
    solutions: tuple[EigenSolution, ...]
    switch_point: float

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([s.lambda_n for s in self.solutions])

    def h(self, n: int, x):
        sol = self.solutions[n]
        return eval_heun(sol, x) / math.sqrt(sol.I_n)

    def evaluate(self, x) -> np.ndarray:
        """Matrix of ``h_n(x_j)``, one row per basis function."""
        xx = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.solutions:
            return np.empty((0, xx.size))
        return np.vstack([self.h(n, xx) for n in range(len(self))])


@dataclass
class _Iterate:
    """State of the last root-finding evaluation (reused by the normalization)."""

    lam: float
    series0: FrobeniusSeries
    series1: FrobeniusSeries
    b0: EvalBundle
    b1: EvalBundle
    x: float
    p: float
    extra: dict = field(default_factory=dict)

    @property
    def W(self) -> float:
        return self.b0.y * self.b1.dy_dx - self.b1.y * self.b0.dy_dx

    @property
    def dW(self) -> float:
        return _dw(self.b0, self.b1)

    @property
    def Wp(self) -> float:
        return self.W * self.p

    @property
    def dWp(self) -> float:
        return self.dW * self.p


def _dw(b0, b1):
    return (
        b0.dy_dlambda * b1.dy_dx
        + b0.y * b1.d2y_dlambda_dx
        - b1.dy_dlambda * b0.dy_dx
        - b1.y * b0.d2y_dlambda_dx
    )


def _ratio(b0, b1):
    # value-and-slope ratio: y0 = A y1 and y0' = A y1' at an eigenvalue,
    # and the two never vanish together, so nodes near x do not hurt.
    return (b0.y * b1.y + b0.dy_dx * b1.dy_dx) / (b1.y**2 + b1.dy_dx**2)


def _build_pair(params, fclass, lam, series_tol):
    s0 = frobenius.build_series(params, fclass, Center.X0, lam, tol=series_tol)
    s1 = frobenius.build_series(params, fclass, Center.X1, lam, tol=series_tol)
    return s0, s1


def _iterate(params, fclass, lam, x, series_tol) -> _Iterate:
    s0, s1 = _build_pair(params, fclass, lam, series_tol)
    return _Iterate(
        lam, s0, s1, frobenius.eval(s0, x), frobenius.eval(s1, x), x, p_factor(params, x)
    )


def _resolve_class(params, fclass) -> FunctionClass:
    if isinstance(fclass, FunctionClass):
        return fclass
    return class_exponents(params, fclass)


def wronskian(
    params: HeunParameters,
    fclass,
    lam: float,
    x: float,
    *,
    series_tol: float = frobenius.DEFAULT_TOL,
) -> WronskianSample:
    """Wronskian of the two endpoint series and its lambda-derivative at x."""
    fclass = _resolve_class(params, fclass)
    region = frobenius.mutual_region(params)
    if not region.contains(x):
        raise OutsideMutualRegion(
            f"x = {x} outside the mutual region [{region.lo}, {region.hi}]"
        )
    it = _iterate(params, fclass, lam, x, series_tol)
    return WronskianSample(float(lam), float(x), it.W, it.dW, it.Wp, it.dWp)


def refine_eigenvalue(
    params: HeunParameters,
    fclass: FunctionClass,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    *,
    f_lo: float | None = None,
    f_hi: float | None = None,
    series_tol: float = frobenius.DEFAULT_TOL,
) -> _Iterate:
    """Safeguarded Newton iteration on ``Wp`` inside the bracket ``[lo, hi]``.

    A Newton step that would leave the bracket is replaced by bisection.  The
    iteration stops once the proposed step is below ``tol * max(1, |lambda|)``;
    the returned iterate is the last point actually evaluated, so its series
    and bundles are consistent with the reported eigenvalue.
    """
    x = frobenius.mutual_region(params).recommended_point
    if f_lo is None:
        f_lo = _iterate(params, fclass, lo, x, series_tol).Wp
    if f_hi is None:
        f_hi = _iterate(params, fclass, hi, x, series_tol).Wp
    if f_lo == 0.0:
        return _iterate(params, fclass, lo, x, series_tol)
    if f_hi == 0.0:
        return _iterate(params, fclass, hi, x, series_tol)
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketFailure(f"no sign change of Wp on [{lo}, {hi}]")
    neg, pos = (lo, hi) if f_lo < 0 else (hi, lo)
    # start from the secant point, which is usually much closer than the midpoint
    lam = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    if not lo < lam < hi:
        lam = 0.5 * (lo + hi)
    width = abs(hi - lo)
    for _ in range(MAX_NEWTON):
        it = _iterate(params, fclass, lam, x, series_tol)
        f, df = it.Wp, it.dWp
        if not (math.isfinite(f) and math.isfinite(df)):
            raise BracketFailure(f"Wp not finite at lambda = {lam}")
        if abs(df) * width <= 1e-13 * max(abs(f_lo), abs(f_hi)):
            raise DegenerateEigenvalue(
                f"dWp/dlambda ~ 0 near lambda = {lam}: multiple root, norm would vanish"
            )
        if f == 0.0:
            return it
        if f < 0:
            neg = lam
        else:
            pos = lam
        a, b = min(neg, pos), max(neg, pos)
        step = f / df
        cand = lam - step
        if not a < cand < b:
            cand = 0.5 * (a + b)
            step = lam - cand
        if abs(step) <= tol * max(1.0, abs(lam)):
            return it
        if b - a <= tol * max(1.0, abs(lam)):
            return it
        lam = cand
    raise BracketFailure(f"no convergence in [{lo}, {hi}] after {MAX_NEWTON} steps")


def _check_points(region) -> np.ndarray:
    # stay well inside the region: series cancellation grows toward its edges
    xs = region.recommended_point
    return np.array([xs - 0.375 * (xs - region.lo), xs + 0.375 * (region.hi - xs)])


def complete_solution(
    params: HeunParameters, fclass: FunctionClass, it: _Iterate, n: int
) -> EigenSolution:
    """Continuation coefficient and closed-form norm from a converged iterate.

    Needs two extra series evaluations (one per endpoint series, vectorized
    over the two cross-check points).
    """
    region = frobenius.mutual_region(params)
    xs = _check_points(region)
    e0 = frobenius.eval(it.series0, xs)
    e1 = frobenius.eval(it.series1, xs)
    A = _ratio(it.b0, it.b1)
    A_extra = _ratio(e0, e1)
    spread_A = np.max(np.abs(A_extra - A)) / abs(A)
    if not spread_A <= CONTINUATION_RTOL:
        raise InconsistentContinuation(
            f"y0/y1 varies by {spread_A:.2e} across the mutual region at "
            f"lambda = {it.lam}; eigenvalue not converged"
        )
    s = orientation(params)
    norm_star = -s * it.p * it.dW * A
    norms = -s * p_factor(params, xs) * _dw(e0, e1) * A_extra
    all_norms = np.concatenate([[norm_star], norms])
    spread = float(np.ptp(all_norms) / abs(norm_star))
    if not spread <= INVARIANCE_RTOL:
        raise InvarianceViolation(
            f"closed-form norm varies by {spread:.2e} across the mutual region"
        )
    if not norm_star > 0:
        raise NonPositiveNorm(
            f"closed-form norm {norm_star:.6e} <= 0 at lambda = {it.lam}"
        )
    return EigenSolution(
        n=n,
        lambda_n=float(it.lam),
        A_n=float(A),
        I_n=float(norm_star),
        series0=it.series0,
        series1=it.series1,
        fclass=fclass,
        residual=abs(float(it.Wp)),
        switch_point=region.recommended_point,
        dWp_dlambda=float(it.dWp),
        invariance_spread=spread,
    )


def find_eigenvalues(
    params: HeunParameters,
    fclass,
    lambda_lo: float,
    lambda_hi: float,
    max_count: int | None = None,
    tol: float = 1e-12,
    *,
    scan_points: int = DEFAULT_SCAN_POINTS,
    series_tol: float = frobenius.DEFAULT_TOL,
) -> list[EigenSolution]:
    """All eigenvalues in ``[lambda_lo, lambda_hi]`` found by a sign scan of Wp.

    Roots closer together than the scan spacing can be missed; ``scan_points``
    is the knob for that.  Results are ordered by ascending lambda and indexed
    from 0.
    """
    fclass = _resolve_class(params, fclass)
    if not existence_ok(params, fclass.class_id):
        raise ExistenceViolated(
            f"class {fclass.class_id.value} is not orthogonal on [0, 1] for "
            f"gamma = {params.gamma}, delta = {params.delta}"
        )
    if not lambda_lo < lambda_hi:
        raise DomainError("lambda_lo must be below lambda_hi")
    if max_count is not None and max_count <= 0:
        return []
    x = frobenius.mutual_region(params).recommended_point
    grid = np.linspace(lambda_lo, lambda_hi, max(int(scan_points), 2))
    vals = np.array([_iterate(params, fclass, lam, x, series_tol).Wp for lam in grid])

    brackets = []
    i = 0
    while i < len(grid) - 1:
        if vals[i] == 0.0:
            brackets.append((grid[i], grid[i], vals[i], vals[i]))
        elif vals[i] * vals[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1], vals[i], vals[i + 1]))
        i += 1
    if vals[-1] == 0.0:
        brackets.append((grid[-1], grid[-1], 0.0, 0.0))

    solutions = []
    for lo, hi, flo, fhi in brackets:
        if max_count is not None and len(solutions) >= max_count:
            break
        if lo == hi:
            it = _iterate(params, fclass, lo, x, series_tol)
        else:
            it = refine_eigenvalue(
                params, fclass, lo, hi, tol, f_lo=flo, f_hi=fhi, series_tol=series_tol
            )
        sol = complete_solution(params, fclass, it, len(solutions))
        logger.debug("lambda_%d = %.15g, I = %.15g", sol.n, sol.lambda_n, sol.I_n)
        solutions.append(sol)
    return solutions


def continuation_coefficient(
    params: HeunParameters,
    fclass,
    lambda_n: float,
    series0: FrobeniusSeries | None = None,
    series1: FrobeniusSeries | None = None,
    *,
    series_tol: float = frobenius.DEFAULT_TOL,
) -> float:
    """Ratio ``y0/y1`` at the recommended point, cross-checked at a second one."""
    fclass = _resolve_class(params, fclass)
    if series0 is None or series1 is None:
        series0, series1 = _build_pair(params, fclass, lambda_n, series_tol)
    region = frobenius.mutual_region(params)
    x = region.recommended_point
    A = _ratio(frobenius.eval(series0, x), frobenius.eval(series1, x))
    x2 = _check_points(region)[0]
    A2 = _ratio(frobenius.eval(series0, x2), frobenius.eval(series1, x2))
    if not abs(A2 - A) <= CONTINUATION_RTOL * abs(A):
        raise InconsistentContinuation(
            f"y0/y1 = {A:.12g} at x = {x} but {A2:.12g} at x = {x2}"
        )
    return float(A)


def normalization_integral(
    params: HeunParameters,
    fclass,
    lambda_n: float,
    x_eval: float | None = None,
    *,
    series_tol: float = frobenius.DEFAULT_TOL,
) -> float:
    """Closed-form ``integral_0^1 weight H**2 dx`` at a converged eigenvalue.

    The formula is evaluated at ``x_eval`` (default: recommended point) and at
    two more points of the mutual region; their relative spread must stay below
    1e-8.
    """
    fclass = _resolve_class(params, fclass)
    if not existence_ok(params, fclass.class_id):
        raise ExistenceViolated("existence conditions fail for this class")
    region = frobenius.mutual_region(params)
    x = region.recommended_point if x_eval is None else float(x_eval)
    if not region.contains(x):
        raise OutsideMutualRegion(f"x = {x} outside the mutual region")
    pts = np.array([x, *_check_points(region)])
    s0, s1 = _build_pair(params, fclass, lambda_n, series_tol)
    b0, b1 = frobenius.eval(s0, pts), frobenius.eval(s1, pts)
    vals = -orientation(params) * p_factor(params, pts) * _dw(b0, b1) * _ratio(b0, b1)
    spread = float(np.ptp(vals) / abs(vals[0]))
    if not spread <= INVARIANCE_RTOL:
        raise InvarianceViolation(f"closed-form norm varies by {spread:.2e}")
    if not vals[0] > 0:
        raise NonPositiveNorm(f"closed-form norm {vals[0]:.6e} <= 0")
    return float(vals[0])


def eval_heun(solution: EigenSolution, x):
    """Heun function ``H_n`` on (0, 1), normalized so that ``H_n ~ x**sigma0`` at 0."""
    xx = np.asarray(x, dtype=float)
    if np.any(~(xx > 0.0) | ~(xx < 1.0)):
        raise DomainError("x must lie in the open interval (0, 1)")
    xs = solution.switch_point
    if xx.ndim == 0:
        if xx <= xs:
            return frobenius.eval(solution.series0, float(xx)).y
        return solution.A_n * frobenius.eval(solution.series1, float(xx)).y
    out = np.empty_like(xx)
    left = xx <= xs
    if np.any(left):
        out[left] = frobenius.eval(solution.series0, xx[left]).y
    if np.any(~left):
        out[~left] = solution.A_n * frobenius.eval(solution.series1, xx[~left]).y
    return out


def orthonormal_basis(
    params: HeunParameters,
    fclass,
    lambda_lo: float,
    lambda_hi: float,
    max_count: int | None = None,
    tol: float = 1e-12,
    **kwargs,
) -> SpectralBasis:
    fclass = _resolve_class(params, fclass)
    sols = find_eigenvalues(
        params, fclass, lambda_lo, lambda_hi, max_count, tol, **kwargs
    )
    lams = [s.lambda_n for s in sols]
    for l1, l2 in zip(lams, lams[1:]):
        if not l2 - l1 > tol * max(1.0, abs(l2)):
            raise DegenerateEigenvalue(f"eigenvalues {l1} and {l2} are not separated")
    region = frobenius.mutual_region(params)
    return SpectralBasis(params, fclass, tuple(sols), region.recommended_point)
