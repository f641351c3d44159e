"""Local power-series solutions of Heun's equation about x=0 and x=1.

Recursion
---------
Multiplying Heun's equation by ``x (x-1) (x-a)`` and inserting
``y = sum_k c_k x**(s+k)`` gives, for the coefficient of ``x**(s+k)``,

    R_{k+1} c_{k+1} + Q_k c_k + P_{k-1} c_{k-1} = 0

with ``n = s + k`` and

    R_{k+1} = a (n+1) (n + gamma)
    Q_k     = -[n ((n-1)(1+a) + gamma (1+a) + delta a + epsilon) + lambda]
    P_{k-1} = (n - 1 + alpha) (n - 1 + beta)

The ``k = -1`` equation is the indicial relation ``a s (s - 1 + gamma) = 0``,
so ``s`` is ``0`` or ``1 - gamma``.  Since ``lambda`` only enters ``Q_k`` (and
linearly), differentiating the recursion gives the companion relation for
``d_k = dc_k/dlambda``:

    R_{k+1} d_{k+1} + Q_k d_k - c_k + P_{k-1} d_{k-1} = 0

About x=1 the substitution ``t = 1 - x`` maps the equation onto another Heun
equation with ``gamma <-> delta``, ``a -> 1 - a`` and
``lambda -> alpha*beta - lambda``; the series in ``t`` is built with the same
recursion and ``d_k`` picks up the factor ``dlambda_local/dlambda = -1``.
Using ``t = 1 - x`` (rather than ``x - 1``) is the real-branch normalization
``(1-x)**(-sigma1) y1 -> 1``.
"""

from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import FunctionClass, HeunParameters
from .errors import EmptyRegion, NoConvergence, NonPositiveTol, OutsideRadius

__all__ = [
    "Center",
    "FrobeniusSeries",
    "EvalBundle",
    "MutualRegion",
    "SAFETY",
    "MIN_ORDER",
    "build_series",
    "eval",
    "eval_d2",
    "mutual_region",
    "radius",
    "count_evaluations",
]

SAFETY = 0.9
MIN_ORDER = 16
DEFAULT_TOL = 1e-15
DEFAULT_MAX_ORDER = 4000


class Center(enum.Enum):
    X0 = 0
    X1 = 1


@dataclass(frozen=True, eq=False)
class FrobeniusSeries:
    """Truncated Frobenius series together with its lambda-derivative.

    ``coeffs[k]`` multiplies ``t**(exponent + k)`` where ``t = x`` about X0 and
    ``t = 1 - x`` about X1.  ``dcoeffs`` holds ``dc_k/dlambda`` with respect to
    the accessory parameter of the original (x-variable) equation.
    """

    center: Center
    exponent: float
    lam: float
    coeffs: np.ndarray
    dcoeffs: np.ndarray
    radius: float
    params: HeunParameters

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class EvalBundle:
    y: float | np.ndarray
    dy_dx: float | np.ndarray
    dy_dlambda: float | np.ndarray
    d2y_dlambda_dx: float | np.ndarray


@dataclass(frozen=True)
class MutualRegion:
    lo: float
    hi: float
    recommended_point: float

    def contains(self, x: float, slack: float = 1e-12) -> bool:
        return self.lo - slack <= x <= self.hi + slack


class _EvalCounter:
    def __init__(self):
        self.calls = 0


_active_counters: list[_EvalCounter] = []


@contextlib.contextmanager
def count_evaluations():
    """Count calls to :func:`eval` made inside the ``with`` block.

    >>> with count_evaluations() as counter:
    ...     pass
    >>> counter.calls
    0
    """
    counter = _EvalCounter()
    _active_counters.append(counter)
    try:
        yield counter
    finally:
        _active_counters.remove(counter)


def radius(params: HeunParameters, center: Center) -> float:
    if center is Center.X0:
        return min(1.0, abs(params.a))
    return min(1.0, abs(params.a - 1.0))


def mutual_region(params: HeunParameters, safety: float = SAFETY) -> MutualRegion:
    """Overlap of the two convergence disks inside (0, 1), shrunk by ``safety``.

    The recommended point balances the relative distances ``x/r0 = (1-x)/r1``.
    """
    r0 = radius(params, Center.X0)
    r1 = radius(params, Center.X1)
    lo = max(0.0, 1.0 - safety * r1)
    hi = min(1.0, safety * r0)
    if not (0.0 < lo < hi < 1.0):
        raise EmptyRegion(
            f"a = {params.a}: the shrunk convergence disks do not overlap inside (0, 1)"
        )
    return MutualRegion(lo, hi, r0 / (r0 + r1))


def _local_problem(params: HeunParameters, center: Center, lam: float):
    """Exponents, singularity and accessory parameter in the local variable."""
    p = params
    if center is Center.X0:
        return p.gamma, p.delta, p.epsilon, p.a, lam, 1.0
    return p.delta, p.gamma, p.epsilon, 1.0 - p.a, p.alpha * p.beta - lam, -1.0


def _check_point(params, center):
    region = mutual_region(params)
    return region.hi if center is Center.X0 else 1.0 - region.lo


def build_series(
    params: HeunParameters,
    fclass: FunctionClass,
    center: Center,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_order: int = DEFAULT_MAX_ORDER,
    *,
    order: int | None = None,
    check_point: float | None = None,
) -> FrobeniusSeries:
    """Build the normalized Frobenius series about ``center`` at ``lam``.

    The truncation order grows until the last three terms of the value, slope
    and lambda-derivative series are each below ``tol`` times the running
    magnitude, evaluated at ``check_point`` (distance from the center; defaults
    to the far edge of the mutual-convergence region).  Passing ``order`` fixes
    the truncation order instead.
    """
    if not tol > 0:
        raise NonPositiveTol(f"tol must be positive, got {tol}")
    center = Center(center) if not isinstance(center, Center) else center
    g, d, e, a, lam_loc, dlam = _local_problem(params, center, float(lam))
    s = fclass.sigma0 if center is Center.X0 else fclass.sigma1
    ab = params.alpha + params.beta
    abp = params.alpha * params.beta
    lin = g * (1.0 + a) + d * a + e
    t = _check_point(params, center) if check_point is None else float(check_point)

    c = [1.0]
    dc = [0.0]
    c_prev = dc_prev = 0.0
    scale = 1.0
    small = 0
    limit = max_order if order is None else order
    k = 0
    while k < limit:
        n = s + k
        r = a * (n + 1.0) * (n + g)
        if r == 0.0:
            raise NoConvergence(f"recursion denominator vanishes at k={k + 1}")
        q = -(n * ((n - 1.0) * (1.0 + a) + lin) + lam_loc)
        pm = (n - 1.0) * (n - 1.0) + ab * (n - 1.0) + abp
        ck, dk = c[-1], dc[-1]
        c_new = -(q * ck + pm * c_prev) / r
        d_new = -(q * dk - dlam * ck + pm * dc_prev) / r
        c_prev, dc_prev = ck, dk
        c.append(c_new)
        dc.append(d_new)
        k += 1
        if order is not None:
            continue
        tk = t**k
        terms = (abs(c_new) * tk, abs(k * c_new) * tk, abs(d_new) * tk)
        scale = max(scale, *terms)
        if max(terms) <= tol * scale:
            small += 1
            if small >= 3 and k >= MIN_ORDER:
                break
        else:
            small = 0
        if not math.isfinite(c_new) or not math.isfinite(d_new):
            raise NoConvergence(f"series coefficients overflowed at order {k}")
    else:
        if order is None:
            raise NoConvergence(
                f"series about {center.name} not converged by order {max_order}"
            )

    return FrobeniusSeries(
        center=center,
        exponent=float(s),
        lam=float(lam),
        coeffs=np.array(c),
        dcoeffs=np.array(dc),
        radius=radius(params, center),
        params=params,
    )


def _local_t(series: FrobeniusSeries, x):
    xx = np.asarray(x, dtype=float)
    if series.center is Center.X0:
        t, sign = xx, 1.0
    else:
        t, sign = 1.0 - xx, -1.0
    lower_ok = t > 0.0 if series.exponent != 0.0 else t >= 0.0
    if np.any(~lower_ok | ~(t < series.radius)):
        raise OutsideRadius(
            f"x outside the convergence interval of the series about {series.center.name}"
        )
    return xx, t, sign


def _power_sums(coeffs, t, nderiv):
    """Return sum_k c_k t^k and, if requested, its first two t-derivatives."""
    k = np.arange(len(coeffs), dtype=float)
    tt = np.atleast_1d(t)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        pw = tt**k
    pw[:, 0] = 1.0
    out = [np.sum(coeffs * pw, axis=1)]
    if nderiv >= 1:
        pw1 = np.zeros_like(pw)
        pw1[:, 1:] = pw[:, :-1]
        out.append(np.sum(coeffs * k * pw1, axis=1))
    if nderiv >= 2:
        pw2 = np.zeros_like(pw)
        pw2[:, 2:] = pw[:, :-2]
        out.append(np.sum(coeffs * k * (k - 1.0) * pw2, axis=1))
    return out


def eval(series: FrobeniusSeries, x) -> EvalBundle:
    """Value, x-slope, lambda-derivative and mixed derivative of the series.

    Each member is the exact derivative of the truncated series, the prefactor
    ``t**exponent`` included.
    """
    for counter in _active_counters:
        counter.calls += 1
    xx, t, sign = _local_t(series, x)
    sig = series.exponent
    s, s1 = _power_sums(series.coeffs, t, 1)
    u, u1 = _power_sums(series.dcoeffs, t, 1)
    tf = np.atleast_1d(t)
    if sig == 0.0:
        pre, dpre = np.ones_like(tf), np.zeros_like(tf)
    else:
        pre = tf**sig
        dpre = sig * tf ** (sig - 1.0)
    y = pre * s
    dy = sign * (dpre * s + pre * s1)
    yl = pre * u
    dyl = sign * (dpre * u + pre * u1)
    if xx.ndim == 0:
        return EvalBundle(float(y[0]), float(dy[0]), float(yl[0]), float(dyl[0]))
    return EvalBundle(y, dy, yl, dyl)


def eval_d2(series: FrobeniusSeries, x):
    """Second x-derivative of the truncated series (used for residual checks)."""
    xx, t, _ = _local_t(series, x)
    sig = series.exponent
    s, s1, s2 = _power_sums(series.coeffs, t, 2)
    tf = np.atleast_1d(t)
    if sig == 0.0:
        val = s2
    else:
        val = (
            sig * (sig - 1.0) * tf ** (sig - 2.0) * s
            + 2.0 * sig * tf ** (sig - 1.0) * s1
            + tf**sig * s2
        )
    # d2/dx2 = d2/dt2 for t = 1 - x as well
    return float(val[0]) if xx.ndim == 0 else val
