"""Heun parameters, function classes and the Sturm-Liouville weight.

Heun's equation in standard form reads::

    y'' + (gamma/x + delta/(x-1) + epsilon/(x-a)) y'
        + (alpha*beta*x - lambda) / (x (x-1) (x-a)) y = 0

with the exponent constraint ``alpha + beta - gamma - delta - epsilon + 1 = 0``.

On the open interval (0, 1) the factors ``(x-1)**s`` and ``(x-a)**s`` are
complex for non-integer ``s``.  Everything here uses the positive real branch
instead::

    weight(x)   = x**(gamma-1) (1-x)**(delta-1) |x-a|**(epsilon-1)
    p_factor(x) = x**gamma     (1-x)**delta     |x-a|**epsilon

``p_factor`` has the same logarithmic derivative as the complex version, so the
self-adjoint form ``(p y')' + s (alpha*beta*x - lambda) weight y = 0`` still
holds, with the orientation sign ``s = +1`` for ``a > 1`` and ``s = -1`` for
``a < 0`` (see :func:`orientation`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NonFinite,
    RiemannViolation,
    SingularityInInterval,
    ValidationError,
)

__all__ = [
    "RIEMANN_TOL",
    "Side",
    "HeunClass",
    "HeunParameters",
    "FunctionClass",
    "validate",
    "complete_exponents",
    "riemann_residual",
    "class_exponents",
    "existence_ok",
    "orientation",
    "weight",
    "p_factor",
]

RIEMANN_TOL = 1e-12
EXPONENT_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon")


class Side(enum.Enum):
    A_LEFT = "a<0"
    A_RIGHT = "a>1"


class HeunClass(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @classmethod
    def parse(cls, value: HeunClass | str | int) -> HeunClass:
        if isinstance(value, cls):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            if 1 <= value <= 4:
                return list(cls)[value - 1]
        elif isinstance(value, str):
            key = value.strip().upper()
            if key in cls.__members__:
                return cls[key]
            if key in {"1", "2", "3", "4"}:
                return list(cls)[int(key) - 1]
        raise ValidationError(f"unknown Heun function class: {value!r}")

    @property
    def singular_at_zero(self) -> bool:
        return self in (HeunClass.II, HeunClass.IV)

    @property
    def singular_at_one(self) -> bool:
        return self in (HeunClass.III, HeunClass.IV)


@dataclass(frozen=True)
class HeunParameters:
    """Validated parameter set; build it with :func:`validate`."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    a: float

    @property
    def side(self) -> Side:
        return Side.A_LEFT if self.a < 0 else Side.A_RIGHT

    @property
    def riemann_residual(self) -> float:
        return riemann_residual(
            self.alpha, self.beta, self.gamma, self.delta, self.epsilon
        )

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta, self.epsilon, self.a)


@dataclass(frozen=True)
class FunctionClass:
    """Class label with its exponents at x=0 (``sigma0``) and x=1 (``sigma1``)."""

    class_id: HeunClass
    sigma0: float
    sigma1: float


def riemann_residual(alpha, beta, gamma, delta, epsilon) -> float:
    return alpha + beta - gamma - delta - epsilon + 1.0


def validate(alpha, beta, gamma, delta, epsilon, a) -> HeunParameters:
    """Check the six raw parameters and return a :class:`HeunParameters`.

    Raises
    ------
    NonFinite
        Any value is NaN or infinite.
    RiemannViolation
        ``|alpha + beta - gamma - delta - epsilon + 1| > 1e-12``.
    SingularityInInterval
        ``0 <= a <= 1``.
    """
    raw = (alpha, beta, gamma, delta, epsilon, a)
    try:
        vals = tuple(float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise NonFinite(f"parameters must be real numbers: {raw!r}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise NonFinite(f"parameters must be finite: {vals!r}")
    res = riemann_residual(*vals[:5])
    if abs(res) > RIEMANN_TOL:
        raise RiemannViolation(
            f"alpha + beta - gamma - delta - epsilon + 1 = {res:.3e}, expected 0"
        )
    if 0.0 <= vals[5] <= 1.0:
        raise SingularityInInterval(f"a = {vals[5]} lies in [0, 1]")
    return HeunParameters(*vals)


def complete_exponents(missing: str, **known: float) -> float:
    """Solve the exponent relation for the one exponent named ``missing``."""
    if missing not in EXPONENT_NAMES:
        raise ValidationError(f"cannot solve for {missing!r}")
    others = {k: float(v) for k, v in known.items() if k in EXPONENT_NAMES}
    if missing in others or len(others) != 4:
        raise ValidationError("exactly four of the five exponents must be given")
    vals = dict(others, **{missing: 0.0})
    res = riemann_residual(*(vals[k] for k in EXPONENT_NAMES))
    # alpha, beta enter with +1, gamma/delta/epsilon with -1
    return -res if missing in ("alpha", "beta") else res


def class_exponents(params: HeunParameters, class_id) -> FunctionClass:
    cid = HeunClass.parse(class_id)
    sigma0 = 1.0 - params.gamma if cid.singular_at_zero else 0.0
    sigma1 = 1.0 - params.delta if cid.singular_at_one else 0.0
    return FunctionClass(cid, sigma0, sigma1)


def existence_ok(params: HeunParameters, class_id) -> bool:
    """Strict boundary-term conditions that make the class orthogonal on [0, 1]."""
    cid = HeunClass.parse(class_id)
    g, d = params.gamma, params.delta
    ok0 = g < 2.0 if cid.singular_at_zero else g > 0.0
    ok1 = d < 2.0 if cid.singular_at_one else d > 0.0
    return ok0 and ok1


def orientation(params: HeunParameters) -> float:
    """Sign ``s`` in ``(p y')' + s (alpha*beta*x - lambda) weight y = 0``.

    ``x (x-1) (x-a)`` equals ``+x (1-x) |x-a|`` for ``a > 1`` and
    ``-x (1-x) |x-a|`` for ``a < 0``.
    """
    return 1.0 if params.a > 1.0 else -1.0


def _interior(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0) | ~(arr < 1.0)):
        raise DomainError("x must lie in the open interval (0, 1)")
    return arr


def _out(arr, val):
    return float(val) if arr.ndim == 0 else val


def weight(params: HeunParameters, x):
    """Positive Sturm-Liouville weight on (0, 1); scalar or array ``x``."""
    xx = _interior(x)
    val = (
        xx ** (params.gamma - 1.0)
        * (1.0 - xx) ** (params.delta - 1.0)
        * np.abs(xx - params.a) ** (params.epsilon - 1.0)
    )
    return _out(xx, val)


def p_factor(params: HeunParameters, x):
    """Positive integrating factor ``x**gamma (1-x)**delta |x-a|**epsilon``."""
    xx = _interior(x)
    val = (
        xx**params.gamma
        * (1.0 - xx) ** params.delta
        * np.abs(xx - params.a) ** params.epsilon
    )
    return _out(xx, val)
