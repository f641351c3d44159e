"""Slow, independent checks: ODE shooting and endpoint-desingularized quadrature.

Nothing here reuses the Wronskian or the closed-form norm.  The only shared
ingredient is the Frobenius series, used to seed the integrator a small
distance away from each singular endpoint where no other exact data exists.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import frobenius
from .core import HeunParameters, class_exponents, weight
from .errors import IntegratorFailure, ToleranceNotMet
from .frobenius import Center
from .spectral import SpectralBasis, eval_heun

__all__ = [
    "ShootingConfig",
    "QuadratureConfig",
    "QuadratureResult",
    "VerificationReport",
    "heun_rhs",
    "shoot_mismatch",
    "shoot_mismatch_normalized",
    "shooting_eigenvalues",
    "integrate_weighted",
    "weighted_inner_product",
    "verify_basis",
]


@dataclass(frozen=True)
class ShootingConfig:
    start_offset: float = 1e-4
    step_tol: float = 1e-12
    matching_point: float | None = None


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    split_point: float = 0.5
    limit: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if not 0.0 < self.split_point < 1.0:
            raise ValueError("split_point must lie in (0, 1)")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    neval: int


def heun_rhs(params: HeunParameters, lam: float):
    """First-order system ``(y, y')' = (y', -P y' - Q y)`` of Heun's equation."""
    g, d, e, a = params.gamma, params.delta, params.epsilon, params.a
    ab = params.alpha * params.beta

    def rhs(x, u):
        P = g / x + d / (x - 1.0) + e / (x - a)
        Q = (ab * x - lam) / (x * (x - 1.0) * (x - a))
        return [u[1], -P * u[1] - Q * u[0]]

    return rhs


def _shoot(params, fclass, lam, config):
    cfg = config or ShootingConfig()
    fclass = fclass if hasattr(fclass, "sigma0") else class_exponents(params, fclass)
    region = frobenius.mutual_region(params)
    xm = region.recommended_point if cfg.matching_point is None else cfg.matching_point
    if not 0.0 < cfg.start_offset < region.lo:
        raise ValueError("start_offset must lie between 0 and the mutual region")
    x_left = cfg.start_offset
    x_right = 1.0 - cfg.start_offset
    s0 = frobenius.build_series(params, fclass, Center.X0, lam)
    s1 = frobenius.build_series(params, fclass, Center.X1, lam)
    b0 = frobenius.eval(s0, x_left)
    b1 = frobenius.eval(s1, x_right)
    rhs = heun_rhs(params, lam)
    ends = []
    for x_start, seed in ((x_left, b0), (x_right, b1)):
        sol = integrate.solve_ivp(
            rhs,
            (x_start, xm),
            [seed.y, seed.dy_dx],
            method="DOP853",
            rtol=cfg.step_tol,
            atol=cfg.step_tol * 1e-3,
        )
        if not sol.success:
            raise IntegratorFailure(f"shooting from x = {x_start}: {sol.message}")
        ends.append(sol.y[:, -1])
    return ends


def shoot_mismatch(params: HeunParameters, fclass, lam: float, config=None) -> float:
    """Determinant ``yL yR' - yR yL'`` of the two shot solutions at the matching point.

    ``yL`` starts from the x=0 series near the left endpoint, ``yR`` from the
    x=1 series near the right one; the determinant vanishes at eigenvalues.
    """
    (yl, dl), (yr, dr) = _shoot(params, fclass, lam, config)
    return float(yl * dr - yr * dl)


def shoot_mismatch_normalized(params, fclass, lam, config=None) -> float:
    """Sine of the angle between the shot states ``(y, y')``; scale-free."""
    (yl, dl), (yr, dr) = _shoot(params, fclass, lam, config)
    return float((yl * dr - yr * dl) / (math.hypot(yl, dl) * math.hypot(yr, dr)))


def shooting_eigenvalues(
    params: HeunParameters,
    fclass,
    lambda_lo: float,
    lambda_hi: float,
    scan_points: int = 80,
    config: ShootingConfig | None = None,
    xtol: float = 1e-13,
) -> list[float]:
    """Eigenvalues located by a sign scan of the shooting mismatch plus Brent."""
    grid = np.linspace(lambda_lo, lambda_hi, scan_points)
    f = [shoot_mismatch(params, fclass, lam, config) for lam in grid]
    roots = []
    for i in range(len(grid) - 1):
        if f[i] == 0.0:
            roots.append(float(grid[i]))
        elif f[i] * f[i + 1] < 0:
            r = optimize.brentq(
                lambda lam: shoot_mismatch(params, fclass, lam, config),
                grid[i],
                grid[i + 1],
                xtol=xtol,
                rtol=4 * np.finfo(float).eps,
            )
            roots.append(float(r))
    return roots


def _mapped(F, kappa, x_of_u, piece_lo, piece_hi, cfg, counter):
    # x = u**(1/kappa) (or 1 - x = ...) absorbs the endpoint power law
    def G(u):
        counter[0] += 1
        x, jac = x_of_u(u)
        if not 0.0 < x < 1.0:
            return 0.0
        return F(x) * jac

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *rest = integrate.quad(
            G,
            piece_lo,
            piece_hi,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=cfg.limit,
            full_output=1,
        )
    ier = 0 if not rest else 1
    return val, err, info["neval"], ier


def integrate_weighted(
    params: HeunParameters,
    f,
    g=None,
    config: QuadratureConfig | None = None,
    *,
    edge_exponents: tuple[float, float] = (0.0, 0.0),
) -> QuadratureResult:
    """``integral_0^1 weight f g dx`` with power-law endpoint desingularization.

    ``edge_exponents`` are the combined local exponents of ``f*g`` at x=0 and
    x=1; together with the weight they fix the substitutions
    ``x = u**(1/k0)`` on ``[0, split]`` and ``1 - x = v**(1/k1)`` on
    ``[split, 1]`` that make the transformed integrand bounded.
    """
    cfg = config or QuadratureConfig()
    mu0 = params.gamma - 1.0 + edge_exponents[0]
    mu1 = params.delta - 1.0 + edge_exponents[1]
    k0, k1 = mu0 + 1.0, mu1 + 1.0
    if k0 <= 0 or k1 <= 0:
        raise ToleranceNotMet(
            f"integrand not integrable: endpoint exponents {mu0:.3g}, {mu1:.3g}"
        )

    if g is None:
        def F(x):
            return weight(params, x) * f(x)
    else:
        def F(x):
            return weight(params, x) * f(x) * g(x)

    def left(u):
        x = u ** (1.0 / k0)
        return x, x / (k0 * u) if u > 0 else 0.0

    def right(v):
        t = v ** (1.0 / k1)
        return 1.0 - t, t / (k1 * v) if v > 0 else 0.0

    xs = cfg.split_point
    counter = [0]
    v0, e0, n0, i0 = _mapped(F, k0, left, 0.0, xs**k0, cfg, counter)
    v1, e1, n1, i1 = _mapped(F, k1, right, 0.0, (1.0 - xs) ** k1, cfg, counter)
    value, error = v0 + v1, e0 + e1
    target = max(cfg.abs_tol, cfg.rel_tol * abs(value))
    if (i0 or i1) and error > target:
        raise ToleranceNotMet(
            f"quadrature error estimate {error:.2e} exceeds target {target:.2e}",
            value=value,
            error=error,
        )
    return QuadratureResult(float(value), float(error), counter[0])


def weighted_inner_product(
    params: HeunParameters,
    f,
    g,
    config: QuadratureConfig | None = None,
    *,
    edge_exponents: tuple[float, float] = (0.0, 0.0),
) -> float:
    return integrate_weighted(
        params, f, g, config, edge_exponents=edge_exponents
    ).value


@dataclass
class VerificationReport:
    gram: np.ndarray
    norm_rel_errors: list[float]
    shooting_mismatch: list[float]
    quadrature_norms: list[float]
    passed: bool
    failures: list[str] = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)


DEFAULT_THRESHOLDS = {
    "offdiag": 1e-8,
    "diag": 1e-7,
    "norm_rel": 1e-7,
    "shooting": 1e-7,
}


def _scalar_heun(sol):
    return lambda x: float(eval_heun(sol, x))


def verify_basis(
    basis: SpectralBasis,
    config: QuadratureConfig | None = None,
    *,
    thresholds: dict | None = None,
    shooting: ShootingConfig | None = None,
    threads: int = 0,
) -> VerificationReport:
    """Cross-check a basis against quadrature and shooting.

    Fills the Gram matrix of the normalized functions, the relative error of
    each closed-form norm against quadrature, and the scale-free shooting
    mismatch at each eigenvalue.  Failures are collected, not raised.
    """
    th = dict(DEFAULT_THRESHOLDS, **(thresholds or {}))
    params = basis.params
    sols = list(basis.solutions)
    n = len(sols)
    edge = (2.0 * basis.fclass.sigma0, 2.0 * basis.fclass.sigma1)
    funcs = [_scalar_heun(s) for s in sols]

    def pair(ij):
        i, j = ij
        return integrate_weighted(
            params, funcs[i], funcs[j], config, edge_exponents=edge
        ).value

    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    shots = lambda s: shoot_mismatch_normalized(params, basis.fclass, s.lambda_n, shooting)
    if threads > 0:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(pair, pairs))
            mism = list(pool.map(shots, sols))
    else:
        raw = [pair(ij) for ij in pairs]
        mism = [shots(s) for s in sols]

    H = np.zeros((n, n))
    for (i, j), v in zip(pairs, raw):
        H[i, j] = H[j, i] = v
    norms = [sol.I_n for sol in sols]
    scale = np.sqrt(np.outer(norms, norms)) if n else np.zeros((0, 0))
    gram = H / scale if n else H
    quad_norms = [float(H[i, i]) for i in range(n)]
    rel = [abs(norms[i] - quad_norms[i]) / abs(quad_norms[i]) for i in range(n)]

    failures = []
    for i in range(n):
        if not abs(gram[i, i] - 1.0) <= th["diag"]:
            failures.append(f"n={i}: <h,h> = {gram[i, i]:.12g}")
        if not rel[i] <= th["norm_rel"]:
            failures.append(f"n={i}: closed-form norm off by {rel[i]:.2e}")
        if not abs(mism[i]) <= th["shooting"]:
            failures.append(f"n={i}: shooting mismatch {mism[i]:.2e}")
        for j in range(i + 1, n):
            if not abs(gram[i, j]) <= th["offdiag"]:
                failures.append(f"n={i},m={j}: <h_n,h_m> = {gram[i, j]:.2e}")
    return VerificationReport(
        gram=gram,
        norm_rel_errors=rel,
        shooting_mismatch=[float(m) for m in mism],
        quadrature_norms=quad_norms,
        passed=not failures,
        failures=failures,
        thresholds=th,
    )
