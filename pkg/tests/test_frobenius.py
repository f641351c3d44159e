import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from heunbasis import frobenius as fr
from heunbasis.core import class_exponents, validate
from heunbasis.errors import EmptyRegion, NoConvergence, NonPositiveTol, OutsideRadius
from heunbasis.frobenius import Center


def series(params, cls, center, lam, **kw):
    return fr.build_series(params, class_exponents(params, cls), center, lam, **kw)


def heun_residual(params, s, x):
    b = fr.eval(s, x)
    y2 = fr.eval_d2(s, x)
    P = params.gamma / x + params.delta / (x - 1) + params.epsilon / (x - params.a)
    Q = (params.alpha * params.beta * x - s.lam) / (x * (x - 1) * (x - params.a))
    terms = np.array([y2, P * b.dy_dx, Q * b.y])
    return abs(terms.sum()) / np.max(np.abs(terms))


@pytest.mark.parametrize("lam", [-7.0, 0.0, 0.7, 12.5])
def test_first_coefficient(p1, lam):
    s = series(p1, "I", Center.X0, lam)
    assert s.coeffs[0] == 1.0 and s.dcoeffs[0] == 0.0
    assert_allclose(s.coeffs[1], lam / 3.0, rtol=1e-15)
    assert_allclose(s.dcoeffs[1], 1.0 / 3.0, rtol=1e-15)
    assert len(s.coeffs) == len(s.dcoeffs) == s.truncation_order + 1


def test_hypergeometric_degenerate_series(p2):
    for center in Center:
        s = series(p2, "I", center, -12.0)
        assert_allclose(s.coeffs[:3], [1.0, -6.0, 6.0], rtol=0, atol=1e-14)
        assert np.all(s.coeffs[3:] == 0.0)
        # the lambda-derivative does not truncate
        assert np.any(s.dcoeffs[3:] != 0.0)


def test_radius_bookkeeping(p1, p_left):
    assert series(p1, "I", Center.X0, 0.0).radius == 1.0
    assert series(p1, "I", Center.X1, 0.0).radius == 1.0
    q = validate(1, 2, 1.5, 1.5, 1, -0.5)
    assert series(q, "I", Center.X0, 0.0).radius == 0.5
    assert series(q, "I", Center.X1, 0.0).radius == 1.0


def test_mutual_region_examples():
    r = fr.mutual_region(validate(1, 2, 1.5, 1.5, 1, 2))
    assert_allclose([r.lo, r.hi, r.recommended_point], [0.1, 0.9, 0.5], rtol=1e-15)
    r = fr.mutual_region(validate(1, 2, 1.5, 1.5, 1, -0.5))
    assert_allclose([r.lo, r.hi], [0.1, 0.45], rtol=1e-14)
    assert_allclose(r.recommended_point, 1.0 / 3.0, rtol=1e-15)
    r = fr.mutual_region(validate(1, 2, 1.5, 1.5, 1, 1e6))
    assert_allclose(r.recommended_point, 0.5, rtol=1e-15)


def test_mutual_region_empty_near_interval():
    # the 0.9 safety factor leaves no overlap once a comes within ~0.11 of [0, 1]
    with pytest.raises(EmptyRegion):
        fr.mutual_region(validate(1, 2, 1.5, 1.5, 1, -0.05))


def test_eval_near_origin(p1):
    s = series(p1, "I", Center.X0, 3.0)
    b = fr.eval(s, 1e-9)
    assert_allclose(b.y, 1.0, atol=1e-8)
    assert abs(b.dy_dlambda) < 1e-8


def test_eval_against_direct_integration(p1):
    lam = 0.0
    s = series(p1, "I", Center.X0, lam)
    start = fr.eval(s, 0.01)
    g, d, e, a = p1.gamma, p1.delta, p1.epsilon, p1.a

    def rhs(x, u):
        P = g / x + d / (x - 1) + e / (x - a)
        Q = (p1.alpha * p1.beta * x - lam) / (x * (x - 1) * (x - a))
        return [u[1], -P * u[1] - Q * u[0]]

    sol = solve_ivp(rhs, (0.01, 0.3), [start.y, start.dy_dx], method="DOP853",
                    rtol=1e-13, atol=1e-15)
    b = fr.eval(s, 0.3)
    assert_allclose(b.y, sol.y[0, -1], rtol=0, atol=1e-9)
    assert_allclose(b.dy_dx, sol.y[1, -1], rtol=0, atol=1e-9)


@pytest.mark.parametrize("cls", ["I", "II", "III", "IV"])
@pytest.mark.parametrize("center", list(Center))
def test_lambda_derivatives_match_finite_differences(p1, cls, center):
    lam, h = -4.3, 1e-6
    x = 0.3 if center is Center.X0 else 0.7
    s = series(p1, cls, center, lam)
    order = s.truncation_order
    sp = series(p1, cls, center, lam + h, order=order)
    sm = series(p1, cls, center, lam - h, order=order)
    b, bp, bm = fr.eval(s, x), fr.eval(sp, x), fr.eval(sm, x)
    assert_allclose(b.dy_dlambda, (bp.y - bm.y) / (2 * h), rtol=1e-6)
    assert_allclose(b.d2y_dlambda_dx, (bp.dy_dx - bm.dy_dx) / (2 * h), rtol=1e-6)


@pytest.mark.parametrize("tol", [1e-15, 1e-12, 1e-9])
@pytest.mark.parametrize("cls", ["I", "II", "III", "IV"])
@pytest.mark.parametrize("center", list(Center))
def test_ode_residual(p1, cls, center, tol):
    s = series(p1, cls, center, 2.7, tol=tol)
    ts = np.linspace(0.05, 0.5, 10) * s.radius
    xs = ts if center is Center.X0 else 1 - ts
    for x in xs:
        assert heun_residual(p1, s, x) <= 10 * tol


def test_slope_matches_x_finite_difference(p1):
    s = series(p1, "IV", Center.X1, 1.0)
    h = 1e-6
    for x in (0.4, 0.6, 0.8):
        fd = (fr.eval(s, x + h).y - fr.eval(s, x - h).y) / (2 * h)
        assert_allclose(fr.eval(s, x).dy_dx, fd, rtol=1e-7)


def test_class_ii_leading_behaviour():
    p = validate(0.5, 1.3, 0.7, 1.1, 1.0, 3.0)
    s = series(p, "II", Center.X0, 0.4)
    xs = [1e-3, 1e-4, 1e-5]
    dev = [abs(x ** (-s.exponent) * fr.eval(s, x).y - 1.0) for x in xs]
    assert dev[0] > dev[1] > dev[2]
    assert dev[2] < 1e-5


def test_truncation_monotone(p1):
    x = 0.6
    prev = np.inf
    for n in range(4, 80, 4):
        s = series(p1, "I", Center.X0, -3.0, order=n)
        r = heun_residual(p1, s, x)
        assert r <= prev + 1e-13
        prev = r


def test_vectorized_eval_matches_scalar(p1):
    s = series(p1, "II", Center.X0, 0.5)
    xs = np.array([0.1, 0.35, 0.8])
    vb = fr.eval(s, xs)
    for i, x in enumerate(xs):
        b = fr.eval(s, x)
        assert_allclose([vb.y[i], vb.dy_dx[i], vb.dy_dlambda[i], vb.d2y_dlambda_dx[i]],
                        [b.y, b.dy_dx, b.dy_dlambda, b.d2y_dlambda_dx], rtol=1e-15)


def test_errors(p1):
    s = series(p1, "I", Center.X0, 0.0)
    with pytest.raises(OutsideRadius):
        fr.eval(s, 1.0)
    with pytest.raises(OutsideRadius):
        fr.eval(s, -0.1)
    with pytest.raises(NonPositiveTol):
        series(p1, "I", Center.X0, 0.0, tol=0.0)
    with pytest.raises(NoConvergence):
        series(p1, "I", Center.X0, 0.0, max_order=20)


def test_integer_gamma_principal_series(p2):
    # gamma = delta = 1: both exponents coincide, the analytic series still exists
    s = series(p2, "I", Center.X0, 3.0)
    assert np.all(np.isfinite(s.coeffs))


def test_evaluation_counter(p1):
    s = series(p1, "I", Center.X0, 0.0)
    with fr.count_evaluations() as c:
        fr.eval(s, 0.2)
        fr.eval(s, np.array([0.1, 0.2, 0.3]))
    assert c.calls == 2
