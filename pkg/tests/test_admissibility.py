import numpy as np
import pytest

from horodual.admissibility import (admissibility_test, conformal_curvature, conformal_sectional,
                                    hessian_kstar, normalized_kstar, principal_from_ricci,
                                    reconstruct_surface, roundtrip_check)
from horodual.errors import DimensionTooSmall, EmptyInput, NotAdmissible
from horodual.factors import Constant, Harmonic, Linear, Precomposed, Quadratic
from horodual.horospace import GraphSurface, normalized_factor
from horodual.hypersurface import classify_convexity, forms_at
from horodual.lorentz import HPoint
from horodual.numerics import riemann_fd, sectional_fd
from horodual.sphere import SphereChart, sphere_grid

K1 = (1 - np.exp(-2)) / 2       # 0.4323324


def quad(n, scale=0.05, seed=0):
    Q = np.random.default_rng(seed).uniform(-1, 1, (n, n))
    return Constant(1.0) + Quadratic(scale * (Q + Q.T))


def chart_metric(u, s):
    chart = SphereChart(s)

    def metric(y):
        sig, dsig, _ = chart.jet(y)
        return np.exp(2 * u.value(sig)) * (dsig @ dsig.T)
    return metric, chart


def fd_ricci(u, s):
    metric, chart = chart_metric(u, s)
    y0 = np.zeros(chart.dim)
    R = riemann_fd(metric, y0)
    Ric = np.einsum("abad->bd", R)
    g = metric(y0)
    return Ric, float(np.trace(np.linalg.solve(g, Ric))), chart


@pytest.mark.parametrize("n, u", [
    (4, Constant(0.0)),
    (4, Constant(0.4)),
    (4, Linear(0.1 * np.array([1.0, -2.0, 0.5, 0.3]))),
    (5, quad(5, 0.1)),
    (3, Harmonic(2, 0.2) + Linear([0.1, 0.0, 0.2])),
])
def test_ricci_matches_finite_differences(n, u):
    for s in sphere_grid(n, 3, np.random.default_rng(1)):
        cd = conformal_curvature(u, s)
        Ric, S, chart = fd_ricci(u, s)
        _, dsig, _ = chart.jet(np.zeros(chart.dim))
        Fc = dsig @ cd.frame                 # frame in chart coordinates
        assert np.abs(Fc.T @ Ric @ Fc - cd.ric).max() < 1e-5
        assert cd.S_scalar == pytest.approx(S, abs=1e-5)
        assert cd.S_scalar == pytest.approx(np.trace(cd.ric), abs=1e-9)


def test_curvature_examples():
    s = np.array([0.0, 0.0, 0.6, 0.8])
    cd = conformal_curvature(Constant(0.0), s)
    assert np.allclose(cd.ric, 2 * np.eye(3)) and cd.S_scalar == pytest.approx(6.0)
    c = 0.7
    cd = conformal_curvature(Constant(c), s)
    assert cd.S_scalar == pytest.approx(6 * np.exp(-2 * c), abs=1e-12)
    # unchanged as a bilinear form: h-frame components scale by e^{-2c}
    assert np.allclose(cd.ric * np.exp(2 * c), 2 * np.eye(3), atol=1e-12)
    with pytest.raises(DimensionTooSmall):
        conformal_curvature(Constant(0.0), np.array([0.6, 0.8]))


def test_sectional_matches_finite_differences():
    u = quad(4, 0.1, seed=2) + Linear([0.05, 0.1, 0.0, -0.1])
    for s in sphere_grid(4, 3, np.random.default_rng(2)):
        metric, chart = chart_metric(u, s)
        _, dsig, _ = chart.jet(np.zeros(3))
        X, Y = np.array([1.0, 0.3, 0.0]), np.array([0.0, 1.0, -0.5])
        want = sectional_fd(metric, np.zeros(3), X, Y)
        assert conformal_sectional(u, s, dsig.T @ X, dsig.T @ Y) == pytest.approx(want, abs=1e-5)


def test_principal_from_ricci_examples():
    s = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(principal_from_ricci(conformal_curvature(Constant(0.0), s), 4), 0, atol=1e-12)
    assert np.allclose(principal_from_ricci(conformal_curvature(Constant(1.0), s), 4), K1, atol=1e-7)
    with pytest.raises(DimensionTooSmall):
        principal_from_ricci(conformal_curvature(Constant(1.0), np.array([1.0, 0, 0])), 3)


@pytest.mark.parametrize("n", [4, 5])
def test_ricci_route_sectionals(n):
    u = quad(n, 0.1, seed=n)
    for s in sphere_grid(n, 4, np.random.default_rng(n)):
        cd = conformal_curvature(u, s)
        k = principal_from_ricci(cd, n)
        assert np.allclose(k, np.sort(hessian_kstar(u, s)), atol=1e-9)
        # frame is sorted like the eigenvalues of ric, which reverses the order of k
        kk = np.sort((cd.S_scalar - 2 * (n - 2) * np.diag(cd.ric)) / (2 * (n - 2) * (n - 3)) + 0.5)
        assert np.allclose(kk, k)


def test_normalized_factor_closed_form():
    c, v = 0.8, np.array([0.0, 1.0, 0.0])
    ux = normalized_factor(GraphSurface(HPoint.origin(3), Constant(c)), v)
    for y in sphere_grid(3, 20):
        assert ux.value(y) == pytest.approx(c + np.log(np.cosh(c) - np.sinh(c) * (v @ y)), abs=1e-12)
    zero = normalized_factor(GraphSurface(HPoint.origin(3), Constant(0.0)), v)
    assert np.abs(zero.value(sphere_grid(3, 20))).max() < 1e-14


@pytest.mark.parametrize("n", [3, 4, 5])
def test_hessian_routes_agree(n):
    u = quad(n, 0.2, seed=1) + Linear(0.1 * np.ones(n))
    for s in sphere_grid(n, 6, np.random.default_rng(0)):
        assert np.allclose(np.sort(normalized_kstar(u, s)), np.sort(hessian_kstar(u, s)), atol=1e-8)
    assert np.allclose(hessian_kstar(Constant(1.0), sphere_grid(n, 3, np.random.default_rng(0))), K1,
                       atol=1e-7)


def test_admissibility_examples():
    rep = admissibility_test(Constant(1.0), sphere_grid(4, 50, np.random.default_rng(0)))
    assert rep.klass == "C_admissible" and rep.h_admissible
    assert rep.form_range == pytest.approx((1 - np.e ** 2,) * 2, abs=1e-7)
    assert rep.window_range == pytest.approx((2 * np.exp(-2),) * 2, abs=1e-7)
    assert rep.route_gap < 1e-12
    for n in (3, 4, 5):
        zero = admissibility_test(Constant(0.0), sphere_grid(n, 20, np.random.default_rng(0)))
        assert zero.klass == "boundary" and not zero.h_admissible
    three = admissibility_test(Constant(1.0), sphere_grid(3, 100))
    assert three.klass == "C_admissible" and three.route_gap is None
    assert np.allclose(three.kstar, K1, atol=1e-7)
    neg = admissibility_test(Constant(-0.5), sphere_grid(3, 10))
    assert neg.klass == "neither" and "neither" in neg.describe()
    with pytest.raises(EmptyInput):
        admissibility_test(Constant(1.0), np.zeros((0, 3)))


def test_h_but_not_c_admissible_and_sectional_bounds():
    grid = sphere_grid(3, 2000)
    steep = admissibility_test(Constant(0.5) + Linear([0.9, 0.0, 0.0]), grid)
    assert steep.klass == "H_admissible" and not steep.c_admissible
    assert steep.kstar.max() > 1
    # H-admissible keeps sectionals below 1; only C-admissible bounds them below by -1
    assert steep.sectional_range[1] < 1 and steep.sectional_range[0] < -1
    for u in (Constant(1.0), quad(3, 0.05, 5), Constant(0.5) + Linear([0.6, 0.0, 0.0])):
        r = admissibility_test(u, grid)
        assert r.c_admissible
        assert -1 < r.sectional_range[0] and r.sectional_range[1] < 1


@pytest.mark.parametrize("n", [3, 4])
def test_class_invariant_under_rotation(n):
    rng = np.random.default_rng(4)
    R, _ = np.linalg.qr(rng.normal(size=(n, n)))
    u = quad(n, 0.3, seed=3) + Linear(0.2 * rng.normal(size=n))
    grid = sphere_grid(n, 200, rng)
    a = admissibility_test(u, grid)
    b = admissibility_test(Precomposed(u, R), grid @ R.T)
    assert a.klass == b.klass
    assert np.allclose(a.kstar, b.kstar, atol=1e-12)


def test_reconstruct_examples():
    o = HPoint.origin(3)
    fam = reconstruct_surface(Constant(1.0), o)
    assert fam.tag == "geodesic_sphere" and fam.params["t"] == 1.0
    assert roundtrip_check(Constant(1.0), o, sphere_grid(3, 20)) <= 1e-9
    assert roundtrip_check(Constant(2.0), o, sphere_grid(3, 20)) <= 1e-9
    u = quad(3)
    grid = sphere_grid(3, 200)
    env = reconstruct_surface(u, o, grid=grid)
    assert env.extra["admissibility"].h_admissible
    for s in sphere_grid(3, 5):
        assert classify_convexity(forms_at(env.jet(s))) == "convex"
    assert roundtrip_check(u, o, sphere_grid(3, 12)) <= 1e-5
    with pytest.raises(NotAdmissible) as info:
        reconstruct_surface(Constant(0.0), o)
    assert "worst_sample" in info.value.details
