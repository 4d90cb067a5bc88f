"""Acceptance criteria 1-15.

Each test is named test_cNN_<criterion>; conftest.py prints one PASS/FAIL
line per criterion at the end of the run.
"""

import time

import numpy as np
import pytest

from horodual.admissibility import (admissibility_test, conformal_curvature,
                                    principal_from_ricci, reconstruct_surface, roundtrip_check)
from horodual.cli.checks import fixture_isometries
from horodual.duality import (AmbientLinear, de_sitter_dual, dualize, dualize_batch,
                              envelope_point, equidistant_envelope, gauss_map_conformality,
                              relation_check, weingarten_inversion)
from horodual.errors import DualSingular, NotAdmissible
from horodual.factors import Constant, Harmonic, Linear, Quadratic, Sum
from horodual.horospace import (GraphSurface, codazzi_defect, cone_embed, curvature_star,
                                g0_inner, horo_isometry)
from horodual.hypersurface import (equidistant, forms_at, geodesic_sphere, horosphere_family,
                                   klein_quadric)
from horodual.lorentz import HPoint, Isometry, invariant_null_spectrum, mink_inner, parabolic, rotation
from horodual.numerics import sectional_fd
from horodual.sphere import SphereChart, sphere_grid

KSTAR_UNIT = 0.4323324   # (1 - e^-2) / 2, k* of the constant graph u = 1


def identity_families():
    """Sphere, equidistant and Klein-quadric fixtures in H^3, H^4 and H^5."""
    fams = []
    for n in (3, 4, 5):
        x0 = HPoint.origin(n)
        pole = np.eye(n + 1)[n]
        axes = [0.3, 0.5, 0.7, 0.4, 0.6][:n]
        fams += [geodesic_sphere(x0, 0.8), equidistant(pole, 0.4), klein_quadric(axes)]
    return fams


FAMILIES = identity_families()
FAMILY_IDS = [f"{f.tag}-n{f.n}" for f in FAMILIES]


def _points(fam, count):
    return fam.samples(count, None if fam.n == 3 or not fam.spherical
                       else np.random.default_rng(fam.n))


def factor_fixtures(n):
    rng = np.random.default_rng(100 + n)
    Q = rng.uniform(-1, 1, size=(n, n))
    a = rng.normal(size=n)
    return {
        "constant": Constant(1.0),
        "linear": Sum([Constant(0.8), Linear(0.08 * a / np.linalg.norm(a))]),
        "quadratic": Sum([Constant(1.0), Quadratic(0.05 * (Q + Q.T) / 2)]),
    }


# ---------------------------------------------------------------------------
# 1. sphere calibration


def test_c01_sphere_calibration():
    start = time.perf_counter()
    worst = 0.0
    total = 0
    for n in (3, 4, 5):
        for t in (0.25, 0.5, 1.0, 2.0):
            S = geodesic_sphere(HPoint.origin(n), t)
            pts = _points(S, 500)
            _, G = dualize_batch(S.jet_batch(pts))
            # chart metric at every chart centre is the identity
            worst = max(worst, float(np.abs(G / np.exp(2 * t) - np.eye(n - 1)).max()))
            total += len(pts)
    elapsed = time.perf_counter() - start
    assert total >= 6000
    assert worst <= 1e-9
    assert elapsed < 1.0


def test_c01_sphere_calibration_per_sample_path():
    # the batched path above is cross-checked against the per-sample dualize
    S = geodesic_sphere(HPoint.origin(3), 1.0)
    for p in S.samples(50):
        d = dualize(S.jet(p))
        want = np.exp(2.0) * np.eye(2)
        assert np.abs(d.Istar_pullback - want).max() / np.exp(2.0) <= 1e-9
        # the tangent horosphere is e^t (x0 + v)
        assert np.allclose(d.phi, np.e * np.r_[1.0, p], atol=1e-12)


# ---------------------------------------------------------------------------
# 2. dual metric identity


@pytest.mark.parametrize("fam", FAMILIES, ids=FAMILY_IDS)
def test_c02_dual_metric_identity(fam):
    worst = 0.0
    pts = _points(fam, 200)
    assert len(pts) >= 200
    for p in pts:
        j = fam.jet(p)
        f = forms_at(j)
        d = dualize(j, f)
        direct = f.I + 2 * f.II + f.III
        worst = max(worst, float(np.abs(d.Istar_pullback - direct).max()
                                 / max(1.0, np.abs(direct).max())))
        # dphi = (E + B) dx
        assert np.allclose(d.dphi, (np.eye(fam.n - 1) + f.B).T @ j.dx, atol=1e-9)
    assert worst <= 1e-9


# ---------------------------------------------------------------------------
# 3. inversion


@pytest.mark.parametrize("fam", FAMILIES, ids=FAMILY_IDS)
def test_c03_inversion(fam):
    worst = 0.0
    for p in _points(fam, 200):
        B = forms_at(fam.jet(p)).B
        E = np.eye(B.shape[0])
        worst = max(worst, float(np.abs(weingarten_inversion(B) @ (E + B) - E).max()))
    assert worst <= 1e-7


def test_c03_inversion_rejects_minus_identity():
    with pytest.raises(DualSingular) as exc:
        weingarten_inversion(-np.eye(2))
    assert exc.value.code == "dual_singular"
    hz = horosphere_family(np.array([1.0, 0.0, 0.0, 1.0]), toward=True)
    B = forms_at(hz.jet(hz.samples(1)[0])).B
    assert np.allclose(B, -np.eye(2), atol=1e-12)
    with pytest.raises(DualSingular):
        weingarten_inversion(B)


# ---------------------------------------------------------------------------
# 4. double duality


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("kind", ["constant", "linear", "quadratic"])
def test_c04_double_duality(n, kind):
    u = factor_fixtures(n)[kind]
    assert admissibility_test(u, sphere_grid(n, 300, np.random.default_rng(1)), n).h_admissible
    g = GraphSurface(HPoint.origin(n), u)
    worst = 0.0
    for s in sphere_grid(n, 8, np.random.default_rng(2)):
        d = dualize(envelope_point(g, s))
        worst = max(worst, float(np.abs(d.phi - g.point(s)).max()))
    assert worst <= 1e-6


# ---------------------------------------------------------------------------
# 5. curvature identities in H^3


def _surface_fixtures_3():
    return [geodesic_sphere(HPoint.origin(3), 1.0), klein_quadric([0.3, 0.5, 0.7]),
            equidistant(np.array([0.0, 0.0, 0.0, 1.0]), 0.4)]


def test_c05_curvature_identities_analytic():
    for fam in _surface_fixtures_3():
        for p in fam.samples(200):
            r = relation_check(fam.jet(p))
            assert r.discrepancy <= 1e-9
            assert abs(r.Kstar_analytic * (r.K + 2 * r.H_mean + 2) - r.K) <= 1e-6
    # K* from the Gauss tensor of the graph against 1 - tr B*
    for kind, u in factor_fixtures(3).items():
        g = GraphSurface(HPoint.origin(3), u)
        for s in sphere_grid(3, 10, np.random.default_rng(5)):
            cs = curvature_star(g, s)
            assert abs(cs.sectionals[0] - cs.Kstar) <= 1e-9


def test_c05_curvature_identities_fd_riemann():
    for fam in _surface_fixtures_3():
        for p in fam.samples(6):
            def metric(y, p=p):
                return dualize(fam.local_jet(p, y)).Istar_pullback
            K_fd = sectional_fd(metric, np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
            B = forms_at(fam.jet(p)).B
            assert abs(K_fd - (1.0 - np.trace(weingarten_inversion(B)))) <= 1e-4


# ---------------------------------------------------------------------------
# 6. Gauss equation


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("kind", ["constant", "linear", "quadratic"])
def test_c06_gauss_equation(n, kind):
    u = factor_fixtures(n)[kind]
    g = GraphSurface(HPoint.origin(n), u)
    for s in sphere_grid(n, 3, np.random.default_rng(6)):
        chart = SphereChart(s)
        cs = curvature_star(g, s)

        def metric(y):
            return np.exp(2 * u.value(chart.point(y))) * chart.metric(y)

        for (a, b), K in zip(cs.pairs, cs.sectionals):
            X, Y = cs.frame[:, a], cs.frame[:, b]
            K_fd = sectional_fd(metric, np.zeros(n - 1), X, Y)
            assert abs(K_fd - (1.0 - cs.kstar[a] - cs.kstar[b])) <= 1e-6
            assert abs(K - (1.0 - cs.kstar[a] - cs.kstar[b])) <= 1e-6


# ---------------------------------------------------------------------------
# 7. Codazzi


@pytest.mark.parametrize("n", [3, 4, 5])
def test_c07_codazzi(n):
    fixtures = dict(factor_fixtures(n))
    fixtures["harmonic"] = Sum([Constant(1.0), Harmonic(3, 0.03, (0, 1), 0.4)])
    worst = 0.0
    for u in fixtures.values():
        for s in sphere_grid(n, 6, np.random.default_rng(7)):
            worst = max(worst, codazzi_defect(u, s))
    assert worst <= 1e-5


# ---------------------------------------------------------------------------
# 8. admissibility cross-check


@pytest.mark.parametrize("n", [4, 5])
def test_c08_admissibility_cross_check(n):
    grid = sphere_grid(n, 8)
    for u in factor_fixtures(n).values():
        rep = admissibility_test(u, grid, n)
        assert rep.h_admissible
        assert rep.route_gap <= 1e-6
    zero = admissibility_test(Constant(0.0), grid, n)
    assert max(abs(zero.form_range[0]), abs(zero.form_range[1])) <= 1e-10
    assert zero.klass == "boundary"
    cd = conformal_curvature(Constant(1.0), grid[3])
    assert np.allclose(principal_from_ricci(cd, n), KSTAR_UNIT, atol=1e-7)
    one = admissibility_test(Constant(1.0), grid, n)
    assert np.allclose(one.kstar, KSTAR_UNIT, atol=1e-7)


# ---------------------------------------------------------------------------
# 9. round trip


def test_c09_round_trip_constant():
    x0 = HPoint.origin(3)
    grid = sphere_grid(3, 200)
    for c in (0.5, 1.0, 2.0):
        assert roundtrip_check(Constant(c), x0, grid) <= 1e-9
    S = reconstruct_surface(Constant(2.0), x0, grid=grid)
    assert np.allclose(dualize(S.jet(grid[0])).Istar_pullback, 54.5981500 * np.eye(2),
                       rtol=1e-8)


@pytest.mark.parametrize("n", [3, 4])
def test_c09_round_trip_perturbed(n):
    u = factor_fixtures(n)["quadratic"]
    grid = sphere_grid(n, 12, np.random.default_rng(9))
    assert roundtrip_check(u, HPoint.origin(n), grid) <= 1e-5


def test_c09_round_trip_rejects_inadmissible():
    grid = sphere_grid(3, 300)
    for u, klass in ((Constant(0.0), "boundary"), (Constant(-1.0), "neither")):
        with pytest.raises(NotAdmissible) as exc:
            reconstruct_surface(u, HPoint.origin(3), grid=grid)
        assert exc.value.details["klass"] == klass
        assert len(exc.value.details["worst_sample"]) == 3


# ---------------------------------------------------------------------------
# 10. conformal Gauss map


@pytest.mark.parametrize("fam", [f for f in FAMILIES if f.n <= 4], ids=[i for f, i in zip(FAMILIES, FAMILY_IDS) if f.n <= 4])
def test_c10_conformal_gauss_map(fam):
    for p in _points(fam, 10):
        assert gauss_map_conformality(fam, p).anisotropy <= 1e-6


# ---------------------------------------------------------------------------
# 11. isometry equivariance


@pytest.mark.parametrize("n", [3, 4, 5])
def test_c11_isometry_equivariance(n):
    isos = fixture_isometries(n, np.random.default_rng(11))
    assert set(isos) == {"rotation", "translation", "parabolic", "extension+", "extension-"}
    assert isos["extension+"].preserves_orientation
    assert not isos["extension-"].preserves_orientation
    fams = [f for f in FAMILIES if f.n == n]
    for g in isos.values():
        for fam in fams:
            for p in _points(fam, 20):
                j = fam.jet(p)
                d1, d2 = dualize(j), dualize(j.transformed(g))
                scale = max(1.0, np.abs(d1.phi).max())
                assert np.abs(d2.phi - g(d1.phi)).max() / scale <= 1e-10
                assert np.abs(d2.Istar_pullback - d1.Istar_pullback).max() / scale ** 2 <= 1e-10
                N1 = de_sitter_dual(j).point.v
                N2 = de_sitter_dual(j.transformed(g)).point.v
                assert np.abs(N2 - g(N1)).max() / scale <= 1e-10


# ---------------------------------------------------------------------------
# 12. fixed horospheres


def test_c12_fixed_horospheres_elliptic():
    # double rotation of H^4 about a point: no boundary fixed point
    x0 = HPoint.origin(4)
    e = np.eye(5)
    g = rotation(x0, [e[1], e[2]], 0.7) @ rotation(x0, [e[3], e[4]], 1.9)
    assert len(invariant_null_spectrum(g).fixed_horosphere_lines) == 0
    # point reflection of H^3
    refl = Isometry(np.diag([1.0, -1.0, -1.0, -1.0]))
    assert len(invariant_null_spectrum(refl).fixed_horosphere_lines) == 0


def test_c12_fixed_horospheres_parabolic():
    xi = np.array([1.0, 0.0, 0.6, 0.8])
    v = np.array([0.0, 1.0, 0.0, 0.0])
    g = parabolic(xi, 0.9 * v)
    lines = invariant_null_spectrum(g).fixed_horosphere_lines
    assert len(lines) == 1
    assert np.allclose(lines[0].xi, xi, atol=1e-8)
    for t in (-1.0, 0.0, 2.0):
        assert np.allclose(horo_isometry(g, np.exp(t) * xi).xi, np.exp(t) * xi, atol=1e-12)


# ---------------------------------------------------------------------------
# 13. de Sitter duality


@pytest.mark.parametrize("fam", FAMILIES, ids=FAMILY_IDS)
def test_c13_de_sitter(fam):
    for p in _points(fam, 50):
        j = fam.jet(p)
        f = forms_at(j)
        assert np.abs(de_sitter_dual(j, f).metric - f.III).max() <= 1e-9


def test_c13_de_sitter_sphere_value():
    S = geodesic_sphere(HPoint.origin(3), 1.0)
    for p in S.samples(20):
        assert np.allclose(de_sitter_dual(S.jet(p)).metric, 2.3810978 * np.eye(2), atol=1e-7)


# ---------------------------------------------------------------------------
# 14. envelope isometry


@pytest.mark.parametrize("n", [3, 4])
def test_c14_envelope_isometry(n):
    S = geodesic_sphere(HPoint.origin(n), 1.0)
    rng = np.random.default_rng(14)
    shifts = [0.4, AmbientLinear(0.03 * rng.normal(size=n + 1), 0.1)]
    for shift in shifts:
        env = equidistant_envelope(S, shift, validate=8)
        for p in _points(S, 8):
            want = env.extra["scaled_istar"](p)
            got = dualize(env.jet(p)).Istar_pullback
            assert np.abs(got - want).max() / np.abs(want).max() <= 1e-6
    # a constant shift c moves the sphere of radius t to radius t + c
    env = equidistant_envelope(S, 0.4, validate=0)
    k = forms_at(env.jet(_points(S, 1)[0])).k
    assert np.allclose(k, 1.0 / np.tanh(1.4), atol=1e-6)


# ---------------------------------------------------------------------------
# 15. cone-model embedding


def test_c15_cone_embed():
    for xi in ([1, 0, 0, 1], [5, 3, 4, 0], [3, 1, 2, 2], [9, 4, 4, 7]):
        q = cone_embed(np.array(xi, dtype=float))
        assert mink_inner(q, q) == 1.0
    for fam in FAMILIES:
        for p in _points(fam, 20):
            d = dualize(fam.jet(p))
            q = cone_embed(d.phi)
            assert abs(mink_inner(q, q) - 1.0) <= 1e-12 * max(1.0, np.abs(d.phi).max() ** 2)
            lift = np.concatenate([d.dphi, np.zeros((d.dphi.shape[0], 1))], axis=1)
            for i in range(lift.shape[0]):
                for k in range(lift.shape[0]):
                    want = g0_inner(d.phi, d.dphi[i], d.dphi[k])
                    assert abs(mink_inner(lift[i], lift[k]) - want) <= 1e-12 * max(1.0, abs(want))
