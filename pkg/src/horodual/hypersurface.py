"""Hypersurfaces of H^n given by analytic 2-jets.

Orientation and sign conventions
--------------------------------
The unit normal ``N`` of a jet is the one agreeing with the jet's
``normal`` hint. The shape operator is defined by dN = B dx, i.e.
``d_i N = sum_k B[k, i] d_k x``, so that

    II = I B,    III = B^T I B,

geodesic spheres with the outward normal have B = coth(t) E and a
horosphere oriented towards its ideal point has B = -E. With these
signs the dual map x -> x + N has derivative (E + B) dx.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, InvariantViolation
from .lorentz import (HPoint, Isometry, _arr, _frame_with_last, form_matrix,
                      lorentz_frame, mink_inner, mink_norm2)
from .sphere import SphereChart, sphere_grid, tangent_basis

CONVEXITY_EPS = 1e-9


@dataclass(frozen=True)
class ImmersionJet:
    """One sample of an immersion y -> x(y) in H^n.

    ``dx[i]`` is d_i x and ``d2x[i, j]`` is d_i d_j x, all as vectors of
    R^{n,1}. ``normal`` fixes the orientation; when a builder knows the
    normal field in closed form it also supplies ``dnormal[i] = d_i N``.
    """
    chart_point: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    d2x: np.ndarray
    normal: np.ndarray
    dnormal: Optional[np.ndarray] = None

    def __post_init__(self):
        m = self.dx.shape[0]
        if self.dx.shape != (m, self.x.size) or self.d2x.shape != (m, m, self.x.size):
            raise DimensionMismatch("inconsistent jet shapes")
        if m != self.x.size - 2:
            raise DimensionMismatch("a hypersurface of H^n needs n-1 chart coordinates")

    @property
    def n(self):
        return self.x.size - 1

    def tangency_defect(self):
        return float(np.max(np.abs(mink_inner(self.dx, self.x))))

    def transformed(self, g):
        """The jet of g o x (isometry acting linearly on every vector)."""
        M = g.matrix if isinstance(g, Isometry) else np.asarray(g)
        return ImmersionJet(self.chart_point, M @ self.x, self.dx @ M.T,
                            self.d2x @ M.T, M @ self.normal,
                            None if self.dnormal is None else self.dnormal @ M.T)


@dataclass(frozen=True)
class FrameForms:
    I: np.ndarray
    II: np.ndarray
    III: np.ndarray
    B: np.ndarray
    N: np.ndarray
    k: np.ndarray
    H_mean: float
    K_gauss: Optional[float] = None

    @property
    def Istar(self):
        return horospherical_metric_direct(self)


def unit_normal(x, dx, hint):
    """Unit normal to the immersion at ``x``, oriented by ``hint``."""
    dim = x.size
    eta = form_matrix(dim)
    A = np.vstack([x, dx]) @ eta            # rows: covectors <x,.>, <dx_i,.>
    _, s, vt = np.linalg.svd(A)
    if s[-1] <= 1e-12 * max(1.0, s[0]):
        raise DegenerateInput("rank-deficient tangent frame")
    N = vt[-1]
    q = mink_norm2(N)
    if q <= 1e-14:
        raise DegenerateInput("normal direction is not spacelike")
    N = N / np.sqrt(q)
    if mink_inner(N, hint) < 0:
        N = -N
    return N


def forms_at(jet):
    """First, second and third fundamental forms and shape operator of a jet."""
    x, dx = jet.x, jet.dx
    m = dx.shape[0]
    N = unit_normal(x, dx, jet.normal)
    I = mink_inner(dx[:, None, :], dx[None, :, :])
    if np.linalg.eigvalsh(I)[0] <= 0:
        raise DegenerateInput("induced metric is not positive definite")
    # <N, d_j x> = 0 differentiates to <d_i N, d_j x> = -<N, d_i d_j x>
    II = -mink_inner(jet.d2x, N)
    II = 0.5 * (II + II.T)
    B = np.linalg.solve(I, II)
    III = B.T @ I @ B
    III = 0.5 * (III + III.T)
    k = np.sort(_eig_selfadjoint(I, II))
    H_mean = float(np.trace(B) / m)
    K = float(np.linalg.det(B) - 1.0) if jet.n == 3 else None
    return FrameForms(I, II, III, B, N, k, H_mean, K)


@dataclass(frozen=True)
class JetBatch:
    """Many jets stacked along a leading sample axis (same layout as ImmersionJet)."""
    x: np.ndarray
    dx: np.ndarray
    d2x: np.ndarray
    normal: np.ndarray
    dnormal: Optional[np.ndarray] = None

    @classmethod
    def stack(cls, jets):
        dn = None if any(j.dnormal is None for j in jets) else np.array([j.dnormal for j in jets])
        return cls(np.array([j.x for j in jets]), np.array([j.dx for j in jets]),
                   np.array([j.d2x for j in jets]), np.array([j.normal for j in jets]), dn)


@dataclass(frozen=True)
class BatchForms:
    I: np.ndarray
    II: np.ndarray
    III: np.ndarray
    B: np.ndarray
    N: np.ndarray
    k: np.ndarray


def forms_batch(jb):
    """Vectorized :func:`forms_at`. The normal is the hint made orthogonal to x and dx."""
    eta = np.diag(np.r_[-1.0, np.ones(jb.x.shape[-1] - 1)])
    V = np.concatenate([jb.x[:, None, :], jb.dx], axis=1)
    Ve = V @ eta
    gram = Ve @ np.swapaxes(V, -1, -2)
    coef = np.linalg.solve(gram, (Ve @ jb.normal[..., None]))[..., 0]
    N = jb.normal - np.einsum("na,nad->nd", coef, V)
    q = np.einsum("nd,nd->n", N @ eta, N)
    if np.any(q <= 1e-14):
        raise DegenerateInput("normal direction is not spacelike")
    N = N / np.sqrt(q)[:, None]
    dxe = jb.dx @ eta
    I = dxe @ np.swapaxes(jb.dx, -1, -2)
    II = -np.einsum("nijd,nd->nij", jb.d2x @ eta, N)
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    B = np.linalg.solve(I, II)
    III = np.swapaxes(B, -1, -2) @ I @ B
    III = 0.5 * (III + np.swapaxes(III, -1, -2))
    L = np.linalg.cholesky(I)
    Li = np.linalg.inv(L)
    k = np.linalg.eigvalsh(Li @ II @ np.swapaxes(Li, -1, -2))
    return BatchForms(I, II, III, B, N, k)


def _eig_selfadjoint(I, S):
    L = np.linalg.cholesky(I)
    Li = np.linalg.inv(L)
    return np.linalg.eigvalsh(Li @ S @ Li.T)


def horospherical_metric_direct(forms):
    """I* = I + 2 II + III."""
    Is = forms.I + 2.0 * forms.II + forms.III
    return 0.5 * (Is + Is.T)


def classify_convexity(forms, eps=CONVEXITY_EPS):
    """Most specific of dual_singular, convex, weakly, strictly_H_convex, none.

    convex: all k_i > eps. weakly: weakly convex, all k_i >= -eps with one
    on the boundary (still strictly H-convex). strictly_H_convex: all
    k_i > -1 + eps. dual_singular: some k_i within eps of -1.
    """
    k = np.asarray(forms.k)
    if np.any(np.abs(k + 1.0) <= eps):
        return "dual_singular"
    if np.all(k > eps):
        return "convex"
    if np.all(k >= -eps):
        return "weakly"
    if np.all(k > -1.0 + eps):
        return "strictly_H_convex"
    return "none"


def is_h_convex(label):
    return label in ("convex", "weakly", "strictly_H_convex")


def gauss_map(jet, forms=None):
    """Ideal endpoint of the normal ray, as a null vector normalized to xi0 = 1."""
    N = forms.N if forms is not None else unit_normal(jet.x, jet.dx, jet.normal)
    xi = jet.x + N
    return xi / xi[0]


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SurfaceFamily:
    """A family of analytic jets.

    ``local_jet(point, y)`` evaluates the jet at offset ``y`` in the chart
    attached to the sample parameter ``point`` (a unit direction for
    spherical families, a chart point for planar ones); ``sampler(count,
    rng)`` draws sample parameters.
    """
    tag: str
    params: dict
    n: int
    local_jet: Callable
    sampler: Callable
    spherical: bool = True
    extra: dict = field(default_factory=dict, compare=False)
    batch_jet: Optional[Callable] = field(default=None, compare=False)

    def jet(self, point):
        return self.local_jet(point, np.zeros(self.n - 1))

    def jet_batch(self, points):
        """Jets at the chart centres of ``points`` as one :class:`JetBatch`."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.batch_jet is not None:
            return self.batch_jet(points)
        return JetBatch.stack([self.jet(p) for p in points])

    def samples(self, count, rng=None):
        return self.sampler(count, rng)

    def jets(self, count, rng=None):
        return [self.jet(p) for p in self.samples(count, rng)]


def _sphere_sampler(n):
    def sample(count, rng=None):
        if rng is None:
            if n == 3:
                return sphere_grid(3, count)
            rng = np.random.default_rng(0)
        return sphere_grid(n, count, rng)
    return sample


def geodesic_sphere(x0, t, frame=None):
    """Sphere of radius t > 0 about x0, outward normal, directions in x0^perp."""
    if t <= 0:
        raise DegenerateInput("sphere radius must be positive")
    base = x0 if isinstance(x0, HPoint) else HPoint(np.asarray(x0, dtype=float))
    n = base.n
    L = lorentz_frame(base) if frame is None else np.asarray(frame, dtype=float)
    x0v, Ls = L[:, 0], L[:, 1:]
    ch, sh = np.cosh(t), np.sinh(t)

    def local_jet(s, y):
        om, dom, d2om = SphereChart(s).jet(y)
        w, dw, d2w = Ls @ om, dom @ Ls.T, d2om @ Ls.T
        return ImmersionJet(np.asarray(y, float), ch * x0v + sh * w, sh * dw, sh * d2w,
                            sh * x0v + ch * w, ch * dw)

    def batch_jet(S):
        # at the chart centre: sigma = s, d sigma = F^T, d2 sigma_ij = -delta_ij s
        F = np.swapaxes(tangent_basis(S), -1, -2)
        w, dw = S @ Ls.T, F @ Ls.T
        d2w = -np.eye(n - 1)[None, :, :, None] * w[:, None, None, :]
        return JetBatch(ch * x0v + sh * w, sh * dw, sh * d2w, sh * x0v + ch * w, ch * dw)

    return SurfaceFamily("geodesic_sphere", {"t": float(t), "x0": base.v.tolist()}, n,
                         local_jet, _sphere_sampler(n), True, {"frame": L}, batch_jet)


def equidistant(pole, d):
    """Hypersurface at signed distance d from the hyperplane pole^perp (normal side +pole).

    Chart: q(y) = sqrt(1 + |y|^2) c + sum y_i f_i on the hyperplane, then
    x = cosh(d) q + sinh(d) w with normal N = sinh(d) q + cosh(d) w.
    """
    w = _arr(pole)
    if abs(mink_norm2(w) - 1.0) > 1e-10:
        raise InvariantViolation("pole must be unit spacelike")
    n = w.size - 1
    F = _frame_with_last(w)
    c0, fs = F[:, 0], F[:, 1:n]
    ch, sh = np.cosh(d), np.sinh(d)

    def local_jet(point, y):
        yy = np.asarray(point, float) + np.asarray(y, float)
        r = np.sqrt(1.0 + yy @ yy)
        q = r * c0 + fs @ yy
        dq = np.outer(yy / r, c0) + fs.T
        d2r = np.eye(n - 1) / r - np.outer(yy, yy) / r ** 3
        d2q = d2r[:, :, None] * c0[None, None, :]
        return ImmersionJet(yy, ch * q + sh * w, ch * dq, ch * d2q,
                            sh * q + ch * w, sh * dq)

    def sample(count, rng=None):
        rng = np.random.default_rng(0) if rng is None else rng
        return rng.uniform(-1.5, 1.5, size=(count, n - 1))

    tag = "totally_geodesic_hyperplane" if d == 0 else "equidistant"
    return SurfaceFamily(tag, {"pole": w.tolist(), "d": float(d)}, n, local_jet, sample, False)


def totally_geodesic_hyperplane(pole):
    return equidistant(pole, 0.0)


def horosphere_family(xi, toward=True):
    """A horosphere, normal towards its ideal point (B = -E) or away (B = E)."""
    xiv = _arr(xi)
    n = xiv.size - 1
    # point of the horosphere on the ray from e0 towards xi
    tau = np.log(xiv[0])
    s_dir = xiv[1:] / xiv[0]
    o = np.r_[np.cosh(tau), np.sinh(tau) * s_dir]
    basis = []
    for j in range(n + 1):
        v = np.eye(n + 1)[j]
        # project out span(o, xi): <v,o> and <v,xi> with <o,xi> = -1, <o,o> = -1
        a, b = mink_inner(v, o), mink_inner(v, xiv)
        v = v + b * o + (a - b) * xiv  # makes <v,o> = 0 and <v,xi> = 0
        for u in basis:
            v = v - mink_inner(v, u) * u
        q = mink_norm2(v)
        if q > 1e-8:
            basis.append(v / np.sqrt(q))
        if len(basis) == n - 1:
            break
    fs = np.array(basis)
    sgn = 1.0 if toward else -1.0

    def local_jet(point, y):
        yy = np.asarray(point, float) + np.asarray(y, float)
        x = o + yy @ fs + 0.5 * (yy @ yy) * xiv
        dx = fs + yy[:, None] * xiv[None, :]
        d2x = np.eye(n - 1)[:, :, None] * xiv[None, None, :]
        return ImmersionJet(yy, x, dx, d2x, sgn * (xiv - x), -sgn * dx)

    def sample(count, rng=None):
        rng = np.random.default_rng(0) if rng is None else rng
        return rng.uniform(-1.5, 1.5, size=(count, n - 1))

    return SurfaceFamily("horosphere", {"xi": xiv.tolist(), "toward": toward}, n,
                         local_jet, sample, False)


def klein_quadric(axes, frame=None):
    """Euclidean ellipsoid sum (k_i / a_i)^2 = 1 in the Klein ball, outward normal.

    Directions omega on the unit sphere map to k = a * omega and then to
    x = (1, k) / sqrt(1 - |k|^2); derivatives follow by the chain rule.
    The normal is the normalized Minkowski gradient of the quadratic cone
    sum x_i^2 / a_i^2 - x_0^2 = 0, which is automatically orthogonal to x.
    """
    a = np.asarray(axes, dtype=float)
    if np.any(a <= 0) or np.any(a >= 1):
        raise DegenerateInput("semi-axes must lie in (0, 1)")
    n = a.size
    L = np.eye(n + 1) if frame is None else np.asarray(frame, dtype=float)
    inv_a2 = 1.0 / a ** 2

    def local_jet(s, y):
        om, dom, d2om = SphereChart(s).jet(y)
        k, dk, d2k = a * om, dom * a, d2om * a
        r = 1.0 / np.sqrt(1.0 - k @ k)
        kdk = dk @ k
        dr = r ** 3 * kdk
        d2r = (3.0 * r ** 5 * np.outer(kdk, kdk)
               + r ** 3 * (dk @ dk.T + d2k @ k))
        one = np.r_[1.0, k]
        x = r * one
        dx = dr[:, None] * one[None, :] + r * np.column_stack([np.zeros(n - 1), dk])
        dk_full = np.concatenate([np.zeros((n - 1, 1)), dk], axis=1)
        d2k_full = np.concatenate([np.zeros((n - 1, n - 1, 1)), d2k], axis=2)
        d2x = (d2r[:, :, None] * one[None, None, :]
               + dr[:, None, None] * dk_full[None, :, :]
               + dr[None, :, None] * dk_full[:, None, :]
               + r * d2k_full)
        scale = np.r_[1.0, inv_a2]
        v, dv = x * scale, dx * scale
        nv = np.sqrt(mink_norm2(v))
        N = v / nv
        dN = dv / nv - np.outer(mink_inner(dv, v), v) / nv ** 3
        return ImmersionJet(np.asarray(y, float), L @ x, dx @ L.T, d2x @ L.T, L @ N, dN @ L.T)

    return SurfaceFamily("klein_quadric", {"axes": a.tolist()}, n, local_jet,
                         _sphere_sampler(n), True)


def build_surface(spec, n=None):
    """Build a family from a dict such as ``{"family": "geodesic_sphere", "t": 1}``."""
    fam = spec["family"]
    if fam == "geodesic_sphere":
        x0 = spec.get("x0")
        base = HPoint.origin(n) if x0 is None else HPoint(np.asarray(x0, float))
        return geodesic_sphere(base, spec["t"])
    if fam in ("equidistant", "totally_geodesic_hyperplane"):
        pole = spec.get("pole")
        if pole is None:
            pole = np.eye(n + 1)[n]
        return equidistant(np.asarray(pole, float), spec.get("d", 0.0) if fam == "equidistant" else 0.0)
    if fam == "klein_quadric":
        return klein_quadric(spec["axes"])
    if fam == "horosphere":
        return horosphere_family(np.asarray(spec["xi"], float), spec.get("toward", True))
    raise ValueError(f"unknown family {fam!r}")
