"""The space C^n_+ of horospheres.

Horospheres are future null vectors of R^{n,1} (the future light cone);
the degenerate metric g0 is the restriction of the Minkowski form to the
cone, whose kernel is the radial (vertical) direction. A base point x0
with Lorentz frame L identifies the cone with S^{n-1} x R through

    (z, t) -> e^t L (1, z),      z a unit vector of R^n,

and in these coordinates g0 = e^{2t} can. A space-like hypersurface is
the graph z -> e^{u(z)} L (1, z) of a conformal factor u.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InvariantViolation, StepUnderflow
from .factors import LogAffine, Sum
from .lorentz import (HPoint, Horosphere, Isometry, TANGENT_TOL, _arr, form_matrix,
                      lorentz_frame, mink_inner, mink_norm2)
from .numerics import fd_derivative
from .sphere import SphereChart

STAR_EPS = 1e-9
CODAZZI_STEP = 1e-4


def g0_inner(xi, v, w):
    """Degenerate metric of C^n_+ at ``xi`` on vectors tangent to the cone."""
    xv = _arr(xi)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    scale = max(1.0, np.abs(xv).max()) * max(1.0, np.abs(v).max(), np.abs(w).max())
    if (np.any(np.abs(mink_inner(v, xv)) > TANGENT_TOL * scale)
            or np.any(np.abs(mink_inner(w, xv)) > TANGENT_TOL * scale)):
        raise InvariantViolation("vectors are not tangent to the light cone at xi")
    return mink_inner(v, w)


def vertical_parameter(xi1, xi2, tol=1e-10):
    """Signed distance t with xi2 = e^t xi1 (both on one vertical line)."""
    a, b = _arr(xi1), _arr(xi2)
    ratio = b[0] / a[0]
    if ratio <= 0 or np.max(np.abs(b - ratio * a)) > tol * max(1.0, np.abs(b).max()):
        raise InvariantViolation("horospheres are not on one vertical line")
    return float(np.log(ratio))


@dataclass(frozen=True)
class TGHyperplane:
    """Totally geodesic hyperplane of C^n_+: horospheres through the point ``pole``."""
    pole: HPoint

    def contains(self, xi, tol=1e-9):
        return abs(mink_inner(self.pole.v, xi) + 1.0) <= tol

    def height(self, base_frame, z):
        """Graph height over the chart of ``base_frame``: t(z) = -log(-<p, L(1, z)>)."""
        z = np.asarray(z, dtype=float)
        v = np.concatenate([np.ones(z.shape[:-1] + (1,)), z], axis=-1) @ base_frame.T
        return -np.log(-mink_inner(self.pole.v, v))

    def project(self, xi):
        """Vertical projection of a horosphere onto this hyperplane."""
        xv = _arr(xi)
        return xv / (-mink_inner(self.pole.v, xv))


class ChartPhi:
    """The chart xi <-> (z, t) of C^n_+ based at ``x0``."""

    def __init__(self, x0, frame=None):
        self.x0 = x0 if isinstance(x0, HPoint) else HPoint(np.asarray(x0, dtype=float))
        self.frame = lorentz_frame(self.x0) if frame is None else np.asarray(frame, dtype=float)
        eta = form_matrix(self.frame.shape[0])
        self.frame_inv = eta @ self.frame.T @ eta

    def __call__(self, xi):
        """(z, t) with z unit in R^n and t the vertical coordinate."""
        c = np.asarray(_arr(xi), dtype=float) @ self.frame_inv.T
        t = np.log(c[..., 0])
        return c[..., 1:] / c[..., :1], t

    def inverse(self, z, t):
        z = np.asarray(z, dtype=float)
        t = np.asarray(t, dtype=float)
        v = np.concatenate([np.ones(z.shape[:-1] + (1,)), z], axis=-1) @ self.frame.T
        return np.exp(t)[..., None] * v


class GraphSurface:
    """The space-like hypersurface z -> e^{u(z)} L (1, z) of C^n_+."""

    def __init__(self, base, u, frame=None):
        self.base = base if isinstance(base, HPoint) else HPoint(np.asarray(base, dtype=float))
        self.u = u
        self.frame = lorentz_frame(self.base) if frame is None else np.asarray(frame, dtype=float)

    @property
    def n(self):
        return self.base.n

    def point(self, z):
        z = np.asarray(z, dtype=float)
        U = self.u.value(z)
        v = np.concatenate([np.ones(z.shape[:-1] + (1,)), z], axis=-1) @ self.frame.T
        return np.exp(U)[..., None] * v

    def horosphere(self, z):
        return Horosphere(self.point(z))

    def local(self, s, y):
        """(xi, d xi) at offset y of the stereographic chart centred at s."""
        sig, dsig, _ = SphereChart(s).jet(y)
        U, grad, _ = self.u.jet(sig)
        v = self.frame[:, 0] + self.frame[:, 1:] @ sig
        du = dsig @ grad
        dv = dsig @ self.frame[:, 1:].T
        eU = np.exp(U)
        return eU * v, eU * (du[:, None] * v[None, :] + dv)


def tangent_pole(xi, dxi):
    """Pole p of the totally geodesic hyperplane tangent to a space-like hypersurface.

    Solves <p, xi> = -1, <p, d_i xi> = 0. The solution set is the line
    p0 + lambda xi, and because xi is null, <p, p> = -1 is linear in
    lambda, so the hyperboloid meets it exactly once.
    """
    xi = np.asarray(xi, dtype=float)
    dxi = np.atleast_2d(np.asarray(dxi, dtype=float))
    eta = form_matrix(xi.size)
    A = np.vstack([xi, dxi]) @ eta
    b = np.zeros(A.shape[0])
    b[0] = -1.0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateInput("tangent data is degenerate (not an immersion)")
    p0 = np.linalg.lstsq(A, b, rcond=None)[0]
    lam = 0.5 * (mink_norm2(p0) + 1.0)
    p = p0 + lam * xi
    if p[0] <= 0:
        raise DegenerateInput("tangent hyperplane pole is on the past sheet")
    return p


def tangent_hyperplane(g, s):
    """Totally geodesic hyperplane of C^n_+ tangent to the graph ``g`` at direction ``s``."""
    xi, dxi = g.local(s, np.zeros(g.n - 1))
    return TGHyperplane(HPoint(tangent_pole(xi, dxi)))


def normalized_factor(g, s, plane=None):
    """The factor u_s = u - t_p, where t_p is the height of the tangent hyperplane at s.

    Returned as a :class:`ConformalFactor` (a sum of ``g.u`` and a
    log-affine term), so u_s(s) = 0 and du_s(s) = 0.
    """
    plane = tangent_hyperplane(g, s) if plane is None else plane
    eta = form_matrix(g.n + 1)
    c = eta @ g.frame.T @ eta @ plane.pole.v      # pole in frame coordinates
    # -<p, L(1, z)> = c0 - c_sp . z
    return NormalizedFactor(g.u, LogAffine(c[0], c[1:]), plane.pole)


class NormalizedFactor(Sum):
    """u - t_p; keeps the pole of the tangent hyperplane it was built from."""
    tag = "normalized"

    def __init__(self, u, log_term, pole):
        super().__init__([u, log_term])
        self.pole = pole


@dataclass(frozen=True)
class StarForms:
    Istar: np.ndarray
    IIstar: np.ndarray
    Bstar: np.ndarray
    kstar: np.ndarray
    direction: np.ndarray


def _eig_relative(I, S):
    L = np.linalg.cholesky(I)
    Li = np.linalg.inv(L)
    return np.sort(np.linalg.eigvalsh(Li @ S @ Li.T))


def star_forms(g, s):
    """I*, II*, B* of the graph at direction ``s`` (chart centred at s).

    II* is the Hessian at s of the normalized factor u - t_p. At that
    point u - t_p is critical, so its covariant Hessian does not depend
    on the conformal factor of the metric and equals the plain
    coordinate Hessian.
    """
    s = np.asarray(s, dtype=float)
    m = g.n - 1
    ux = normalized_factor(g, s)
    sig, dsig, _ = SphereChart(s).jet(np.zeros(m))
    U, _, hess = g.u.jet(sig)
    _, _, hx = ux.jet(sig)
    Istar = np.exp(2 * U) * (dsig @ dsig.T)
    IIstar = dsig @ hx @ dsig.T
    IIstar = 0.5 * (IIstar + IIstar.T)
    Bstar = np.linalg.solve(Istar, IIstar)
    if not np.all(np.isfinite(IIstar)):
        raise DegenerateInput("non-finite Hessian")
    return StarForms(Istar, IIstar, Bstar, _eig_relative(Istar, IIstar), s)


def star_tensor(u, z):
    """Closed form of II* as an ambient tangential matrix, batched over z.

    II* = Hess u - du (x) du + 1/2 (e^{2u} + |du|^2 - 1) can, the Hessian
    of the normalized factor written through the jet of u alone.
    Returns (e^{2u}, II*).
    """
    z = np.asarray(z, dtype=float)
    U, grad, hess = u.jet(z)
    g2 = np.sum(grad * grad, axis=-1)
    e2u = np.exp(2 * U)
    P = np.eye(z.shape[-1]) - z[..., :, None] * z[..., None, :]
    II = (hess - grad[..., :, None] * grad[..., None, :]
          + 0.5 * (e2u + g2 - 1.0)[..., None, None] * P)
    return e2u, II


def star_coordinates(u, chart, y):
    """(I*, II*) as coordinate matrices at offset y of ``chart``."""
    sig, dsig, _ = chart.jet(y)
    e2u, II = star_tensor(u, sig)
    return e2u * (dsig @ dsig.T), dsig @ II @ dsig.T


def classify_star(sf, eps=STAR_EPS):
    """tamely_convex (all k* in (eps, 1-eps)), convex (all k* > eps) or neither."""
    k = np.asarray(sf.kstar)
    if np.all(k > eps) and np.all(k < 1.0 - eps):
        return "tamely_convex"
    if np.all(k > eps):
        return "convex"
    return "neither"


@dataclass(frozen=True)
class CurvatureStar:
    R: np.ndarray            # R[i, j, k] = R*(e_i, e_j) e_k in chart coordinates
    sectionals: np.ndarray   # K*(e_a, e_b), a < b, in a B* eigenframe
    pairs: tuple
    frame: np.ndarray        # I*-orthonormal eigenvectors of B* (columns)
    kstar: np.ndarray
    Kstar: float             # 1 - tr B*, only meaningful for n = 3
    codazzi_defect: float


def gauss_curvature_tensor(Istar, IIstar, Bstar):
    """R*(X,Y)Z = R0 + II*(X,Z)Y - II*(Y,Z)X - I*(Y,Z)B*X + I*(X,Z)B*Y.

    R0 is the unit-curvature tensor of the tangent totally geodesic
    hyperplane, whose metric agrees with I* at the point.
    """
    m = Istar.shape[0]
    E = np.eye(m)
    R = np.zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                R[i, j, k] = (Istar[j, k] * E[i] - Istar[i, k] * E[j]
                              + IIstar[i, k] * E[j] - IIstar[j, k] * E[i]
                              - Istar[j, k] * Bstar[:, i] + Istar[i, k] * Bstar[:, j])
    return R


def _sectional_from_R(R, g, X, Y):
    RXYY = np.einsum("ijka,i,j,k->a", R, X, Y, Y)
    return (X @ g @ RXYY) / ((X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2)


def codazzi_defect(u, s, h=CODAZZI_STEP):
    """max_{i<j} |(D*_i B*) e_j - (D*_j B*) e_i|_{I*} at direction s."""
    if h <= 1e-8:
        raise StepUnderflow("codazzi finite-difference step too small")
    s = np.asarray(s, dtype=float)
    chart = SphereChart(s)
    m = chart.dim

    def bstar(y):
        Is, IIs = star_coordinates(u, chart, y)
        return np.linalg.solve(Is, IIs)

    B0 = bstar(np.zeros(m))
    dB = fd_derivative(bstar, np.zeros(m), h)          # dB[c, a, b] = d_c B^a_b
    _, dsig, _ = chart.jet(np.zeros(m))
    U, grad, _ = u.jet(s)
    du = dsig @ grad
    E = np.eye(m)
    # Christoffel symbols of e^{2u} g_chart at the chart centre (g_chart = E, dg = 0)
    G = (E[:, :, None] * du[None, None, :] + E[:, None, :] * du[None, :, None]
         - E[None, :, :] * du[:, None, None])          # G[a, b, c] = Gamma^a_{bc}
    worst = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            C = dB[i][:, j] - dB[j][:, i] + G[:, i, :] @ B0[:, j] - G[:, j, :] @ B0[:, i]
            worst = max(worst, float(np.exp(U) * np.linalg.norm(C)))
    return worst


def curvature_star(g, s, codazzi_step=CODAZZI_STEP):
    """Curvature of the induced metric I* at direction ``s`` via the Gauss formula."""
    sf = star_forms(g, s)
    R = gauss_curvature_tensor(sf.Istar, sf.IIstar, sf.Bstar)
    m = sf.Istar.shape[0]
    Lc = np.linalg.cholesky(sf.Istar)
    Li = np.linalg.inv(Lc)
    w, V = np.linalg.eigh(Li @ sf.IIstar @ Li.T)
    frame = Li.T @ V                          # I*-orthonormal eigenvectors of B*
    pairs = tuple((a, b) for a in range(m) for b in range(a + 1, m))
    sec = np.array([_sectional_from_R(R, sf.Istar, frame[:, a], frame[:, b]) for a, b in pairs])
    return CurvatureStar(R, sec, pairs, frame, w, float(1.0 - np.trace(sf.Bstar)),
                         codazzi_defect(g.u, s, codazzi_step))


def cone_embed(xi):
    """Isometric inclusion of the light cone into the de Sitter quadric of R^{n+1,1}.

    xi -> q0 + iota(xi) with q0 the extra unit spacelike axis, so the
    image satisfies <., .> = 1 and differentials are unchanged.
    """
    xv = _arr(xi)
    out = np.zeros(xv.shape[:-1] + (xv.shape[-1] + 1,))
    out[..., :-1] = xv
    out[..., -1] = 1.0
    return out


def horo_isometry(g, xi):
    """Linear action of an isometry of H^n on a horosphere."""
    return Horosphere(g(_arr(xi)))


@dataclass(frozen=True)
class BoundaryConformalReport:
    directions: np.ndarray
    factor: np.ndarray          # length-scale factor measured by finite differences
    factor_exact: np.ndarray    # 1 / (-<pole, g xi>)
    anisotropy: np.ndarray      # (max - min) / mean of the pulled-back metric eigenvalues

    @property
    def max_anisotropy(self):
        return float(np.max(self.anisotropy)) if self.anisotropy.size else 0.0


def boundary_conformal_report(g, plane, directions, tol=1e-8, h=1e-4):
    """g followed by vertical projection back onto ``plane``, as a map of the hyperplane.

    The hyperplane is parametrized by its round chart z -> L_p (1, z);
    the pulled-back metric of the composed map is measured by finite
    differences and must be a multiple of the round metric.
    """
    L = lorentz_frame(plane.pole)
    p = plane.pole.v
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    factors, exact, aniso = [], [], []
    for z in directions:
        chart = SphereChart(z)

        def mapped(y):
            v = g(L[:, 0] + L[:, 1:] @ chart.point(y))
            return v / (-mink_inner(p, v))

        J = fd_derivative(mapped, np.zeros(chart.dim), h)
        G = mink_inner(J[:, None, :], J[None, :, :])
        ev = np.linalg.eigvalsh(G)
        mean = ev.mean()
        factors.append(np.sqrt(mean))
        aniso.append((ev.max() - ev.min()) / mean)
        exact.append(1.0 / (-mink_inner(p, g(L[:, 0] + L[:, 1:] @ z))))
    rep = BoundaryConformalReport(directions, np.array(factors), np.array(exact), np.array(aniso))
    if rep.max_anisotropy > tol:
        raise InvariantViolation(f"boundary map is not conformal (anisotropy {rep.max_anisotropy:.2e})")
    return rep
