"""Conformal metrics h = e^{2u} can on S^{n-1} and their admissibility.

h is the horospherical metric of an H-convex sphere exactly when, at
every point, the normalized factor u_x has a positive definite Hessian
(eigenvalues measured against h). Those eigenvalues are the principal
curvatures k* of the graph of u in C^n_+; the window (0, 1) singles out
the convex spheres. For n >= 4 the same numbers come out of the Ricci
tensor of h, which gives an independent second route.
"""

from dataclasses import dataclass

import numpy as np

from .duality import dualize, envelope_family
from .errors import DimensionTooSmall, EmptyInput, NotAdmissible, RouteMismatch
from .factors import constant_value, is_constant
from .horospace import GraphSurface, normalized_factor, star_tensor
from .hypersurface import geodesic_sphere
from .lorentz import HPoint
from .sphere import SphereChart, sphere_grid, tangent_basis

ADMISSIBLE_EPS = 1e-9
ROUTE_TOL = 1e-6


@dataclass(frozen=True)
class CurvatureData:
    ric: np.ndarray       # ric_h in the h-orthonormal frame below
    S_scalar: float
    frame: np.ndarray     # columns: h-orthonormal tangent vectors at s (ambient R^n)


def _conformal_tensors(u, z):
    """Batched jet of u in a can-orthonormal tangent basis F (columns) at each z.

    Returns (U, e^{2u}, Hess u, du, |du|^2, Laplacian, F).
    """
    z = np.asarray(z, dtype=float)
    U, grad, hess = u.jet(z)
    F = tangent_basis(z)
    Hf = np.swapaxes(F, -1, -2) @ hess @ F
    gf = np.einsum("...ia,...i->...a", F, grad)
    g2 = np.sum(gf * gf, axis=-1)
    lap = np.trace(Hf, axis1=-2, axis2=-1)
    return U, np.exp(2 * U), Hf, gf, g2, lap, F


def _ricci_batch(u, z):
    """ric_h (h-orthonormal components, basis F e^{-u}) and S_h, batched."""
    U, e2u, Hf, gf, g2, lap, F = _conformal_tensors(u, z)
    m = F.shape[-1]
    E = np.eye(m)
    Ric = ((m - 1) * E - (m - 2) * (Hf - gf[..., :, None] * gf[..., None, :])
           - (lap + (m - 2) * g2)[..., None, None] * E)
    ric = Ric / e2u[..., None, None]
    S = (m * (m - 1) - 2 * (m - 1) * lap - (m - 2) * (m - 1) * g2) / e2u
    return ric, S, F, U


def conformal_curvature(u, s):
    """Ricci tensor and scalar curvature of e^{2u} can at the unit vector ``s``.

    The returned frame is h-orthonormal and diagonalizes ric.
    """
    s = np.asarray(s, dtype=float)
    if s.size < 3:
        raise DimensionTooSmall("need n >= 3")
    ric, S, F, U = _ricci_batch(u, s)
    w, V = np.linalg.eigh(0.5 * (ric + ric.T))
    return CurvatureData(np.diag(w), float(S), np.exp(-U) * (F @ V))


def conformal_sectional(u, s, X, Y):
    """Sectional curvature of e^{2u} can on the plane of tangent vectors X, Y at s."""
    s = np.asarray(s, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    U, grad, hess = u.jet(s)
    T = hess - np.outer(grad, grad) + 0.5 * (grad @ grad) * (np.eye(s.size) - np.outer(s, s))
    # orthonormalize in can, the sectional does not depend on the basis
    a = X / np.linalg.norm(X)
    b = Y - (Y @ a) * a
    b /= np.linalg.norm(b)
    return float(np.exp(-2 * U) * (1.0 - a @ T @ a - b @ T @ b))


def principal_from_ricci(cd, n):
    """k*_i from ric_h and S_h; needs n >= 4 and a frame diagonalizing ric."""
    if n < 4:
        raise DimensionTooSmall("the Ricci route divides by n - 3; use the Hessian route",
                                n=n)
    d = np.diagonal(cd.ric, axis1=-2, axis2=-1)
    S = np.asarray(cd.S_scalar)[..., None]
    return np.sort((S - 2 * (n - 2) * d) / (2 * (n - 2) * (n - 3)) + 0.5, axis=-1)


def hessian_kstar(u, z):
    """Eigenvalues of Hess(u_x) at x with respect to h, batched over unit z."""
    z = np.asarray(z, dtype=float)
    e2u, II = star_tensor(u, z)
    F = tangent_basis(z)
    IIf = np.swapaxes(F, -1, -2) @ II @ F
    return np.linalg.eigvalsh(IIf) / e2u[..., None]


def normalized_kstar(u, s):
    """Same eigenvalues, computed from the Hessian of the explicit normalized factor."""
    s = np.asarray(s, dtype=float)
    g = GraphSurface(HPoint.origin(s.size), u)
    ux = normalized_factor(g, s)
    chart = SphereChart(s)
    sig, dsig, _ = chart.jet(np.zeros(chart.dim))
    U = u.value(s)
    _, _, hx = ux.jet(sig)
    return np.linalg.eigvalsh(dsig @ hx @ dsig.T) / np.exp(2 * U)


@dataclass(frozen=True)
class AdmissibilityReport:
    n: int
    kstar: np.ndarray            # (samples, n-1), sorted per sample
    klass: str                   # H_admissible | C_admissible | neither | boundary
    h_margin: float              # min k*
    c_margin: float              # min over samples of min(k*, 1 - k*)
    worst_sample: np.ndarray
    worst_index: int
    sectional_range: tuple       # (min, max) sectional curvature of h on the grid
    form_range: tuple = None     # range of 2 ric - S/(n-2) h - (n-3) h, can components
    window_range: tuple = None   # range of 2(n-2) ric - S h, h-orthonormal frame
    route_gap: float = None      # max |Hessian route - Ricci route|

    @property
    def h_admissible(self):
        return self.klass in ("H_admissible", "C_admissible")

    @property
    def c_admissible(self):
        return self.klass == "C_admissible"

    def describe(self):
        k = self.kstar[self.worst_index]
        return (f"{self.klass}: Hessian eigenvalues {np.array2string(k, precision=9)} "
                f"at sample {np.array2string(self.worst_sample, precision=6)}")

    def to_dict(self):
        out = {"class": self.klass, "h_margin": self.h_margin, "c_margin": self.c_margin,
               "worst_sample": self.worst_sample.tolist(), "samples": int(len(self.kstar)),
               "kstar_min": float(self.kstar.min()), "kstar_max": float(self.kstar.max()),
               "sectional_range": list(self.sectional_range)}
        if self.route_gap is not None:
            out.update(form_range=list(self.form_range), window_range=list(self.window_range),
                       route_gap=self.route_gap)
        return out


def _classify(k, eps):
    lo = k.min()
    if lo > eps:
        return "C_admissible" if k.max() < 1.0 - eps else "H_admissible"
    if lo >= -eps:
        return "boundary"
    return "neither"


def admissibility_test(u, grid, n=None, eps=ADMISSIBLE_EPS, route_tol=ROUTE_TOL):
    """Sample-based admissibility certificate of e^{2u} can on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise EmptyInput("empty sample grid")
    grid = np.atleast_2d(grid)
    n = grid.shape[-1] if n is None else n
    k = np.sort(hessian_kstar(u, grid), axis=-1)
    per_sample = k.min(axis=-1)
    worst = int(np.argmin(per_sample))
    m = n - 1
    iu = np.triu_indices(m, 1)
    pair = 1.0 - k[:, iu[0]] - k[:, iu[1]]
    extra = {}
    if n >= 4:
        ric, S, _, U = _ricci_batch(u, grid)
        w = np.linalg.eigvalsh(0.5 * (ric + np.swapaxes(ric, -1, -2)))
        kr = principal_from_ricci(CurvatureData(w[..., :, None] * np.eye(m), S, None), n)
        gap = float(np.abs(kr - k).max())
        if gap > route_tol:
            raise RouteMismatch("Hessian and Ricci routes disagree", gap=gap)
        # the form in can components, the window in the h-orthonormal frame
        form = (2 * w - (S / (n - 2))[:, None] - (n - 3)) * np.exp(2 * U)[:, None]
        window = 2 * (n - 2) * w - S[:, None]
        extra = dict(form_range=(float(form.min()), float(form.max())),
                     window_range=(float(window.min()), float(window.max())), route_gap=gap)
    return AdmissibilityReport(
        n, k, _classify(k, eps), float(per_sample.min()),
        float(np.minimum(k, 1.0 - k).min()), grid[worst], worst,
        (float(pair.min()), float(pair.max())) if m > 1 else (0.0, 0.0), **extra)


def default_grid(n, size=None):
    return sphere_grid(n, size)


def reconstruct_surface(u, x0, grid=None, report=None):
    """The H-convex sphere whose horospherical metric is e^{2u} can.

    Constant factors give the geodesic sphere of that radius directly;
    anything else is the envelope of the graph of u. Raises NotAdmissible
    (with the worst sample) unless the factor is H-admissible on ``grid``.
    """
    x0 = x0 if isinstance(x0, HPoint) else HPoint(np.asarray(x0, dtype=float))
    if report is None:
        report = admissibility_test(u, default_grid(x0.n) if grid is None else grid, x0.n)
    if not report.h_admissible:
        raise NotAdmissible(report.describe(), worst_sample=report.worst_sample.tolist(),
                            klass=report.klass, margin=report.h_margin)
    if is_constant(u):
        fam = geodesic_sphere(x0, constant_value(u))
    else:
        fam = envelope_family(GraphSurface(x0, u))
    fam.extra["admissibility"] = report
    return fam


def roundtrip_check(u, x0, grid, report=None):
    """max over ``grid`` of |I* - e^{2u} can| / |e^{2u} can| for the reconstruction."""
    fam = reconstruct_surface(u, x0, grid=grid, report=report)
    worst = 0.0
    for s in np.atleast_2d(grid):
        jet = fam.jet(s)
        _, dsig, _ = SphereChart(s).jet(np.zeros(fam.n - 1))
        want = np.exp(2 * u.value(s)) * (dsig @ dsig.T)
        got = dualize(jet).Istar_pullback
        worst = max(worst, float(np.abs(got - want).max() / np.abs(want).max()))
    return worst


__all__ = [
    "CurvatureData", "conformal_curvature", "conformal_sectional", "principal_from_ricci",
    "hessian_kstar", "normalized_kstar", "normalized_factor", "AdmissibilityReport",
    "admissibility_test", "default_grid", "reconstruct_surface", "roundtrip_check",
]
