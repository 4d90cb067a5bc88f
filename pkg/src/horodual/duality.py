"""Duality between hypersurfaces of H^n and space-like hypersurfaces of C^n_+.

A hypersurface point x with unit normal N goes to the horosphere x + N
tangent to it. In the other direction a space-like graph goes to the
field of poles of its tangent totally geodesic hyperplanes (the
envelope); those poles are differentiated by finite differences.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvexityLost, DegenerateInput, DimensionTooSmall, DualSingular
from .horospace import GraphSurface, star_forms, tangent_pole
from .hypersurface import (ImmersionJet, SurfaceFamily, _sphere_sampler, classify_convexity,
                           forms_at, forms_batch, horospherical_metric_direct,
                           is_h_convex)
from .lorentz import DeSitterPoint, HPoint, Horosphere, mink_inner
from .numerics import DEFAULT_STEP, fd_derivative, fd_jet

SINGULAR_EPS = 1e-9


@dataclass(frozen=True)
class DualSample:
    jet: ImmersionJet
    phi: np.ndarray
    dphi: np.ndarray
    Istar_pullback: np.ndarray
    forms: object

    @property
    def horosphere(self):
        return Horosphere(self.phi)

    @property
    def rank(self):
        return int(np.linalg.matrix_rank(self.Istar_pullback, tol=1e-9))


def normal_derivative(jet, forms):
    """d_i N: the analytic one when the jet carries it, else B^T dx."""
    if jet.dnormal is not None:
        sign = 1.0 if mink_inner(jet.normal, forms.N) > 0 else -1.0
        return sign * jet.dnormal
    return forms.B.T @ jet.dx


def dualize(jet, forms=None):
    """The tangent horosphere phi = x + N and the pullback of g0 by phi."""
    forms = forms_at(jet) if forms is None else forms
    phi = jet.x + forms.N
    dphi = jet.dx + normal_derivative(jet, forms)
    G = mink_inner(dphi[:, None, :], dphi[None, :, :])
    return DualSample(jet, phi, dphi, 0.5 * (G + G.T), forms)


def dualize_batch(jb):
    """Vectorized :func:`dualize` on a :class:`JetBatch`: returns (phi, Istar_pullback)."""
    f = forms_batch(jb)
    if jb.dnormal is not None:
        sign = np.sign(np.einsum("nd,nd->n", jb.normal * _eta_diag(jb.x.shape[-1]), f.N))
        dN = sign[:, None, None] * jb.dnormal
    else:
        dN = np.swapaxes(f.B, -1, -2) @ jb.dx
    phi = jb.x + f.N
    dphi = jb.dx + dN
    G = (dphi * _eta_diag(phi.shape[-1])) @ np.swapaxes(dphi, -1, -2)
    return phi, 0.5 * (G + np.swapaxes(G, -1, -2))


def _eta_diag(dim):
    return np.r_[-1.0, np.ones(dim - 1)]


def weingarten_inversion(B, eps=SINGULAR_EPS):
    """B* = (E + B)^{-1}; raises DualSingular when some eigenvalue of B is -1."""
    B = np.asarray(B, dtype=float)
    ev = np.linalg.eigvals(B)
    if np.any(np.abs(ev + 1.0) <= eps):
        raise DualSingular("E + B is singular: a principal curvature equals -1",
                           eigenvalues=ev.real.tolist())
    return np.linalg.inv(np.eye(B.shape[0]) + B)


# ---------------------------------------------------------------------------
# envelopes


def _pole_jet(pole_at, y, normal_at, h):
    p, dp, d2p = fd_jet(pole_at, y, h)
    return ImmersionJet(np.asarray(y, float), p, dp, d2p, normal_at(p))


def envelope_point(g, s, h=DEFAULT_STEP, check=True):
    """Jet of the dual hypersurface of the graph ``g`` at direction ``s``.

    The point is the pole of the tangent hyperplane; its derivatives come
    from central differences (with one Richardson step) of the pole map in
    the chart centred at ``s``.
    """
    s = np.asarray(s, dtype=float)
    if check:
        sf = star_forms(g, s)
        if np.any(np.abs(sf.kstar) <= SINGULAR_EPS):
            raise DegenerateInput("B* is degenerate; the dual is not immersed here",
                                  kstar=sf.kstar.tolist())
    return _envelope_local(g, s, np.zeros(g.n - 1), h)


def _envelope_local(g, s, y, h):
    def pole_at(yy):
        return tangent_pole(*g.local(s, yy))

    xi_c, _ = g.local(s, y)
    return _pole_jet(pole_at, y, lambda p: xi_c - p, h)


def envelope_family(g, h=DEFAULT_STEP, tag="reconstructed"):
    """The dual of a graph as a :class:`SurfaceFamily` with finite-difference jets."""

    def local_jet(s, y):
        return _envelope_local(g, np.asarray(s, float), np.asarray(y, float), h)

    return SurfaceFamily(tag, {"base": g.base.v.tolist(), "factor": _describe(g.u)}, g.n,
                         local_jet, _sphere_sampler(g.n), True, {"graph": g})


def _describe(u):
    try:
        return u.to_dict()
    except NotImplementedError:
        return {"type": u.tag}


# ---------------------------------------------------------------------------
# conformality of the Gauss map


@dataclass(frozen=True)
class GaussConformality:
    ratios: np.ndarray        # eigenvalues of the pulled-back boundary metric relative to I*
    anisotropy: float         # (max - min) / mean


def gauss_map_conformality(family, point, base=None, h=1e-4):
    """Pull back the round boundary metric by the Gauss map and compare it with I*.

    The Gauss map x -> [x + N] is normalized into the horosphere section
    <., base> = -1 (a round sphere), differentiated by finite differences
    and its Minkowski pullback compared with the analytic I* at ``point``.
    """
    m = family.n - 1
    base = HPoint.origin(family.n) if base is None else base
    b = base.v if isinstance(base, HPoint) else np.asarray(base, dtype=float)

    def psi(y):
        jet = family.local_jet(point, y)
        phi = jet.x + forms_at(jet).N
        return phi / (-mink_inner(b, phi))

    J = fd_derivative(psi, np.zeros(m), h)
    P = mink_inner(J[:, None, :], J[None, :, :])
    Istar = dualize(family.jet(point)).Istar_pullback
    ratios = np.linalg.eigvals(np.linalg.solve(Istar, 0.5 * (P + P.T))).real
    return GaussConformality(np.sort(ratios), float((ratios.max() - ratios.min()) / ratios.mean()))


# ---------------------------------------------------------------------------
# de Sitter duality


@dataclass(frozen=True)
class DeSitterDual:
    point: DeSitterPoint
    dN: np.ndarray
    metric: np.ndarray        # <dN, dN>, the third fundamental form


def de_sitter_dual(jet, forms=None):
    forms = forms_at(jet) if forms is None else forms
    dN = normal_derivative(jet, forms)
    G = mink_inner(dN[:, None, :], dN[None, :, :])
    return DeSitterDual(DeSitterPoint(forms.N), dN, 0.5 * (G + G.T))


# ---------------------------------------------------------------------------
# moving tangent horospheres along their pencils


class AmbientConstant:
    def __init__(self, c):
        self.c = float(c)

    def jet(self, x):
        return self.c, np.zeros_like(np.asarray(x, dtype=float))


class AmbientLinear:
    """u(x) = c + a . x (Euclidean dot product on R^{n+1})."""

    def __init__(self, a, c=0.0):
        self.a = np.asarray(a, dtype=float)
        self.c = float(c)

    def jet(self, x):
        return self.c + float(self.a @ x), self.a.copy()


def equidistant_envelope(S, u, h=DEFAULT_STEP, validate=64, rng=None):
    """Move every tangent horosphere of ``S`` a distance u(x) and take the envelope.

    ``u`` is a number or an object with ``jet(x) -> (value, euclidean
    gradient)`` on R^{n+1}. The new graph is xi'(x) = e^{u(x)} (x + N(x));
    its dual is returned as a family over the chart of ``S``. Convexity of
    the new graph (strict H-convexity of the envelope) is re-validated on
    ``validate`` samples and a ConvexityLost error names the first failing
    one.
    """
    if np.isscalar(u):
        u = AmbientConstant(u)

    def graph_local(point, yy):
        jet = S.local_jet(point, yy)
        forms = forms_at(jet)
        phi = jet.x + forms.N
        dphi = jet.dx + normal_derivative(jet, forms)
        val, grad = u.jet(jet.x)
        du = jet.dx @ grad
        e = np.exp(val)
        return e * phi, e * (du[:, None] * phi[None, :] + dphi), jet, forms, val

    def local_jet(point, y):
        y = np.asarray(y, dtype=float)
        xi_c = graph_local(point, y)[0]
        return _pole_jet(lambda yy: tangent_pole(*graph_local(point, yy)[:2]), y,
                         lambda p: xi_c - p, h)

    def source_istar(point, y=None):
        y = np.zeros(S.n - 1) if y is None else y
        _, _, jet, forms, val = graph_local(point, y)
        return np.exp(2 * val) * horospherical_metric_direct(forms)

    fam = SurfaceFamily("envelope", {"source": S.tag, **S.params}, S.n, local_jet,
                        S.sampler, S.spherical, {"source": S, "shift": u,
                                                  "scaled_istar": source_istar})
    if validate:
        for point in S.samples(validate, rng):
            label = classify_convexity(forms_at(fam.jet(point)))
            if not is_h_convex(label):
                raise ConvexityLost("moved graph is no longer convex",
                                    sample=np.asarray(point).tolist(), label=label)
    return fam


# ---------------------------------------------------------------------------
# curvature relation in H^3


@dataclass(frozen=True)
class RelationReport:
    K: float
    H_mean: float
    Kstar_analytic: float
    Kstar_formula: float

    @property
    def discrepancy(self):
        return abs(self.Kstar_analytic - self.Kstar_formula)


def relation_check(jet, forms=None):
    """K* two ways: 1 - tr((E+B)^{-1}) and K / (K + 2H + 2)."""
    if jet.n != 3:
        raise DimensionTooSmall("the curvature relation is stated for surfaces in H^3")
    forms = forms_at(jet) if forms is None else forms
    Bstar = weingarten_inversion(forms.B)
    K = forms.K_gauss
    H = forms.H_mean
    return RelationReport(K, H, float(1.0 - np.trace(Bstar)), float(K / (K + 2 * H + 2)))


def induced_metric_from_star(sample_star, Bstar):
    """I(X, Y) = I*(B* X, B* Y), the metric of the envelope read off the graph."""
    return Bstar.T @ sample_star @ Bstar


__all__ = [
    "DualSample", "dualize", "dualize_batch", "weingarten_inversion", "envelope_point", "envelope_family",
    "GaussConformality", "gauss_map_conformality", "DeSitterDual", "de_sitter_dual", "equidistant_envelope", "AmbientConstant",
    "AmbientLinear", "RelationReport", "relation_check", "induced_metric_from_star",
    "GraphSurface", "HPoint",
]
