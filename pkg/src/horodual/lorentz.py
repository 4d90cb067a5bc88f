"""Minkowski linear algebra and the hyperboloid model of H^n.

Vectors of R^{n,1} are plain float arrays of length n+1 with the timelike
coordinate first; the bilinear form is

    <u, v> = -u0 v0 + u1 v1 + ... + un vn.

Points of H^n, points of the de Sitter sphere and horospheres get thin
validated wrappers (:class:`HPoint`, :class:`DeSitterPoint`,
:class:`Horosphere`). A horosphere is the future null vector ``xi`` with
surface ``{x : <x, xi> = -1}``; multiplying ``xi`` by ``e^t`` moves the
horosphere a distance ``t`` towards its ideal point.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, InvariantViolation

TOL = 1e-10
TANGENT_TOL = 1e-8


def _arr(obj):
    for attr in ("v", "xi"):
        if hasattr(obj, attr):
            return getattr(obj, attr)
    return np.asarray(obj, dtype=float)


def form_matrix(dim):
    """The Gram matrix diag(-1, 1, ..., 1) of size ``dim``."""
    eta = np.eye(dim)
    eta[0, 0] = -1.0
    return eta


def mink_inner(u, v):
    """Minkowski product, broadcasting over leading axes."""
    u = _arr(u)
    v = _arr(v)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionMismatch(
            f"vectors of length {u.shape[-1]} and {v.shape[-1]}")
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def mink_norm2(u):
    return mink_inner(u, u)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HPoint:
    """A point of the upper sheet <x, x> = -1, x0 > 0."""
    v: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if v.ndim != 1 or v.size < 3:
            raise DimensionMismatch("HPoint needs a vector of length n+1 >= 3")
        if not np.all(np.isfinite(v)):
            raise InvariantViolation("non-finite coordinates")
        q = mink_norm2(v)
        if abs(q + 1.0) > TOL * max(1.0, v[0] ** 2) or v[0] <= 0:
            raise InvariantViolation(
                f"not on the hyperboloid: <x,x> = {q!r}, x0 = {v[0]!r}")
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.v.size - 1

    @classmethod
    def origin(cls, n):
        v = np.zeros(n + 1)
        v[0] = 1.0
        return cls(v)

    @classmethod
    def project(cls, v):
        """Rescale a future timelike vector onto the hyperboloid."""
        v = np.asarray(v, dtype=float)
        q = mink_norm2(v)
        if q >= 0 or v[0] <= 0:
            raise InvariantViolation("vector is not future timelike")
        return cls(v / np.sqrt(-q))


@dataclass(frozen=True)
class DeSitterPoint:
    """A unit spacelike vector, <v, v> = 1."""
    v: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if not np.all(np.isfinite(v)):
            raise InvariantViolation("non-finite coordinates")
        q = mink_norm2(v)
        if abs(q - 1.0) > TOL * max(1.0, v[0] ** 2):
            raise InvariantViolation(f"not unit spacelike: <v,v> = {q!r}")
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class Horosphere:
    """A future-pointing null vector standing for the horosphere <x, xi> = -1."""
    xi: np.ndarray

    def __post_init__(self):
        xi = _frozen(self.xi)
        if not np.all(np.isfinite(xi)):
            raise InvariantViolation("non-finite coordinates")
        q = mink_norm2(xi)
        if abs(q) > TOL * max(1.0, xi[0] ** 2) or xi[0] <= 0:
            raise InvariantViolation(
                f"not future null: <xi,xi> = {q!r}, xi0 = {xi[0]!r}")
        object.__setattr__(self, "xi", xi)

    @property
    def n(self):
        return self.xi.size - 1

    def scaled(self, t):
        """The horosphere moved a distance ``t`` along its pencil."""
        return Horosphere(np.exp(t) * self.xi)

    def contains(self, x, tol=1e-9):
        return abs(mink_inner(x, self.xi) + 1.0) <= tol


# ---------------------------------------------------------------------------
# metric geometry


def hdist(x, y):
    """Hyperbolic distance arccosh(-<x, y>).

    Close points go through 2 asinh(|x - y| / 2) instead, since arccosh
    is ill-conditioned near 1 and the difference x - y cancels for far ones.
    """
    x, y = _arr(x), _arr(y)
    c = -mink_inner(x, y)
    d = x - y
    q = np.maximum(mink_inner(d, d), 0.0)     # <x - y, x - y> = 4 sinh^2(dist / 2)
    near = 2.0 * np.arcsinh(0.5 * np.sqrt(q))
    return np.where(c < 2.0, near, np.arccosh(np.maximum(c, 1.0)))[()]


def geodesic_point(x, w, t):
    """exp_x(t w) for a unit tangent vector ``w`` at ``x``."""
    xv = _arr(x)
    w = np.asarray(w, dtype=float)
    if abs(mink_norm2(w) - 1.0) > TANGENT_TOL or abs(mink_inner(xv, w)) > TANGENT_TOL:
        raise InvariantViolation("direction must be unit and orthogonal to x")
    return HPoint(np.cosh(t) * xv + np.sinh(t) * w)


def busemann(xi, x):
    """Busemann value -log(-<x, xi>); zero exactly on the horosphere."""
    return -np.log(-mink_inner(x, xi))


def tangent_project(x, v):
    """Orthogonal projection of ``v`` onto T_x H^n."""
    xv = _arr(x)
    return v + np.asarray(mink_inner(v, xv))[..., None] * xv


def lorentz_frame(x):
    """The pure boost ``L`` with ``L e0 = x``.

    Columns 1..n form an orthonormal basis of x^perp, so ``L`` is the
    canonical frame used for charts based at ``x``.
    """
    xv = _arr(x)
    n1 = xv.size
    L = np.empty((n1, n1))
    xs = xv[1:]
    L[0, 0] = xv[0]
    L[0, 1:] = xs
    L[1:, 0] = xs
    L[1:, 1:] = np.eye(n1 - 1) + np.outer(xs, xs) / (1.0 + xv[0])
    return L


# ---------------------------------------------------------------------------
# ball models


def to_poincare(x):
    xv = _arr(x)
    return xv[..., 1:] / (1.0 + xv[..., :1])


def from_poincare(b):
    b = np.asarray(b, dtype=float)
    r2 = np.sum(b * b, axis=-1, keepdims=True)
    if np.any(r2 >= 1.0):
        raise InvariantViolation("Poincare ball point with norm >= 1")
    return np.concatenate([1.0 + r2, 2.0 * b], axis=-1) / (1.0 - r2)


def to_klein(x):
    xv = _arr(x)
    return xv[..., 1:] / xv[..., :1]


def from_klein(k):
    k = np.asarray(k, dtype=float)
    r2 = np.sum(k * k, axis=-1, keepdims=True)
    if np.any(r2 >= 1.0):
        raise InvariantViolation("Klein ball point with norm >= 1")
    return np.concatenate([np.ones_like(r2), k], axis=-1) / np.sqrt(1.0 - r2)


def model_convert(x, target):
    """Hyperboloid point(s) to ball coordinates, ``target`` in {poincare, klein}."""
    if target == "poincare":
        return to_poincare(x)
    if target == "klein":
        return to_klein(x)
    raise ValueError(f"unknown model {target!r}")


def model_inverse(b, source):
    if source == "poincare":
        return from_poincare(b)
    if source == "klein":
        return from_klein(b)
    raise ValueError(f"unknown model {source!r}")


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    matrix: np.ndarray
    kind: str = "composite"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        M = _frozen(self.matrix)
        dim = M.shape[0]
        if M.shape != (dim, dim):
            raise DimensionMismatch("isometry matrix must be square")
        eta = form_matrix(dim)
        scale = max(1.0, float(np.max(np.abs(M))) ** 2)
        defect = np.max(np.abs(M.T @ eta @ M - eta))
        if defect > TOL * scale:
            raise InvariantViolation(f"matrix does not preserve the form ({defect:.2e})")
        if M[0, 0] <= 0:
            raise InvariantViolation("isometry must preserve the future cone")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self):
        return self.matrix.shape[0] - 1

    @property
    def preserves_orientation(self):
        return bool(np.linalg.det(self.matrix) > 0)

    def __call__(self, v):
        """Linear action on vectors (rows of a batch)."""
        v = _arr(v)
        return v @ self.matrix.T

    def __matmul__(self, other):
        return Isometry(self.matrix @ other.matrix, "composite")

    def inverse(self):
        eta = form_matrix(self.n + 1)
        return Isometry(eta @ self.matrix.T @ eta, self.kind)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n + 1), "composite")


def _plane_rotation(dim, a, b, cos_t, sin_t, coef_a, coef_b):
    # v -> v + (ca (c-1) - cb s) a + (ca s + cb (c-1)) b with ca = coef_a(v)
    M = np.eye(dim)
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        ca = coef_a(e)
        cb = coef_b(e)
        M[:, j] += (ca * (cos_t - 1) - cb * sin_t) * a + (ca * sin_t + cb * (cos_t - 1)) * b
    return M


def _gram_schmidt_tangent(x, vectors):
    """Minkowski-orthonormalize tangent vectors at ``x``."""
    out = []
    for v in vectors:
        w = tangent_project(x, np.asarray(v, dtype=float))
        for u in out:
            w = w - mink_inner(w, u) * u
        q = mink_norm2(w)
        if q <= 1e-14:
            raise DegenerateInput("tangent vectors are linearly dependent")
        out.append(w / np.sqrt(q))
    return out


def rotation(center, plane, angle):
    """Rotation by ``angle`` about ``center`` in the tangent 2-plane spanned by ``plane``."""
    c = _arr(center)
    u1, u2 = _gram_schmidt_tangent(c, plane)
    M = _plane_rotation(c.size, u1, u2, np.cos(angle), np.sin(angle),
                        lambda e: mink_inner(e, u1), lambda e: mink_inner(e, u2))
    return Isometry(M, "rotation", {"angle": angle})


def translation(point, direction, length):
    """Translation by ``length`` along the geodesic through ``point`` with tangent ``direction``."""
    x = _arr(point)
    (w,) = _gram_schmidt_tangent(x, [direction])
    ch, sh = np.cosh(length), np.sinh(length)
    dim = x.size
    M = np.eye(dim)
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        a = -mink_inner(e, x)
        b = mink_inner(e, w)
        M[:, j] += (a * (ch - 1) + b * sh) * x + (a * sh + b * (ch - 1)) * w
    return Isometry(M, "translation", {"length": length})


def translation_between(a, b, length=None):
    """Translation along the axis through HPoints ``a`` and ``b``.

    With ``length=None`` the translation moves ``a`` onto ``b``.
    """
    av, bv = _arr(a), _arr(b)
    d = hdist(av, bv)
    if d < 1e-12:
        raise DegenerateInput("axis endpoints coincide")
    w = (bv - np.cosh(d) * av) / np.sinh(d)
    return translation(av, w, d if length is None else length)


def parabolic(xi, shear):
    """Unipotent isometry fixing the horosphere ``xi`` pointwise on its line.

    Built as exp(A) with A y = <y, v> xi - <y, xi> v, which satisfies
    A xi = 0 and A^3 = 0, so the series stops after the quadratic term.
    """
    xiv = _arr(xi)
    v = np.asarray(shear, dtype=float)
    if abs(mink_inner(v, xiv)) > TANGENT_TOL * max(1.0, np.abs(xiv).max()):
        raise InvariantViolation("shear vector must be orthogonal to xi")
    if mink_norm2(v) <= 0:
        raise DegenerateInput("shear vector must be spacelike")
    eta = form_matrix(xiv.size)
    A = np.outer(xiv, eta @ v) - np.outer(v, eta @ xiv)
    M = np.eye(xiv.size) + A + 0.5 * A @ A
    return Isometry(M, "parabolic", {})


def extend_from_hyperplane(gamma, flag=+1, pole=None):
    """Extend an isometry of a totally geodesic hyperplane to H^n.

    ``gamma`` is an n x n matrix acting on H^{n-1} in the hyperplane's own
    coordinates; the hyperplane is ``pole^perp`` (default: last axis).
    Exactly two extensions exist; ``flag=+1`` returns the orientation
    preserving one, ``flag=-1`` the other.
    """
    g = np.asarray(gamma, dtype=float)
    n = g.shape[0]
    Isometry(g)  # validates gamma as an isometry of H^{n-1}
    if flag not in (1, -1):
        raise ValueError("flag must be +1 or -1")
    if pole is None:
        F = np.eye(n + 1)
    else:
        w = _arr(pole)
        if abs(mink_norm2(w) - 1.0) > TANGENT_TOL:
            raise InvariantViolation("pole must be unit spacelike")
        F = _frame_with_last(w)
    sign = flag * np.sign(np.linalg.det(g))
    D = np.zeros((n + 1, n + 1))
    D[:n, :n] = g
    D[n, n] = sign
    eta = form_matrix(n + 1)
    M = F @ D @ (eta @ F.T @ eta)
    return Isometry(M, "extension", {"flag": flag})


def _frame_with_last(w):
    """A Lorentz frame whose last column is the unit spacelike ``w``."""
    dim = w.size
    eta = form_matrix(dim)
    basis = np.eye(dim)
    # e0 projects to a timelike vector; the rest are spacelike
    frame = []
    for j in range(dim):
        v = basis[:, j].copy()
        for u in frame:
            v = v - (v @ eta @ u) / (u @ eta @ u) * u
        v = v - (v @ eta @ w) * w
        q = v @ eta @ v
        if abs(q) < 1e-8:
            continue
        frame.append(v / np.sqrt(abs(q)))
        if len(frame) == dim - 1:
            break
    F = np.column_stack(frame + [w])
    if F[0, 0] < 0:
        F[:, 0] *= -1
    return F


def make_isometry(kind, **params):
    """Dispatch to the named constructor: rotation, translation, parabolic, extension."""
    if kind == "rotation":
        return rotation(params["center"], params["plane"], params["angle"])
    if kind == "translation":
        if "endpoints" in params:
            a, b = params["endpoints"]
            return translation_between(a, b, params.get("length"))
        return translation(params["point"], params["direction"], params["length"])
    if kind == "parabolic":
        return parabolic(params["xi"], params["shear"])
    if kind == "extension":
        return extend_from_hyperplane(params["gamma"], params.get("flag", 1),
                                      params.get("pole"))
    raise ValueError(f"unknown isometry kind {kind!r}")


# ---------------------------------------------------------------------------
# invariant vertical lines


@dataclass(frozen=True)
class NullEigen:
    xi: np.ndarray          # future null eigenvector, normalized with xi0 = 1
    eigenvalue: float

    @property
    def fixes_horospheres(self):
        return abs(self.eigenvalue - 1.0) <= 1e-8


@dataclass(frozen=True)
class NullSpectrum:
    lines: tuple
    continuum: bool = False   # a whole sphere of ideal points is fixed

    @property
    def fixed_horosphere_lines(self):
        return tuple(e for e in self.lines if e.fixes_horospheres)


def _null_space(A, tol):
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol))
    return vt[rank:].T


def invariant_null_spectrum(g, tol=1e-7):
    """Future null eigenvectors of ``g``: its invariant vertical lines.

    Eigenvalue 1 means each horosphere on that line is fixed; any other
    eigenvalue means the line is invariant but moved along itself.
    """
    M = g.matrix if isinstance(g, Isometry) else np.asarray(g, dtype=float)
    dim = M.shape[0]
    eta = form_matrix(dim)
    scale = max(1.0, np.abs(M).max())
    lam = np.linalg.eigvals(M)
    cand = sorted(float(l.real) for l in lam if abs(l.imag) < 1e-6 * scale and l.real > 0)
    clusters = []
    for l in cand:
        if clusters and abs(l - clusters[-1][-1]) < 1e-5 * max(1.0, l):
            clusters[-1].append(l)
        else:
            clusters.append([l])
    lines = []
    continuum = False
    for cl in clusters:
        l0 = float(np.mean(cl))
        if abs(l0 - 1.0) < 1e-5:
            l0 = 1.0
        V = _null_space(M - l0 * np.eye(dim), tol * scale)
        if V.shape[1] == 0:
            continue
        Q = V.T @ eta @ V
        q, U = np.linalg.eigh(Q)
        neg = np.sum(q < -tol)
        zero = np.abs(q) <= tol
        if neg >= 1 and V.shape[1] >= 3:
            continuum = True
            continue
        if neg == 1 and V.shape[1] == 2:
            # Lorentzian plane: two null rays
            a = U[:, 0] * np.sqrt(1.0 / -q[0])
            b = U[:, 1] * np.sqrt(1.0 / q[1])
            for sgn in (1.0, -1.0):
                lines.append(_normalized_null(V @ (a + sgn * b), l0))
        elif neg == 0 and np.any(zero):
            for k in np.flatnonzero(zero):
                lines.append(_normalized_null(V @ U[:, k], l0))
    return NullSpectrum(tuple(lines), continuum)


def _normalized_null(v, eigenvalue):
    if v[0] < 0:
        v = -v
    return NullEigen(v / v[0], float(eigenvalue))
