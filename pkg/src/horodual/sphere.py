"""Charts, tangent frames and sample grids on the unit sphere S^{m} in R^{m+1}.

Charts are scaled stereographic projections centred at an arbitrary
point ``c``::

    sigma(y) = ((1 - |y|^2/4) c + F y) / (1 + |y|^2/4)

where the columns of ``F`` are an orthonormal basis of c^perp. At y = 0
the coordinate vectors are exactly the columns of ``F``, so the round
metric is the identity there. The charts at +e and -e form the usual
two-chart atlas; centring a chart at each sample keeps every sample at
the origin of its own chart.
"""

import numpy as np


def tangent_basis(c):
    """Orthonormal basis of c^perp as the columns of an (m+1, m) array.

    Batched over leading axes; built from a Householder reflection so it
    is smooth away from a single hemisphere boundary and exact to rounding.
    """
    c = np.asarray(c, dtype=float)
    dim = c.shape[-1]
    last = c[..., -1:]
    sgn = np.where(last >= 0, 1.0, -1.0)
    v = c.copy()
    v[..., -1:] += sgn
    vv = np.sum(v * v, axis=-1)[..., None, None]
    H = np.eye(dim) - 2.0 * v[..., :, None] * v[..., None, :] / vv
    # H e_last = -sgn c, so the other columns span c^perp
    return H[..., :, :-1]


class SphereChart:
    """Stereographic chart centred at the unit vector ``center``."""

    def __init__(self, center, basis=None):
        self.center = np.asarray(center, dtype=float)
        self.basis = tangent_basis(self.center) if basis is None else np.asarray(basis, dtype=float)

    @property
    def dim(self):
        return self.basis.shape[1]

    def point(self, y):
        y = np.asarray(y, dtype=float)
        q = 0.25 * np.dot(y, y)
        return ((1.0 - q) * self.center + self.basis @ y) / (1.0 + q)

    def jet(self, y):
        """(sigma, d sigma, d^2 sigma) with shapes (M,), (m, M), (m, m, M)."""
        y = np.asarray(y, dtype=float)
        m = self.dim
        c, F = self.center, self.basis
        q = 0.25 * np.dot(y, y)
        D = 1.0 + q
        A = (1.0 - q) * c + F @ y
        dA = -0.5 * y[:, None] * c[None, :] + F.T           # (m, M)
        dD = 0.5 * y                                          # (m,)
        d2A = -0.5 * np.eye(m)[:, :, None] * c[None, None, :]
        d2D = 0.5 * np.eye(m)
        sigma = A / D
        d1 = dA / D - np.outer(dD, A) / D ** 2
        d2 = (d2A / D
              - (dA[:, None, :] * dD[None, :, None] + dA[None, :, :] * dD[:, None, None]) / D ** 2
              - d2D[:, :, None] * A[None, None, :] / D ** 2
              + 2.0 * np.outer(dD, dD)[:, :, None] * A[None, None, :] / D ** 3)
        return sigma, d1, d2

    def metric(self, y):
        """Round metric in chart coordinates: |dy|^2 / (1 + |y|^2/4)^2."""
        y = np.asarray(y, dtype=float)
        return np.eye(self.dim) / (1.0 + 0.25 * np.dot(y, y)) ** 2


def fibonacci_sphere(count):
    """Low-discrepancy points on S^2 (golden-angle spiral)."""
    if count <= 0:
        return np.zeros((0, 3))
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def angle_grid(dim, per_axis):
    """Product grid in hyperspherical angles on S^{dim-1}: per_axis^(dim-1) points.

    Polar angles use midpoints of (0, pi) so no point sits on a pole.
    """
    if dim < 2 or per_axis <= 0:
        return np.zeros((0, dim))
    polar = np.pi * (np.arange(per_axis) + 0.5) / per_axis
    azim = 2.0 * np.pi * np.arange(per_axis) / per_axis
    axes = [polar] * (dim - 2) + [azim]
    mesh = np.meshgrid(*axes, indexing="ij")
    angles = np.stack([a.ravel() for a in mesh], axis=-1)
    pts = np.ones((angles.shape[0], dim))
    sin_prod = np.ones(angles.shape[0])
    for k in range(dim - 1):
        pts[:, k] = sin_prod * np.cos(angles[:, k])
        sin_prod = sin_prod * np.sin(angles[:, k])
    pts[:, dim - 1] = sin_prod
    return pts


def random_sphere(dim, count, rng):
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_grid(dim, size=None, rng=None):
    """Default sample grid on S^{dim-1}.

    ``size`` is a point count for S^2 (Fibonacci spiral, default 2000) and
    a per-axis resolution for higher spheres (default 32). With ``rng``
    a random uniform sample of ``size`` points is returned instead.
    """
    if rng is not None:
        return random_sphere(dim, size, rng)
    if dim == 3:
        return fibonacci_sphere(2000 if size is None else size)
    return angle_grid(dim, 32 if size is None else size)
