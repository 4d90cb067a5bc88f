"""Conformal factors u on the unit sphere S^{n-1} in R^n.

A factor is the restriction to the sphere of an ambient function U on
R^n. Subclasses supply U with its Euclidean gradient and Hessian; the
base class turns them into the intrinsic 2-jet at unit ``z``:

    grad u = P dU,     Hess u = P d2U P - (z . dU) P,     P = I - z z^T,

returned as ambient n-vectors / n x n matrices annihilating ``z``. All
methods broadcast over leading axes of ``z``.
"""

import numpy as np

from .errors import ConfigError


class ConformalFactor:
    tag = "abstract"

    def ambient(self, z):
        """(U, dU, d2U) at ``z`` of shape (..., n)."""
        raise NotImplementedError

    def value(self, z):
        return self.ambient(np.asarray(z, dtype=float))[0]

    def jet(self, z):
        z = np.asarray(z, dtype=float)
        U, dU, d2U = self.ambient(z)
        radial = np.sum(z * dU, axis=-1)
        P = np.eye(z.shape[-1]) - z[..., :, None] * z[..., None, :]
        grad = dU - radial[..., None] * z
        hess = P @ d2U @ P - radial[..., None, None] * P
        return U, grad, hess

    def __add__(self, other):
        return Sum([self, other])

    def to_dict(self):
        raise NotImplementedError


def _shape(z):
    return np.asarray(z).shape[:-1]


class Constant(ConformalFactor):
    tag = "constant"

    def __init__(self, c):
        self.c = float(c)

    def ambient(self, z):
        n = z.shape[-1]
        sh = _shape(z)
        return np.full(sh, self.c), np.zeros(sh + (n,)), np.zeros(sh + (n, n))

    def to_dict(self):
        return {"type": "constant", "c": self.c}


class Linear(ConformalFactor):
    """u(s) = <a, s>."""
    tag = "linear"

    def __init__(self, a):
        self.a = np.asarray(a, dtype=float)

    def ambient(self, z):
        n = z.shape[-1]
        sh = _shape(z)
        return z @ self.a, np.broadcast_to(self.a, sh + (n,)).copy(), np.zeros(sh + (n, n))

    def to_dict(self):
        return {"type": "linear", "a": self.a.tolist()}


class Quadratic(ConformalFactor):
    """u(s) = <Q s, s> for symmetric Q."""
    tag = "quadratic"

    def __init__(self, Q):
        Q = np.asarray(Q, dtype=float)
        self.Q = 0.5 * (Q + Q.T)

    def ambient(self, z):
        Qz = z @ self.Q
        sh = _shape(z)
        return (np.sum(Qz * z, axis=-1), 2.0 * Qz,
                np.broadcast_to(2.0 * self.Q, sh + self.Q.shape).copy())

    def to_dict(self):
        return {"type": "quadratic", "Q": self.Q.tolist()}


class Harmonic(ConformalFactor):
    """coef * Re(e^{-i phase} (z_i + i z_j)^degree), a spherical harmonic."""
    tag = "harmonic"

    def __init__(self, degree, coef=1.0, plane=(0, 1), phase=0.0):
        if degree < 1:
            raise ValueError("harmonic degree must be >= 1")
        self.degree = int(degree)
        self.coef = float(coef)
        self.plane = tuple(int(p) for p in plane)
        self.phase = float(phase)

    def ambient(self, z):
        i, j = self.plane
        k = self.degree
        n = z.shape[-1]
        sh = _shape(z)
        w = z[..., i] + 1j * z[..., j]
        rot = self.coef * np.exp(-1j * self.phase)
        f = rot * w ** k
        fp = rot * k * w ** (k - 1)
        fpp = rot * k * (k - 1) * w ** (k - 2) if k >= 2 else np.zeros_like(w)
        U = f.real
        dU = np.zeros(sh + (n,))
        # d/dz_i = f', d/dz_j = i f'
        dU[..., i] = fp.real
        dU[..., j] = (1j * fp).real
        d2U = np.zeros(sh + (n, n))
        d2U[..., i, i] = fpp.real
        d2U[..., j, j] = (-fpp).real
        d2U[..., i, j] = d2U[..., j, i] = (1j * fpp).real
        return U, dU, d2U

    def to_dict(self):
        return {"type": "harmonic", "degree": self.degree, "coef": self.coef,
                "plane": list(self.plane), "phase": self.phase}


class LogAffine(ConformalFactor):
    """u(s) = log(alpha - <a, s>), defined where the argument is positive."""
    tag = "log_affine"

    def __init__(self, alpha, a):
        self.alpha = np.asarray(alpha, dtype=float)
        self.a = np.asarray(a, dtype=float)

    def ambient(self, z):
        F = self.alpha - np.sum(self.a * z, axis=-1)
        dF = -np.broadcast_to(self.a, z.shape)
        U = np.log(F)
        dU = dF / F[..., None]
        d2U = -dU[..., :, None] * dU[..., None, :]
        return U, dU, d2U

    def to_dict(self):
        return {"type": "log_affine", "alpha": self.alpha.tolist(), "a": self.a.tolist()}


class Sum(ConformalFactor):
    tag = "sum"

    def __init__(self, terms):
        self.terms = list(terms)
        if not self.terms:
            raise ValueError("empty sum")

    def ambient(self, z):
        parts = [t.ambient(z) for t in self.terms]
        return tuple(sum(p[k] for p in parts) for k in range(3))

    def to_dict(self):
        return {"type": "sum", "terms": [t.to_dict() for t in self.terms]}


class Precomposed(ConformalFactor):
    """u(R^T s) for an orthogonal R: the factor moved by a round isometry."""
    tag = "precomposed"

    def __init__(self, factor, R):
        self.factor = factor
        self.R = np.asarray(R, dtype=float)

    def ambient(self, z):
        U, dU, d2U = self.factor.ambient(z @ self.R)
        return (U, dU @ self.R.T,
                np.einsum("ij,...jk,lk->...il", self.R, d2U, self.R))

    def to_dict(self):
        return {"type": "precomposed", "factor": self.factor.to_dict(),
                "R": self.R.tolist()}


def is_constant(u):
    if isinstance(u, Constant):
        return True
    if isinstance(u, Sum):
        return all(is_constant(t) for t in u.terms)
    return False


def constant_value(u):
    if isinstance(u, Constant):
        return u.c
    return sum(constant_value(t) for t in u.terms)


def factor_from_dict(d, n):
    """Build a factor from its JSON description; ``n`` is the ambient dimension."""
    try:
        kind = d["type"]
        if kind == "constant":
            return Constant(d["c"])
        if kind == "linear":
            a = np.asarray(d["a"], dtype=float)
            if a.shape != (n,):
                raise ConfigError(f"linear factor needs {n} coefficients")
            return Linear(a)
        if kind == "quadratic":
            Q = np.asarray(d["Q"], dtype=float)
            if Q.shape != (n, n):
                raise ConfigError(f"quadratic factor needs an {n}x{n} matrix")
            return Quadratic(Q)
        if kind == "harmonic":
            plane = d.get("plane", [0, 1])
            if len(plane) != 2 or plane[0] == plane[1] or max(plane) >= n or min(plane) < 0:
                raise ConfigError("harmonic plane must be two distinct axes")
            return Harmonic(d["degree"], d.get("coef", 1.0), plane, d.get("phase", 0.0))
        if kind == "sum":
            return Sum([factor_from_dict(t, n) for t in d["terms"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid factor spec {d!r}: {exc}") from exc
    raise ConfigError(f"unknown factor type {d.get('type')!r}")
