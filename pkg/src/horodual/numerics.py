"""Finite-difference jets and curvature of metrics given in coordinates.

These are the independent oracles: they only ever call point evaluators,
never the analytic derivative code they are used to check.
"""

import numpy as np

from .errors import StepUnderflow

DEFAULT_STEP = 1e-3


def _central(f, y0, h):
    m = y0.size
    f0 = np.asarray(f(y0), dtype=float)
    d1 = np.empty((m,) + f0.shape)
    d2 = np.empty((m, m) + f0.shape)
    plus, minus = [], []
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        fp = np.asarray(f(y0 + e), dtype=float)
        fm = np.asarray(f(y0 - e), dtype=float)
        plus.append(fp)
        minus.append(fm)
        d1[i] = (fp - fm) / (2 * h)
        d2[i, i] = (fp - 2 * f0 + fm) / h ** 2
    for i in range(m):
        for j in range(i + 1, m):
            ei = np.zeros(m)
            ej = np.zeros(m)
            ei[i] = h
            ej[j] = h
            v = (f(y0 + ei + ej) - f(y0 + ei - ej) - f(y0 - ei + ej) + f(y0 - ei - ej)) / (4 * h * h)
            d2[i, j] = d2[j, i] = v
    return f0, d1, d2


def fd_jet(f, y0, h=DEFAULT_STEP):
    """Value, first and second derivatives of ``f`` at ``y0``.

    Central differences at steps h and h/2 combined by one Richardson
    step, so truncation error is O(h^4).
    """
    y0 = np.asarray(y0, dtype=float)
    if h <= 1e-7:
        raise StepUnderflow(f"finite-difference step {h} too small")
    f0, a1, a2 = _central(f, y0, h)
    _, b1, b2 = _central(f, y0, h / 2)
    return f0, (4 * b1 - a1) / 3, (4 * b2 - a2) / 3


def fd_derivative(f, y0, h=DEFAULT_STEP):
    """First derivatives only (Richardson-extrapolated central differences)."""
    y0 = np.asarray(y0, dtype=float)
    if h <= 1e-9:
        raise StepUnderflow(f"finite-difference step {h} too small")
    out = []
    for i in range(y0.size):
        e = np.zeros(y0.size)
        e[i] = 1.0
        a = (np.asarray(f(y0 + h * e)) - np.asarray(f(y0 - h * e))) / (2 * h)
        b = (np.asarray(f(y0 + 0.5 * h * e)) - np.asarray(f(y0 - 0.5 * h * e))) / h
        out.append((4 * b - a) / 3)
    return np.array(out)


def christoffel_fd(metric, y, h=DEFAULT_STEP):
    """Gamma[a, b, c] = Gamma^a_{bc} from finite differences of ``metric``."""
    g = metric(y)
    dg = fd_derivative(metric, y, h)          # dg[c, a, b] = d_c g_ab
    ginv = np.linalg.inv(g)
    # Gamma_{d,bc} = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    low = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    return np.einsum("ad,dbc->abc", ginv, low)


def riemann_fd(metric, y, h=DEFAULT_STEP):
    """Riemann tensor R[a, b, c, d] = R^a_{bcd} of a coordinate metric.

    Convention: R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z, with
    R(d_c, d_d) d_b = R^a_{bcd} d_a.
    """
    y = np.asarray(y, dtype=float)
    G = christoffel_fd(metric, y, h)
    dG = fd_derivative(lambda z: christoffel_fd(metric, z, h), y, h)   # dG[e, a, b, c]
    R = (np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
         + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return R


def sectional(R, g, X, Y):
    """Sectional curvature of the plane (X, Y) from R^a_{bcd} and metric g."""
    Rlow = np.einsum("ae,ebcd->abcd", g, R)
    num = np.einsum("abcd,a,b,c,d->", Rlow, X, Y, X, Y)
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    return num / den


def sectional_fd(metric, y, X, Y, h=DEFAULT_STEP):
    return sectional(riemann_fd(metric, y, h), metric(y), X, Y)
