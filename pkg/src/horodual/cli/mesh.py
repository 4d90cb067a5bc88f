"""ASCII OFF export of surfaces sampled on latitude/longitude grids."""

import numpy as np

from ..errors import EmptyInput
from ..lorentz import model_convert


def latlong_directions(rows, cols):
    """Unit vectors of R^3 on a rows x cols grid (polar midpoints, periodic longitude)."""
    theta = (np.arange(rows) + 0.5) * np.pi / rows
    phi = np.arange(cols) * 2 * np.pi / cols
    T, P = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)


def grid_faces(rows, cols):
    """Triangles of a rows x cols grid, periodic in the column index."""
    faces = []
    for i in range(rows - 1):
        for j in range(cols):
            a = i * cols + j
            b = i * cols + (j + 1) % cols
            c = a + cols
            d = b + cols
            faces.append((a, b, d))
            faces.append((a, d, c))
    return faces


def sample_surface(family, rows, cols):
    """Hyperboloid points of a spherical family of H^3 on a lat/long grid."""
    if family.n != 3:
        raise ValueError("mesh export is only available for surfaces in H^3")
    dirs = latlong_directions(rows, cols)
    return np.array([[family.jet(d).x for d in row] for row in dirs]).reshape(rows, cols, 4)


def export_mesh(samples, path, model="poincare"):
    """Write a (rows, cols, 4) grid of hyperboloid points as an OFF mesh in a ball model."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0 or samples.ndim != 3:
        raise EmptyInput("no samples to export")
    rows, cols = samples.shape[:2]
    verts = model_convert(samples.reshape(-1, samples.shape[-1]), model)
    faces = grid_faces(rows, cols)
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(verts)} {len(faces)} 0\n")
        for v in verts:
            fh.write(" ".join(f"{c:.12g}" for c in v) + "\n")
        for f in faces:
            fh.write("3 " + " ".join(str(k) for k in f) + "\n")
    return path
