"""Channel projection and the descending lower-star filtration.

A scalar field is an (H, W) array; a multi-channel field is (H, W, C).
The filtration value of a simplex is the minimum of its vertex values,
so a simplex enters the super-level set exactly when its last vertex
does.  The processing order is: value descending, then dimension
ascending, then lexicographic vertex tuple - faces always precede
cofaces.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidFieldError, ShapeMismatchError
from .grid import FreudenthalComplex, GridShape

__all__ = [
    "Filtration",
    "as_scalar_field",
    "as_multichannel_field",
    "project_channels",
    "project_channels_grad",
    "build_filtration",
]


def as_scalar_field(values) -> np.ndarray:
    """Validate and return an (H, W) float64 field."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"scalar field must be 2-D, got shape {arr.shape}")
    GridShape(*arr.shape)
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError("scalar field contains non-finite values")
    return arr


def as_multichannel_field(values) -> np.ndarray:
    """Validate and return an (H, W, C) float64 field; (H, W) gets C=1."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] < 1:
        raise ShapeMismatchError(f"multi-channel field must be (H, W, C), got {arr.shape}")
    GridShape(*arr.shape[:2])
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError("multi-channel field contains non-finite values")
    return arr


def project_channels(field) -> np.ndarray:
    """Per-pixel Euclidean norm of the channel vector, (H, W, C) -> (H, W)."""
    arr = as_multichannel_field(field)
    if arr.shape[2] == 1:
        return np.abs(arr[:, :, 0])  # exact, and never overflows in the square
    return np.linalg.norm(arr, axis=2)


def project_channels_grad(field, upstream) -> np.ndarray:
    """Chain rule through the channel-norm projection.

    Returns an (H, W, C) gradient: upstream(i,j) * h[i,j,:] / ||h[i,j,:]||,
    with the zero subgradient at pixels whose channel vector is zero.
    """
    arr = as_multichannel_field(field)
    up = np.asarray(upstream, dtype=np.float64)
    if up.shape != arr.shape[:2]:
        raise ShapeMismatchError(f"upstream shape {up.shape} does not match field {arr.shape[:2]}")
    norms = np.linalg.norm(arr, axis=2)
    safe = np.where(norms == 0.0, 1.0, norms)
    grad = arr * (up / safe)[:, :, None]
    grad[norms == 0.0] = 0.0
    return grad


@dataclass
class Filtration:
    """All simplices of a complex, ordered for super-level processing.

    Parallel arrays over the m simplices: `values` (min of vertex values),
    `dims` in {0,1,2} and `verts` as (m, 3) int rows padded with -1.  Row
    order is the filtration order described in the module docstring.
    `vertex_values` keeps the flat input field for pairing lookups.
    """

    complex: FreudenthalComplex
    vertex_values: np.ndarray
    values: np.ndarray
    dims: np.ndarray
    verts: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def simplices(self):
        """Iterate (vertex-tuple, dim, value) in filtration order."""
        for row, d, val in zip(self.verts, self.dims, self.values):
            yield tuple(int(x) for x in row[: d + 1]), int(d), float(val)


def build_filtration(complex: FreudenthalComplex, f) -> Filtration:
    """Value every simplex by the min-of-vertices rule and sort descending."""
    field = as_scalar_field(f)
    if field.shape != (complex.shape.height, complex.shape.width):
        raise ShapeMismatchError(
            f"field shape {field.shape} does not match complex "
            f"{(complex.shape.height, complex.shape.width)}"
        )
    fv = field.ravel()
    n, e, t = complex.n_vertices, complex.n_edges, complex.n_triangles

    values = np.empty(n + e + t, dtype=np.float64)
    dims = np.empty(n + e + t, dtype=np.int64)
    verts = np.full((n + e + t, 3), -1, dtype=np.int64)

    verts[:n, 0] = np.arange(n)
    values[:n] = fv
    dims[:n] = 0
    if e:
        verts[n : n + e, :2] = complex.edges
        values[n : n + e] = fv[complex.edges].min(axis=1)
        dims[n : n + e] = 1
    if t:
        verts[n + e :] = complex.triangles
        values[n + e :] = fv[complex.triangles].min(axis=1)
        dims[n + e :] = 2

    order = np.lexsort((verts[:, 2], verts[:, 1], verts[:, 0], dims, -values))
    return Filtration(complex, fv, values[order], dims[order], verts[order])
