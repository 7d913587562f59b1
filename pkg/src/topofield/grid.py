"""Freudenthal triangulation of an H×W pixel grid.

Vertices are pixels in row-major order (vertex id = row*width + col).
Every unit cell gets the diagonal (i,j)→(i+1,j+1) and is split into the
two triangles {(i,j),(i,j+1),(i+1,j+1)} and {(i,j),(i+1,j),(i+1,j+1)}.
Simplex lists are sorted lexicographically, so construction is
deterministic and the complex can be shared freely once built.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidShapeError


@dataclass(frozen=True)
class GridShape:
    """Pixel-grid dimensions, both at least 1."""

    height: int
    width: int

    def __post_init__(self):
        if int(self.height) < 1 or int(self.width) < 1:
            raise InvalidShapeError(f"grid must be at least 1x1, got {self.height}x{self.width}")

    @property
    def n_vertices(self) -> int:
        return self.height * self.width

    def vertex_id(self, i: int, j: int) -> int:
        return i * self.width + j

    def vertex_coords(self, v: int) -> tuple[int, int]:
        return divmod(int(v), self.width)


class FreudenthalComplex:
    """Immutable triangulated grid: vertex count plus edge/triangle arrays."""

    def __init__(self, shape: GridShape, edges: np.ndarray, triangles: np.ndarray):
        self.shape = shape
        self.edges = edges
        self.triangles = triangles
        self._adjacency = None

    @property
    def n_vertices(self) -> int:
        return self.shape.n_vertices

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def adjacency(self) -> list[np.ndarray]:
        """Per-vertex sorted neighbor arrays (built once, then cached)."""
        if self._adjacency is None:
            buckets: list[list[int]] = [[] for _ in range(self.n_vertices)]
            for u, v in self.edges.tolist():
                buckets[u].append(v)
                buckets[v].append(u)
            self._adjacency = [np.array(sorted(b), dtype=np.int64) for b in buckets]
        return self._adjacency


def build_complex(shape: GridShape) -> FreudenthalComplex:
    """Build the Freudenthal triangulation of the grid.

    Edge count is (H-1)W + H(W-1) + (H-1)(W-1) and triangle count is
    2(H-1)(W-1); both lists come out lexicographically sorted.
    """
    if not isinstance(shape, GridShape):
        shape = GridShape(*shape)
    h, w = shape.height, shape.width
    ids = np.arange(h * w, dtype=np.int64).reshape(h, w)

    parts = []
    if w > 1:
        parts.append(np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1))
    if h > 1:
        parts.append(np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1))
    if h > 1 and w > 1:
        parts.append(np.stack([ids[:-1, :-1].ravel(), ids[1:, 1:].ravel()], axis=1))
    edges = np.concatenate(parts, axis=0) if parts else np.empty((0, 2), dtype=np.int64)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]

    if h > 1 and w > 1:
        a = ids[:-1, :-1].ravel()
        upper = np.stack([a, ids[:-1, 1:].ravel(), ids[1:, 1:].ravel()], axis=1)
        lower = np.stack([a, ids[1:, :-1].ravel(), ids[1:, 1:].ravel()], axis=1)
        triangles = np.concatenate([upper, lower], axis=0)
        triangles = triangles[np.lexsort((triangles[:, 2], triangles[:, 1], triangles[:, 0]))]
    else:
        triangles = np.empty((0, 3), dtype=np.int64)

    edges.setflags(write=False)
    triangles.setflags(write=False)
    return FreudenthalComplex(shape, edges, triangles)


@lru_cache(maxsize=64)
def _cached_complex(height: int, width: int) -> FreudenthalComplex:
    return build_complex(GridShape(height, width))


def cached_complex(shape: GridShape) -> FreudenthalComplex:
    """Memoized build_complex; safe because complexes are immutable."""
    return _cached_complex(shape.height, shape.width)


def vertex_neighbors(complex: FreudenthalComplex, v: int) -> np.ndarray:
    """Vertices sharing an edge with v, ascending; interior vertices have 6."""
    if not 0 <= v < complex.n_vertices:
        raise IndexError(f"vertex {v} out of range for {complex.n_vertices} vertices")
    return complex.adjacency()[int(v)]


def euler_characteristic(complex: FreudenthalComplex) -> int:
    """V - E + T; equals 1 for every full rectangle."""
    return complex.n_vertices - complex.n_edges + complex.n_triangles
