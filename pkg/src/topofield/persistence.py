"""Persistence diagrams of the descending lower-star filtration.

Dimension 0 runs union-find with the elder rule (path compression, union
into the elder root) and tracks the critical vertex of every birth and
death.  A merge whose component was born at the very value that kills it
corresponds to no component in any super-level snapshot, so dimension 0
reports only pairs with birth > death plus the essential pair; the
essential death is the global minimum of the field, kept finite so the
pair can take part in the penalty sort downstream.

Dimension 1 reduces the triangle boundary matrix over GF(2), column by
column in filtration order, and reports every edge-triangle pairing the
reduction produces, including same-value fills.  There are no essential
dimension-1 classes on a full rectangle.
"""

from dataclasses import dataclass

import numpy as np

from .filtration import Filtration, as_scalar_field, build_filtration
from .grid import GridShape, cached_complex

__all__ = ["PersistencePair", "PersistenceDiagram", "ph0", "ph1", "diagram"]


@dataclass(frozen=True)
class PersistencePair:
    """One birth-death pair; birth >= death in the super-level convention."""

    dim: int
    birth: float
    death: float
    birth_vertex: int
    death_vertex: int
    essential: bool = False

    @property
    def persistence(self) -> float:
        return self.birth - self.death


@dataclass
class PersistenceDiagram:
    pairs: list
    shape: GridShape

    def in_dim(self, dim: int) -> list:
        return [p for p in self.pairs if p.dim == dim]


def _sort_key(p: PersistencePair):
    return (p.dim, -p.persistence, -p.birth, p.birth_vertex, -p.death, p.death_vertex)


def ph0(filtration: Filtration) -> list[PersistencePair]:
    """Dimension-0 pairs by union-find over the edges in filtration order.

    When an edge joins two components the younger one dies (smaller birth
    value; equal values break toward the larger creating vertex id).  The
    death value is the edge value, its critical vertex the endpoint with
    the smaller field value (lower id on ties).  The surviving component
    becomes the essential pair with death at the global minimum.
    """
    f = filtration.vertex_values
    n = f.shape[0]
    edge_mask = filtration.dims == 1
    edge_rows = filtration.verts[edge_mask, :2].tolist()
    edge_vals = filtration.values[edge_mask].tolist()
    fv = f.tolist()

    parent = list(range(n))
    creator = list(range(n))
    pairs: list[PersistencePair] = []

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for (u, v), val in zip(edge_rows, edge_vals):
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        cu, cv = creator[ru], creator[rv]
        # elder = larger birth value, ties toward the smaller creator id
        if fv[cu] > fv[cv] or (fv[cu] == fv[cv] and cu < cv):
            elder_root, young_root, young_creator = ru, rv, cv
        else:
            elder_root, young_root, young_creator = rv, ru, cu
        birth = fv[young_creator]
        if birth != val:
            death_vertex = u if fv[u] <= fv[v] else v
            pairs.append(PersistencePair(0, birth, val, young_creator, death_vertex))
        parent[young_root] = elder_root

    if n:
        root_creator = creator[find(0)]
        gmin_vertex = int(np.argmin(f))
        pairs.append(
            PersistencePair(0, fv[root_creator], fv[gmin_vertex], root_creator, gmin_vertex, True)
        )
    return pairs


def _min_vertex(row, fv) -> int:
    # row is ascending, so the first strict minimum is the lowest id
    best = int(row[0])
    for x in row[1:]:
        x = int(x)
        if fv[x] < fv[best]:
            best = x
    return best


def ph1(filtration: Filtration) -> list[PersistencePair]:
    """Dimension-1 pairs by GF(2) column reduction of the triangle boundaries.

    Columns (triangles) are processed in filtration order; a reduced
    column's low entry names the edge whose cycle the triangle fills.
    Critical vertices are the minimum-value vertices of the paired edge
    and triangle.
    """
    tri_mask = filtration.dims == 2
    if not tri_mask.any():
        return []
    fv = filtration.vertex_values.tolist()
    edge_mask = filtration.dims == 1
    edge_rows = filtration.verts[edge_mask, :2]
    edge_vals = filtration.values[edge_mask].tolist()
    edge_rank = {(int(u), int(v)): r for r, (u, v) in enumerate(edge_rows.tolist())}

    tri_rows = filtration.verts[tri_mask].tolist()
    tri_vals = filtration.values[tri_mask].tolist()

    pivot_col: dict[int, set[int]] = {}
    pairs: list[PersistencePair] = []
    for (a, b, c), death in zip(tri_rows, tri_vals):
        col = {edge_rank[(a, b)], edge_rank[(a, c)], edge_rank[(b, c)]}
        while col:
            low = max(col)
            other = pivot_col.get(low)
            if other is None:
                pivot_col[low] = col
                u, v = edge_rows[low]
                birth_vertex = int(u) if fv[u] <= fv[v] else int(v)
                death_vertex = _min_vertex((a, b, c), fv)
                pairs.append(
                    PersistencePair(1, edge_vals[low], death, birth_vertex, death_vertex)
                )
                break
            col = col ^ other
        # an exhausted column would create a 2-cycle; impossible on a planar grid
    return pairs


def diagram(f, max_dim: int = 0) -> PersistenceDiagram:
    """Complex + filtration + pairing for a scalar field, deterministically sorted."""
    field = as_scalar_field(f)
    if max_dim not in (0, 1):
        raise ValueError("max_dim must be 0 or 1")
    shape = GridShape(*field.shape)
    filtration = build_filtration(cached_complex(shape), field)
    pairs = ph0(filtration)
    if max_dim == 1:
        pairs.extend(ph1(filtration))
    pairs.sort(key=_sort_key)
    return PersistenceDiagram(pairs, shape)
