"""Grid combinatorics: general grids and n-dimensional square grids.

Coordinates are 1-based throughout: the square grid of size N1 x ... x Nn
has vertices (j1, ..., jn) with 1 <= ji <= Ni.  Ports at a vertex are
ordered (-e1, +e1, -e2, +e2, ...), so every site tensor has 2n axes in
that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

Vertex = tuple  # coordinate tuple (j1, ..., jn), 1-based


@dataclass(frozen=True)
class GridSpec:
    """Dimensions of a square grid."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) < 1 or any(int(N) != N or N < 1 for N in self.dims):
            raise ValueError(f"invalid grid dims {self.dims}")
        object.__setattr__(self, "dims", tuple(int(N) for N in self.dims))

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def num_vertices(self) -> int:
        p = 1
        for N in self.dims:
            p *= N
        return p

    def vertices(self) -> list[Vertex]:
        """All vertices in lexicographic coordinate order."""
        return [v for v in itertools.product(*[range(1, N + 1) for N in self.dims])]

    def contains(self, v: Vertex) -> bool:
        return len(v) == self.n and all(1 <= v[i] <= self.dims[i] for i in range(self.n))

    def __str__(self):
        return "x".join(str(N) for N in self.dims)


def parse_grid_spec(text: str) -> GridSpec:
    """Parse the CLI grammar "N1(xN2)*", e.g. "3x5"."""
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"malformed grid spec {text!r}") from None
    return GridSpec(dims)


@dataclass(frozen=True)
class OutgoingEdge:
    """A boundary edge (vertex, direction +/-e_axis); axis is 1-based."""

    vertex: Vertex
    axis: int
    sign: int  # -1 or +1

    def __post_init__(self):
        if self.sign not in (-1, 1) or self.axis < 1:
            raise ValueError("direction must be +/-e_i with i >= 1")

    def sort_key(self):
        return (self.axis, 0 if self.sign < 0 else 1, self.vertex)

    def label(self) -> str:
        return f"({','.join(map(str, self.vertex))}){'+' if self.sign > 0 else '-'}e{self.axis}"


@dataclass(frozen=True)
class GeneralGrid:
    """A triple (vertices, inner edges, outgoing edges) with per-vertex
    port lists mapping tensor axes to incident edges.

    `ports[v]` is the ordered tuple of edge references for vertex v, each
    ("inner", k) or ("out", k) indexing into the respective edge list.  If
    not given, ports default to incidence order: inner edges in list
    order, then outgoing edges in list order.
    """

    vertices: tuple
    inner_edges: tuple[tuple, ...]      # pairs (v1, v2), v1 != v2
    outgoing_edges: tuple[tuple, ...]   # pairs (vertex, port-label)
    ports: dict = field(default=None, compare=False)

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertices")
        for (a, b) in self.inner_edges:
            if a == b or a not in vset or b not in vset:
                raise ValueError(f"bad inner edge ({a}, {b})")
        labels_at = {}
        for (v, lab) in self.outgoing_edges:
            if v not in vset:
                raise ValueError(f"outgoing edge endpoint {v} missing")
            if lab in labels_at.setdefault(v, set()):
                raise ValueError(f"duplicate port label {lab} at {v}")
            labels_at[v].add(lab)
        if self.ports is None:
            ports = {v: [] for v in self.vertices}
            for k, (a, b) in enumerate(self.inner_edges):
                ports[a].append(("inner", k))
                ports[b].append(("inner", k))
            for k, (v, _) in enumerate(self.outgoing_edges):
                ports[v].append(("out", k))
            object.__setattr__(self, "ports", {v: tuple(p) for v, p in ports.items()})

    def degree(self, v) -> int:
        return len(self.ports[v])


def square_grid(spec: GridSpec) -> GeneralGrid:
    """The n-dimensional square grid with canonical vertex, edge and port
    orders.

    Every vertex has exactly 2n ports ordered (-e1, +e1, ..., -en, +en);
    inner edges join coordinate-adjacent vertices; outgoing edges are
    listed in the canonical order of :func:`outgoing_order`.
    """
    n = spec.n
    verts = spec.vertices()
    inner: list[tuple] = []
    inner_index: dict[tuple, int] = {}
    for v in verts:
        for axis in range(1, n + 1):
            w = _step(v, axis, +1)
            if spec.contains(w):
                inner_index[(v, w, axis)] = len(inner)
                inner.append((v, w))
    outgoing = [(e.vertex, f"{'-' if e.sign < 0 else '+'}e{e.axis}")
                for e in outgoing_order(spec)]
    out_index = {(v, lab): k for k, (v, lab) in enumerate(outgoing)}
    ports = {}
    for v in verts:
        plist = []
        for axis in range(1, n + 1):
            for sign in (-1, +1):
                w = _step(v, axis, sign)
                if spec.contains(w):
                    key = (v, w, axis) if sign > 0 else (w, v, axis)
                    plist.append(("inner", inner_index[key]))
                else:
                    lab = f"{'-' if sign < 0 else '+'}e{axis}"
                    plist.append(("out", out_index[(v, lab)]))
        ports[v] = tuple(plist)
    return GeneralGrid(tuple(verts), tuple(inner), tuple(outgoing), ports)


def outgoing_order(spec: GridSpec) -> list[OutgoingEdge]:
    """Canonical order of the outgoing edges of a square grid.

    Sorted by (axis, sign with - before +, lexicographic vertex coords);
    this fixes the tensor-factor order of the boundary space and is stable
    across runs.
    """
    edges = []
    for v in spec.vertices():
        for axis in range(1, spec.n + 1):
            for sign in (-1, +1):
                if not spec.contains(_step(v, axis, sign)):
                    edges.append(OutgoingEdge(v, axis, sign))
    edges.sort(key=OutgoingEdge.sort_key)
    return edges


def is_subgrid(a: GridSpec, b: GridSpec) -> bool:
    """Componentwise a <= b; grids must have equal dimension n."""
    if a.n != b.n:
        raise ValueError(f"grid dimensions differ: {a.n} vs {b.n}")
    return all(x <= y for x, y in zip(a.dims, b.dims))


def _step(v: Vertex, axis: int, sign: int) -> Vertex:
    return tuple(c + (sign if i == axis - 1 else 0) for i, c in enumerate(v))


def edge_counts(spec: GridSpec) -> tuple[int, int, int]:
    """(|V|, |E_I|, |E_O|) of the square grid, by the product formulas."""
    n = spec.n
    V = spec.num_vertices
    EI = 0
    EO = 0
    for i in range(n):
        others = V // spec.dims[i]
        EI += (spec.dims[i] - 1) * others
        EO += 2 * others
    return V, EI, EO
