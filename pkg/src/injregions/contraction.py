"""Contraction of grid assignments and the incremental boundary sweep.

Two distinct computations live here on purpose:

* :func:`contract_assignment` contracts one placement of family tensors
  over a general grid by pairwise tensordot, with its own open-slot
  bookkeeping.  :func:`brute_force_span` enumerates all placements this
  way and ranks the resulting matrix.  This is the desk-scale oracle.

* :func:`sweep_span` computes the span of all placements at once by
  absorbing vertices one at a time, keeping a basis of the boundary
  subspace after each absorption.  Work is bounded by the subspace
  dimension instead of the d^|V| placement count.  When the running
  subspace fills its intermediate boundary space entirely, the float
  sweep switches to a closed form: from then on the span is a full
  tensor factor times the row space of per-vertex family slices, so each
  further vertex costs one small rank computation.

The two paths are cross-checked by the oracle-equivalence tests.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .families import TensorFamily
from .grids import GeneralGrid, GridSpec, outgoing_order, square_grid
from .linalg import FloatEngine, RationalEngine, mod_p
from .scalars import GaussianRational
from .tensors import DenseTensor

Assignment = tuple  # 1-based family index per vertex, in vertex order

_GEN_CHUNK_ENTRIES = 1 << 21  # candidate-buffer budget, complex entries


class ResourceLimitError(RuntimeError):
    """A documented enumeration or memory limit would be exceeded."""


def max_enumeration() -> int:
    return int(os.environ.get("INJREGIONS_MAX_ENUM", 10 ** 6))


def max_exposed_dim() -> int:
    return int(os.environ.get("INJREGIONS_MAX_EXPOSED", 2 ** 20))


# ---------------------------------------------------------------------------
# single-assignment contraction over a general grid


def _backend_float(family: TensorFamily):
    arr = family.as_array()
    return ([arr[i] for i in range(family.d)],
            lambda a, b, ax: np.tensordot(a, b, ax),
            np.ones((), dtype=np.complex128))


def _backend_exact(family: TensorFamily):
    arr = family.exact_array()
    one = np.empty((), dtype=object)
    one[()] = GaussianRational(1)
    return ([arr[i] for i in range(family.d)],
            lambda a, b, ax: np.asarray(np.tensordot(a, b, ax), dtype=object),
            one)


def _backend_lane(family: TensorFamily, p: int):
    arr = family.lane_array(p)

    def td(a, b, ax):
        out = np.tensordot(a, b, ax)
        mod_p(out.real, p, out=out.real)
        mod_p(out.imag, p, out=out.imag)
        return out

    return ([arr[i] for i in range(family.d)], td,
            np.ones((), dtype=np.complex128))


def _contract_over(grid: GeneralGrid, assignment: Sequence[int], tensors, td, one):
    """Pairwise contraction in vertex-list order; returns (value, slots)."""
    if len(assignment) != len(grid.vertices):
        raise ValueError("assignment must choose a tensor for every vertex")
    running = one
    slots: list[tuple] = []  # open edge refs ("inner", k) / ("out", k)
    slot_pos: dict = {}
    for vi, v in enumerate(grid.vertices):
        idx = assignment[vi]
        if not 1 <= idx <= len(tensors):
            raise ValueError(f"assignment index {idx} out of range 1..{len(tensors)}")
        vports = grid.ports[v]
        cons_pos, cons_ax, new_refs = [], [], []
        for ax, ref in enumerate(vports):
            if ref in slot_pos:
                cons_pos.append(slot_pos[ref])
                cons_ax.append(ax)
            else:
                new_refs.append(ref)
        running = td(running, tensors[idx - 1], (cons_pos, cons_ax))
        vset = set(vports)
        slots = [r for r in slots if r not in vset] + new_refs
        slot_pos = {r: k for k, r in enumerate(slots)}
    return running, slots


def contract_assignment(grid: GeneralGrid, family: TensorFamily,
                        assignment: Sequence[int],
                        want_exact: bool = False) -> DenseTensor:
    """Contract the placement v -> A_{assignment[v]} along all inner edges.

    Result axes follow the grid's outgoing-edge list order (canonical for
    grids built by :func:`square_grid`).
    """
    deg = 2 * family.n
    for v in grid.vertices:
        if grid.degree(v) != deg:
            raise ValueError(f"vertex {v} has degree {grid.degree(v)}, "
                             f"family ports are {deg}")
    tensors, td, one = _backend_float(family)
    value, slots = _contract_over(grid, assignment, tensors, td, one)
    perm = [slots.index(("out", k)) for k in range(len(grid.outgoing_edges))]
    data = np.transpose(value, perm) if perm else value.reshape(())
    exact = None
    if want_exact:
        tensors_e, td_e, one_e = _backend_exact(family)
        value_e, _ = _contract_over(grid, assignment, tensors_e, td_e, one_e)
        exact = np.transpose(value_e, perm) if perm else value_e.reshape(())
        exact = np.asarray(exact, dtype=object)
    return DenseTensor(np.ascontiguousarray(data), exact)


def _contract_assignment_lane(grid: GeneralGrid, family: TensorFamily,
                              assignment: Sequence[int], p: int) -> np.ndarray:
    tensors, td, one = _backend_lane(family, p)
    value, slots = _contract_over(grid, assignment, tensors, td, one)
    perm = [slots.index(("out", k)) for k in range(len(grid.outgoing_edges))]
    if perm:
        value = np.transpose(value, perm)
    return value.reshape(-1)


# ---------------------------------------------------------------------------
# absorption plan for the sweep


@dataclass
class _Step:
    vertex: tuple
    cons_pos: list      # consumed positions in the previous exposed order
    cons_ports: list    # matching site-tensor axes
    new_ports: list     # remaining site-tensor axes, port order
    perm: list          # sorts (remaining ++ new) handles canonically
    ambient: int        # D^len(exposed after this step)
    naxes: int          # len(exposed after this step)


@dataclass
class _Plan:
    spec: GridSpec
    D: int
    steps: list
    max_ambient: int
    full_dim: int


def _handle_key(h):
    if h[0] == "out":
        _, v, k, s = h
        return (1, k, 0 if s < 0 else 1, v)
    _, vmin, vmax, k = h
    return (0, k, 0, vmin, vmax)


def absorption_plan(spec: GridSpec, D: int, order: str = "lex") -> _Plan:
    """Precompute, per absorbed vertex, which exposed axes are consumed and
    how the surviving axes re-sort into canonical order."""
    n = spec.n
    verts = spec.vertices()
    if order == "revlex":
        verts = verts[::-1]
    elif order != "lex":
        raise ValueError(f"unknown absorption order {order!r}")
    inside: set = set()
    exposed: list = []
    steps = []
    max_ambient = 1
    for v in verts:
        pos = {h: i for i, h in enumerate(exposed)}
        consumed, new_h, cons_ports = [], [], []
        for axis in range(1, n + 1):
            for sign in (-1, +1):
                w = tuple(c + (sign if i == axis - 1 else 0) for i, c in enumerate(v))
                port = 2 * (axis - 1) + (0 if sign < 0 else 1)
                if not spec.contains(w):
                    new_h.append(("out", v, axis, sign))
                elif w in inside:
                    key = ("cut", w, v, axis) if sign < 0 else ("cut", v, w, axis)
                    consumed.append(key)
                    cons_ports.append(port)
                else:
                    key = ("cut", v, w, axis) if sign > 0 else ("cut", w, v, axis)
                    new_h.append(key)
        cons_pos = [pos[h] for h in consumed]
        new_ports = [q for q in range(2 * n) if q not in cons_ports]
        cset = set(consumed)
        unsorted_handles = [h for h in exposed if h not in cset] + new_h
        perm = sorted(range(len(unsorted_handles)),
                      key=lambda i: _handle_key(unsorted_handles[i]))
        exposed = [unsorted_handles[i] for i in perm]
        ambient = D ** len(exposed)
        max_ambient = max(max_ambient, ambient)
        steps.append(_Step(v, cons_pos, cons_ports, new_ports, perm, ambient,
                           len(exposed)))
        inside.add(v)
    return _Plan(spec, D, steps, max_ambient, D ** len(exposed))


def _extend_rows(step: _Step, rows: np.ndarray, site: np.ndarray, D: int,
                 nexp_prev: int) -> np.ndarray:
    """All extensions of basis rows by one site tensor, flattened in the
    step's canonical axis order."""
    r = rows.shape[0]
    bt = rows.reshape((r,) + (D,) * nexp_prev)
    c = np.tensordot(bt, site, axes=([q + 1 for q in step.cons_pos], step.cons_ports))
    c = np.transpose(c, [0] + [1 + q for q in step.perm])
    return np.ascontiguousarray(c).reshape(r, step.ambient)


def _replay_prefix_lane(plan: _Plan, family: TensorFamily, prefixes: list,
                        p: int) -> np.ndarray:
    """Recontract assignment prefixes modulo p (rebuilds degraded lanes)."""
    arr = family.lane_array(p)
    D = family.D
    if not prefixes:
        return np.zeros((0, 1), dtype=np.complex128)
    out = []
    for pref in prefixes:
        v = np.ones((1, 1), dtype=np.complex128)
        nexp = 0
        for j, idx in enumerate(pref):
            st = plan.steps[j]
            v = _extend_rows(st, v, arr[idx - 1], D, nexp)
            mod_p(v.real, p, out=v.real)
            mod_p(v.imag, p, out=v.imag)
            nexp = st.naxes
        out.append(v[0])
    return np.array(out)


# ---------------------------------------------------------------------------
# boundary sweep


@dataclass
class BoundarySubspace:
    """Result of a sweep: a basis of Span(S_G) over the boundary space."""

    spec: GridSpec
    engine: str
    edge_order: list
    dim: int
    full_dim: int
    saturated: bool = False
    capped: bool = False
    prefixes: Optional[list] = None     # accepted assignments, acceptance order
    float_basis: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def full(self) -> bool:
        return not self.capped and self.dim == self.full_dim

    def basis_rows(self) -> np.ndarray:
        """Orthonormal float basis (float engine), or the identity when the
        sweep ended saturated."""
        if self.float_basis is not None:
            return self.float_basis
        if self.saturated:
            return np.eye(self.full_dim, dtype=np.complex128)
        raise ValueError("no float basis stored; rerun with the float engine")


def sweep_span(spec: GridSpec, family: TensorFamily, engine,
               dim_cap: Optional[int] = None, *, witness: bool = False,
               order: str = "lex") -> BoundarySubspace:
    """Basis of the span of all placements, by vertex absorption.

    Candidates are generated in (basis index, family index) order and
    re-reduced after every vertex.  With `witness=True` every basis vector
    is a scalar multiple of an actual prefix contraction and `prefixes`
    certifies the final basis (complete assignments once the sweep ends).
    The certified engine always tracks prefixes; the float engine then
    skips the saturation shortcut to keep provenance.
    """
    if family.n != spec.n:
        raise ValueError(f"family is {family.n}-dimensional, grid is {spec.n}-dimensional")
    plan = absorption_plan(spec, family.D, order)
    if plan.max_ambient > max_exposed_dim():
        raise ResourceLimitError(
            f"exposed boundary dimension {plan.max_ambient} exceeds limit "
            f"{max_exposed_dim()} (set INJREGIONS_MAX_EXPOSED to raise)")
    if isinstance(engine, FloatEngine):
        return _sweep_float(plan, family, engine, dim_cap, witness)
    if isinstance(engine, RationalEngine):
        return _sweep_modular(plan, family, engine, dim_cap)
    raise TypeError(f"unsupported engine {engine!r}")


def _result(plan, engine_tag, dim, **kw) -> BoundarySubspace:
    return BoundarySubspace(plan.spec, engine_tag, outgoing_order(plan.spec),
                            dim, plan.full_dim, **kw)


def _sweep_float(plan: _Plan, family: TensorFamily, engine: FloatEngine,
                 dim_cap, witness: bool) -> BoundarySubspace:
    D, d = family.D, family.d
    arr = family.as_array()
    gen_rows = np.ones((1, 1), dtype=np.complex128)
    prefixes: Optional[list] = [()] if witness else None
    saturated = False
    nexp = 0
    for step in plan.steps:
        if saturated:
            s_dim, s_rows = _slice_rank_float(arr, step, D, engine)
            if s_dim == D ** len(step.new_ports):
                nexp = step.naxes
                continue
            gen_rows = _desaturate(step, s_rows, D)
            saturated = False
            nexp = step.naxes
            if dim_cap is not None and gen_rows.shape[0] > dim_cap:
                return _result(plan, engine.tag, gen_rows.shape[0], capped=True)
            continue
        sub = engine.subspace(step.ambient)
        r = gen_rows.shape[0]
        chunk = max(1, _GEN_CHUNK_ENTRIES // (step.ambient * d))
        new_rows, new_prefixes = [], []
        for j0 in range(0, r, chunk):
            rows = gen_rows[j0:j0 + chunk]
            cands = np.empty((rows.shape[0] * d, step.ambient), dtype=np.complex128)
            for i in range(d):
                cands[i::d] = _extend_rows(step, rows, arr[i], D, nexp)
            acc = sub.extend(cands, stop_at=step.ambient)
            if witness:
                for ci in acc:
                    j, i = divmod(ci, d)
                    new_prefixes.append(prefixes[j0 + j] + (i + 1,))
                    v = cands[ci]
                    new_rows.append(v / np.linalg.norm(v))
            if sub.dim == step.ambient:
                break
        if witness:
            prefixes = new_prefixes
            gen_rows = np.array(new_rows).reshape(len(new_rows), step.ambient)
        else:
            gen_rows = sub.q
        nexp = step.naxes
        if dim_cap is not None and sub.dim > dim_cap:
            return _result(plan, engine.tag, sub.dim, capped=True)
        if not witness and sub.dim == step.ambient:
            saturated = True
    if saturated:
        return _result(plan, engine.tag, plan.full_dim, saturated=True)
    return _result(plan, engine.tag, gen_rows.shape[0], prefixes=prefixes,
                   float_basis=gen_rows)


def _slice_rank_float(arr: np.ndarray, step: _Step, D: int, engine: FloatEngine):
    """Rank and basis of the stacked family slices taking the consumed
    boundary factors to the vertex's fresh factors."""
    mats = []
    for i in range(arr.shape[0]):
        m = np.transpose(arr[i], step.cons_ports + step.new_ports)
        mats.append(m.reshape(D ** len(step.cons_ports), -1))
    S = np.vstack(mats)
    sub = engine.subspace(S.shape[1])
    sub.extend(S, stop_at=S.shape[1])
    return sub.dim, sub.q


def _desaturate(step: _Step, slice_rows: np.ndarray, D: int) -> np.ndarray:
    """Materialize C^(rest) (x) rowspace(slices) as explicit basis rows."""
    new_dim = D ** len(step.new_ports)
    rest_dim = step.ambient // new_dim
    s = slice_rows.shape[0]
    if rest_dim * s * step.ambient > 2 ** 28:
        raise ResourceLimitError("desaturation would materialize too large a basis")
    eye = np.eye(rest_dim, dtype=np.complex128)
    B = (eye[:, None, :, None] * slice_rows[None, :, None, :]).reshape(
        rest_dim * s, step.ambient)
    # axes currently follow (remaining ++ new); restore the canonical order
    Bt = B.reshape((rest_dim * s,) + (D,) * step.naxes)
    Bt = np.transpose(Bt, [0] + [1 + q for q in step.perm])
    return np.ascontiguousarray(Bt).reshape(rest_dim * s, step.ambient)


def _sweep_modular(plan: _Plan, family: TensorFamily, engine: RationalEngine,
                   dim_cap) -> BoundarySubspace:
    if not family.has_exact:
        raise ValueError("certified engine requires exact rational entries")
    D, d = family.D, family.d
    prefixes: list = [()]
    lane_rows: dict[int, np.ndarray] = {
        p: np.ones((1, 1), dtype=np.complex128) for p in engine.primes[:engine.lanes]}
    nexp = 0
    active = list(engine.primes[:engine.lanes])
    for step in plan.steps:
        m = len(prefixes) * d
        cand_cache: dict[int, np.ndarray] = {}
        cur_prefixes = prefixes
        cur_nexp = nexp

        def gen_for(p, _step=step, _cache=cand_cache, _pref=cur_prefixes, _ne=cur_nexp):
            if p not in _cache:
                if p in lane_rows:
                    rows = lane_rows[p]
                else:
                    rows = _replay_prefix_lane(plan, family, _pref, p)
                arr = family.lane_array(p)
                c = np.empty((m, _step.ambient), dtype=np.complex128)
                for i in range(d):
                    ext = _extend_rows(_step, rows, arr[i], D, _ne)
                    mod_p(ext.real, p, out=ext.real)
                    mod_p(ext.imag, p, out=ext.imag)
                    c[i::d] = ext
                _cache[p] = c
            return _cache[p]

        def make_batch(p, lo, hi, _gen=gen_for):
            return _gen(p)[lo:hi]

        def row_source(p, selected_ids, _pref=cur_prefixes):
            prefs = [_pref[sid // d] + (sid % d + 1,) for sid in selected_ids]
            return _replay_prefix_lane(plan, family, prefs, p)

        prime_order = tuple(active) + tuple(p for p in engine.primes if p not in active)
        sub = engine.subspace(step.ambient, row_source=row_source,
                              prime_order=prime_order)
        acc = sub.extend(m, make_batch, stop_at=step.ambient)
        prefixes = [cur_prefixes[ci // d] + (ci % d + 1,) for ci in acc]
        active = [ln.p for ln in sub.lanes if not ln.degraded]
        new_rows = {}
        for p in active:
            if p in cand_cache:
                new_rows[p] = cand_cache[p][list(acc)].copy()
            else:
                new_rows[p] = _replay_prefix_lane(plan, family, prefixes, p)
        lane_rows = new_rows
        nexp = step.naxes
        if dim_cap is not None and len(prefixes) > dim_cap:
            return _result(plan, engine.tag, len(prefixes), capped=True,
                           prefixes=prefixes)
    return _result(plan, engine.tag, len(prefixes), prefixes=prefixes)


# ---------------------------------------------------------------------------
# brute force


@dataclass
class BruteForceResult:
    spec: GridSpec
    engine: str
    rank: int
    shape: tuple          # (D^|E_O|, d^|V|)
    matrix: Optional[np.ndarray] = field(default=None, repr=False)


def brute_force_span(spec: GridSpec, family: TensorFamily, engine,
                     materialize: Optional[bool] = None) -> BruteForceResult:
    """Enumerate every placement, contract it directly, and rank the
    column matrix M (columns ordered lexicographically by assignment).

    `materialize` controls whether the float matrix M is stored on the
    result; it defaults to True for the float engine.
    """
    nv = spec.num_vertices
    ncols = family.d ** nv
    if ncols > max_enumeration():
        raise ResourceLimitError(
            f"{family.d}^{nv} = {ncols} placements exceed the enumeration "
            f"limit {max_enumeration()} (set INJREGIONS_MAX_ENUM to raise)")
    grid = square_grid(spec)
    full_dim = family.D ** len(grid.outgoing_edges)
    assigns = list(itertools.product(range(1, family.d + 1), repeat=nv))
    if materialize is None:
        materialize = isinstance(engine, FloatEngine)
    cols = None
    if materialize or isinstance(engine, FloatEngine):
        cols = np.empty((ncols, full_dim), dtype=np.complex128)
        for k, a in enumerate(assigns):
            cols[k] = contract_assignment(grid, family, a).data.reshape(-1)
    if isinstance(engine, FloatEngine):
        sub = engine.subspace(full_dim)
        sub.extend(cols, stop_at=full_dim)
        rk = sub.dim
    elif isinstance(engine, RationalEngine):
        if not family.has_exact:
            raise ValueError("certified engine requires exact rational entries")
        cache: dict[int, np.ndarray] = {}

        def lane_cols(p):
            if p not in cache:
                rows = np.empty((ncols, full_dim), dtype=np.complex128)
                for k, a in enumerate(assigns):
                    rows[k] = _contract_assignment_lane(grid, family, a, p)
                cache[p] = rows
            return cache[p]

        def make_batch(p, lo, hi):
            return lane_cols(p)[lo:hi]

        def row_source(p, selected_ids):
            return lane_cols(p)[list(selected_ids)]

        sub = engine.subspace(full_dim, row_source=row_source)
        sub.extend(ncols, make_batch, stop_at=full_dim)
        rk = sub.dim
    else:
        raise TypeError(f"unsupported engine {engine!r}")
    M = cols.T.copy() if (materialize and cols is not None) else None
    return BruteForceResult(spec, engine.tag, rk, (full_dim, ncols), M)
