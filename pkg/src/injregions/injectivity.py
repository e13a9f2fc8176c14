"""Region verdicts, witness certificates, the quantum-Wielandt length for
matrix families, family reduction, and the minimal-region frontier search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .contraction import (BoundarySubspace, ResourceLimitError, contract_assignment,
                          _contract_assignment_lane, absorption_plan, _extend_rows,
                          brute_force_span, sweep_span, max_enumeration)
from .families import TensorFamily
from .grids import GridSpec, is_subgrid, square_grid
from .linalg import (FloatEngine, RationalEngine, determinant_exact,
                     det_nonzero_mod, mod_p)
from .scalars import GaussianRational

_EXACT_DET_MAX = 32   # largest witness matrix we expand to an exact determinant


@dataclass
class Witness:
    """A checkable injectivity certificate: full_dim assignments whose
    contracted, flattened tensors form an invertible square matrix."""

    assignments: list
    engine: str
    det_magnitude: Optional[float] = None
    det_log_abs: Optional[float] = None
    det_exact: Optional[GaussianRational] = None
    certified_nonzero: bool = False
    certifying_prime: Optional[int] = None


@dataclass
class InjectivityReport:
    spec: GridSpec
    span_dim: int
    full_dim: int
    injective: bool
    engine: str
    d: int
    d_reduced: int
    witness: Optional[Witness] = None


@dataclass
class FrontierResult:
    minimal_injective: list        # antichain of GridSpec
    explored_cap: GridSpec
    complete_within_cap: bool
    verdicts: dict = field(default_factory=dict, repr=False)


def wielandt_cap(D: int, d: int) -> int:
    """The explicit matrix-family bound (D^2 - d + 1) * D^2, evaluated with
    d clamped to D^2 (larger d never extends the span beyond a basis)."""
    if D < 1 or d < 1:
        raise ValueError("need D >= 1 and d >= 1")
    d_eff = min(d, D * D)
    return max(1, (D * D - d_eff + 1) * D * D)


def _reduce_indices(family: TensorFamily, engine) -> list[int]:
    """Indices (0-based, first-seen order) of a maximal linearly
    independent subset of the family tensors."""
    if isinstance(engine, FloatEngine):
        sub = engine.subspace(family.D ** (2 * family.n))
        return sub.extend(family.tensor_vectors())
    rows = family.exact_vectors()
    rows_list = [rows[i] for i in range(family.d)]
    from .linalg import _exact_batch_maker, _exact_row_source
    sub = engine.subspace(rows.shape[1], row_source=_exact_row_source(rows_list))
    return sub.extend(family.d, _exact_batch_maker(rows_list))


def reduce_family(family: TensorFamily, engine) -> TensorFamily:
    """Drop tensors that are linear combinations of earlier ones.  Region
    verdicts only depend on the linear span, so this is verdict-preserving
    and caps the effective d at D^(2n)."""
    kept = _reduce_indices(family, engine)
    if len(kept) == family.d:
        return family
    return family.subfamily(kept)


def check_region(spec: GridSpec, family: TensorFamily, engine,
                 want_witness: bool = False) -> InjectivityReport:
    """Decide whether the grid is an injective region for the family.

    The family is reduced to an independent spanning subset first; the
    report carries both the original and the reduced physical dimension.
    """
    kept = _reduce_indices(family, engine)
    fam2 = family.subfamily(kept) if len(kept) < family.d else family
    sweep = sweep_span(spec, fam2, engine, witness=want_witness)
    report = InjectivityReport(spec, sweep.dim, sweep.full_dim, sweep.full,
                               engine.tag, family.d, fam2.d)
    if want_witness and sweep.full:
        report.witness = _assemble_witness(spec, family, kept, sweep, engine)
    return report


def witness(spec: GridSpec, family: TensorFamily, engine) -> Witness:
    """Produce and certify an injectivity witness; raises ValueError when
    the region is not injective."""
    report = check_region(spec, family, engine, want_witness=True)
    if not report.injective:
        raise ValueError(f"{spec} is not an injective region (span "
                         f"{report.span_dim} of {report.full_dim})")
    return report.witness


def _assemble_witness(spec: GridSpec, family: TensorFamily, kept: list[int],
                      sweep: BoundarySubspace, engine) -> Witness:
    if sweep.prefixes is None or len(sweep.prefixes) != sweep.full_dim:
        raise RuntimeError("sweep did not keep witness provenance")
    # prefix indices refer to the reduced family; map back to the original
    assignments = [tuple(kept[i - 1] + 1 for i in pref) for pref in sweep.prefixes]
    return verify_witness(spec, family, assignments, engine)


def verify_witness(spec: GridSpec, family: TensorFamily, assignments: list,
                   engine) -> Witness:
    """Re-contract the listed assignments independently and test that the
    square matrix they form is invertible.  Raises ValueError if not."""
    grid = square_grid(spec)
    full_dim = family.D ** len(grid.outgoing_edges)
    if len(assignments) != full_dim:
        raise ValueError(f"witness needs {full_dim} assignments, got {len(assignments)}")
    w = Witness(assignments=list(assignments), engine=engine.tag)
    if isinstance(engine, FloatEngine):
        M = np.empty((full_dim, full_dim), dtype=np.complex128)
        for k, a in enumerate(assignments):
            M[k] = contract_assignment(grid, family, a).data.reshape(-1)
        sign, logdet = np.linalg.slogdet(M)
        sub = engine.subspace(full_dim)
        if len(sub.extend(M)) != full_dim:
            raise ValueError("witness matrix is numerically singular")
        w.det_log_abs = float(logdet)
        w.det_magnitude = float(np.exp(logdet)) if logdet < 700 else float("inf")
        w.certified_nonzero = False
        return w
    for p in engine.primes:
        M = np.empty((full_dim, full_dim), dtype=np.complex128)
        for k, a in enumerate(assignments):
            M[k] = _contract_assignment_lane(grid, family, a, p)
        if det_nonzero_mod(M, p):
            w.certified_nonzero = True
            w.certifying_prime = p
            break
    if full_dim <= _EXACT_DET_MAX:
        rows = [contract_assignment(grid, family, a, want_exact=True).exact.reshape(-1)
                for a in assignments]
        det = determinant_exact(np.array(rows, dtype=object))
        w.det_exact = det
        if bool(det) != w.certified_nonzero and not bool(det):
            raise ValueError("witness matrix has exact determinant zero")
        w.certified_nonzero = bool(det)
    if not w.certified_nonzero:
        raise ValueError("witness determinant vanished modulo every prime lane")
    return w


@dataclass
class MpsLengthReport:
    """Outcome of the matrix-family injectivity-length search (n = 1)."""

    length: Optional[int]
    proven_none: bool          # stagnated, or searched up to the theorem cap
    cap_used: int
    theorem_cap: int
    d: int
    d_reduced: int
    engine: str
    dims: list = field(default_factory=list)   # span dim of W_N, N = 1..

    @property
    def status(self) -> str:
        if self.length is not None:
            return "found"
        return "none-proven" if self.proven_none else "unknown"


def mps_injectivity_length(family: TensorFamily, cap: Optional[int] = None,
                           engine=None) -> MpsLengthReport:
    """Smallest N such that length-N products of the family span all D x D
    matrices, searched incrementally via W_{N+1} = span{w A_i}.

    With the default cap (the explicit quantum-Wielandt bound for the
    reduced family) a miss proves no N works; a user cap below the bound
    can only report "unknown", except that stagnation W_{N+1} = W_N below
    full dimension is also a proof of "none".
    """
    if family.n != 1:
        raise ValueError("injectivity length is defined for n=1 families")
    engine = engine if engine is not None else FloatEngine()
    kept = _reduce_indices(family, engine)
    fam2 = family.subfamily(kept) if len(kept) < family.d else family
    D = family.D
    theorem_cap = wielandt_cap(D, fam2.d)
    cap_used = theorem_cap if cap is None else min(cap, theorem_cap)
    report = MpsLengthReport(None, False, cap_used, theorem_cap,
                             family.d, fam2.d, engine.tag)
    if isinstance(engine, FloatEngine):
        _mps_iterate_float(fam2, engine, cap_used, report)
    elif isinstance(engine, RationalEngine):
        _mps_iterate_modular(fam2, engine, cap_used, report)
    else:
        raise TypeError(f"unsupported engine {engine!r}")
    if report.length is None and cap_used == theorem_cap:
        report.proven_none = True
    return report


def _mps_iterate_float(fam: TensorFamily, engine: FloatEngine, cap: int,
                       report: MpsLengthReport) -> None:
    D, d = fam.D, fam.d
    full = D * D
    mats = fam.as_array()                      # (d, D, D)
    basis = fam.tensor_vectors()               # W_1 candidates
    prev_q = None
    for N in range(1, cap + 1):
        sub = engine.subspace(full)
        acc = sub.extend(basis)
        dim = sub.dim
        report.dims.append(dim)
        if dim == full:
            report.length = N
            return
        if prev_q is not None:
            inside = engine.subspace(full)
            inside.seed_orthonormal(prev_q.copy())
            if not inside.extend(basis):
                report.proven_none = True      # W_N inside W_{N-1}
                return
        prev_q = sub.q
        w = sub.q.reshape(dim, D, D)
        basis = np.einsum("wab,ibc->wiac", w, mats).reshape(dim * d, full)
    # candidates for W_{cap+1} unused; search stops at the cap


def _mps_iterate_modular(fam: TensorFamily, engine: RationalEngine, cap: int,
                         report: MpsLengthReport) -> None:
    from .linalg import _Lane  # noqa: F401  (lanes managed by subspaces)
    D, d = fam.D, fam.d
    full = D * D
    words: list = [(i,) for i in range(1, d + 1)]
    prev_words: Optional[list] = None
    for N in range(1, cap + 1):
        def make_batch(p, lo, hi, _ws=words):
            return _word_rows(fam, _ws[lo:hi], p)

        def row_source(p, selected_ids, _ws=words):
            return _word_rows(fam, [_ws[k] for k in selected_ids], p)

        sub = engine.subspace(full, row_source=row_source)
        acc = sub.extend(len(words), make_batch)
        dim = sub.dim
        report.dims.append(dim)
        if dim == full:
            report.length = N
            return
        kept_words = [words[k] for k in acc]
        if prev_words is not None:
            def src2(p, selected_ids, _pw=prev_words, _ws=words):
                picked = [(_pw + _ws)[k] for k in selected_ids]
                return _word_rows(fam, picked, p)

            def batch2(p, lo, hi, _all=prev_words + words):
                return _word_rows(fam, _all[lo:hi], p)

            inside = engine.subspace(full, row_source=src2)
            inside.extend(len(prev_words), batch2)
            new = inside.extend(len(words),
                                lambda p, lo, hi, _ws=words, _off=len(prev_words):
                                _word_rows(fam, _ws[lo:hi], p))
            if not new:
                report.proven_none = True
                return
        prev_words = kept_words
        words = [wd + (i,) for wd in kept_words for i in range(1, d + 1)]


def _word_rows(fam: TensorFamily, words: list, p: int) -> np.ndarray:
    """Products of family matrices along each word, modulo p, flattened."""
    arr = fam.lane_array(p)
    D = fam.D
    out = np.empty((len(words), D * D), dtype=np.complex128)
    for k, wd in enumerate(words):
        v = np.eye(D, dtype=np.complex128)
        for idx in wd:
            v = v @ arr[idx - 1]
            mod_p(v.real, p, out=v.real)
            mod_p(v.imag, p, out=v.imag)
        out[k] = v.reshape(-1)
    return out


def _counting_excludes(spec: GridSpec, d: int, D: int) -> bool:
    """True when d^|V| < D^|E_O|, which forces span < full (each placement
    contributes one vector)."""
    nv = spec.num_vertices
    from .grids import edge_counts
    _, _, eo = edge_counts(spec)
    return d ** nv < D ** eo


def minimal_injective_regions(family: TensorFamily, cap: GridSpec,
                              engine) -> FrontierResult:
    """Antichain of minimal injective grid sizes within the cap box.

    Explores specs in increasing (|V|, lexicographic dims) order.  Grid
    monotonicity prunes in both directions: supergrids of a found minimal
    spec are injective and skipped; minimality only requires the immediate
    predecessors, which the enumeration has already decided.  A spec whose
    verdict hits a resource limit is left unknown and flagged through
    `complete_within_cap`.
    """
    if family.n != cap.n:
        raise ValueError("cap dimension differs from the family dimension")
    kept = _reduce_indices(family, engine)
    fam2 = family.subfamily(kept) if len(kept) < family.d else family
    box = sorted(
        (GridSpec(dims) for dims in
         itertools.product(*[range(1, c + 1) for c in cap.dims])),
        key=lambda s: (s.num_vertices, s.dims))
    verdicts: dict[GridSpec, Optional[bool]] = {}
    minimal: list[GridSpec] = []
    complete = True
    for spec in box:
        if any(is_subgrid(m, spec) for m in minimal):
            verdicts[spec] = True     # by monotonicity; not a minimality candidate
            continue
        if _counting_excludes(spec, fam2.d, fam2.D):
            verdicts[spec] = False
            continue
        try:
            verdicts[spec] = sweep_span(spec, fam2, engine).full
        except ResourceLimitError:
            verdicts[spec] = None
            complete = False
            continue
        if verdicts[spec]:
            preds = [GridSpec(tuple(n - 1 if i == j else n
                                    for j, n in enumerate(spec.dims)))
                     for i in range(spec.n) if spec.dims[i] > 1]
            if all(verdicts.get(p) is False for p in preds):
                minimal.append(spec)
            else:
                complete = False      # an undecided predecessor blocks certification
    return FrontierResult(minimal, cap, complete, verdicts)
