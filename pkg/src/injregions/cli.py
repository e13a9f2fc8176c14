"""Command-line front door.

Subcommands: gen, check, mps-length, search, oracle-check.  Reports are
canonical JSON on stdout and are byte-identical across repeated runs on
fixed inputs (pass --timing to add wall-clock fields, which breaks that
on purpose).  Verdicts are report fields, never exit codes: 0 means the
command ran, 2 means malformed input, 3 means a resource limit.
"""

from __future__ import annotations

import argparse
import sys
import time

from .contraction import ResourceLimitError, brute_force_span, sweep_span
from .familyio import (FamilyFormatError, canonical_json_bytes, family_hash,
                       family_to_bytes, format_gaussian_rational, read_family)
from .generators import KINDS, FamilyRecipe, generate
from .grids import parse_grid_spec
from .injectivity import (check_region, minimal_injective_regions,
                          mps_injectivity_length)
from .linalg import make_engine

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_RESOURCE = 3


def _engine_from(args) -> object:
    return make_engine(args.engine, tolerance=args.tolerance)


def _emit(obj, args, t0: float) -> None:
    if getattr(args, "timing", False):
        obj["timing"] = {"seconds": time.monotonic() - t0}
    else:
        obj["timing"] = None
    sys.stdout.buffer.write(canonical_json_bytes(obj))


def _witness_obj(w) -> dict:
    if w is None:
        return None
    obj = {"assignments": [list(a) for a in w.assignments],
           "engine": w.engine,
           "certified_nonzero": w.certified_nonzero}
    if w.det_log_abs is not None:
        obj["det_log_abs"] = w.det_log_abs
    if w.det_magnitude is not None and w.det_magnitude < float("inf"):
        obj["det_magnitude"] = w.det_magnitude
    if w.det_exact is not None:
        obj["det_exact"] = format_gaussian_rational(w.det_exact)
    if w.certifying_prime is not None:
        obj["certifying_prime"] = w.certifying_prime
    return obj


def cmd_gen(args) -> int:
    recipe = FamilyRecipe(kind=args.kind, n=args.n, D=args.D, d=args.d,
                          seed=args.seed)
    family = generate(recipe)
    data = family_to_bytes(family, scalars=args.scalars)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_check(args) -> int:
    t0 = time.monotonic()
    family = read_family(args.family)
    spec = parse_grid_spec(args.grid)
    engine = _engine_from(args)
    report = check_region(spec, family, engine, want_witness=args.witness)
    obj = {
        "command": "check",
        "family_hash": family_hash(family),
        "grid": str(spec),
        "engine": engine.tag,
        "span_dim": report.span_dim,
        "full_dim": report.full_dim,
        "injective": report.injective,
        "d": report.d,
        "d_reduced": report.d_reduced,
        "witness": _witness_obj(report.witness),
    }
    if engine.tag == "float":
        obj["tolerance"] = engine.tolerance
    _emit(obj, args, t0)
    return EXIT_OK


def cmd_mps_length(args) -> int:
    t0 = time.monotonic()
    family = read_family(args.family)
    if family.n != 1:
        raise FamilyFormatError(f"mps-length needs an n=1 family, got n={family.n}")
    engine = _engine_from(args)
    rep = mps_injectivity_length(family, cap=args.cap, engine=engine)
    obj = {
        "command": "mps_length",
        "family_hash": family_hash(family),
        "engine": engine.tag,
        "length": rep.length,
        "status": rep.status,
        "cap_used": rep.cap_used,
        "theorem_cap": rep.theorem_cap,
        "d": rep.d,
        "d_reduced": rep.d_reduced,
        "span_dims": rep.dims,
    }
    _emit(obj, args, t0)
    return EXIT_OK


def cmd_search(args) -> int:
    t0 = time.monotonic()
    family = read_family(args.family)
    cap = parse_grid_spec(args.cap)
    engine = _engine_from(args)
    res = minimal_injective_regions(family, cap, engine)
    obj = {
        "command": "search",
        "family_hash": family_hash(family),
        "engine": engine.tag,
        "cap": str(cap),
        "minimal_injective": [str(s) for s in res.minimal_injective],
        "complete_within_cap": res.complete_within_cap,
    }
    _emit(obj, args, t0)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    t0 = time.monotonic()
    family = read_family(args.family)
    spec = parse_grid_spec(args.grid)
    engine = _engine_from(args)
    sweep = sweep_span(spec, family, engine)
    brute = brute_force_span(spec, family, engine, materialize=False)
    obj = {
        "command": "oracle_check",
        "family_hash": family_hash(family),
        "grid": str(spec),
        "engine": engine.tag,
        "sweep_dim": sweep.dim,
        "brute_rank": brute.rank,
        "equal": sweep.dim == brute.rank,
    }
    _emit(obj, args, t0)
    return EXIT_OK if obj["equal"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="injregions",
        description="Decide injective regions of grid tensor families.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add_common(p):
        p.add_argument("--engine", choices=("float", "rational"), default="float")
        p.add_argument("--tolerance", type=float, default=1e-9,
                       help="relative residual threshold of the float engine")
        p.add_argument("--timing", action="store_true",
                       help="add wall-clock timing to the report "
                            "(makes output nondeterministic)")

    g = sub.add_parser("gen", help="generate a named or seeded random family")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--D", type=int, default=2)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scalars", choices=("auto", "float", "rational"), default="auto")
    g.add_argument("-o", "--output")
    g.set_defaults(fn=cmd_gen)

    c = sub.add_parser("check", help="is a grid an injective region?")
    c.add_argument("--family", required=True)
    c.add_argument("--grid", required=True, help='grid spec, e.g. "3x5"')
    c.add_argument("--witness", action="store_true",
                   help="also produce and verify an injectivity certificate")
    add_common(c)
    c.set_defaults(fn=cmd_check)

    m = sub.add_parser("mps-length", help="quantum-Wielandt injectivity length (n=1)")
    m.add_argument("--family", required=True)
    m.add_argument("--cap", type=int, default=None,
                   help="search cap; below the theorem bound a miss is 'unknown'")
    add_common(m)
    m.set_defaults(fn=cmd_mps_length)

    s = sub.add_parser("search", help="minimal injective regions within a cap box")
    s.add_argument("--family", required=True)
    s.add_argument("--cap", required=True, help='cap spec, e.g. "3x3"')
    add_common(s)
    s.set_defaults(fn=cmd_search)

    o = sub.add_parser("oracle-check", help="compare sweep span against brute force")
    o.add_argument("--family", required=True)
    o.add_argument("--grid", required=True)
    add_common(o)
    o.set_defaults(fn=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except FamilyFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
