"""Family files (version 1) and canonical report serialization.

The wire format is JSON with sorted keys and no whitespace; floats use
Python's shortest round-trip repr.  Serializing is therefore a pure
function of the data, and file hashes are stable across runs.

    {"version": 1, "n": ..., "D": ..., "d": ..., "scalars": "float"|"rational",
     "tensors": [{"re": [...], "im": [...]}, ...]}

Each tensor is flat row-major over its 2n axes in port order
(-e1, +e1, ..., -en, +en).  Rational scalars are strings "p/q"; rational
families load with an exact payload and work with the certified engine,
float families do not.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Union

import numpy as np

from .families import TensorFamily
from .scalars import GaussianRational, format_rational, parse_rational
from .tensors import DenseTensor


class FamilyFormatError(ValueError):
    """Malformed family file."""


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":"),
                       allow_nan=False) + "\n").encode("ascii")


def family_to_obj(family: TensorFamily, scalars: str = "auto") -> dict:
    if scalars == "auto":
        scalars = "rational" if family.has_exact else "float"
    if scalars not in ("float", "rational"):
        raise ValueError(f"unknown scalars mode {scalars!r}")
    tensors = []
    for t in family.tensors:
        if scalars == "rational":
            if not t.has_exact:
                raise ValueError("family has no exact payload; write scalars='float'")
            flat = t.exact.reshape(-1)
            tensors.append({
                "re": [format_rational(x.re) for x in flat],
                "im": [format_rational(x.im) for x in flat],
            })
        else:
            flat = t.data.reshape(-1)
            tensors.append({
                "re": [float(x) for x in flat.real],
                "im": [float(x) for x in flat.imag],
            })
    return {"version": 1, "n": family.n, "D": family.D, "d": family.d,
            "scalars": scalars, "tensors": tensors}


def family_to_bytes(family: TensorFamily, scalars: str = "auto") -> bytes:
    return canonical_json_bytes(family_to_obj(family, scalars))


def write_family(family: TensorFamily, path: str, scalars: str = "auto") -> None:
    with open(path, "wb") as fh:
        fh.write(family_to_bytes(family, scalars))


def family_from_obj(obj) -> TensorFamily:
    try:
        if not isinstance(obj, dict):
            raise FamilyFormatError("family file must contain a JSON object")
        if obj.get("version") != 1:
            raise FamilyFormatError(f"unrecognized version {obj.get('version')!r}")
        n, D, d = int(obj["n"]), int(obj["D"]), int(obj["d"])
        scalars = obj["scalars"]
        if scalars not in ("float", "rational"):
            raise FamilyFormatError(f"unknown scalars mode {scalars!r}")
        raw = obj["tensors"]
        if len(raw) != d:
            raise FamilyFormatError(f"expected {d} tensors, found {len(raw)}")
        shape = (D,) * (2 * n)
        size = D ** (2 * n)
        tensors = []
        for entry in raw:
            re, im = entry["re"], entry["im"]
            if len(re) != size or len(im) != size:
                raise FamilyFormatError(f"tensor arrays must have length {size}")
            if scalars == "rational":
                exact = np.empty(size, dtype=object)
                for k in range(size):
                    exact[k] = GaussianRational(parse_rational(str(re[k])),
                                                parse_rational(str(im[k])))
                tensors.append(DenseTensor.from_exact(exact.reshape(shape)))
            else:
                data = np.array([complex(float(a), float(b))
                                 for a, b in zip(re, im)]).reshape(shape)
                tensors.append(DenseTensor(data))
        return TensorFamily(n, D, d, tensors)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        if isinstance(e, FamilyFormatError):
            raise
        raise FamilyFormatError(f"malformed family file: {e}") from e


def read_family(path: str) -> TensorFamily:
    try:
        with open(path, "rb") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise FamilyFormatError(f"cannot read family file {path}: {e}") from e
    return family_from_obj(obj)


def family_hash(family_or_bytes: Union[TensorFamily, bytes]) -> str:
    """sha256 of the canonical serialization, for report provenance."""
    if isinstance(family_or_bytes, TensorFamily):
        data = family_to_bytes(family_or_bytes)
    else:
        data = family_or_bytes
    return "sha256:" + hashlib.sha256(data).hexdigest()


def format_gaussian_rational(x: GaussianRational) -> str:
    return f"{format_rational(x.re)},{format_rational(x.im)}"
