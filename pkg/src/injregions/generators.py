"""Deterministic construction of test families.

Random entries are reproducible bit for bit: a SplitMix64 stream feeds a
Box-Muller transform whose output is quantized to multiples of 2^-16.
The quantized values are exact dyadic rationals, so every generated
family carries an exact payload and works with both engines.  The recipe
is documented in :func:`gaussian_entry` so other implementations can
match it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .families import TensorFamily
from .scalars import GaussianRational
from .tensors import DenseTensor

_MASK64 = (1 << 64) - 1
QUANT_BITS = 16

KINDS = ("random_gaussian", "matrix_units", "identity_only", "pauli_IX",
         "pauli_XZ", "pauli_IXZ", "diagonal_projectors", "full_basis")


@dataclass(frozen=True)
class FamilyRecipe:
    kind: str
    n: int = 1
    D: int = 2
    d: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")


class SplitMix64:
    """The SplitMix64 generator (Steele, Lea, Flood 2014); 64-bit state,
    one 64-bit output per step."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def gaussian_entry(rng: SplitMix64) -> tuple[int, int]:
    """One complex standard-Gaussian entry, quantized.

    Draws k1, k2 as the top 53 bits of two SplitMix64 outputs, forms
    u1 = (k1+1) * 2^-53 in (0, 1], u2 = k2 * 2^-53 in [0, 1), applies
    Box-Muller (r = sqrt(-2 ln u1); re = r cos(2 pi u2), im = r sin(2 pi
    u2)) and rounds both parts to the nearest multiple of 2^-16 (ties to
    even).  Returns the two numerators over 2^16.
    """
    k1 = rng.next_u64() >> 11
    k2 = rng.next_u64() >> 11
    u1 = (k1 + 1) * 2.0 ** -53
    u2 = k2 * 2.0 ** -53
    r = math.sqrt(-2.0 * math.log(u1))
    theta = 2.0 * math.pi * u2
    scale = 1 << QUANT_BITS
    return (round(r * math.cos(theta) * scale), round(r * math.sin(theta) * scale))


def _dyadic_tensor(nums: list[tuple[int, int]], shape) -> DenseTensor:
    scale = 1 << QUANT_BITS
    exact = np.empty(len(nums), dtype=object)
    data = np.empty(len(nums), dtype=np.complex128)
    for k, (a, b) in enumerate(nums):
        exact[k] = GaussianRational(Fraction(a, scale), Fraction(b, scale))
        data[k] = complex(a / scale, b / scale)
    return DenseTensor(data.reshape(shape), exact.reshape(shape))


def _int_tensor(arr: np.ndarray) -> DenseTensor:
    arr = np.asarray(arr)
    exact = np.empty(arr.shape, dtype=object)
    it = np.nditer(arr, flags=["multi_index"])
    for x in it:
        exact[it.multi_index] = GaussianRational(int(x))
    return DenseTensor(arr.astype(np.complex128), exact)


_PAULI = {
    "I": np.array([[1, 0], [0, 1]]),
    "X": np.array([[0, 1], [1, 0]]),
    "Z": np.array([[1, 0], [0, -1]]),
}


def generate(recipe: FamilyRecipe) -> TensorFamily:
    """Build the family described by a recipe; deterministic for a fixed
    recipe including the seed."""
    n, D, d = recipe.n, recipe.D, recipe.d
    kind = recipe.kind
    if kind == "random_gaussian":
        rng = SplitMix64(recipe.seed)
        shape = (D,) * (2 * n)
        size = D ** (2 * n)
        tensors = [_dyadic_tensor([gaussian_entry(rng) for _ in range(size)], shape)
                   for _ in range(d)]
        return TensorFamily(n, D, d, tensors)
    if kind == "matrix_units":
        _require(kind, n == 1 and d == D * D, "needs n=1 and d=D^2")
        tensors = []
        for a in range(D):
            for b in range(D):
                m = np.zeros((D, D), dtype=np.int64)
                m[a, b] = 1
                tensors.append(_int_tensor(m))
        return TensorFamily(1, D, D * D, tensors)
    if kind == "identity_only":
        _require(kind, n == 1 and d == 1, "needs n=1 and d=1")
        return TensorFamily(1, D, 1, [_int_tensor(np.eye(D, dtype=np.int64))])
    if kind in ("pauli_IX", "pauli_XZ", "pauli_IXZ"):
        letters = kind.split("_")[1]
        _require(kind, n == 1 and D == 2 and d == len(letters),
                 f"needs n=1, D=2, d={len(letters)}")
        return TensorFamily(1, 2, d, [_int_tensor(_PAULI[c]) for c in letters])
    if kind == "diagonal_projectors":
        _require(kind, n == 1 and d == D, "needs n=1 and d=D")
        tensors = []
        for a in range(D):
            m = np.zeros((D, D), dtype=np.int64)
            m[a, a] = 1
            tensors.append(_int_tensor(m))
        return TensorFamily(1, D, D, tensors)
    if kind == "full_basis":
        _require(kind, d == D ** (2 * n), "needs d=D^(2n)")
        shape = (D,) * (2 * n)
        tensors = []
        for flat in range(d):
            m = np.zeros(d, dtype=np.int64)
            m[flat] = 1
            tensors.append(_int_tensor(m.reshape(shape)))
        return TensorFamily(n, D, d, tensors)
    raise AssertionError(kind)


def _require(kind: str, ok: bool, msg: str):
    if not ok:
        raise ValueError(f"recipe {kind}: {msg}")
