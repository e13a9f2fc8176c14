"""Families of local site tensors.

A family is a tuple of d tensors in (C^D)^(2n), each with axes in port
order (-e1, +e1, ..., -en, +en).  The same family object serves both
engines: the float path reads the stacked complex array, the certified
path requires the exact rational payload and derives per-prime residue
arrays from it on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .scalars import GaussianRational
from .tensors import DenseTensor


@dataclass
class TensorFamily:
    n: int
    D: int
    d: int
    tensors: list[DenseTensor]
    _stack: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _lane_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.D < 1 or self.d < 1:
            raise ValueError("need n >= 1, D >= 1, d >= 1")
        if len(self.tensors) != self.d:
            raise ValueError(f"expected {self.d} tensors, got {len(self.tensors)}")
        want = (self.D,) * (2 * self.n)
        for k, t in enumerate(self.tensors):
            if t.shape != want:
                raise ValueError(f"tensor {k} has shape {t.shape}, expected {want}")

    @property
    def has_exact(self) -> bool:
        return all(t.has_exact for t in self.tensors)

    def as_array(self) -> np.ndarray:
        """Stacked complex array of shape (d, D, ..., D)."""
        if self._stack is None:
            self._stack = np.stack([t.data for t in self.tensors])
        return self._stack

    def exact_array(self) -> np.ndarray:
        if not self.has_exact:
            raise ValueError("family has no exact rational payload")
        return np.stack([t.exact for t in self.tensors])

    def lane_array(self, p: int) -> np.ndarray:
        """Residues of the stacked exact entries modulo p, as a complex128
        array with integer-valued parts in [0, p)."""
        if p not in self._lane_cache:
            if not self.has_exact:
                raise ValueError("certified engine requires exact rational entries; "
                                 "this family only has float data")
            shape = (self.d,) + (self.D,) * (2 * self.n)
            out = np.empty(shape, dtype=np.complex128)
            it = out.reshape(-1)
            flat = self.exact_array().reshape(-1)
            for k in range(flat.size):
                re, im = flat[k].mod_pair(p)
                it[k] = complex(re, im)
            self._lane_cache[p] = out
        return self._lane_cache[p]

    def tensor_vectors(self) -> np.ndarray:
        """Tensors flattened row-major, stacked as rows (d, D^(2n))."""
        return self.as_array().reshape(self.d, -1)

    def exact_vectors(self) -> np.ndarray:
        return self.exact_array().reshape(self.d, -1)

    def subfamily(self, indices: list[int]) -> "TensorFamily":
        return TensorFamily(self.n, self.D, len(indices),
                            [self.tensors[i] for i in indices])

    def permute_axes(self, perm: list[int]) -> "TensorFamily":
        """Relabel the n grid axes by `perm` (0-based: new axis i is old
        axis perm[i]), permuting each tensor's port pairs to match."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError(f"perm must rearrange 0..{self.n - 1}")
        axes = []
        for i in range(self.n):
            axes.extend([2 * perm[i], 2 * perm[i] + 1])
        new = []
        for t in self.tensors:
            exact = np.transpose(t.exact, axes).copy() if t.has_exact else None
            new.append(DenseTensor(np.transpose(t.data, axes).copy(), exact))
        return TensorFamily(self.n, self.D, self.d, new)


def recombine(family: TensorFamily, coeffs: np.ndarray) -> TensorFamily:
    """Replace the family by linear combinations: new tensor i is
    sum_k coeffs[i, k] * old tensor k.  Exact payloads are recombined
    exactly when `coeffs` has integer entries."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (family.d, family.d):
        raise ValueError("coeffs must be d x d")
    arr = family.as_array()
    data = np.tensordot(coeffs.astype(np.complex128), arr, axes=(1, 0))
    exact = None
    if family.has_exact and np.issubdtype(coeffs.dtype, np.integer):
        gr = np.empty(coeffs.shape, dtype=object)
        for i in range(family.d):
            for j in range(family.d):
                gr[i, j] = GaussianRational(int(coeffs[i, j]))
        exact = np.tensordot(gr, family.exact_array(), axes=(1, 0))
    tensors = []
    for i in range(family.d):
        tensors.append(DenseTensor(data[i], exact[i] if exact is not None else None))
    return TensorFamily(family.n, family.D, family.d, tensors)
