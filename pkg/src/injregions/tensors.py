"""Dense complex tensors and the pairwise contraction primitives.

Values are stored as numpy complex128 arrays in row-major order.  A tensor
may additionally carry an exact payload (an object array of
:class:`~injregions.scalars.GaussianRational`) when its entries are known
rationals; all operations propagate the payload so certified computations
never round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .scalars import GaussianRational


class ShapeMismatchError(ValueError):
    """Contracted axes have different extents, or axis index out of range."""


@dataclass(frozen=True)
class AxisOrder:
    """Ordered, distinct edge labels naming the axes of a tensor."""

    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate axis labels: {self.labels}")

    def __len__(self):
        return len(self.labels)

    def permutation_to(self, target: "AxisOrder") -> tuple[int, ...]:
        """Axis permutation p with target.labels[k] == self.labels[p[k]]."""
        if sorted(self.labels) != sorted(target.labels):
            raise ValueError(f"{target.labels} is not a permutation of {self.labels}")
        pos = {lab: i for i, lab in enumerate(self.labels)}
        return tuple(pos[lab] for lab in target.labels)


class DenseTensor:
    """Shape plus flat complex data; immutable by convention.

    `exact`, when present, mirrors `data` entry for entry with exact
    Gaussian rationals.
    """

    __slots__ = ("data", "exact")

    def __init__(self, data: np.ndarray, exact: Optional[np.ndarray] = None):
        data = np.asarray(data, dtype=np.complex128)
        if not np.all(np.isfinite(data)):
            raise ValueError("tensor entries must be finite")
        if exact is not None:
            exact = np.asarray(exact, dtype=object)
            if exact.shape != data.shape:
                raise ValueError("exact payload shape differs from data shape")
        self.data = data
        self.exact = exact

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    @classmethod
    def from_exact(cls, exact: np.ndarray) -> "DenseTensor":
        exact = np.asarray(exact, dtype=object)
        data = np.empty(exact.shape, dtype=np.complex128)
        flat_e, flat_d = exact.ravel(), data.reshape(-1)
        for k in range(flat_e.size):
            flat_d[k] = complex(flat_e[k])
        return cls(data, exact)

    def __repr__(self):
        tag = "exact" if self.has_exact else "float"
        return f"DenseTensor(shape={self.shape}, {tag})"


def _check_axes(t: DenseTensor, axes: Sequence[int], name: str):
    if len(set(axes)) != len(axes):
        raise ShapeMismatchError(f"duplicate axis indices in {name}: {axes}")
    for a in axes:
        if not 0 <= a < t.ndim:
            raise ShapeMismatchError(f"axis {a} out of range for shape {t.shape}")


def contract_pair(t1: DenseTensor, axes1: Sequence[int],
                  t2: DenseTensor, axes2: Sequence[int]) -> DenseTensor:
    """Contract matching axes of two tensors (plain bilinear sum, no
    conjugation).

    Result axes are the unmatched axes of t1 in order, then those of t2.
    """
    axes1, axes2 = list(axes1), list(axes2)
    if len(axes1) != len(axes2):
        raise ShapeMismatchError("axis lists have different lengths")
    _check_axes(t1, axes1, "t1")
    _check_axes(t2, axes2, "t2")
    for a1, a2 in zip(axes1, axes2):
        if t1.shape[a1] != t2.shape[a2]:
            raise ShapeMismatchError(
                f"extent {t1.shape[a1]} (axis {a1}) != {t2.shape[a2]} (axis {a2})")
    data = np.tensordot(t1.data, t2.data, axes=(axes1, axes2))
    exact = None
    if t1.has_exact and t2.has_exact:
        exact = np.tensordot(t1.exact, t2.exact, axes=(axes1, axes2))
        exact = np.asarray(exact, dtype=object).reshape(data.shape)
    return DenseTensor(data.reshape(data.shape), exact)


def tensor_product(t1: DenseTensor, t2: DenseTensor) -> DenseTensor:
    """Outer product; shape is the concatenation of the input shapes."""
    data = np.multiply.outer(t1.data, t2.data)
    exact = None
    if t1.has_exact and t2.has_exact:
        exact = np.multiply.outer(t1.exact, t2.exact)
    return DenseTensor(data, exact)


def flatten(t: DenseTensor, order: AxisOrder, target: AxisOrder) -> np.ndarray:
    """Flat row-major vector of t after permuting axes from `order` to
    `target`.  The permutation moves indices, not values."""
    if len(order) != t.ndim:
        raise ValueError(f"order has {len(order)} labels for a {t.ndim}-axis tensor")
    perm = order.permutation_to(target)
    return np.transpose(t.data, perm).reshape(-1).copy()


def flatten_exact(t: DenseTensor, order: AxisOrder, target: AxisOrder) -> np.ndarray:
    if not t.has_exact:
        raise ValueError("tensor carries no exact payload")
    perm = order.permutation_to(target)
    return np.transpose(t.exact, perm).reshape(-1).copy()


def identity_matrix_tensor(D: int) -> DenseTensor:
    exact = np.empty((D, D), dtype=object)
    for i in range(D):
        for j in range(D):
            exact[i, j] = GaussianRational(1 if i == j else 0)
    return DenseTensor(np.eye(D, dtype=np.complex128), exact)
