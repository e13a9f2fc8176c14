import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from injregions import (AxisOrder, DenseTensor, GaussianRational,
                        ShapeMismatchError, contract_pair, flatten,
                        tensor_product)
from injregions.tensors import flatten_exact, identity_matrix_tensor


def rand_tensor(shape, seed):
    rng = np.random.default_rng(seed)
    return DenseTensor(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_matrix_product():
    # contracting axis 1 of A1 with axis 0 of A2 is the matrix product
    rng = np.random.default_rng(0)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    out = contract_pair(DenseTensor(a), [1], DenseTensor(b), [0])
    np.testing.assert_allclose(out.data, a @ b, rtol=1e-13)


def test_identity_contraction_reorders_axes():
    t = rand_tensor((3, 2, 4), seed=1)
    eye = DenseTensor(np.eye(2))
    out = contract_pair(eye, [1], t, [1])
    # result axes: remaining axis of eye, then remaining axes of t
    np.testing.assert_allclose(out.data, np.transpose(t.data, (1, 0, 2)), rtol=1e-13)


def test_contract_pair_against_triple_loop():
    t1 = rand_tensor((2, 2, 2), seed=2)
    t2 = rand_tensor((2, 2, 2), seed=3)
    out = contract_pair(t1, [2], t2, [0])
    # independent nested-loop oracle
    expect = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    acc = 0
                    for s in range(2):
                        acc += t1.data[i, j, s] * t2.data[s, k, l]
                    expect[i, j, k, l] = acc
    np.testing.assert_allclose(out.data, expect, rtol=1e-13)


def test_contract_pair_errors():
    t1 = rand_tensor((2, 3), seed=4)
    t2 = rand_tensor((2, 2), seed=5)
    with pytest.raises(ShapeMismatchError):
        contract_pair(t1, [1], t2, [0])      # 3 vs 2
    with pytest.raises(ShapeMismatchError):
        contract_pair(t1, [2], t2, [0])      # axis out of range
    with pytest.raises(ShapeMismatchError):
        contract_pair(t1, [0, 0], t2, [0, 1])  # duplicate axis
    with pytest.raises(ShapeMismatchError):
        contract_pair(t1, [0, 1], t2, [0])   # length mismatch


def test_tensor_product_scalar_identity():
    one = DenseTensor(np.ones(()))
    t = rand_tensor((2, 3), seed=6)
    out = tensor_product(one, t)
    np.testing.assert_allclose(out.data, t.data)


def test_tensor_product_basis_vectors():
    e1 = DenseTensor(np.array([1.0, 0.0]))
    e2 = DenseTensor(np.array([0.0, 1.0]))
    out = tensor_product(e1, e2)
    np.testing.assert_allclose(out.data.reshape(-1), [0, 1, 0, 0])


def test_tensor_product_against_outer_loop():
    u = rand_tensor((2,), seed=7)
    v = rand_tensor((2,), seed=8)
    out = tensor_product(u, v)
    for i in range(2):
        for j in range(2):
            assert out.data[i, j] == u.data[i] * v.data[j]


def test_flatten_identity_and_transpose():
    t = rand_tensor((2, 3), seed=9)
    order = AxisOrder(("a", "b"))
    same = flatten(t, order, order)
    np.testing.assert_allclose(same, t.data.reshape(-1))
    swapped = flatten(t, order, AxisOrder(("b", "a")))
    np.testing.assert_allclose(swapped, t.data.T.reshape(-1))


def test_flatten_cyclic_permutation_index_oracle():
    t = rand_tensor((2, 2, 2), seed=10)
    order = AxisOrder(("x", "y", "z"))
    target = AxisOrder(("y", "z", "x"))
    flat = flatten(t, order, target)
    # index-arithmetic oracle: entry (y, z, x) of the result
    for x in range(2):
        for y in range(2):
            for z in range(2):
                assert flat[(y * 2 + z) * 2 + x] == t.data[x, y, z]


def test_flatten_rejects_non_permutation():
    t = rand_tensor((2, 2), seed=11)
    with pytest.raises(ValueError):
        flatten(t, AxisOrder(("a", "b")), AxisOrder(("a", "c")))


@given(st.permutations(list(range(4))), st.integers(0, 2 ** 31))
def test_flatten_roundtrip(perm, seed):
    t = rand_tensor((2, 3, 4, 5)[:4], seed=seed % 1000)
    labels = ("a", "b", "c", "d")
    order = AxisOrder(labels)
    target = AxisOrder(tuple(labels[p] for p in perm))
    once = flatten(t, order, target)
    shape_t = tuple(t.shape[p] for p in perm)
    back = flatten(DenseTensor(once.reshape(shape_t)), target, order)
    np.testing.assert_array_equal(back, t.data.reshape(-1))


def test_bilinearity_float_and_exact():
    t1, t1p, t2 = (rand_tensor((2, 2), s) for s in (12, 13, 14))
    a, b = 1.7 - 0.3j, -2.2 + 1j
    lhs = contract_pair(DenseTensor(a * t1.data + b * t1p.data), [1], t2, [0])
    rhs = a * contract_pair(t1, [1], t2, [0]).data \
        + b * contract_pair(t1p, [1], t2, [0]).data
    np.testing.assert_allclose(lhs.data, rhs, rtol=1e-12)

    # exact version over Gaussian rationals
    def gr_mat(entries):
        out = np.empty((2, 2), dtype=object)
        for i in range(2):
            for j in range(2):
                out[i, j] = GaussianRational(Fraction(entries[i][j][0], 7),
                                             Fraction(entries[i][j][1], 3))
        return DenseTensor.from_exact(out)

    x = gr_mat([[(1, 2), (3, -1)], [(0, 5), (2, 2)]])
    y = gr_mat([[(2, 0), (1, 1)], [(4, -3), (0, 1)]])
    z = gr_mat([[(1, 1), (2, 0)], [(3, 0), (1, -1)]])
    c = GaussianRational(Fraction(5, 2), Fraction(-1, 3))
    scaled = np.empty((2, 2), dtype=object)
    for i in range(2):
        for j in range(2):
            scaled[i, j] = c * x.exact[i, j] + y.exact[i, j]
    lhs_e = contract_pair(DenseTensor.from_exact(scaled), [1], z, [0]).exact
    xe = contract_pair(x, [1], z, [0]).exact
    ye = contract_pair(y, [1], z, [0]).exact
    for i in range(2):
        for j in range(2):
            assert lhs_e[i, j] == c * xe[i, j] + ye[i, j]


def test_chained_contraction_associative():
    a, b, c = (rand_tensor((2, 2), s) for s in (15, 16, 17))
    ab_c = contract_pair(contract_pair(a, [1], b, [0]), [1], c, [0])
    a_bc = contract_pair(a, [1], contract_pair(b, [1], c, [0]), [0])
    np.testing.assert_allclose(ab_c.data, a_bc.data, rtol=1e-12)


def test_exact_payload_propagates():
    eye = identity_matrix_tensor(2)
    prod = contract_pair(eye, [1], eye, [0])
    assert prod.has_exact
    assert prod.exact[0, 0] == GaussianRational(1)
    assert prod.exact[0, 1] == GaussianRational(0)
    flat = flatten_exact(prod, AxisOrder(("l", "r")), AxisOrder(("r", "l")))
    assert [bool(x) for x in flat] == [True, False, False, True]


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        DenseTensor(np.array([1.0, np.inf]))
