import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from injregions import (FloatEngine, GaussianRational, RationalEngine,
                        add_to_basis, determinant_exact, make_engine, rank)
from injregions.linalg import LANE_PRIMES, det_nonzero_mod, mod_p


def gr(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


def gr_matrix(rows):
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = x if isinstance(x, GaussianRational) else gr(x)
    return out


def random_gr_matrix(m, n, seed, den=7):
    rng = np.random.default_rng(seed)
    a = rng.integers(-9, 10, size=(m, n))
    b = rng.integers(-9, 10, size=(m, n))
    return gr_matrix([[GaussianRational(Fraction(int(a[i, j]), den),
                                        Fraction(int(b[i, j]), den))
                       for j in range(n)] for i in range(m)])


def to_complex(m):
    out = np.empty(m.shape, dtype=complex)
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            out[i, j] = complex(m[i, j])
    return out


# --- independent oracle: exact Gaussian elimination over Q(i) -------------

def elimination_rank(mat) -> int:
    rows = [list(r) for r in mat]
    ncols = len(rows[0])
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(rk, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = rows[rk][c]
        rows[rk] = [x / inv for x in rows[rk]]
        for i in range(len(rows)):
            if i != rk and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def cofactor_det(mat):
    n = mat.shape[0]
    if n == 1:
        return mat[0, 0]
    total = gr(0)
    sign = 1
    for j in range(n):
        minor = np.delete(np.delete(mat, 0, axis=0), j, axis=1)
        term = mat[0, j] * cofactor_det(minor)
        total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


# --- add_to_basis ----------------------------------------------------------

def test_add_in_span_rejected_float():
    eng = FloatEngine()
    sub = eng.subspace(3)
    assert sub.add(np.array([1.0, 2.0, 0.0]))
    assert not sub.add(np.array([2.0, 4.0, 0.0]))
    assert sub.dim == 1


def test_add_orthogonal_accepted_float():
    eng = FloatEngine()
    sub = eng.subspace(3)
    sub.add(np.array([1.0, 0, 0]))
    accepted, sub = add_to_basis(sub, np.array([0, 1.0, 0]))
    assert accepted and sub.dim == 2


def test_fifty_random_vectors_dim_16_matches_elimination():
    rng = np.random.default_rng(0)
    ints_re = rng.integers(-5, 6, size=(50, 16))
    ints_im = rng.integers(-5, 6, size=(50, 16))
    fl = FloatEngine().subspace(16)
    fl.extend(ints_re + 1j * ints_im)
    assert fl.dim == 16
    exact = gr_matrix([[GaussianRational(int(ints_re[i, j]), int(ints_im[i, j]))
                        for j in range(16)] for i in range(50)])
    assert elimination_rank(exact) == 16
    assert RationalEngine().rank(exact) == 16


def test_add_to_basis_rational_and_idempotence():
    eng = RationalEngine()
    rows = [np.array([gr(1), gr(0), gr(2)], dtype=object),
            np.array([gr(0), gr(1), gr(1, 1)], dtype=object)]
    from injregions.linalg import _exact_batch_maker, _exact_row_source
    store = list(rows)
    sub = eng.subspace(3, row_source=_exact_row_source(store))
    for r in rows:
        assert sub.extend(1, _exact_batch_maker([r])) == [0]
    # re-adding an accepted vector is rejected
    assert sub.extend(1, _exact_batch_maker([rows[0]])) == []
    # a combination is rejected
    combo = np.array([rows[0][k] + rows[1][k] for k in range(3)], dtype=object)
    assert sub.extend(1, _exact_batch_maker([combo])) == []
    assert sub.dim == 2


# --- rank ------------------------------------------------------------------

def test_rank_identity_and_rank_one():
    eng = FloatEngine()
    assert eng.rank(np.eye(5)) == 5
    u = np.arange(1, 5, dtype=float)
    assert eng.rank(np.outer(u, u)) == 1
    assert RationalEngine().rank(gr_matrix([[1, 2], [2, 4]])) == 1


def test_float_rank_matches_exact_rank_random():
    for seed in range(8):
        m = random_gr_matrix(6, 9, seed)
        exact_rank = RationalEngine().rank(m)
        assert elimination_rank(m) == exact_rank
        assert FloatEngine().rank(to_complex(m)) == exact_rank


def test_rank_transpose_invariant():
    for seed in (3, 4):
        m = random_gr_matrix(5, 8, seed)
        fe, re_ = FloatEngine(), RationalEngine()
        assert fe.rank(to_complex(m)) == fe.rank(to_complex(m).T)
        assert re_.rank(m) == re_.rank(m.T)


# --- determinant ------------------------------------------------------------

def test_determinant_identity_and_repeated_rows():
    assert determinant_exact(gr_matrix([[1, 0], [0, 1]])) == gr(1)
    assert determinant_exact(gr_matrix([[1, 2], [1, 2]])) == gr(0)
    with pytest.raises(ValueError):
        determinant_exact(gr_matrix([[1, 2, 3], [4, 5, 6]]))


def test_determinant_against_cofactor_oracle():
    for seed in range(5):
        m = random_gr_matrix(4, 4, seed, den=3)
        assert determinant_exact(m) == cofactor_det(m)


def test_determinant_needs_pivot_swap():
    m = gr_matrix([[0, 1], [1, 0]])
    assert determinant_exact(m) == gr(-1)


# --- modular plumbing --------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(-2 ** 52 + 1, 2 ** 52 - 1))
def test_mod_p_matches_python_mod(x):
    p = LANE_PRIMES[0]
    out = mod_p(np.array([float(x)]), p)
    assert int(out[0]) == x % p


def test_det_nonzero_mod():
    p = LANE_PRIMES[0]
    assert det_nonzero_mod(np.array([[1, 2], [3, 4]], dtype=complex), p)
    assert not det_nonzero_mod(np.array([[1, 2], [2, 4]], dtype=complex), p)
    assert not det_nonzero_mod(np.array([[p, 0], [0, 1]], dtype=complex), p)
    assert det_nonzero_mod(np.array([[1j, 1], [1, 1j]], dtype=complex), p)  # det -2


def test_lane_degrade_and_rebuild():
    # second row vanishes mod 3 but not mod 7: lane 3 degrades, gets
    # replaced from the prime table, and the subspace still certifies both
    eng = RationalEngine(lanes=2, primes=(3, 7, 11, 19))
    rows = [np.array([gr(1), gr(1)], dtype=object),
            np.array([gr(1), gr(4)], dtype=object)]   # row2 - row1 = (0, 3)
    from injregions.linalg import _exact_batch_maker, _exact_row_source
    sub = eng.subspace(2, row_source=_exact_row_source(rows))
    acc = sub.extend(2, _exact_batch_maker(rows))
    assert acc == [0, 1]
    assert sub.dim == 2
    primes_now = {ln.p for ln in sub.lanes if not ln.degraded}
    assert len(primes_now) >= 1 and 3 not in primes_now


def test_single_tiny_lane_can_undercount():
    # documented caveat of the rejection side: with a single lane a vector
    # dependent modulo that one prime is silently dropped
    from injregions.linalg import _exact_batch_maker, _exact_row_source
    eng = RationalEngine(lanes=1, primes=(3,))
    rows = [np.array([gr(1), gr(1)], dtype=object),
            np.array([gr(1), gr(4)], dtype=object)]   # row2 - row1 = (0, 3)
    sub = eng.subspace(2, row_source=_exact_row_source(rows))
    sub.extend(2, _exact_batch_maker(rows))
    assert sub.dim == 1


def test_lane_exhaustion_raises():
    from injregions.linalg import LaneExhaustionError, _exact_batch_maker, \
        _exact_row_source
    eng = RationalEngine(lanes=2, primes=(3, 7))
    rows = [np.array([gr(1), gr(1)], dtype=object),
            np.array([gr(1), gr(4)], dtype=object)]
    sub = eng.subspace(2, row_source=_exact_row_source(rows))
    sub.extend(2, _exact_batch_maker(rows))   # lane 3 degrades, accepts stand
    assert sub.dim == 2
    with pytest.raises(LaneExhaustionError):
        # no primes left to restore a second healthy lane
        sub.extend(1, _exact_batch_maker([rows[0]]))


def test_engine_agreement_integer_suite():
    for seed in range(6):
        rng = np.random.default_rng(100 + seed)
        ints = rng.integers(-4, 5, size=(12, 10))
        ints_i = rng.integers(-4, 5, size=(12, 10))
        exact = gr_matrix([[GaussianRational(int(ints[i, j]), int(ints_i[i, j]))
                            for j in range(10)] for i in range(12)])
        assert FloatEngine().rank(ints + 1j * ints_i) == RationalEngine().rank(exact)


def test_make_engine():
    assert make_engine("float", tolerance=1e-8).tolerance == 1e-8
    assert make_engine("rational").lanes == 2
    with pytest.raises(ValueError):
        make_engine("symbolic")
    with pytest.raises(ValueError):
        FloatEngine(tolerance=0)
    with pytest.raises(ValueError):
        RationalEngine(primes=(5,), lanes=1)   # 5 = 1 mod 4
