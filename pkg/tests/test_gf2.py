import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_rank, kernel, span
from qclp import gf2
from qclp.gf2 import BinaryMatrix
from qclp.qcbase import lift
from known_bases import SMALL_2X3


def binary_arrays(max_rows=8, max_cols=70):
    shapes = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shapes.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def test_pack_roundtrip_crosses_word_boundary():
    rng = np.random.default_rng(3)
    dense = rng.integers(0, 2, size=(5, 130), dtype=np.uint8)
    assert np.array_equal(gf2.unpack_rows(gf2.pack_rows(dense), 130), dense)


def test_spill_bits_rejected():
    words = np.array([[np.uint64(1) << np.uint64(10)]], dtype=np.uint64)
    with pytest.raises(ValueError, match="beyond"):
        BinaryMatrix(1, 5, words)


def test_matrices_are_read_only():
    a = BinaryMatrix.from_dense([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        a.words[0, 0] = 0


def test_multiply_shape_mismatch():
    with pytest.raises(ValueError, match="cannot multiply"):
        gf2.multiply(BinaryMatrix.zeros(2, 3), BinaryMatrix.zeros(2, 3))


def test_lifted_example_rank_and_kernel():
    h = lift(SMALL_2X3)
    assert gf2.rank(h) == 13
    basis = gf2.nullspace_basis(h)
    assert basis.shape == (8, 21)
    assert gf2.multiply(h, basis.T).is_zero()
    rref, pivots = gf2.row_reduce(h)
    assert rref.rows == len(pivots) == 13


@settings(max_examples=150, deadline=None)
@given(binary_arrays())
def test_rank_matches_transpose(dense):
    a = BinaryMatrix.from_dense(dense)
    assert gf2.rank(a) == gf2.rank(a.T)


@settings(max_examples=150, deadline=None)
@given(binary_arrays())
def test_nullspace_dimension_and_orthogonality(dense):
    a = BinaryMatrix.from_dense(dense)
    basis = gf2.nullspace_basis(a)
    assert basis.rows == a.cols - gf2.rank(a)
    assert gf2.rank(basis) == basis.rows
    if basis.rows:
        assert gf2.multiply(a, basis.T).is_zero()


@settings(max_examples=150, deadline=None)
@given(binary_arrays())
def test_standard_form_relation(dense):
    a = BinaryMatrix.from_dense(dense)
    form, perm, transform = gf2.rref_with_column_permutation(a)
    r = form.rows
    assert np.array_equal(form.to_dense()[:, :r], np.eye(r, dtype=np.uint8))
    permuted = BinaryMatrix.from_dense(a.to_dense()[:, perm])
    assert gf2.multiply(transform, permuted) == form


@settings(max_examples=100, deadline=None)
@given(binary_arrays(max_rows=6, max_cols=12), st.data())
def test_solve_agrees_with_rowspace(dense, data):
    a = BinaryMatrix.from_dense(dense)
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=a.cols, max_size=a.cols)))
    b = gf2.mat_vec(a, x)
    sol = gf2.solve(a, b)
    assert sol is not None and np.array_equal(gf2.mat_vec(a, sol), b)
    assert gf2.in_rowspace(a.T, b)


def test_solve_reports_inconsistency():
    a = BinaryMatrix.from_dense([[1, 1], [1, 1]])
    assert gf2.solve(a, [1, 0]) is None


def test_inverse_and_singular():
    a = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert gf2.multiply(a, gf2.inverse(a)) == BinaryMatrix.identity(3)
    with pytest.raises(ValueError, match="singular"):
        gf2.inverse(BinaryMatrix.from_dense([[1, 1], [1, 1]]))


@settings(max_examples=100, deadline=None)
@given(binary_arrays(max_rows=5, max_cols=9), binary_arrays(max_rows=5, max_cols=9))
def test_complement_basis_extends_span(sub_dense, space_dense):
    cols = min(sub_dense.shape[1], space_dense.shape[1])
    sub = BinaryMatrix.from_dense(sub_dense[:, :cols])
    space = BinaryMatrix.from_dense(space_dense[:, :cols])
    comp = gf2.complement_basis(sub, space)
    both = gf2.rank(gf2.vstack([sub, space]))
    assert gf2.rank(gf2.vstack([sub, comp])) == both
    assert comp.rows == both - gf2.rank(sub)


def test_small_cases_against_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        rows, cols = rng.integers(1, 5, size=2)
        dense = rng.integers(0, 2, size=(rows, cols))
        a = BinaryMatrix.from_dense(dense)
        assert gf2.rank(a) == brute_rank(dense)
        assert gf2.rank(gf2.nullspace_basis(a)) == len(kernel(dense)).bit_length() - 1
        rs = span(dense)
        for v in kernel(np.zeros((1, cols), dtype=np.int64)):
            assert gf2.in_rowspace(a, v) == (tuple(v) in rs)


def test_documented_small_examples():
    eye3 = BinaryMatrix.identity(3)
    assert gf2.multiply(eye3, eye3) == eye3
    assert gf2.rank(BinaryMatrix.zeros(4, 4)) == 0
    assert gf2.rank(BinaryMatrix.identity(5)) == 5
    assert gf2.nullspace_basis(eye3).rows == 0
    assert gf2.nullspace_basis(BinaryMatrix.from_dense([[1, 1]])).to_dense().tolist() == [[1, 1]]
    assert gf2.in_rowspace(BinaryMatrix.identity(2), [1, 1])
    assert gf2.in_rowspace(BinaryMatrix.from_dense([[1, 1, 0]]), [0, 0, 0])
    assert not gf2.in_rowspace(BinaryMatrix.from_dense([[1, 1, 0]]), [0, 1, 1])
    with pytest.raises(ValueError):
        gf2.in_rowspace(eye3, [1, 0])


def test_standard_form_examples():
    form, perm, _ = gf2.rref_with_column_permutation(BinaryMatrix.identity(4))
    assert form == BinaryMatrix.identity(4) and list(perm) == [0, 1, 2, 3]
    form, perm, _ = gf2.rref_with_column_permutation(BinaryMatrix.from_dense([[0, 1], [0, 1]]))
    assert form.to_dense().tolist() == [[1, 0]] and list(perm) == [1, 0]
    assert gf2.rref_with_column_permutation(lift(SMALL_2X3)).matrix.rows == 13


def test_parity_of_all_ones_product():
    rng = np.random.default_rng(1)
    dense = rng.integers(0, 2, size=(5, 7))
    out = gf2.multiply(BinaryMatrix.from_dense(dense), BinaryMatrix.from_dense(np.ones((7, 1))))
    assert out.to_dense().ravel().tolist() == (dense.sum(axis=1) % 2).tolist()


def test_lp_checks_multiply_to_zero():
    from qclp.lifted_product import build_symmetric

    p = build_symmetric(SMALL_2X3)
    prod = gf2.multiply(p.hx, p.hz.T)
    assert prod.shape == (42, 42) and prod.is_zero()


def test_rank_invariant_under_row_and_column_operations():
    rng = np.random.default_rng(21)
    for _ in range(50):
        dense = rng.integers(0, 2, size=(6, 9)).astype(np.uint8)
        r = gf2.rank(BinaryMatrix.from_dense(dense))
        moved = dense[rng.permutation(6)][:, rng.permutation(9)].copy()
        moved[0] ^= moved[1]
        assert gf2.rank(BinaryMatrix.from_dense(moved)) == r
