import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from known_bases import COL_PAIRED_3X4, PAIRED_4X5, SMALL_2X3
from qclp import gf2
from qclp.lifted_product import (
    build_general,
    build_symmetric,
    row_pair_differences,
    verify_orthogonality_binary,
    verify_orthogonality_exponent,
)
from qclp.qcbase import NEG_INF, QcBaseMatrix, conjugate_transpose

# nonzero cells of each bx row for SMALL_2X3, as {cell: exponent}
GOLDEN_BX = [
    {0: 1, 3: 2, 6: 4, 9: 6, 10: 1},
    {1: 1, 4: 2, 7: 4, 9: 5, 10: 2},
    {2: 1, 5: 2, 8: 4, 9: 3, 10: 4},
    {0: 6, 3: 5, 6: 3, 11: 6, 12: 1},
    {1: 6, 4: 5, 7: 3, 11: 5, 12: 2},
    {2: 6, 5: 5, 8: 3, 11: 3, 12: 4},
]


@st.composite
def base_matrices(draw, max_L=16):
    L = draw(st.integers(2, max_L))
    m = draw(st.integers(2, 4))
    n = draw(st.integers(2, 4))
    cells = st.lists(st.integers(0, L - 1), min_size=n, max_size=n)
    return QcBaseMatrix(L, draw(st.lists(cells, min_size=m, max_size=m)))


def test_bx_matches_golden_display():
    bx = build_symmetric(SMALL_2X3).bx
    expected = np.full((6, 13), NEG_INF)
    for r, row in enumerate(GOLDEN_BX):
        for cell, e in row.items():
            expected[r, cell] = e
    assert np.array_equal(bx.entries, expected)


def test_symmetric_dimensions():
    p = build_symmetric(SMALL_2X3)
    assert p.hx.shape == p.hz.shape == (42, 91)
    assert p.layout.n_qubits == 91
    assert build_symmetric(COL_PAIRED_3X4).layout.n_qubits == 650
    assert build_symmetric(PAIRED_4X5).layout.n_qubits == 533


def test_hypergraph_product_limit():
    one = QcBaseMatrix(1, [[0]])
    p = build_general(one, one)
    assert p.hx.to_dense().tolist() == [[1, 1]]
    assert verify_orthogonality_binary(p)
    two = build_general(QcBaseMatrix(2, [[0]]), QcBaseMatrix(2, [[0]]))
    assert two.bx.entries.tolist() == [[0, 0]]
    assert two.hx.shape == (2, 4)


def test_mismatched_circulant_sizes():
    with pytest.raises(ValueError, match="circulant sizes differ"):
        build_general(QcBaseMatrix(3, [[0]]), QcBaseMatrix(4, [[0]]))


def test_general_pair_shapes():
    b1 = QcBaseMatrix(5, [[0, 1, 2]])
    b2 = QcBaseMatrix(5, [[0, 3], [1, 4]])
    p = build_general(b1, b2)
    # rows m1*n2, columns n1*n2 + m1*m2 in block units
    assert p.bx.shape == (2, 3 * 2 + 1 * 2)
    assert p.bz.shape == (3 * 2, 3 * 2 + 1 * 2)
    assert verify_orthogonality_binary(p) and verify_orthogonality_exponent(p)


def test_example_row_pair_differences_have_zero_or_two_integers():
    diffs = row_pair_differences(build_symmetric(SMALL_2X3))
    counts = (diffs != NEG_INF).sum(axis=-1)
    assert set(np.unique(counts).tolist()) <= {0, 2}
    assert verify_orthogonality_exponent(build_symmetric(SMALL_2X3))


def test_perturbed_pair_fails_both_checks():
    p = build_symmetric(SMALL_2X3)
    entries = p.bx.entries.copy()
    entries[0, 0] = (entries[0, 0] + 1) % 7
    bad = type(p)(QcBaseMatrix(7, entries), p.bz, p.source, p.symmetric)
    assert not verify_orthogonality_binary(bad)
    assert not verify_orthogonality_exponent(bad)


def test_all_zero_base_is_orthogonal():
    p = build_symmetric(QcBaseMatrix(5, np.zeros((2, 2), dtype=int)))
    assert verify_orthogonality_exponent(p) and verify_orthogonality_binary(p)


@settings(max_examples=60, deadline=None)
@given(base_matrices())
def test_orthogonality_checks_agree(b):
    p = build_symmetric(b)
    assert verify_orthogonality_binary(p)
    assert verify_orthogonality_exponent(p) == verify_orthogonality_binary(p)


@settings(max_examples=60, deadline=None)
@given(base_matrices(), st.data())
def test_perturbations_agree(b, data):
    p = build_symmetric(b)
    r = data.draw(st.integers(0, p.bx.m - 1))
    cols = np.flatnonzero(p.bx.entries[r] != NEG_INF)
    c = int(cols[data.draw(st.integers(0, len(cols) - 1))])
    shift = data.draw(st.integers(1, b.L - 1))
    entries = p.bx.entries.copy()
    entries[r, c] = (entries[r, c] + shift) % b.L
    bad = type(p)(QcBaseMatrix(b.L, entries), p.bz, p.source, p.symmetric)
    assert verify_orthogonality_exponent(bad) == verify_orthogonality_binary(bad)


@settings(max_examples=40, deadline=None)
@given(base_matrices())
def test_stabilizer_weights_and_block_structure(b):
    p = build_symmetric(b)
    m, n = b.shape
    for h in (p.hx, p.hz):
        assert set(h.row_weights().tolist()) == {m + n}
    code_z = p.code_part("z")
    for k in range(n):
        block = code_z[k * m : (k + 1) * m, k * n : (k + 1) * n]
        assert np.array_equal(block, b.entries)
    star = conjugate_transpose(b).entries
    trans_x = p.transpose_part("x")
    for k in range(m):
        block = trans_x[k * n : (k + 1) * n, k * m : (k + 1) * m]
        assert np.array_equal(block, star)


def test_lifted_matrices_are_shift_invariant():
    from qclp.css import is_block_shift_invariant

    p = build_symmetric(SMALL_2X3)
    assert is_block_shift_invariant(p.hx, 7) and is_block_shift_invariant(p.hz, 7)
    assert gf2.multiply(p.hx, p.hz.T).is_zero()
