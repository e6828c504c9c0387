import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from known_bases import DEGENERATE_L24, SMALL_2X3
from qclp import gf2
from qclp.lifted_product import build_symmetric
from qclp.qcbase import (
    NEG_INF,
    QcBaseMatrix,
    canonicalize,
    conjugate,
    conjugate_transpose,
    cycle_witness,
    exponent_difference,
    girth,
    girth_bfs,
    girth_exponent,
    has_even_multiplicity,
    lift,
    lifted_walk_nodes,
    load_base_matrix,
    save_base_matrix,
)


@st.composite
def base_matrices(draw, max_L=9, max_dim=4, allow_neg_inf=True):
    L = draw(st.integers(2, max_L))
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    low = NEG_INF if allow_neg_inf else 0
    cells = st.lists(st.integers(low, L - 1), min_size=n, max_size=n)
    return QcBaseMatrix(L, draw(st.lists(cells, min_size=m, max_size=m)))


def test_single_cpm_matches_alpha_one():
    expected = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=np.uint8)
    assert np.array_equal(lift(QcBaseMatrix(3, [[1]])).to_dense(), expected)
    assert lift(QcBaseMatrix(3, [[0]])) == gf2.BinaryMatrix.identity(3)


def test_conjugate_transpose_example():
    star = conjugate_transpose(SMALL_2X3)
    assert star.entries.tolist() == [[6, 1], [5, 2], [3, 4]]
    zeros = QcBaseMatrix(5, np.zeros((2, 3), dtype=int))
    assert conjugate_transpose(zeros) == QcBaseMatrix(5, np.zeros((3, 2), dtype=int))
    assert conjugate_transpose(QcBaseMatrix(4, [[NEG_INF]])).entries.tolist() == [[NEG_INF]]


def test_exponent_helpers():
    assert exponent_difference(1, 6, 7) == 2
    assert exponent_difference(NEG_INF, 3, 7) == NEG_INF
    assert exponent_difference(5, 5, 7) == 0
    assert has_even_multiplicity([0, 0, 4, 4])
    assert not has_even_multiplicity([0, 4, 4])
    assert has_even_multiplicity([NEG_INF, 3, 3])
    for e in [NEG_INF, *range(9)]:
        assert conjugate(conjugate(e, 9), 9) == e


def test_lift_shape_and_weights():
    h = lift(SMALL_2X3)
    assert h.shape == (14, 21)
    assert set(h.row_weights().tolist()) == {3}
    assert set(h.col_weights().tolist()) == {2}


def test_canonicalize_examples():
    canon = canonicalize(SMALL_2X3)
    assert canon.entries.tolist() == [[0, 0, 0], [0, 5, 1]]
    assert canonicalize(canon) == canon
    assert canonicalize(QcBaseMatrix(7, [[5, 5], [5, 5]])).entries.tolist() == [[0, 0], [0, 0]]
    with pytest.raises(ValueError, match="fully connected"):
        canonicalize(QcBaseMatrix(7, [[0, NEG_INF]]))


def test_unit_scaling_relabels_the_lifted_graph():
    # c -> 3c inside every block maps lift(A) onto lift(3A), so the row/column
    # canonical form and the scaled form [[0,0,0],[0,1,3]] are the same code
    canon = canonicalize(SMALL_2X3)
    scaled = QcBaseMatrix(7, (3 * canon.entries) % 7)
    assert scaled.entries.tolist() == [[0, 0, 0], [0, 1, 3]]
    perm = np.array([(c // 7) * 7 + (3 * (c % 7)) % 7 for c in range(21)])
    rows = np.array([(r // 7) * 7 + (3 * (r % 7)) % 7 for r in range(14)])
    relabelled = np.zeros((14, 21), dtype=np.uint8)
    relabelled[np.ix_(rows, perm)] = lift(canon).to_dense()
    assert np.array_equal(relabelled, lift(scaled).to_dense())


def test_entries_are_reduced_and_read_only():
    b = QcBaseMatrix(5, [[7, -1]])
    assert b.row(0) == (2, NEG_INF)
    with pytest.raises(ValueError):
        b.entries[0, 0] = 1
    with pytest.raises(ValueError):
        QcBaseMatrix(0, [[0]])


@settings(max_examples=120, deadline=None)
@given(base_matrices())
def test_lift_of_conjugate_is_transpose(b):
    assert lift(conjugate_transpose(b)) == lift(b).T


@settings(max_examples=80, deadline=None)
@given(base_matrices(allow_neg_inf=False))
def test_canonical_form_preserves_code(b):
    canon = canonicalize(b)
    assert canon.is_canonical()
    h, hc = lift(b), lift(canon)
    assert gf2.rank(h) == gf2.rank(hc)
    assert sorted(h.row_weights()) == sorted(hc.row_weights())
    assert sorted(h.col_weights()) == sorted(hc.col_weights())


@settings(max_examples=150, deadline=None)
@given(base_matrices(max_dim=5), st.data())
def test_row_orthogonality_matches_even_multiplicity(b, data):
    i = data.draw(st.integers(0, b.m - 1))
    j = data.draw(st.integers(0, b.m - 1))
    x = QcBaseMatrix(b.L, [b.row(i)])
    y = QcBaseMatrix(b.L, [b.row(j)])
    orthogonal = gf2.multiply(lift(x), lift(y).T).is_zero()
    diff = [exponent_difference(a, c, b.L) for a, c in zip(b.row(i), b.row(j))]
    assert orthogonal == has_even_multiplicity(diff)


def test_json_round_trip(tmp_path):
    b = QcBaseMatrix(6, [[0, NEG_INF, 5], [1, 2, 3]])
    path = tmp_path / "b.json"
    save_base_matrix(b, path)
    data = json.loads(path.read_text())
    assert data["entries"][0][1] == "-inf"
    assert (data["L"], data["m"], data["n"]) == (6, 2, 3)
    assert load_base_matrix(path) == b


@pytest.mark.parametrize(
    "text, message",
    [
        ('{"L": 5,\n "entries": [[0, 9]]}', r"entries\[0\]\[1\]"),
        ('{"L": 5, "m": 2, "entries": [[0, 1]]}', "declared m=2"),
        ('{"entries": [[0]]}', "missing field"),
        ('{"L": 5, "entries": [[0, 1], [2]]}', "unequal"),
        ('{"L": 5, "entries": [[0, "x"]]}', "not '-inf'"),
        ('{"L": 5,\n  "entries": [[0 1]]}', "line 2 column"),
    ],
)
def test_json_errors_are_located(tmp_path, text, message):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ValueError, match=message):
        load_base_matrix(path)


def test_girth_examples():
    assert girth(QcBaseMatrix(2, [[0, 0], [0, 0]])) == 4
    assert girth(build_symmetric(SMALL_2X3).bx) == 8
    assert girth(DEGENERATE_L24) == 8
    with pytest.raises(ValueError, match="no edges"):
        girth(QcBaseMatrix(3, [[NEG_INF, NEG_INF]]))


def test_girth_of_tree_is_infinite():
    b = QcBaseMatrix(3, [[0, NEG_INF], [NEG_INF, 0]])
    assert girth(b) == math.inf


def test_girth_bfs_against_exponent_condition():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        L = int(rng.integers(2, 12))
        m, n = (int(x) for x in rng.integers(2, 5, size=2))
        entries = rng.integers(NEG_INF, L, size=(m, n))
        b = QcBaseMatrix(L, entries)
        if lift(b).is_zero():
            continue
        assert girth_bfs(lift(b), block=L) == girth_exponent(b)
        assert girth_bfs(lift(b)) == girth_exponent(b)


def test_cycle_witness_lifts_to_simple_cycle():
    b = build_symmetric(SMALL_2X3).bx
    walk = cycle_witness(b, 8)
    assert walk is not None and len(walk) == 8
    nodes = lifted_walk_nodes(b, walk)
    assert nodes[0] == nodes[-1]
    assert len(set(nodes[:-1])) == 8
    h = lift(b).to_dense()
    L = b.L
    for (kind, idx, c), (kind2, idx2, c2) in zip(nodes, nodes[1:]):
        assert kind != kind2
        row, col = (idx * L + c, idx2 * L + c2) if kind == "c" else (idx2 * L + c2, idx * L + c)
        assert h[row, col] == 1
    assert cycle_witness(b, 6) is None
