"""Dense GF(2) linear algebra on bit-packed rows.

Rows are stored as little-endian ``uint64`` words so that a row operation is
a single vectorised XOR over ``ceil(cols / 64)`` words. Every function here
is pure: inputs are never modified and results are read-only.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

WORD = 64
_WORD_DTYPE = np.dtype("<u8")


def _nwords(cols: int) -> int:
    return max(1, -(-cols // WORD))


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into ``(rows, nwords)`` uint64 words."""
    dense = np.asarray(dense)
    rows, cols = dense.shape
    nwords = _nwords(cols)
    padded = np.zeros((rows, nwords * WORD), dtype=np.uint8)
    padded[:, :cols] = dense & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(_WORD_DTYPE).reshape(rows, nwords).copy()


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`; returns a ``uint8`` array."""
    words = np.ascontiguousarray(words, dtype=_WORD_DTYPE)
    rows = words.shape[0]
    as_bytes = words.view(np.uint8).reshape(rows, words.shape[1] * 8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


class BinaryMatrix:
    """Immutable matrix over GF(2)."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.asarray(words, dtype=_WORD_DTYPE)
        if words.shape != (rows, _nwords(cols)):
            raise ValueError(
                f"word array has shape {words.shape}, expected {(rows, _nwords(cols))}"
            )
        if cols % WORD and rows:
            spill = words[:, -1] >> np.uint64(cols % WORD)
            if np.any(spill):
                raise ValueError("bits set beyond the last column")
        words = words.copy()
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_dense(cls, dense) -> BinaryMatrix:
        arr = np.asarray(dense)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        arr = (arr.astype(np.int64) & 1).astype(np.uint8)
        return cls(arr.shape[0], arr.shape[1], pack_rows(arr))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=_WORD_DTYPE))

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.words, self.cols)

    @property
    def T(self) -> BinaryMatrix:
        return transpose(self)

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.words[i : i + 1], self.cols)[0]

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1).astype(np.int64)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0).astype(np.int64)

    def is_zero(self) -> bool:
        return not np.any(self.words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols}, ones={int(self.row_weights().sum())})"


def as_vector(v, length: int | None = None) -> np.ndarray:
    """Coerce a binary vector to a 1-D ``uint8`` array, checking its length."""
    arr = np.asarray(v).reshape(-1).astype(np.int64) & 1
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"vector has length {arr.shape[0]}, expected {length}")
    return arr.astype(np.uint8)


def transpose(a: BinaryMatrix) -> BinaryMatrix:
    return BinaryMatrix.from_dense(a.to_dense().T)


def hstack(blocks: Sequence[BinaryMatrix]) -> BinaryMatrix:
    return BinaryMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))


def vstack(blocks: Sequence[BinaryMatrix]) -> BinaryMatrix:
    cols = {b.cols for b in blocks}
    if len(cols) != 1:
        raise ValueError(f"column counts differ: {sorted(cols)}")
    return BinaryMatrix(
        sum(b.rows for b in blocks), cols.pop(), np.vstack([b.words for b in blocks])
    )


def multiply(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Matrix product over GF(2)."""
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    # float32 sums are exact well past any inner dimension used here
    prod = a.to_dense().astype(np.float32) @ b.to_dense().astype(np.float32)
    return BinaryMatrix.from_dense(prod.astype(np.int64) & 1)


def mat_vec(a: BinaryMatrix, v) -> np.ndarray:
    """Return ``a @ v`` over GF(2) as a ``uint8`` vector."""
    v = as_vector(v, a.cols)
    return ((a.to_dense().astype(np.int64) @ v.astype(np.int64)) & 1).astype(np.uint8)


def _column_bits(words: np.ndarray, col: int) -> np.ndarray:
    return (words[:, col >> 6] >> np.uint64(col & 63)) & np.uint64(1)


def _eliminate(words: np.ndarray, columns: Sequence[int], full: bool) -> list[int]:
    """Gaussian elimination in place, visiting ``columns`` in the given order.

    Returns the pivot columns; pivot ``k`` lives in row ``k``. With ``full``
    the pivot columns are cleared above as well as below (reduced form).
    """
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for col in columns:
        if r == nrows:
            break
        bits = _column_bits(words, col)
        below = np.flatnonzero(bits[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            bits[[r, p]] = bits[[p, r]]
        mask = bits.astype(bool)
        mask[r] = False
        if not full:
            mask[:r] = False
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(col)
        r += 1
    return pivots


def rank(a: BinaryMatrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    work = np.array(a.words)
    return len(_eliminate(work, range(a.cols), full=False))


def row_reduce(a: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row echelon form (zero rows dropped) and its pivot columns."""
    work = np.array(a.words)
    pivots = _eliminate(work, range(a.cols), full=True)
    return BinaryMatrix(len(pivots), a.cols, work[: len(pivots)]), pivots


class StandardForm(NamedTuple):
    """Systematic form ``[I_r | A']`` of a matrix.

    ``matrix`` equals ``row_transform @ a[:, permutation]``; column ``j`` of
    the standard form is column ``permutation[j]`` of the input.
    """

    matrix: BinaryMatrix
    permutation: np.ndarray
    row_transform: BinaryMatrix


def rref_with_column_permutation(a: BinaryMatrix) -> StandardForm:
    dense = a.to_dense()
    aug = np.hstack([dense, np.eye(a.rows, dtype=np.uint8)])
    work = pack_rows(aug)
    pivots = _eliminate(work, range(a.cols), full=True)
    r = len(pivots)
    reduced = unpack_rows(work[:r], aug.shape[1])
    pivot_set = set(pivots)
    perm = np.array(pivots + [c for c in range(a.cols) if c not in pivot_set], dtype=np.int64)
    form = BinaryMatrix.from_dense(reduced[:, : a.cols][:, perm])
    transform = BinaryMatrix.from_dense(reduced[:, a.cols :].reshape(r, a.rows))
    return StandardForm(form, perm, transform)


def nullspace_basis(a: BinaryMatrix) -> BinaryMatrix:
    """Rows spanning ``{v : a v^T = 0}``."""
    n = a.cols
    form, perm, _ = rref_with_column_permutation(a)
    r = form.rows
    free = n - r
    if free == 0:
        return BinaryMatrix.zeros(0, n)
    tail = form.to_dense()[:, r:]
    # kernel of [I | A] in permuted coordinates is spanned by [A^T | I]
    permuted = np.hstack([tail.T.reshape(free, r), np.eye(free, dtype=np.uint8)])
    basis = np.zeros((free, n), dtype=np.uint8)
    basis[:, perm] = permuted
    return BinaryMatrix.from_dense(basis)


def rowspace_basis(a: BinaryMatrix) -> BinaryMatrix:
    return row_reduce(a)[0]


def in_rowspace(a: BinaryMatrix, v) -> bool:
    vec = as_vector(v, a.cols)
    if not vec.any():
        return True
    stacked = vstack([a, BinaryMatrix.from_dense(vec)])
    return rank(stacked) == rank(a)


def complement_basis(sub: BinaryMatrix, space: BinaryMatrix) -> BinaryMatrix:
    """Rows of ``space`` extending ``rowspace(sub)`` to ``rowspace(sub) + rowspace(space)``.

    The returned rows are independent modulo ``rowspace(sub)``.
    """
    if sub.cols != space.cols:
        raise ValueError("column counts differ")
    stacked = vstack([sub, space])
    # eliminate over a transposed copy: pivot rows of the original stack are the
    # pivot columns of its transpose, taken in order (sub first)
    pivots = row_reduce(transpose(stacked))[1]
    chosen = [p - sub.rows for p in pivots if p >= sub.rows]
    return BinaryMatrix(len(chosen), space.cols, space.words[chosen])


def inverse(a: BinaryMatrix) -> BinaryMatrix:
    """Inverse of a square invertible matrix over GF(2)."""
    if a.rows != a.cols:
        raise ValueError("matrix is not square")
    n = a.rows
    aug = pack_rows(np.hstack([a.to_dense(), np.eye(n, dtype=np.uint8)]))
    pivots = _eliminate(aug, range(n), full=True)
    if len(pivots) != n:
        raise ValueError("matrix is singular over GF(2)")
    return BinaryMatrix.from_dense(unpack_rows(aug, 2 * n)[:, n:])


def solve(a: BinaryMatrix, b) -> np.ndarray | None:
    """One solution ``x`` of ``a x = b``, or ``None`` if the system is inconsistent."""
    rhs = as_vector(b, a.rows)
    aug = pack_rows(np.hstack([a.to_dense(), rhs.reshape(-1, 1)]))
    pivots = _eliminate(aug, range(a.cols), full=True)
    red = unpack_rows(aug, a.cols + 1)
    if red[len(pivots) :, a.cols].any():
        return None
    x = np.zeros(a.cols, dtype=np.uint8)
    for k, col in enumerate(pivots):
        x[col] = red[k, a.cols]
    return x
