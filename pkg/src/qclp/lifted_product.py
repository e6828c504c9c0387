"""Lifted-product base-matrix pairs.

Kronecker products are formed directly on exponents (identity blocks give 0
on the diagonal and NEG_INF elsewhere) and lifted once at the end.

Column layout of the pair, for sources of shapes ``m1 x n1`` and ``m2 x n2``:
the code part holds ``n1`` blocks of ``n2`` cells, followed by the transpose
part with ``m1`` blocks of ``m2`` cells. Each cell is one L-bit column block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from qclp import gf2
from qclp.css import CssCode, from_pcms
from qclp.qcbase import NEG_INF, QcBaseMatrix, conjugate_transpose, lift


def kron_exponent(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product in exponent space where one factor is an identity.

    ``a`` and ``b`` are exponent grids; an identity factor is passed as the
    output of :func:`identity_exponents`. Products of two integer exponents
    add, anything with NEG_INF stays NEG_INF.
    """
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.full((ra * rb, ca * cb), NEG_INF, dtype=np.int64)
    for i in range(ra):
        for j in range(ca):
            if a[i, j] == NEG_INF:
                continue
            block = np.where(b == NEG_INF, NEG_INF, b + a[i, j])
            out[i * rb : (i + 1) * rb, j * cb : (j + 1) * cb] = block
    return out


def identity_exponents(k: int) -> np.ndarray:
    out = np.full((k, k), NEG_INF, dtype=np.int64)
    np.fill_diagonal(out, 0)
    return out


@dataclass(frozen=True)
class BlockLayout:
    """Column addressing shared by the pair and by block codewords."""

    L: int
    code_blocks: int
    code_cells: int
    transpose_blocks: int
    transpose_cells: int

    @property
    def code_width(self) -> int:
        return self.code_blocks * self.code_cells

    @property
    def transpose_width(self) -> int:
        return self.transpose_blocks * self.transpose_cells

    @property
    def cells(self) -> int:
        return self.code_width + self.transpose_width

    @property
    def n_qubits(self) -> int:
        return self.L * self.cells

    def code_cell(self, block: int, cell: int) -> int:
        return block * self.code_cells + cell

    def transpose_cell(self, block: int, cell: int) -> int:
        return self.code_width + block * self.transpose_cells + cell


@dataclass(frozen=True, eq=False)
class LpBasePair:
    bx: QcBaseMatrix
    bz: QcBaseMatrix
    source: tuple[QcBaseMatrix, ...]
    symmetric: bool

    @property
    def L(self) -> int:
        return self.bx.L

    @property
    def layout(self) -> BlockLayout:
        b1 = self.source[0]
        b2 = self.source[-1]
        return BlockLayout(self.L, b1.n, b2.n, b1.m, b2.m)

    @cached_property
    def hx(self) -> gf2.BinaryMatrix:
        return lift(self.bx)

    @cached_property
    def hz(self) -> gf2.BinaryMatrix:
        return lift(self.bz)

    def code_part(self, which: str) -> np.ndarray:
        base = self.bx if which == "x" else self.bz
        return base.entries[:, : self.layout.code_width]

    def transpose_part(self, which: str) -> np.ndarray:
        base = self.bx if which == "x" else self.bz
        return base.entries[:, self.layout.code_width :]

    def to_dict(self) -> dict:
        return {
            "symmetric": self.symmetric,
            "source": [b.to_dict() for b in self.source],
            "bx": self.bx.to_dict(),
            "bz": self.bz.to_dict(),
        }


def build_general(b1: QcBaseMatrix, b2: QcBaseMatrix) -> LpBasePair:
    if b1.L != b2.L:
        raise ValueError(f"circulant sizes differ: {b1.L} vs {b2.L}")
    L = b1.L
    (m1, n1), (m2, n2) = b1.shape, b2.shape
    b1s = conjugate_transpose(b1).entries
    b2s = conjugate_transpose(b2).entries
    bx = np.hstack(
        [
            kron_exponent(b1.entries, identity_exponents(n2)),
            kron_exponent(identity_exponents(m1), b2s),
        ]
    )
    bz = np.hstack(
        [
            kron_exponent(identity_exponents(n1), b2.entries),
            kron_exponent(b1s, identity_exponents(m2)),
        ]
    )
    return LpBasePair(QcBaseMatrix(L, bx), QcBaseMatrix(L, bz), (b1, b2), symmetric=False)


def build_symmetric(b: QcBaseMatrix) -> LpBasePair:
    pair = build_general(b, b)
    return LpBasePair(pair.bx, pair.bz, (b,), symmetric=True)


def verify_orthogonality_binary(p: LpBasePair) -> bool:
    return gf2.multiply(p.hx, p.hz.T).is_zero()


def row_pair_differences(p: LpBasePair) -> np.ndarray:
    """Exponent differences for every (bx row, bz row) pair; shape (rx, rz, cols)."""
    x = p.bx.entries[:, None, :]
    z = p.bz.entries[None, :, :]
    valid = (x != NEG_INF) & (z != NEG_INF)
    return np.where(valid, (x - z) % p.L, NEG_INF)


def verify_orthogonality_exponent(p: LpBasePair) -> bool:
    """Every bx/bz row difference has even multiplicity (NEG_INF discounted)."""
    diffs = row_pair_differences(p)
    for value in range(p.L):
        if np.any((diffs == value).sum(axis=-1) % 2):
            return False
    return True


def to_css(p: LpBasePair) -> CssCode:
    """CSS code of the lifted pair, tagged with its circulant size."""
    return from_pcms(p.hx, p.hz, L=p.L)
