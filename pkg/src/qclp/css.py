"""CSS codes from an orthogonal pair of parity-check matrices."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from qclp import gf2
from qclp.gf2 import BinaryMatrix


class VectorClass(enum.Enum):
    NOT_CODEWORD = "not_codeword"
    STABILIZER = "stabilizer"
    LOGICAL = "logical"


def _matrix_to_dict(a: BinaryMatrix) -> dict:
    dense = a.to_dense()
    return {
        "rows": a.rows,
        "cols": a.cols,
        "support": [np.flatnonzero(r).tolist() for r in dense],
    }


def _matrix_from_dict(data: dict) -> BinaryMatrix:
    dense = np.zeros((data["rows"], data["cols"]), dtype=np.uint8)
    for i, support in enumerate(data["support"]):
        dense[i, support] = 1
    return BinaryMatrix.from_dense(dense)


@dataclass(frozen=True, eq=False)
class CssCode:
    """``hx`` and ``hz`` with ``hx hz^T = 0`` plus paired logical bases.

    ``lx`` spans ker(hz) modulo rowspace(hx) and ``lz`` spans ker(hx) modulo
    rowspace(hz); they are normalised so that ``lz lx^T = I``. ``L`` is the
    circulant size when both check matrices are invariant under a cyclic
    shift inside every L-bit block (1 means no such symmetry is claimed).
    """

    hx: BinaryMatrix
    hz: BinaryMatrix
    n_qubits: int
    k_logical: int
    lx: BinaryMatrix
    lz: BinaryMatrix
    L: int = 1

    @cached_property
    def rank_hx(self) -> int:
        return gf2.rank(self.hx)

    @cached_property
    def rank_hz(self) -> int:
        return gf2.rank(self.hz)

    def parameters(self, distance: int | None = None) -> str:
        d = "?" if distance is None else str(distance)
        return f"[[{self.n_qubits},{self.k_logical},{d}]]"

    def classify_x_vector(self, v) -> VectorClass:
        return _classify(self.hz, self.hx, v)

    def classify_z_vector(self, v) -> VectorClass:
        return _classify(self.hx, self.hz, v)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "k_logical": self.k_logical,
            "L": self.L,
            "hx": _matrix_to_dict(self.hx),
            "hz": _matrix_to_dict(self.hz),
            "lx": _matrix_to_dict(self.lx),
            "lz": _matrix_to_dict(self.lz),
        }

    @classmethod
    def from_dict(cls, data: dict) -> CssCode:
        return from_pcms(
            _matrix_from_dict(data["hx"]), _matrix_from_dict(data["hz"]), L=data.get("L", 1)
        )


def _classify(checks: BinaryMatrix, stabilizers: BinaryMatrix, v) -> VectorClass:
    vec = gf2.as_vector(v, checks.cols)
    if gf2.mat_vec(checks, vec).any():
        return VectorClass.NOT_CODEWORD
    if gf2.in_rowspace(stabilizers, vec):
        return VectorClass.STABILIZER
    return VectorClass.LOGICAL


def block_shift(a: BinaryMatrix, L: int) -> BinaryMatrix:
    """Cyclically shift every L-bit column block of ``a`` by one position."""
    dense = a.to_dense().reshape(a.rows, -1, L)
    return BinaryMatrix.from_dense(np.roll(dense, 1, axis=2).reshape(a.rows, a.cols))


def is_block_shift_invariant(a: BinaryMatrix, L: int) -> bool:
    if L == 1:
        return True
    if a.cols % L:
        return False
    before = {r.tobytes() for r in a.words}
    after = {r.tobytes() for r in block_shift(a, L).words}
    return before == after


def from_pcms(hx: BinaryMatrix, hz: BinaryMatrix, L: int = 1) -> CssCode:
    if hx.cols != hz.cols:
        raise ValueError(f"hx has {hx.cols} columns but hz has {hz.cols}")
    if L < 1:
        raise ValueError("L must be positive")
    if not (is_block_shift_invariant(hx, L) and is_block_shift_invariant(hz, L)):
        raise ValueError(f"check matrices are not invariant under L={L} block shifts")
    if not gf2.multiply(hx, hz.T).is_zero():
        raise ValueError("hx and hz are not orthogonal")
    n = hx.cols
    k = n - gf2.rank(hx) - gf2.rank(hz)
    lx = gf2.complement_basis(hx, gf2.nullspace_basis(hz))
    lz = gf2.complement_basis(hz, gf2.nullspace_basis(hx))
    if lx.rows != k or lz.rows != k:
        raise RuntimeError(f"logical bases have {lx.rows}/{lz.rows} rows, expected {k}")
    if k:
        overlap = gf2.multiply(lz, lx.T)
        lx = gf2.multiply(gf2.inverse(overlap).T, lx)
    return CssCode(hx, hz, n, k, lx, lz, L)


def logical_codeword_count_formula(c: CssCode) -> int:
    """``2**(N-K) * (4**K - 1)``; exact Python integer."""
    n, k = c.n_qubits, c.k_logical
    return 2 ** (n - k) * (4**k - 1)
