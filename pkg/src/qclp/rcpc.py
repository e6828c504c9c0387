"""Row/column partition constraints and the weight-(m+n) logicals they force.

Indices are 0-based everywhere, including the certificate JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from qclp.css import CssCode, VectorClass
from qclp.lifted_product import build_symmetric, to_css
from qclp.qcbase import NEG_INF, QcBaseMatrix

ROW = "row"
COL = "col"


@dataclass(frozen=True)
class RcpcCertificate:
    axis: str
    pairs: tuple[tuple[int, int], ...]
    common_sum: tuple[int, ...]

    def __post_init__(self):
        if self.axis not in (ROW, COL):
            raise ValueError(f"axis must be 'row' or 'col', got {self.axis!r}")
        object.__setattr__(self, "pairs", tuple((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(self, "common_sum", tuple(int(x) for x in self.common_sum))

    def partner(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, j in self.pairs:
            out[i] = j
            out[j] = i
        return out

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "pairs": [list(p) for p in self.pairs],
            "common_sum": list(self.common_sum),
        }

    @classmethod
    def from_dict(cls, data: dict) -> RcpcCertificate:
        return cls(data["axis"], [tuple(p) for p in data["pairs"]], data["common_sum"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def perfect_pairings(indices: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    """All perfect matchings of an even-sized index list, lexicographic."""
    idx = list(indices)
    if not idx:
        yield []
        return
    first = idx[0]
    for k in range(1, len(idx)):
        rest = idx[1:k] + idx[k + 1 :]
        for tail in perfect_pairings(rest):
            yield [(first, idx[k])] + tail


def partitions(count: int) -> Iterator[list[tuple[int, int]]]:
    """Pairings of ``range(count)``; with an odd count, one index pairs with itself."""
    if count % 2 == 0:
        yield from perfect_pairings(range(count))
        return
    for single in range(count):
        rest = [i for i in range(count) if i != single]
        for tail in perfect_pairings(rest):
            yield sorted(tail + [(single, single)])


def _vectors(b: QcBaseMatrix, axis: str) -> np.ndarray:
    return b.entries if axis == ROW else b.entries.T


def _find(b: QcBaseMatrix, axis: str) -> RcpcCertificate | None:
    if not b.is_canonical():
        raise ValueError("RCPC search needs a canonical base matrix; canonicalize it first")
    vecs = _vectors(b, axis)
    count = vecs.shape[0]
    sums: dict[tuple[int, int], tuple[int, ...]] = {}
    for i in range(count):
        for j in range(i, count):
            sums[(i, j)] = tuple(int(x) for x in (vecs[i] + vecs[j]) % b.L)
    for pairing in partitions(count):
        first = sums[pairing[0]]
        if all(sums[p] == first for p in pairing[1:]):
            return RcpcCertificate(axis, tuple(pairing), first)
    return None


def find_row_partition(b: QcBaseMatrix) -> RcpcCertificate | None:
    return _find(b, ROW)


def find_col_partition(b: QcBaseMatrix) -> RcpcCertificate | None:
    return _find(b, COL)


def sums_match(b: QcBaseMatrix, cert: RcpcCertificate) -> bool:
    """Check that the certificate's pairs partition the index set and share ``common_sum``."""
    vecs = _vectors(b, cert.axis)
    count = vecs.shape[0]
    seen = [x for p in cert.pairs for x in (p if p[0] != p[1] else p[:1])]
    if sorted(seen) != list(range(count)):
        return False
    if sum(1 for i, j in cert.pairs if i == j) != count % 2:
        return False
    if len(cert.common_sum) != vecs.shape[1]:
        return False
    target = np.array(cert.common_sum, dtype=np.int64)
    return all(np.array_equal((vecs[i] + vecs[j]) % b.L, target) for i, j in cert.pairs)


@dataclass(frozen=True, eq=False)
class BlockCodeword:
    """One CPM exponent (or NEG_INF) per L-bit cell of an LP codeword.

    ``code_part[block, cell]`` is an n x n grid and ``transpose_part`` an
    m x m grid. A cell holding ``s`` is one row of ``alpha**s``; its binary
    expansion puts the single one at offset ``(L - s) mod L`` so that the
    cell-wise exponent differences against check rows are the ones that
    govern orthogonality.
    """

    L: int
    code_part: np.ndarray
    transpose_part: np.ndarray

    def __post_init__(self):
        for name in ("code_part", "transpose_part"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr = np.where(arr == NEG_INF, NEG_INF, arr % self.L)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def cells(self) -> np.ndarray:
        return np.concatenate([self.code_part.ravel(), self.transpose_part.ravel()])

    def weight(self) -> int:
        return int(np.count_nonzero(self.cells != NEG_INF))

    def shifted(self, s: int) -> BlockCodeword:
        def move(a):
            return np.where(a == NEG_INF, NEG_INF, (a + s) % self.L)

        return BlockCodeword(self.L, move(self.code_part), move(self.transpose_part))

    def canonical(self) -> BlockCodeword:
        """Shift so that the first integer cell holds 0."""
        live = self.cells[self.cells != NEG_INF]
        if live.size == 0:
            return self
        return self.shifted(-int(live[0]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockCodeword):
            return NotImplemented
        return (
            self.L == other.L
            and np.array_equal(self.code_part, other.code_part)
            and np.array_equal(self.transpose_part, other.transpose_part)
        )


def expand_to_binary(w: BlockCodeword) -> np.ndarray:
    L = w.L
    cells = w.cells
    out = np.zeros(cells.size * L, dtype=np.uint8)
    live = np.flatnonzero(cells != NEG_INF)
    out[live * L + (-cells[live]) % L] = 1
    return out


def construct_rcpc_codeword(b: QcBaseMatrix, cert: RcpcCertificate) -> BlockCodeword:
    if not sums_match(b, cert):
        raise ValueError("certificate does not hold for this base matrix")
    m, n = b.shape
    code = np.full((n, n), NEG_INF, dtype=np.int64)
    trans = np.full((m, m), NEG_INF, dtype=np.int64)
    partner = cert.partner()
    if cert.axis == ROW:
        for j in range(n):
            code[j, j] = cert.common_sum[j]
        for i in range(m):
            trans[i, partner[i]] = 0
    else:
        for j in range(n):
            code[j, partner[j]] = 0
        for i in range(m):
            trans[i, i] = (-cert.common_sum[i]) % b.L
    return BlockCodeword(b.L, code, trans).canonical()


def verify_certificate(
    b: QcBaseMatrix, cert: RcpcCertificate, code: CssCode | None = None
) -> bool:
    """Pair sums agree and the constructed codeword is a logical X-type vector."""
    if not sums_match(b, cert):
        return False
    if code is None:
        code = to_css(build_symmetric(b))
    v = expand_to_binary(construct_rcpc_codeword(b, cert))
    return code.classify_x_vector(v) is VectorClass.LOGICAL


def find_certificates(b: QcBaseMatrix) -> list[RcpcCertificate]:
    return [c for c in (find_row_partition(b), find_col_partition(b)) if c is not None]


def satisfies_rcpc(b: QcBaseMatrix) -> bool:
    return find_row_partition(b) is not None or find_col_partition(b) is not None
