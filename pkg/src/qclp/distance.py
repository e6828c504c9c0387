"""Classical and quantum minimum distances.

Reports always say whether a value is exact or only a witness-backed
estimate. Bit vectors inside the searches are Python ints (bit ``j`` is
column ``j``) because the exact search is dominated by single-bit updates.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from qclp import gf2
from qclp.css import CssCode, VectorClass
from qclp.gf2 import BinaryMatrix

DEFAULT_EXACT_DIM = 24
DEFAULT_NODE_BUDGET = 20_000_000
DEFAULT_ITERATIONS = 10_000
DEFAULT_PATTERN_WEIGHT = 3
DEFAULT_RESTART = 250


class Mode(enum.Enum):
    EXACT = "EXACT"
    ESTIMATE = "ESTIMATE"


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int, what: str = "node_budget"):
        super().__init__(f"search exceeded {what}={budget}")
        self.budget = budget
        self.what = what


@dataclass(frozen=True, eq=False)
class DistanceReport:
    """A distance value with its provenance.

    ``lower_bound`` marks the case where nothing was found up to a weight
    cap: then ``value`` is ``cap + 1`` and means "d >= value".
    """

    value: float
    mode: Mode
    witness: np.ndarray | None
    search_budget: dict = field(default_factory=dict)
    lower_bound: bool = False
    side: str | None = None

    @property
    def weight(self) -> int | None:
        return None if self.witness is None else int(self.witness.sum())

    def describe(self) -> str:
        if self.lower_bound:
            return f"d >= {self.value} ({self.mode.value})"
        return f"d = {self.value} ({self.mode.value})"

    def to_dict(self) -> dict:
        value = self.value if math.isfinite(self.value) else "inf"
        return {
            "value": value,
            "mode": self.mode.value,
            "lower_bound": self.lower_bound,
            "side": self.side,
            "witness": None if self.witness is None else np.flatnonzero(self.witness).tolist(),
            "budget": self.search_budget,
        }


# ---------------------------------------------------------------- helpers


def _to_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(), "little")


def _from_int(x: int, length: int) -> np.ndarray:
    raw = np.frombuffer(x.to_bytes(-(-length // 8) or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, count=length, bitorder="little")


# ---------------------------------------------------------------- classical


def _enumerate_span(basis: BinaryMatrix) -> tuple[int, np.ndarray]:
    """Minimum nonzero weight in the row span, by chunked enumeration."""
    k = basis.rows
    low = min(k, 16)
    table = np.zeros((1 << low, basis.words.shape[1]), dtype=np.uint64)
    for i in range(low):
        table[1 << i : 1 << (i + 1)] = table[: 1 << i] ^ basis.words[i]
    best, best_words = None, None
    offset = np.zeros(basis.words.shape[1], dtype=np.uint64)
    for hi in range(1 << (k - low)):
        if hi:
            # gray-code step: flip the row of the lowest set bit of hi
            offset = offset ^ basis.words[low + (hi & -hi).bit_length() - 1]
        chunk = table ^ offset
        weights = np.bitwise_count(chunk).sum(axis=1)
        if hi == 0:
            weights[0] = np.iinfo(weights.dtype).max
        i = int(np.argmin(weights))
        if best is None or weights[i] < best:
            best, best_words = int(weights[i]), chunk[i].copy()
    return best, gf2.unpack_rows(best_words.reshape(1, -1), basis.cols)[0]


def classical_min_distance(
    h: BinaryMatrix,
    exact_dim: int = DEFAULT_EXACT_DIM,
    iterations: int = 2000,
    seed: int = 0,
) -> DistanceReport:
    """Minimum weight of a nonzero vector in ker(h).

    Enumerates the whole kernel when its dimension is at most ``exact_dim``;
    otherwise runs the information-set search and reports an estimate.
    """
    basis = gf2.nullspace_basis(h)
    if basis.rows == 0:
        return DistanceReport(math.inf, Mode.EXACT, None, {"kernel_dim": 0})
    if basis.rows <= exact_dim:
        value, witness = _enumerate_span(basis)
        return DistanceReport(value, Mode.EXACT, witness, {"kernel_dim": basis.rows})
    rng = np.random.default_rng(seed)
    dense = h.to_dense()
    value, witness = _isd(lambda _rng: (dense, None), h.cols, iterations, rng, 2, DEFAULT_RESTART)
    budget = {"kernel_dim": basis.rows, "iterations": iterations, "seed": seed}
    return DistanceReport(value, Mode.ESTIMATE, witness, budget)


# ---------------------------------------------------------------- exact quantum


def _column_masks(h: BinaryMatrix) -> list[int]:
    return [_to_int(col) for col in h.to_dense().T]


def _min_logical_weight(
    checks: BinaryMatrix,
    logicals: BinaryMatrix,
    L: int,
    w_max: int,
    budget: int,
    counter: list[int],
) -> int | None:
    """Least-weight vector in ker(checks) with odd overlap with some logical row.

    Minimum-weight logicals are connected in the Tanner graph of ``checks``
    and contain no proper zero-syndrome subset, so a search that grows
    connected sets one unsatisfied check at a time and stops at every
    zero-syndrome set is complete. Quasi-cyclic symmetry pins the first
    occupied cell's bit to offset 0.
    """
    n = checks.cols
    col_syn = _column_masks(checks)
    dense = checks.to_dense()
    check_bits = [np.flatnonzero(r).tolist() for r in dense]
    wc = max(1, int(dense.sum(axis=0).max())) if dense.size else 1
    log_rows = [_to_int(r) for r in logicals.to_dense()]
    found: list[int] = []

    def is_logical(v: int) -> bool:
        return any((v & r).bit_count() & 1 for r in log_rows)

    def grow(chosen: int, syn: int, size: int, banned: int, limit: int) -> bool:
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded(budget)
        if syn == 0:
            if is_logical(chosen):
                found.append(chosen)
                return True
            return False
        room = limit - size
        if room == 0 or syn.bit_count() > room * wc:
            return False
        check = (syn & -syn).bit_length() - 1
        blocked = chosen | banned
        for b in check_bits[check]:
            bit = 1 << b
            if blocked & bit:
                continue
            if grow(chosen | bit, syn ^ col_syn[b], size + 1, banned, limit):
                return True
            banned |= bit
            blocked |= bit
        return False

    for limit in range(1, w_max + 1):
        for cell in range(n // L):
            root = cell * L
            before = (1 << root) - 1
            # earlier cells are excluded; later offsets of this cell are not
            if grow(1 << root, col_syn[root], 1, before, limit):
                return found[0]
    return None


def quantum_min_distance_exact(
    c: CssCode, w_max: int, budget: int = DEFAULT_NODE_BUDGET
) -> DistanceReport:
    """min(d_X, d_Z) if it is at most ``w_max``; otherwise the bound d > w_max.

    ``budget`` caps the number of search nodes over both sides.
    """
    if c.k_logical == 0:
        return DistanceReport(math.inf, Mode.EXACT, None, {"w_max": w_max})
    counter = [0]
    best: tuple[int, int, str] | None = None
    for side, checks, logicals in (("X", c.hz, c.lz), ("Z", c.hx, c.lx)):
        cap = w_max if best is None else best[0] - 1
        if cap < 1:
            break
        v = _min_logical_weight(checks, logicals, c.L, cap, budget, counter)
        if v is not None:
            best = (v.bit_count(), v, side)
    meta = {"w_max": w_max, "node_budget": budget, "nodes": counter[0]}
    if best is None:
        return DistanceReport(w_max + 1, Mode.ESTIMATE, None, meta, lower_bound=True)
    witness = _from_int(best[1], c.n_qubits)
    return DistanceReport(best[0], Mode.EXACT, witness, meta, side=best[2])


# ---------------------------------------------------------------- estimator


def _pivot(cols: np.ndarray, c: int, i: int) -> None:
    """Make column ``c`` the unit vector at row ``i`` (columns are packed rows)."""
    word, shift = i >> 6, np.uint64(i & 63)
    mask = cols[c].copy()
    mask[word] ^= np.uint64(1) << shift
    hit = ((cols[:, word] >> shift) & np.uint64(1)).astype(bool)
    cols[hit] ^= mask


def _bits_of(words: np.ndarray, length: int) -> np.ndarray:
    return np.flatnonzero(gf2.unpack_rows(words.reshape(1, -1), length)[0])


def _row_bits(cols: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Bits of the given rows for every column, shape (columns, len(rows))."""
    shifts = (rows & 63).astype(np.uint64)
    return ((cols[:, rows >> 6] >> shifts) & np.uint64(1)).astype(np.int64)


def _matches(keys: np.ndarray, targets: np.ndarray, nbits: int) -> tuple[np.ndarray, np.ndarray]:
    """All (t, j) with ``keys[j] == targets[t]``; keys are ``nbits``-bit ints."""
    order = np.argsort(keys, kind="stable")
    counts_by_key = np.bincount(keys, minlength=1 << nbits)
    start_by_key = np.cumsum(counts_by_key) - counts_by_key
    counts = counts_by_key[targets]
    t = np.repeat(np.arange(targets.size), counts)
    offsets = np.arange(t.size) - np.repeat(np.cumsum(counts) - counts, counts)
    j = order[start_by_key[targets][t] + offsets]
    return t, j


@functools.lru_cache(maxsize=8)
def _pairs(k: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(k, 1)


def _patterns(keys: np.ndarray, target: int, p: int, nbits: int) -> list[np.ndarray]:
    """Index sets of size 1..p (ascending indices) whose keys XOR to ``target``.

    Size 1 is returned in full: single-column patterns are cheap to score.
    Larger sets only include those that cancel the window, which is what
    keeps the enumeration small.
    """
    k = keys.size
    out = [np.arange(k, dtype=np.int64).reshape(-1, 1)] if p >= 1 else []
    if p >= 2 and k >= 2:
        t, j = _matches(keys, keys ^ target, nbits)
        keep = t < j
        out.append(np.column_stack([t[keep], j[keep]]))
    if p >= 3 and k >= 3:
        a, b = _pairs(k)
        t, j = _matches(keys, keys[a] ^ keys[b] ^ target, nbits)
        keep = b[t] < j
        out.append(np.column_stack([a[t[keep]], b[t[keep]], j[keep]]))
    return out


def _isd(
    system: Callable[[np.random.Generator], tuple[np.ndarray, np.ndarray | None]],
    n: int,
    iterations: int,
    rng: np.random.Generator,
    pattern_weight: int,
    restart_every: int,
    stop_at: int = 0,
    window: int | None = None,
) -> tuple[float, np.ndarray | None]:
    """Information-set search with single-column swaps between restarts.

    ``system(rng)`` returns ``(rows, rhs)``; with ``rhs`` None the search
    looks for nonzero kernel vectors, otherwise for solutions of
    ``rows x = rhs``. Patterns of two or more information columns are only
    scored when they cancel on a random window of pivot rows (Stern's
    trick). Returns the least weight seen and its vector.
    """
    best, best_vec = math.inf, None
    cols = row_pivot = is_pivot = win = None
    homogeneous = True
    for it in range(iterations):
        if it % restart_every == 0:
            rows, rhs = system(rng)
            homogeneous = rhs is None
            r = rows.shape[0]
            full = np.zeros((n + 1, r), dtype=np.uint8)
            full[:n] = rows.T
            if rhs is not None:
                full[n] = rhs
            cols = gf2.pack_rows(full)
            row_pivot = np.full(r, -1, dtype=np.int64)
            is_pivot = np.zeros(n, dtype=bool)
            free_rows = np.ones(r, dtype=bool)
            for c in rng.permutation(n):
                bits = _bits_of(cols[c], r)
                bits = bits[free_rows[bits]]
                if bits.size == 0:
                    continue
                i = int(bits[0])
                _pivot(cols, c, i)
                row_pivot[i] = c
                is_pivot[c] = True
                free_rows[i] = False
            pivot_rows = np.flatnonzero(row_pivot >= 0)
            k = n - pivot_rows.size
            size = window if window is not None else max(1, int(np.log2(max(k, 2))) + 2)
            size = min(size, pivot_rows.size, 20)
            win = np.sort(rng.choice(pivot_rows, size=size, replace=False))
            weights_of_bits = np.int64(1) << np.arange(win.size, dtype=np.int64)
        else:
            info = np.flatnonzero(~is_pivot)
            live = info[np.any(cols[info] != 0, axis=1)]
            if live.size:
                c = int(rng.choice(live))
                bits = _bits_of(cols[c], row_pivot.size)
                i = int(rng.choice(bits))
                old = int(row_pivot[i])
                _pivot(cols, c, i)
                row_pivot[i] = c
                is_pivot[c] = True
                is_pivot[old] = False
        info = np.flatnonzero(~is_pivot)
        q = cols[info]
        s = cols[n]
        keys = _row_bits(cols, win) @ weights_of_bits
        candidates = []
        if not homogeneous:
            candidates.append((int(np.bitwise_count(s).sum()), np.empty(0, dtype=np.int64), s))
        for combos in _patterns(keys[info], int(keys[n]), pattern_weight, win.size):
            if combos.shape[0] == 0:
                continue
            acc = np.broadcast_to(s, (combos.shape[0], s.size)).copy()
            for j in range(combos.shape[1]):
                acc ^= q[combos[:, j]]
            weights = np.bitwise_count(acc).sum(axis=1) + combos.shape[1]
            t = int(np.argmin(weights))
            candidates.append((int(weights[t]), info[combos[t]], acc[t]))
        for weight, chosen, syn in candidates:
            if 0 < weight < best:
                vec = np.zeros(n, dtype=np.uint8)
                vec[chosen] = 1
                vec[row_pivot[_bits_of(syn, row_pivot.size)]] = 1
                best, best_vec = weight, vec
        if best <= stop_at:
            break
    return best, best_vec


def _logical_system(checks: BinaryMatrix, logicals: BinaryMatrix):
    dense = checks.to_dense()
    log = logicals.to_dense()

    def system(rng: np.random.Generator):
        while True:
            coeffs = rng.integers(0, 2, size=log.shape[0])
            if coeffs.any():
                break
        target = (coeffs @ log.astype(np.int64)) & 1
        rows = np.vstack([dense, target.astype(np.uint8)])
        rhs = np.zeros(rows.shape[0], dtype=np.uint8)
        rhs[-1] = 1
        return rows, rhs

    return system


def quantum_distance_estimate(
    c: CssCode,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    pattern_weight: int = DEFAULT_PATTERN_WEIGHT,
    restart_every: int = DEFAULT_RESTART,
    stop_at: int = 0,
) -> DistanceReport:
    """Randomised search for low-weight logicals on both sides.

    Each restart draws a random nonzero combination ``t`` of the opposite
    logical rows and solves ``[checks; t] v = [0; 1]``, so every solution is
    a logical (never a stabilizer). The result is an upper bound with a
    verified witness. ``stop_at`` ends a side early once a logical of at most
    that weight is found.
    """
    meta = {
        "iterations": iterations,
        "seed": seed,
        "pattern_weight": pattern_weight,
        "restart_every": restart_every,
    }
    if c.k_logical == 0:
        return DistanceReport(math.inf, Mode.ESTIMATE, None, meta)
    best: tuple[float, np.ndarray | None, str | None] = (math.inf, None, None)
    for index, (side, checks, logicals) in enumerate(
        (("X", c.hz, c.lz), ("Z", c.hx, c.lx))
    ):
        rng = np.random.default_rng([seed, index])
        value, vec = _isd(
            _logical_system(checks, logicals),
            c.n_qubits,
            iterations,
            rng,
            pattern_weight,
            restart_every,
            stop_at,
        )
        if value < best[0]:
            best = (value, vec, side)
        if best[0] <= stop_at:
            break
    value, vec, side = best
    if vec is not None:
        classify = c.classify_x_vector if side == "X" else c.classify_z_vector
        if classify(vec) is not VectorClass.LOGICAL:
            raise RuntimeError("estimator produced a witness that is not logical")
    return DistanceReport(value, Mode.ESTIMATE, vec, meta, side=side)


# ---------------------------------------------------------------- embedding


def embed_classical_codeword(word, layout, side: str, position: int = 0) -> np.ndarray:
    """Place a codeword of ker(lift(B)) in the code part of the LP pair.

    On the X side the word fills code block ``position``; on the Z side it
    runs across the blocks at cell ``position``. The transpose part is zero.
    """
    L = layout.L
    word = gf2.as_vector(word, layout.code_cells * L if side == "X" else layout.code_blocks * L)
    out = np.zeros(layout.n_qubits, dtype=np.uint8)
    chunks = word.reshape(-1, L)
    for k, chunk in enumerate(chunks):
        if side == "X":
            cell = layout.code_cell(position, k)
        else:
            cell = layout.code_cell(k, position)
        out[cell * L : (cell + 1) * L] = chunk
    return out


# ---------------------------------------------------------------- RCPC bound


@dataclass(frozen=True, eq=False)
class Theorem2Report:
    """Classical distance, RCPC witnesses and the resulting quantum bound.

    ``upper_bound`` is min(d^C, m+n) when a certificate exists and d^C
    otherwise (classical codewords embed as logicals). ``quantum`` is the
    exact search capped at ``upper_bound``; it is None when the search ran
    out of budget.
    """

    shape: tuple[int, int]
    classical: DistanceReport
    certificates: list
    witness_weights: list[int]
    upper_bound: float
    quantum: DistanceReport | None

    @property
    def equality_holds(self) -> bool | None:
        if self.quantum is None or self.quantum.mode is not Mode.EXACT:
            return None
        return self.quantum.value == self.upper_bound

    def to_dict(self) -> dict:
        bound = self.upper_bound if math.isfinite(self.upper_bound) else "inf"
        return {
            "shape": list(self.shape),
            "classical": self.classical.to_dict(),
            "certificates": [c.to_dict() for c in self.certificates],
            "witness_weights": self.witness_weights,
            "upper_bound": bound,
            "quantum": None if self.quantum is None else self.quantum.to_dict(),
            "equality_holds": self.equality_holds,
        }


def theorem2_check(
    b,
    node_budget: int = DEFAULT_NODE_BUDGET,
    exact_dim: int = DEFAULT_EXACT_DIM,
    seed: int = 0,
) -> Theorem2Report:
    from qclp import rcpc
    from qclp.lifted_product import build_symmetric, to_css
    from qclp.qcbase import lift

    classical = classical_min_distance(lift(b), exact_dim=exact_dim, seed=seed)
    code = to_css(build_symmetric(b))
    certificates = rcpc.find_certificates(b)
    weights = []
    for cert in certificates:
        if not rcpc.verify_certificate(b, cert, code):
            raise RuntimeError(f"certificate {cert.to_dict()} failed verification")
        weights.append(rcpc.construct_rcpc_codeword(b, cert).weight())
    bound = classical.value
    if weights:
        bound = min(bound, min(weights))
    quantum = None
    if math.isfinite(bound):
        try:
            quantum = quantum_min_distance_exact(code, int(bound), budget=node_budget)
        except BudgetExceeded:
            quantum = None
    return Theorem2Report(b.shape, classical, certificates, weights, bound, quantum)
