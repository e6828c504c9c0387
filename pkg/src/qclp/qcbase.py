"""Quasi-cyclic base matrices in exponent form.

An entry ``e`` in ``[0, L)`` stands for the circulant permutation matrix
``alpha**e``: the L x L identity with a one in row ``(c + e) mod L`` of
column ``c``. The all-zero block is written ``NEG_INF`` (stored as -1).
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from qclp.gf2 import BinaryMatrix

NEG_INF = -1
GIRTH_CAP = 12


def conjugate(e: int, L: int) -> int:
    """Exponent of the transposed CPM: ``(L - e) mod L``; ``NEG_INF`` is fixed."""
    return NEG_INF if e == NEG_INF else (L - e) % L


def exponent_difference(a: int, b: int, L: int) -> int:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return (a - b) % L


def exponent_sum(a: int, b: int, L: int) -> int:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return (a + b) % L


def has_even_multiplicity(values: Iterable[int]) -> bool:
    counts = Counter(v for v in values if v != NEG_INF)
    return all(c % 2 == 0 for c in counts.values())


def _as_entries(entries, L: int) -> np.ndarray:
    arr = np.array(entries, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("base matrix entries must form a 2-D grid")
    if np.any(arr < NEG_INF):
        raise ValueError("exponents must be NEG_INF or non-negative")
    return np.where(arr == NEG_INF, NEG_INF, arr % L)


@dataclass(frozen=True, eq=False)
class QcBaseMatrix:
    """An m x n grid of CPM exponents with circulant size ``L``."""

    L: int
    entries: np.ndarray

    def __init__(self, L: int, entries):
        if int(L) < 1:
            raise ValueError(f"circulant size must be positive, got {L}")
        arr = _as_entries(entries, int(L))
        arr.flags.writeable = False
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.entries[i])

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.entries[:, j])

    def key(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.entries.ravel())

    def is_fully_connected(self) -> bool:
        return not np.any(self.entries == NEG_INF)

    def is_canonical(self) -> bool:
        return (
            self.is_fully_connected()
            and not np.any(self.entries[0])
            and not np.any(self.entries[:, 0])
        )

    def lift(self) -> BinaryMatrix:
        return lift(self)

    def conjugate_transpose(self) -> QcBaseMatrix:
        return conjugate_transpose(self)

    def canonicalize(self) -> QcBaseMatrix:
        return canonicalize(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QcBaseMatrix):
            return NotImplemented
        return self.L == other.L and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.L, self.shape, self.key()))

    def __repr__(self) -> str:
        rows = "; ".join(
            " ".join("-inf" if v == NEG_INF else str(v) for v in self.row(i)) for i in range(self.m)
        )
        return f"QcBaseMatrix(L={self.L}, [{rows}])"

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "m": self.m,
            "n": self.n,
            "entries": [["-inf" if v == NEG_INF else v for v in self.row(i)] for i in range(self.m)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> QcBaseMatrix:
        try:
            L = int(data["L"])
            raw = data["entries"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"base matrix JSON is missing field {exc}") from None
        entries = []
        for i, row in enumerate(raw):
            parsed = []
            for j, v in enumerate(row):
                if v == "-inf":
                    parsed.append(NEG_INF)
                elif isinstance(v, int) and not isinstance(v, bool) and 0 <= v < L:
                    parsed.append(v)
                else:
                    raise ValueError(f"entries[{i}][{j}] = {v!r} is not '-inf' or an int in [0, {L})")
            entries.append(parsed)
        widths = {len(r) for r in entries}
        if len(widths) > 1:
            raise ValueError("entries rows have unequal lengths")
        b = cls(L, entries)
        for name, want in (("m", b.m), ("n", b.n)):
            if name in data and int(data[name]) != want:
                raise ValueError(f"declared {name}={data[name]} but entries give {want}")
        return b


def load_base_matrix(path: str | Path) -> QcBaseMatrix:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return QcBaseMatrix.from_dict(data)


def save_base_matrix(b: QcBaseMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(b.to_dict(), indent=2) + "\n")


def conjugate_transpose(b: QcBaseMatrix) -> QcBaseMatrix:
    e = b.entries.T
    return QcBaseMatrix(b.L, np.where(e == NEG_INF, NEG_INF, (b.L - e) % b.L))


def cpm(e: int, L: int) -> np.ndarray:
    """Dense L x L block for exponent ``e``."""
    block = np.zeros((L, L), dtype=np.uint8)
    if e != NEG_INF:
        c = np.arange(L)
        block[(c + e) % L, c] = 1
    return block


def lift_dense(b: QcBaseMatrix) -> np.ndarray:
    L, (m, n) = b.L, b.shape
    out = np.zeros((m * L, n * L), dtype=np.uint8)
    c = np.arange(L)
    for i in range(m):
        for j in range(n):
            e = int(b.entries[i, j])
            if e != NEG_INF:
                out[i * L + (c + e) % L, j * L + c] = 1
    return out


def lift(b: QcBaseMatrix) -> BinaryMatrix:
    return BinaryMatrix.from_dense(lift_dense(b))


def canonicalize(b: QcBaseMatrix) -> QcBaseMatrix:
    """Zero the first row and column by per-row then per-column shifts."""
    if not b.is_fully_connected():
        raise ValueError("canonical form is defined only for fully connected base matrices")
    e = (b.entries - b.entries[:, :1]) % b.L
    e = (e - e[:1, :]) % b.L
    return QcBaseMatrix(b.L, e)


# ---------------------------------------------------------------------------
# girth


def _tanner_adjacency(h: BinaryMatrix) -> list[list[int]]:
    """Adjacency lists with variables ``0..n-1`` and checks ``n..n+m-1``."""
    dense = h.to_dense()
    m, n = dense.shape
    adj: list[list[int]] = [[] for _ in range(n + m)]
    for i, j in zip(*np.nonzero(dense)):
        adj[int(j)].append(n + int(i))
        adj[n + int(i)].append(int(j))
    return adj


def girth_bfs(h: BinaryMatrix, cap: int = GIRTH_CAP, block: int | None = None) -> float:
    """Shortest cycle of the Tanner graph of ``h`` by BFS from every variable node.

    With ``block`` set (quasi-cyclic matrix of that circulant size), only the
    first variable of each block is used as a root. Returns ``inf`` when no
    cycle of length <= ``cap`` exists.
    """
    if h.is_zero():
        raise ValueError("Tanner graph has no edges")
    adj = _tanner_adjacency(h)
    roots = range(0, h.cols, block) if block else range(h.cols)
    best = math.inf
    limit = cap // 2
    for root in roots:
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best or dist[u] >= limit:
                continue
            for w in adj[u]:
                if w == parent[u]:
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
    return best if best <= cap else math.inf


def _half_walks(edges_of_var, edges_of_chk, start: int, length: int):
    """Non-backtracking walks of ``length`` edges from variable ``start``.

    Yields ``(end_node, first_edge, last_edge, signed_sum, path)``. Nodes are
    ``('v', j)`` or ``('c', i)``; an edge is its (i, j, exponent) triple.
    """
    stack = [(("v", start), None, None, 0, ())]
    while stack:
        node, first, last, total, path = stack.pop()
        if len(path) == length:
            yield node, first, last, total, path
            continue
        kind, idx = node
        options = edges_of_var[idx] if kind == "v" else edges_of_chk[idx]
        for edge in options:
            if edge is last:
                continue
            i, j, e = edge
            if kind == "v":
                nxt, step = ("c", i), e
            else:
                nxt, step = ("v", j), -e
            stack.append((nxt, first or edge, edge, total + step, path + (edge,)))


def _base_edges(b: QcBaseMatrix):
    edges_of_var = defaultdict(list)
    edges_of_chk = defaultdict(list)
    for i in range(b.m):
        for j in range(b.n):
            e = int(b.entries[i, j])
            if e != NEG_INF:
                edge = (i, j, e)
                edges_of_var[j].append(edge)
                edges_of_chk[i].append(edge)
    return edges_of_var, edges_of_chk


def zero_sum_closed_walks(b: QcBaseMatrix, length: int):
    """Closed non-backtracking base-graph walks of ``length`` whose exponent sum is 0 mod L.

    Each walk is a tuple of (i, j, exponent) edges starting and ending at a
    variable node. Walks are produced by joining two half-walks that meet at a
    common node without backtracking at either end.
    """
    if length % 2 or length < 4:
        raise ValueError("cycle length must be an even number >= 4")
    edges_of_var, edges_of_chk = _base_edges(b)
    half = length // 2
    for start in sorted(edges_of_var):
        buckets = defaultdict(list)
        for end, first, last, total, path in _half_walks(edges_of_var, edges_of_chk, start, half):
            buckets[(end, total % b.L)].append((first, last, path))
        for group in buckets.values():
            for a_first, a_last, a_path in group:
                for b_first, b_last, b_path in group:
                    if a_first is b_first or a_last is b_last:
                        continue
                    yield a_path + tuple(reversed(b_path))


def girth_exponent(b: QcBaseMatrix, cap: int = GIRTH_CAP) -> float:
    """Girth of ``lift(b)`` from the zero-sum condition on closed base-graph walks."""
    if not np.any(b.entries != NEG_INF):
        raise ValueError("Tanner graph has no edges")
    for length in range(4, cap + 1, 2):
        for _ in zero_sum_closed_walks(b, length):
            return length
    return math.inf


def lifted_walk_nodes(b: QcBaseMatrix, walk: Sequence[tuple[int, int, int]], offset: int = 0):
    """Lift a closed base walk starting at variable offset ``offset``; returns lifted node labels."""
    L = b.L
    i0, j0, _ = walk[0]
    node = ("v", j0, offset % L)
    nodes = [node]
    for i, j, e in walk:
        kind, idx, c = node
        if kind == "v":
            node = ("c", i, (c + e) % L)
        else:
            node = ("v", j, (c - e) % L)
        nodes.append(node)
    return nodes


def cycle_witness(b: QcBaseMatrix, length: int):
    """A base walk of ``length`` that lifts to a simple cycle of exactly that length, or None."""
    for walk in zero_sum_closed_walks(b, length):
        nodes = lifted_walk_nodes(b, walk)
        if nodes[0] == nodes[-1] and len(set(nodes[:-1])) == length:
            return walk
    return None


def girth(b: QcBaseMatrix, cap: int = GIRTH_CAP) -> float:
    """Girth of the lifted Tanner graph, computed by BFS and by the exponent
    condition; the two must agree."""
    h = lift(b)
    by_bfs = girth_bfs(h, cap=cap, block=b.L)
    by_exp = girth_exponent(b, cap=cap)
    if by_bfs != by_exp:
        raise RuntimeError(f"girth mismatch: BFS gives {by_bfs}, exponent walks give {by_exp}")
    return by_bfs
