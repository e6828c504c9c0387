"""Exhaustive screening of canonical 3x4-style base matrices.

The pipeline per matrix is: RCPC search, classical distance of the lifted
matrix, and only when that exceeds the threshold, a quantum distance pass.
Matrices are numbered by their position in :func:`enumerate_canonical`, so
any contiguous index range can be screened on its own and the partial
counts added up.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from qclp import distance as dist
from qclp import rcpc
from qclp.lifted_product import build_symmetric, to_css
from qclp.qcbase import QcBaseMatrix, girth, lift

CSV_COLUMNS = ["entries", "rcpc", "d_c", "d_q", "d_q_mode", "girth"]
LOWER_BOUND = "LOWER_BOUND"


@dataclass(frozen=True)
class ScreenSettings:
    """Everything that determines a screening run's output."""

    L: int
    m: int
    n: int
    threshold: int
    exact_dq: bool = False
    node_budget: int = dist.DEFAULT_NODE_BUDGET
    iterations: int = 1000
    pattern_weight: int = dist.DEFAULT_PATTERN_WEIGHT
    seed: int = 0

    @property
    def total(self) -> int:
        return self.L ** ((self.m - 1) * (self.n - 1))


@dataclass
class SearchReport:
    L: int
    m: int
    n: int
    threshold: int
    total: int = 0
    rcpc_count: int = 0
    dc_gt_threshold: int = 0
    dq_gt_threshold: int = 0
    dq_mode: str = dist.Mode.EXACT.value
    incomplete: bool = False
    undecided: int = 0
    dq_calls: int = 0
    budget: dict = field(default_factory=dict)

    def merge(self, other: SearchReport) -> SearchReport:
        """Associative combination of two disjoint partial reports."""
        modes = {self.dq_mode, other.dq_mode}
        mode = dist.Mode.ESTIMATE.value if dist.Mode.ESTIMATE.value in modes else dist.Mode.EXACT.value
        return SearchReport(
            self.L,
            self.m,
            self.n,
            self.threshold,
            self.total + other.total,
            self.rcpc_count + other.rcpc_count,
            self.dc_gt_threshold + other.dc_gt_threshold,
            self.dq_gt_threshold + other.dq_gt_threshold,
            mode,
            self.incomplete or other.incomplete,
            self.undecided + other.undecided,
            self.dq_calls + other.dq_calls,
            dict(self.budget),
        )

    def counts(self) -> tuple[int, int, int, int]:
        return (self.total, self.rcpc_count, self.dc_gt_threshold, self.dq_gt_threshold)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Candidate:
    index: int
    L: int
    entries: tuple[tuple[int, ...], ...]
    rcpc: str
    d_c: int
    d_q: int
    d_q_mode: str
    girth: float

    def key(self) -> str:
        return ";".join(str(x) for row in self.entries for x in row)

    def to_csv_row(self) -> list:
        g = self.girth if math.isfinite(self.girth) else "inf"
        return [self.key(), self.rcpc, self.d_c, self.d_q, self.d_q_mode, g]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["entries"] = [list(r) for r in self.entries]
        out["girth"] = self.girth if math.isfinite(self.girth) else "inf"
        return out

    @classmethod
    def from_dict(cls, data: dict) -> Candidate:
        g = data["girth"]
        return cls(
            data["index"],
            data["L"],
            tuple(tuple(r) for r in data["entries"]),
            data["rcpc"],
            data["d_c"],
            data["d_q"],
            data["d_q_mode"],
            math.inf if g == "inf" else g,
        )

    def base_matrix(self) -> QcBaseMatrix:
        return QcBaseMatrix(self.L, self.entries)


def matrix_at(index: int, L: int, m: int, n: int) -> QcBaseMatrix:
    """The ``index``-th canonical matrix; the last free entry varies fastest."""
    free = (m - 1) * (n - 1)
    digits = np.zeros(free, dtype=np.int64)
    for pos in range(free - 1, -1, -1):
        index, digits[pos] = divmod(index, L)
    entries = np.zeros((m, n), dtype=np.int64)
    entries[1:, 1:] = digits.reshape(m - 1, n - 1)
    return QcBaseMatrix(L, entries)


def enumerate_canonical(
    L: int, m: int, n: int, start: int = 0, stop: int | None = None
) -> Iterator[QcBaseMatrix]:
    """Canonical m x n matrices (first row and column zero) in index order."""
    if L < 2:
        raise ValueError("L must be at least 2")
    total = L ** ((m - 1) * (n - 1))
    stop = total if stop is None else min(stop, total)
    for index in range(start, stop):
        yield matrix_at(index, L, m, n)


def _rcpc_label(b: QcBaseMatrix) -> str:
    axes = []
    if rcpc.find_row_partition(b) is not None:
        axes.append("row")
    if rcpc.find_col_partition(b) is not None:
        axes.append("col")
    return "+".join(axes) or "none"


def _quantum_pass(b: QcBaseMatrix, settings: ScreenSettings, label: str):
    """Return (d_q, mode) for a matrix whose classical distance passed.

    ``d_q`` is None when a logical of weight <= threshold was found.
    """
    code = to_css(build_symmetric(b))
    t = settings.threshold
    if settings.exact_dq:
        report = dist.quantum_min_distance_exact(code, t, budget=settings.node_budget)
        if not report.lower_bound:
            return None, dist.Mode.EXACT.value
        if label != "none" and t >= b.m + b.n:
            raise RuntimeError(f"exact search missed an RCPC logical for {b.entries.tolist()}")
        return report.value, LOWER_BOUND
    report = dist.quantum_distance_estimate(
        code,
        iterations=settings.iterations,
        seed=settings.seed,
        pattern_weight=settings.pattern_weight,
        stop_at=t,
    )
    value = report.value
    if label != "none" and value > t:
        # the certificate's codeword is a verified witness the estimator missed
        value = min(value, b.m + b.n)
    if value <= t:
        return None, dist.Mode.ESTIMATE.value
    return int(value), dist.Mode.ESTIMATE.value


def screen_range(
    settings: ScreenSettings, start: int, stop: int
) -> tuple[SearchReport, list[Candidate]]:
    s = settings
    report = SearchReport(s.L, s.m, s.n, s.threshold, budget=_budget(s))
    if not s.exact_dq:
        report.dq_mode = dist.Mode.ESTIMATE.value
    found: list[Candidate] = []
    for offset, b in enumerate(enumerate_canonical(s.L, s.m, s.n, start, stop)):
        report.total += 1
        label = _rcpc_label(b)
        if label != "none":
            report.rcpc_count += 1
        d_c = dist.classical_min_distance(lift(b), seed=s.seed).value
        if d_c <= s.threshold:
            continue
        report.dc_gt_threshold += 1
        report.dq_calls += 1
        try:
            d_q, mode = _quantum_pass(b, s, label)
        except dist.BudgetExceeded:
            report.incomplete = True
            report.undecided += 1
            continue
        if d_q is None:
            continue
        if label != "none" and s.threshold >= s.m + s.n:
            raise RuntimeError(f"RCPC matrix {b.entries.tolist()} reported d^Q > threshold")
        report.dq_gt_threshold += 1
        entries = tuple(tuple(int(x) for x in row) for row in b.entries)
        dc_value = int(d_c) if math.isfinite(d_c) else -1
        found.append(Candidate(start + offset, s.L, entries, label, dc_value, d_q, mode, girth(b)))
    return report, found


def _budget(s: ScreenSettings) -> dict:
    if s.exact_dq:
        return {"method": "exact", "node_budget": s.node_budget}
    return {
        "method": "estimate",
        "iterations": s.iterations,
        "pattern_weight": s.pattern_weight,
        "seed": s.seed,
    }


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(a, min(a + size, total)) for a in range(0, total, size)]


def _run_chunk(args):
    settings, start, stop = args
    return screen_range(settings, start, stop)


class CandidateStore:
    """Append-only CSV plus a JSON-lines journal of finished chunks.

    The journal makes runs resumable: a chunk whose record is present is
    not screened again, and its counts and candidates are reused.
    """

    def __init__(self, csv_path: str | Path | None, journal_path: str | Path | None):
        self.csv_path = None if csv_path is None else Path(csv_path)
        self.journal_path = None if journal_path is None else Path(journal_path)

    def load(self, settings: ScreenSettings) -> dict[tuple[int, int], tuple[SearchReport, list[Candidate]]]:
        done: dict = {}
        if self.journal_path is None or not self.journal_path.exists():
            return done
        with self.journal_path.open() as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec["kind"] == "run" and rec["settings"] != asdict(settings):
                    raise ValueError(f"{self.journal_path} belongs to a run with other settings")
                if rec["kind"] == "chunk":
                    part = SearchReport(**rec["report"])
                    cands = [Candidate.from_dict(c) for c in rec["candidates"]]
                    done[(rec["start"], rec["stop"])] = (part, cands)
        return done

    def start(self, settings: ScreenSettings, resumed: bool) -> None:
        if self.journal_path is not None and not resumed:
            self.journal_path.write_text(json.dumps({"kind": "run", "settings": asdict(settings)}) + "\n")
        if self.csv_path is not None and not (resumed and self.csv_path.exists()):
            with self.csv_path.open("w", newline="") as fh:
                csv.writer(fh).writerow(CSV_COLUMNS)

    def append(self, start: int, stop: int, part: SearchReport, cands: list[Candidate]) -> None:
        if self.csv_path is not None:
            with self.csv_path.open("a", newline="") as fh:
                writer = csv.writer(fh)
                for c in cands:
                    writer.writerow(c.to_csv_row())
        if self.journal_path is not None:
            rec = {
                "kind": "chunk",
                "start": start,
                "stop": stop,
                "report": part.to_dict(),
                "candidates": [c.to_dict() for c in cands],
            }
            with self.journal_path.open("a") as fh:
                fh.write(json.dumps(rec) + "\n")


def screen(
    L: int,
    m: int,
    n: int,
    threshold: int | None = None,
    exact_dq: bool = False,
    jobs: int = 1,
    chunk_size: int = 2048,
    store: CandidateStore | None = None,
    **options,
) -> tuple[SearchReport, list[Candidate]]:
    """Screen every canonical matrix; returns the report and the candidates.

    ``options`` are extra :class:`ScreenSettings` fields (budgets, seed).
    Results do not depend on ``jobs`` or ``chunk_size``.
    """
    settings = ScreenSettings(L, m, n, m + n if threshold is None else threshold, exact_dq, **options)
    store = store or CandidateStore(None, None)
    done = store.load(settings)
    store.start(settings, resumed=bool(done))
    todo = [ch for ch in _chunks(settings.total, chunk_size) if ch not in done]
    results = dict(done)
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = pool.map(_run_chunk, [(settings, a, b) for a, b in todo])
            for (a, b), out in zip(todo, outs):
                store.append(a, b, *out)
                results[(a, b)] = out
    else:
        for a, b in todo:
            out = screen_range(settings, a, b)
            store.append(a, b, *out)
            results[(a, b)] = out
    report = SearchReport(L, m, n, settings.threshold, budget=_budget(settings))
    report.dq_mode = dist.Mode.EXACT.value if exact_dq else dist.Mode.ESTIMATE.value
    candidates: list[Candidate] = []
    for key in sorted(results):
        part, cands = results[key]
        report = report.merge(part)
        candidates.extend(cands)
    if report.total != settings.total:
        raise RuntimeError(f"screened {report.total} matrices, expected {settings.total}")
    return report, candidates


def load_candidates(path: str | Path) -> list[Candidate]:
    """Read candidates back from a journal (JSON lines) or a CSV file."""
    path = Path(path)
    if path.suffix == ".csv":
        raise ValueError("CSV rows lack L and index; load the JSON-lines journal instead")
    out = []
    with path.open() as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                if rec["kind"] == "chunk":
                    out.extend(Candidate.from_dict(c) for c in rec["candidates"])
    return sorted(out, key=lambda c: c.index)


def refine_candidates(
    candidates: list[Candidate], girth_min: int, dq_target: int
) -> list[Candidate]:
    """Keep candidates with base girth >= girth_min and d_q >= dq_target.

    Ranked by distance evidence, then girth, then enumeration index.
    """
    kept = [c for c in candidates if c.girth >= girth_min and c.d_q >= dq_target]
    return sorted(kept, key=lambda c: (-c.d_q, -c.girth, c.index))
