"""Belief propagation with ordered-statistics post-processing, and a
code-capacity Monte-Carlo driver.

BP runs on a batch of syndromes at once: messages live in ``(batch, edges)``
arrays with edges sorted by check, so check and variable updates are
segment reductions.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from qclp import gf2
from qclp.css import CssCode
from qclp.gf2 import BinaryMatrix

TRIAL_CHUNK = 500
_CLIP = 1e-12


class BpVariant(enum.Enum):
    SUM_PRODUCT = "sum_product"
    NORMALIZED_MIN_SUM = "normalized_min_sum"


class ResidualClass(enum.Enum):
    IDENTITY = "identity"
    STABILIZER = "stabilizer"
    LOGICAL = "logical"


@dataclass(frozen=True)
class DecoderConfig:
    channel_p: float
    trials: int = 10_000
    seed: int = 0
    bp_iterations: int = 100
    bp_variant: BpVariant = BpVariant.SUM_PRODUCT
    ms_scale: float = 0.75
    osd_order: int = 10

    def __post_init__(self):
        if not 0 < self.channel_p < 1:
            raise ValueError(f"channel_p must lie in (0, 1), got {self.channel_p}")
        if self.osd_order < 0:
            raise ValueError("osd_order must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.bp_iterations < 0:
            raise ValueError("bp_iterations must be non-negative")


@dataclass(frozen=True)
class TrialOutcome:
    converged: bool
    residual_class: ResidualClass

    @property
    def logical_error(self) -> bool:
        return self.residual_class is ResidualClass.LOGICAL


class TannerEdges:
    """Edge lists of a parity-check matrix, ordered by check then column."""

    def __init__(self, h: BinaryMatrix):
        dense = h.to_dense()
        self.rows, self.cols = dense.shape
        self.check, self.var = np.nonzero(dense)
        self.check_starts = _segment_starts(self.check, self.rows)
        self.by_var = np.argsort(self.var, kind="stable")
        self.var_starts = _segment_starts(self.var[self.by_var], self.cols)
        self.check_nonempty = np.bincount(self.check, minlength=self.rows) > 0
        self.var_nonempty = np.bincount(self.var, minlength=self.cols) > 0

    def check_reduce(self, ufunc, values: np.ndarray) -> np.ndarray:
        out = np.zeros((values.shape[0], self.rows), dtype=values.dtype)
        if values.shape[1]:
            out[:, self.check_nonempty] = ufunc.reduceat(values, self.check_starts, axis=1)
        return out

    def var_sum(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros((values.shape[0], self.cols), dtype=values.dtype)
        if values.shape[1]:
            ordered = values[:, self.by_var]
            out[:, self.var_nonempty] = np.add.reduceat(ordered, self.var_starts, axis=1)
        return out


def _segment_starts(sorted_keys: np.ndarray, count: int) -> np.ndarray:
    present = np.unique(sorted_keys)
    return np.searchsorted(sorted_keys, present[present < count])


def _check_messages(edges: TannerEdges, q: np.ndarray, signs: np.ndarray, cfg: DecoderConfig):
    if cfg.bp_variant is BpVariant.SUM_PRODUCT:
        t = np.tanh(q / 2)
        mag = np.maximum(np.abs(t), _CLIP)
        neg = t < 0
        log_total = edges.check_reduce(np.add, np.log(mag))
        neg_total = edges.check_reduce(np.add, neg.astype(np.int64))
        log_excl = log_total[:, edges.check] - np.log(mag)
        neg_excl = neg_total[:, edges.check] - neg
        prod = np.minimum(np.exp(log_excl), 1 - _CLIP)
        sign = np.where((neg_excl + signs[:, edges.check]) % 2, -1.0, 1.0)
        return sign * 2 * np.arctanh(prod)
    mag = np.abs(q)
    neg = q < 0
    min1 = edges.check_reduce(np.minimum, mag)
    at_min = mag == min1[:, edges.check]
    ties = edges.check_reduce(np.add, at_min.astype(np.int64))
    masked = np.where(at_min, np.inf, mag)
    min2 = edges.check_reduce(np.minimum, masked)
    min2 = np.where(ties >= 2, min1, min2)
    excl = np.where(at_min, min2[:, edges.check], min1[:, edges.check])
    neg_total = edges.check_reduce(np.add, neg.astype(np.int64))
    neg_excl = neg_total[:, edges.check] - neg
    sign = np.where((neg_excl + signs[:, edges.check]) % 2, -1.0, 1.0)
    return sign * cfg.ms_scale * excl


def bp_decode_batch(
    h: BinaryMatrix,
    syndromes: np.ndarray,
    cfg: DecoderConfig,
    edges: TannerEdges | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decode a ``(batch, rows)`` syndrome array.

    Returns hard decisions, a converged mask and the final posterior LLRs.
    Rows stop updating once their hard decision matches the syndrome.
    """
    edges = edges or TannerEdges(h)
    syn = np.asarray(syndromes, dtype=np.int64).reshape(-1, h.rows) & 1
    batch = syn.shape[0]
    prior = math.log((1 - cfg.channel_p) / cfg.channel_p)
    llr = np.full((batch, h.cols), prior)
    est = np.zeros((batch, h.cols), dtype=np.uint8)
    hd = h.to_dense().astype(np.int64)
    done = ~(syn.any(axis=1))
    active = np.flatnonzero(~done)
    q = np.full((active.size, edges.var.size), prior)
    for _ in range(cfg.bp_iterations):
        if active.size == 0:
            break
        r = _check_messages(edges, q, syn[active], cfg)
        total = prior + edges.var_sum(r)
        q = total[:, edges.var] - r
        hard = (total < 0).astype(np.uint8)
        ok = np.all((hard.astype(np.int64) @ hd.T) % 2 == syn[active], axis=1)
        llr[active] = total
        est[active] = hard
        done[active[ok]] = True
        active = active[~ok]
        q = q[~ok]
    return est, done, llr


def bp_decode(h: BinaryMatrix, syndrome, cfg: DecoderConfig) -> tuple[np.ndarray, bool]:
    syn = gf2.as_vector(syndrome, h.rows)
    est, done, _ = bp_decode_batch(h, syn.reshape(1, -1), cfg)
    return est[0], bool(done[0])


def osd_postprocess(h: BinaryMatrix, syndrome, soft_values, order: int) -> np.ndarray:
    """Ordered-statistics decoding from per-bit LLRs (positive means "no flip").

    Columns are ranked from most to least likely flipped, ties by index.
    The first independent columns in that order form the pivot set; OSD-0
    solves on it, and every flip pattern of the first ``order`` remaining
    columns is re-solved and scored by the summed LLR of its flipped bits.
    """
    syn = gf2.as_vector(syndrome, h.rows)
    soft = np.asarray(soft_values, dtype=float).reshape(-1)
    if soft.size != h.cols:
        raise ValueError(f"soft_values has length {soft.size}, expected {h.cols}")
    if order < 0:
        raise ValueError("order must be non-negative")
    ranking = np.lexsort((np.arange(h.cols), soft))
    dense = h.to_dense()
    work = gf2.pack_rows(np.hstack([dense[:, ranking], syn.reshape(-1, 1)]))
    pivots = gf2._eliminate(work, range(h.cols), full=True)
    red = gf2.unpack_rows(work, h.cols + 1)
    r = len(pivots)
    if red[r:, h.cols].any():
        raise ValueError("syndrome is not in the column space of h")
    pivots = np.array(pivots, dtype=np.int64)
    is_pivot = np.zeros(h.cols, dtype=bool)
    is_pivot[pivots] = True
    others = np.flatnonzero(~is_pivot)[: min(order, h.cols - r)]
    w = others.size
    patterns = ((np.arange(1 << w)[:, None] >> np.arange(w)) & 1).astype(np.uint8)
    # pivot part of each candidate: s' + sum of flipped columns (reduced form)
    base = red[:r, h.cols].astype(np.int64)
    flips = red[:r][:, others].astype(np.int64)
    pivot_bits = (base[None, :] + patterns.astype(np.int64) @ flips.T) % 2
    cost_sorted = soft[ranking]
    costs = pivot_bits @ cost_sorted[pivots] + patterns @ cost_sorted[others]
    best = int(np.argmin(costs))
    permuted = np.zeros(h.cols, dtype=np.uint8)
    permuted[pivots] = pivot_bits[best]
    permuted[others] = patterns[best]
    out = np.zeros(h.cols, dtype=np.uint8)
    out[ranking] = permuted
    return out


def decode_batch(
    h: BinaryMatrix, syndromes: np.ndarray, cfg: DecoderConfig, edges: TannerEdges | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """BP on every syndrome, OSD on the ones BP leaves unsatisfied."""
    est, done, llr = bp_decode_batch(h, syndromes, cfg, edges)
    for i in np.flatnonzero(~done):
        est[i] = osd_postprocess(h, syndromes[i], llr[i], cfg.osd_order)
    return est, done


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class SimulationResult:
    p: float
    trials: int
    logical_errors: int
    stabilizer_residuals: int
    bp_converged: int
    side: str

    @property
    def rate(self) -> float:
        return self.logical_errors / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.logical_errors, self.trials)

    def csv_row(self) -> list:
        lo, hi = self.interval
        return [self.p, self.trials, self.logical_errors, self.rate, lo, hi]


CSV_COLUMNS = ["p", "trials", "logical_errors", "rate", "ci_low", "ci_high"]


def _side_matrices(code: CssCode, side: str):
    if side == "X":
        return code.hz, code.lz
    if side == "Z":
        return code.hx, code.lx
    raise ValueError(f"side must be 'X' or 'Z', got {side!r}")


def classify_residuals(checks: BinaryMatrix, logicals: BinaryMatrix, residuals: np.ndarray):
    """Classes of residual errors; a nonzero syndrome counts as LOGICAL."""
    res = residuals.astype(np.int64)
    syn = (res @ checks.to_dense().T.astype(np.int64)) % 2
    flips = (res @ logicals.to_dense().T.astype(np.int64)) % 2
    out = []
    for i in range(res.shape[0]):
        if syn[i].any() or flips[i].any():
            out.append(ResidualClass.LOGICAL)
        elif res[i].any():
            out.append(ResidualClass.STABILIZER)
        else:
            out.append(ResidualClass.IDENTITY)
    return out


def run_trials(code: CssCode, cfg: DecoderConfig, chunk: int, side: str = "X") -> list[TrialOutcome]:
    """Trials ``[chunk*TRIAL_CHUNK, ...)`` with their own seeded stream."""
    checks, logicals = _side_matrices(code, side)
    first = chunk * TRIAL_CHUNK
    count = min(TRIAL_CHUNK, cfg.trials - first)
    rng = np.random.default_rng([cfg.seed, chunk])
    errors = (rng.random((count, code.n_qubits)) < cfg.channel_p).astype(np.uint8)
    hd = checks.to_dense().astype(np.int64)
    syndromes = ((errors.astype(np.int64) @ hd.T) % 2).astype(np.uint8)
    est, converged = decode_batch(checks, syndromes, cfg)
    classes = classify_residuals(checks, logicals, errors ^ est)
    return [TrialOutcome(bool(c), k) for c, k in zip(converged, classes)]


def _chunk_counts(args):
    code, cfg, chunk, side = args
    outcomes = run_trials(code, cfg, chunk, side)
    return (
        sum(o.logical_error for o in outcomes),
        sum(o.residual_class is ResidualClass.STABILIZER for o in outcomes),
        sum(o.converged for o in outcomes),
    )


def simulate(code: CssCode, cfg: DecoderConfig, side: str = "X", jobs: int = 1) -> SimulationResult:
    """Code-capacity simulation of independent flips on one side.

    Trials are split into fixed chunks with per-chunk seeds, so the result
    does not depend on ``jobs``.
    """
    _side_matrices(code, side)
    chunks = [(code, cfg, c, side) for c in range(-(-cfg.trials // TRIAL_CHUNK))]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk_counts, chunks))
    else:
        parts = [_chunk_counts(c) for c in chunks]
    logical, stab, conv = (sum(x) for x in zip(*parts))
    return SimulationResult(cfg.channel_p, cfg.trials, logical, stab, conv, side)
