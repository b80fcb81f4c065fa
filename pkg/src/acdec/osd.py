"""Ordered-statistics post-processing for failed BP runs.

OSD eliminates the check matrix with pivots chosen greedily by posterior
probability, which makes the most plausible columns the dependent ones.
Candidate errors are then read off the reduced system for a small family of
free-column patterns g and scored by prior probability; the decoder returns
the best-scoring candidate's logical effect.

Three candidate families are supported: order zero (g = 0 only), exhaustive
order t (every pattern on the t most likely free columns), and combination
sweep (g = 0, every weight-1 pattern, and every weight-2 pattern inside the
t most likely free columns).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .gf2 import BitVector, PivotAssignment, _unpack, pivot_at
from .problem import DecodeFailureError, DecodeResult, DecodingProblem
from .bp import BpConfig, hard_decision, run_bp

__all__ = [
    "OsdConfig",
    "OsdResult",
    "osd_decode",
    "candidate_count",
    "score_candidates",
    "bposd_decode",
]

_METHODS = ("order_zero", "exhaustive", "combination_sweep")


@dataclass(frozen=True)
class OsdConfig:
    method: str = "combination_sweep"
    order: int = 7  # t: how many of the most likely free columns to search over

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown OSD method {self.method!r}; pick from {_METHODS}")
        if self.order < 0:
            raise ValueError("order must be >= 0")


@dataclass
class OsdResult:
    error: BitVector
    logical_effect: BitVector
    candidates_scored: int
    pivot_count: int


def candidate_count(method: str, t: int, n: int, m: int) -> int:
    """Candidate count for an eliminated system with m pivots and n columns.

    order_zero: 1; exhaustive: 2^t; combination_sweep: 1 + (n - m) + C(t, 2).
    The order t never exceeds the number of free columns, matching what the
    decoder actually enumerates on narrow systems.
    """
    free = n - m
    t = min(t, free)
    if method == "order_zero":
        return 1
    if method == "exhaustive":
        return 1 << t
    if method == "combination_sweep":
        return 1 + free + t * (t - 1) // 2
    raise ValueError(f"unknown OSD method {method!r}")


def _eliminate(problem: DecodingProblem, syndrome: BitVector, posteriors: np.ndarray):
    """Reduce a private copy of H with most-likely-column pivots.

    Returns (matrix, transformed syndrome, pivot assignment).  Ties in the
    posterior go to the lowest column index; within a column the lowest
    non-pivot row wins.  A column whose support ever falls entirely inside
    pivot rows can never become pivotable again (pivot columns stay
    reduced), so each column is examined once, in posterior order.
    """
    mat = problem.h.copy()
    syn = syndrome.copy()
    pivots = PivotAssignment()
    n, m = mat.n, mat.m
    order = np.lexsort((np.arange(n), -np.asarray(posteriors)))
    is_piv_row = np.zeros(m, dtype=bool)
    for j in order:
        rows = mat.col_support(int(j))
        valid = rows[~is_piv_row[rows]]
        if len(valid) == 0:
            continue
        i = int(valid[0])
        pivot_at(mat, syn, None, pivots, i, int(j))
        is_piv_row[i] = True
    for i in range(m):
        if not is_piv_row[i] and syn[i]:
            raise DecodeFailureError(
                f"syndrome bit {i} survives on a dependent zero row; the system is inconsistent"
            )
    return mat, syn, pivots


def _assemble(problem, pivots, f_bits, free_cols, chosen) -> BitVector:
    e = BitVector(problem.n)
    for i, j in pivots.items():
        if f_bits[i]:
            e.set(j, 1)
    for r in chosen:
        e.set(int(free_cols[r]), 1)
    return e


def score_candidates(problem, mat, syn, pivots, posteriors, config):
    """Enumerate and score the configured candidate family.

    Scores are sums of log((1-eps)/eps) over the candidate's support —
    lower is more likely — and ties prefer the earliest enumeration index.
    Returns (best error, candidates examined).
    """
    n, m = mat.n, mat.m
    llr = problem.llrs
    piv_col_of_row = np.full(m, -1, dtype=np.int64)
    for i, j in pivots.items():
        piv_col_of_row[i] = j
    w = np.where(piv_col_of_row >= 0, llr[piv_col_of_row], 0.0)
    f0 = syn.to_array().astype(np.float64)
    s0 = float(f0 @ w)
    free_mask = np.ones(n, dtype=bool)
    free_mask[[j for j in pivots.col_to_row]] = False
    free_cols = np.nonzero(free_mask)[0]
    # rank free columns by posterior, most likely first, lowest index on ties
    rank = np.lexsort((free_cols, -np.asarray(posteriors)[free_cols]))
    free_cols = free_cols[rank]
    nf = len(free_cols)
    t_eff = min(config.order, nf)

    best_score = s0
    best_idx = 0
    best_choice: tuple[int, ...] = ()
    count = 1

    if config.method == "order_zero" or nf == 0:
        f_bits = syn.to_array()
        return _assemble(problem, pivots, f_bits, free_cols, best_choice), count

    dense = _unpack(mat.words, n).astype(np.float64)  # m x n
    bcols = dense[:, free_cols]  # supports of free columns over rows
    signed = np.where(f0 > 0, -w, w)  # per-row cost change when that row flips into/out of f

    if config.method == "exhaustive":
        top = bcols[:, :t_eff]
        for mask in range(1, 1 << t_eff):
            chosen = [r for r in range(t_eff) if (mask >> r) & 1]
            f = (f0 + top[:, chosen].sum(axis=1)) % 2
            score = float(f @ w) + float(llr[free_cols[chosen]].sum())
            count += 1
            if score < best_score:
                best_score, best_idx, best_choice = score, mask, tuple(chosen)
    else:  # combination_sweep
        delta1 = signed @ bcols  # score change on the pivot side, per free column
        w1 = s0 + delta1 + llr[free_cols]
        for r in range(nf):
            count += 1
            if w1[r] < best_score:
                best_score, best_idx, best_choice = float(w1[r]), count - 1, (r,)
        pair_fix = 2.0 * np.where(f0 > 0, w, -w)
        for r1 in range(t_eff):
            for r2 in range(r1 + 1, t_eff):
                both = bcols[:, r1] * bcols[:, r2]
                score = (
                    s0
                    + float(delta1[r1] + delta1[r2])
                    + float((both * pair_fix).sum())
                    + float(llr[free_cols[r1]] + llr[free_cols[r2]])
                )
                count += 1
                if score < best_score:
                    best_score, best_idx, best_choice = score, count - 1, (r1, r2)

    if best_choice:
        flips = bcols[:, list(best_choice)].sum(axis=1).astype(np.int64) % 2
        f_bits = (syn.to_array().astype(np.int64) ^ flips).astype(np.uint8)
    else:
        f_bits = syn.to_array()
    return _assemble(problem, pivots, f_bits, free_cols, best_choice), count


def osd_decode(
    problem: DecodingProblem,
    syndrome: BitVector,
    posteriors: np.ndarray,
    config: OsdConfig,
) -> OsdResult:
    """Full OSD pass: eliminate, enumerate candidates, keep the best.

    Raises:
        DecodeFailureError: if He = syndrome has no solution.
    """
    mat, syn, pivots = _eliminate(problem, syndrome, posteriors)
    e, count = score_candidates(problem, mat, syn, pivots, posteriors, config)
    return OsdResult(e, problem.logical_effect_of(e), count, len(pivots))


def bposd_decode(
    problem: DecodingProblem,
    syndrome: BitVector,
    bp_config: BpConfig | None = None,
    osd_config: OsdConfig | None = None,
) -> DecodeResult:
    """The BP+OSD baseline: believe BP if it converges, otherwise OSD.

    Default BP settings follow the baseline convention: min-sum with a
    10000-round cap.
    """
    bp_config = bp_config or BpConfig(variant="min_sum", max_rounds=10_000)
    osd_config = osd_config or OsdConfig()
    t0 = time.perf_counter()
    pv = run_bp(problem, syndrome, bp_config)
    t1 = time.perf_counter()
    if pv.converged:
        e = hard_decision(pv.posteriors)
        return DecodeResult(
            logical_effect=problem.logical_effect_of(e),
            error_estimate=e,
            converged_by_bp=True,
            bp_rounds=pv.rounds_used,
            candidates_examined=0,
            timings={"bp": t1 - t0, "osd": 0.0, "total": time.perf_counter() - t0},
            decoder="bposd",
        )
    res = osd_decode(problem, syndrome, pv.posteriors, osd_config)
    t2 = time.perf_counter()
    return DecodeResult(
        logical_effect=res.logical_effect,
        error_estimate=res.error,
        converged_by_bp=False,
        bp_rounds=pv.rounds_used,
        candidates_examined=res.candidates_scored,
        timings={"bp": t1 - t0, "osd": t2 - t1, "total": t2 - t0},
        decoder="bposd",
    )
