"""Decoding problems: check matrix, logical matrix, priors, and solutions.

A decoding problem bundles an m-by-n check matrix H, a k-by-n logical
matrix L and a prior error probability per column.  A decoder receives a
syndrome s and must guess the logical effect L e of the hidden error e with
H e = s; any e in the right coset is equally good as long as its logical
effect matches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVector

__all__ = [
    "DecodingProblem",
    "DecodeFailureError",
    "DecodeResult",
    "canonicalise",
    "check_solution",
    "log_prior_probability",
    "prior_probability",
]


class DecodeFailureError(RuntimeError):
    """A decoder could not produce a logical estimate for this syndrome."""


class DecodingProblem:
    """An (H, L, priors) triple plus bookkeeping caches.

    H and L must have the same number of columns; priors must lie strictly
    inside (0, 1).  Duplicate or zero columns are tolerated here — use
    :func:`canonicalise` to merge/delete them — so hand-built test problems
    can look exactly like their textbook form.
    """

    def __init__(
        self,
        h: BitMatrix,
        logicals: BitMatrix,
        priors,
        name: str = "",
        rounds: int = 1,
    ):
        if h.n != logicals.n:
            raise ValueError(f"H has {h.n} columns but L has {logicals.n}")
        p = np.asarray(priors, dtype=np.float64)
        if p.shape != (h.n,):
            raise ValueError(f"expected {h.n} priors, got shape {p.shape}")
        if h.n and not ((p > 0.0) & (p < 1.0)).all():
            raise ValueError("priors must lie strictly inside (0, 1)")
        if rounds < 1:
            raise ValueError("rounds must be >= 1")
        self.h = h
        self.logicals = logicals
        self.priors = p
        self.name = name
        self.rounds = rounds
        # log((1-eps)/eps): positive when an error is a priori unlikely.
        self.llrs = np.log1p(-p) - np.log(p)
        self._log_priors_one = np.log(p)
        self._log_priors_zero = np.log1p(-p)
        self._log_all_zero = float(self._log_priors_zero.sum())
        self._bp_engine = None  # lazily built Tanner-graph kernel state

    @property
    def m(self) -> int:
        return self.h.m

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def k(self) -> int:
        return self.logicals.m

    def syndrome_of(self, e: BitVector) -> BitVector:
        return self.h.mat_vec(e)

    def logical_effect_of(self, e: BitVector) -> BitVector:
        return self.logicals.mat_vec(e)

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"DecodingProblem(m={self.m}, n={self.n}, k={self.k}{tag})"


@dataclass
class DecodeResult:
    """What a decoder hands back: the logical estimate plus diagnostics."""

    logical_effect: BitVector
    error_estimate: BitVector | None = None
    converged_by_bp: bool = False
    bp_rounds: int = 0
    cluster_count: int = 0
    cluster_sizes: list = field(default_factory=list)  # (rows, cols) per cluster
    ambiguous_clusters: int = 0
    cluster_candidates: list = field(default_factory=list)  # candidates per ambiguous cluster
    candidates_examined: int = 0
    search_space_product: int = 1
    timings: dict = field(default_factory=dict)
    decoder: str = ""


def log_prior_probability(problem: DecodingProblem, e: BitVector) -> float:
    """log of prod_{e_j=1} eps_j * prod_{e_j=0} (1 - eps_j)."""
    if e.n != problem.n:
        raise ValueError("error length mismatch")
    sup = e.support()
    return problem._log_all_zero + float(
        (problem._log_priors_one[sup] - problem._log_priors_zero[sup]).sum()
    )


def prior_probability(problem: DecodingProblem, e: BitVector) -> float:
    """Prior probability of a specific error pattern (linear scale)."""
    return math.exp(log_prior_probability(problem, e))


def check_solution(problem: DecodingProblem, e: BitVector, syndrome: BitVector) -> bool:
    """True iff He = syndrome."""
    return problem.h.mat_vec(e) == syndrome


def canonicalise(
    m: int,
    k: int,
    columns,
    name: str = "",
    rounds: int = 1,
) -> DecodingProblem:
    """Merge duplicate columns, drop useless ones, and build a problem.

    ``columns`` is an iterable of ``(check_rows, logical_rows, prior)``
    triples, one per error mechanism.  Mechanisms with an identical
    [H; L] footprint are interchangeable, so they are merged with the
    either-but-not-both combiner p1(1-p2) + p2(1-p1); zero-footprint or
    zero-prior mechanisms can never matter and are deleted.  First-seen
    order of the surviving footprints is preserved.

    Raises:
        ValueError: if any prior lies outside [0, 1), or a merged prior
            reaches 1 (an error that fires with certainty is ill-posed).
    """
    order: list[tuple] = []
    merged: dict[tuple, float] = {}
    for idx, (check_rows, logical_rows, prior) in enumerate(columns):
        p = float(prior)
        if not 0.0 <= p < 1.0:
            raise ValueError(f"column {idx}: prior {p} outside [0, 1)")
        key = (frozenset(int(r) for r in check_rows), frozenset(int(r) for r in logical_rows))
        if any(r >= m or r < 0 for r in key[0]):
            raise ValueError(f"column {idx}: check row out of range for m={m}")
        if any(r >= k or r < 0 for r in key[1]):
            raise ValueError(f"column {idx}: logical row out of range for k={k}")
        if key in merged:
            q = merged[key]
            merged[key] = p * (1.0 - q) + q * (1.0 - p)
        else:
            merged[key] = p
            order.append(key)
    # Delete zero columns and columns that can never fire.
    kept = [key for key in order if (key[0] or key[1]) and merged[key] > 0.0]
    for key in kept:
        if merged[key] >= 1.0:
            raise ValueError("a merged prior reached 1; the problem is ill-posed")
    h = BitMatrix.from_cols(m, (key[0] for key in kept))
    logicals = BitMatrix.from_cols(k, (key[1] for key in kept))
    priors = np.array([merged[key] for key in kept], dtype=np.float64)
    return DecodingProblem(h, logicals, priors, name=name, rounds=rounds)
