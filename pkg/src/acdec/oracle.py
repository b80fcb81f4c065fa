"""Exact maximum-likelihood reference decoder and exact marginals.

Both routines enumerate the full solution set of He = s, so they only make
sense for small problems (n <= 24).  They exist to pin down ground truth in
tests and benchmarks: the ML decoder maximises the summed prior mass of each
logical coset, and the marginals give the per-column posterior that belief
propagation approximates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitVector, InconsistentSystemError, full_reduce, _unpack
from .problem import DecodingProblem

__all__ = ["MlResult", "ml_decode", "exact_marginals", "NoSolutionError"]

_MAX_N = 24
_CHUNK = 1 << 16


class NoSolutionError(InconsistentSystemError):
    """The syndrome is outside the column span of H."""


@dataclass
class MlResult:
    logical_effect: BitVector
    coset_masses: dict  # 0/1 string of the logical effect -> prior mass
    total_mass: float


def _solution_basis(problem: DecodingProblem, syndrome: BitVector):
    """Reduce H and return (particular solution, free-column generators).

    The generators are n-bit patterns; XOR-ing any subset of them into the
    particular solution walks the whole solution set (2^q points).
    """
    mat = problem.h.copy()
    syn = syndrome.copy()
    pivots = full_reduce(mat, syn)
    for i in range(mat.m):
        if not pivots.is_pivot_row(i) and syn[i]:
            raise NoSolutionError(f"syndrome bit {i} cannot be explained: no solution")
    n = problem.n
    base = BitVector(n)
    for i, j in pivots.items():
        if syn[i]:
            base.set(j, 1)
    gens = []
    for j in range(n):
        if pivots.is_pivot_col(j):
            continue
        g = BitVector(n)
        g.set(j, 1)
        col = mat.col_bits(j)
        for i in np.nonzero(col)[0]:
            g.set(pivots.row_to_col[int(i)], 1)
        gens.append(g)
    return base, gens


def _enumerate_masses(problem: DecodingProblem, syndrome: BitVector):
    """Yield (E bits chunk, log-mass chunk, lambda-index chunk) over all solutions."""
    if problem.n > _MAX_N:
        raise ValueError(f"exhaustive enumeration capped at n={_MAX_N}, got n={problem.n}")
    base, gens = _solution_basis(problem, syndrome)
    q = len(gens)
    n = problem.n
    nw = max(1, (n + 63) >> 6)
    gen_words = np.zeros((q, nw), dtype=np.uint64)
    for r, g in enumerate(gens):
        gen_words[r] = g.words
    log_ratio = problem._log_priors_one - problem._log_priors_zero
    lw = problem.logicals.words if problem.k else None
    for start in range(0, 1 << q, _CHUNK):
        count = min(_CHUNK, (1 << q) - start)
        idx = np.arange(start, start + count, dtype=np.uint64)
        ewords = np.tile(base.words, (count, 1))
        for r in range(q):
            mask = (idx >> np.uint64(r)) & np.uint64(1)
            ewords[mask.astype(bool)] ^= gen_words[r]
        ebits = _unpack(ewords, n).astype(np.float64)
        logmass = problem._log_all_zero + ebits @ log_ratio
        if problem.k:
            lam = np.zeros(count, dtype=np.int64)
            for l in range(problem.k):
                par = (np.bitwise_count(ewords & lw[l][None, :]).sum(axis=1) & 1).astype(np.int64)
                lam |= par << (problem.k - 1 - l)  # row 0 is the most significant bit
        else:
            lam = np.zeros(count, dtype=np.int64)
        yield ewords, logmass, lam


def ml_decode(problem: DecodingProblem, syndrome: BitVector) -> MlResult:
    """Exact maximum-likelihood decoding by full coset enumeration.

    Sums the prior mass of every solution of He = s per logical effect and
    returns the effect with the largest mass; ties go to the
    lexicographically smallest effect (bit 0 most significant).

    Raises:
        NoSolutionError: if He = s has no solution at all.
        ValueError: if n > 24.
    """
    k = problem.k
    masses: dict[int, float] = {}
    for _, logmass, lam in _enumerate_masses(problem, syndrome):
        w = np.exp(logmass)
        for key in np.unique(lam):
            masses[int(key)] = masses.get(int(key), 0.0) + float(w[lam == key].sum())
    best = min(masses.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    lam_bits = BitVector.from_bits((best >> (k - 1 - l)) & 1 for l in range(k))
    named = {
        BitVector.from_bits((key >> (k - 1 - l)) & 1 for l in range(k)).to01(): mass
        for key, mass in masses.items()
    }
    return MlResult(lam_bits, named, sum(masses.values()))


def exact_marginals(problem: DecodingProblem, syndrome: BitVector) -> np.ndarray:
    """Per-column posterior P(e_j = 1 | He = s) by full enumeration."""
    num = np.zeros(problem.n, dtype=np.float64)
    den = 0.0
    for ewords, logmass, _ in _enumerate_masses(problem, syndrome):
        w = np.exp(logmass)
        ebits = _unpack(ewords, problem.n)
        num += w @ ebits
        den += float(w.sum())
    return num / den
