"""Belief propagation over the Tanner graph of a decoding problem.

Two check-node variants are provided: the exact sum-product rule (tanh
domain) and normalised min-sum.  Messages flow on a deterministic parallel
flooding schedule — one round updates every variable-to-check message, then
every check-to-variable message — and after each round the hard decision is
tested against the syndrome so that easy instances exit early.

Variable-to-check messages are clamped to +-llr_clamp for numerical
stability on loopy graphs.  Check-to-variable messages keep their raw,
possibly infinite value for the posterior sum (a degree-one check genuinely
forces its bit, and the posterior should say so exactly); the clamped copy
is what re-enters the message iteration.  Conflicting infinite evidence on
one bit collapses to a posterior of one half.

The round loop is JIT-compiled; the graph structure is built once per
problem and cached, while message buffers are freshly allocated per call so
concurrent decodes sharing a problem never share mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np
from numba import njit

from .gf2 import BitVector, _pack
from .problem import DecodingProblem

__all__ = [
    "BpConfig",
    "PosteriorVector",
    "run_bp",
    "hard_decision",
    "posteriors_as_llr",
]

_SUM_PRODUCT = 0
_MIN_SUM = 1


@dataclass(frozen=True)
class BpConfig:
    """Knobs for a BP run.

    ``variant`` is "sum_product" or "min_sum"; ``max_rounds`` must be at
    least 1 (zero-iteration BP is disallowed); ``min_sum_scale`` is the
    normalisation factor applied to min-sum check messages; ``llr_clamp``
    bounds message magnitudes; ``early_exit`` controls whether iteration
    stops as soon as the hard decision explains the syndrome (disable it to
    let messages settle, e.g. when comparing against exact marginals).
    """

    variant: str = "sum_product"
    max_rounds: int = 9
    min_sum_scale: float = 0.625
    llr_clamp: float = 30.0
    early_exit: bool = True

    def __post_init__(self):
        if self.variant not in ("sum_product", "min_sum"):
            raise ValueError(f"unknown BP variant {self.variant!r}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if not 0.0 < self.min_sum_scale <= 1.0:
            raise ValueError("min_sum_scale must lie in (0, 1]")
        if not self.llr_clamp > 0.0:
            raise ValueError("llr_clamp must be positive")


@dataclass
class PosteriorVector:
    """Per-column posterior error probabilities plus convergence facts."""

    posteriors: np.ndarray
    converged: bool
    rounds_used: int


class _TannerGraph:
    """Check-major and variable-major edge indexing for the kernel."""

    __slots__ = ("m", "n", "check_ptr", "check_var", "var_ptr", "var_edges")

    def __init__(self, problem: DecodingProblem):
        h = problem.h
        self.m, self.n = h.m, h.n
        supports = [h.row_support(i) for i in range(h.m)]
        degrees = np.array([len(s) for s in supports], dtype=np.int64)
        self.check_ptr = np.zeros(h.m + 1, dtype=np.int64)
        np.cumsum(degrees, out=self.check_ptr[1:])
        self.check_var = (
            np.concatenate(supports).astype(np.int64) if supports else np.zeros(0, dtype=np.int64)
        )
        order = np.argsort(self.check_var, kind="stable")
        counts = np.bincount(self.check_var, minlength=h.n) if len(self.check_var) else np.zeros(h.n, dtype=np.int64)
        self.var_ptr = np.zeros(h.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.var_ptr[1:])
        self.var_edges = order.astype(np.int64)


def _graph(problem: DecodingProblem) -> _TannerGraph:
    if problem._bp_engine is None:
        problem._bp_engine = _TannerGraph(problem)
    return problem._bp_engine


@njit(cache=True)
def _bp_rounds(
    check_ptr,
    check_var,
    var_ptr,
    var_edges,
    prior_llr,
    syndrome,
    variant,
    max_rounds,
    scale,
    clamp,
    early_exit,
    mu_vc,
    mu_cv,
    raw_cv,
    t_buf,
    post_llr,
    post_p,
    hard,
):
    m = check_ptr.shape[0] - 1
    n = var_ptr.shape[0] - 1
    sat = math.tanh(0.5 * clamp)  # tanh-domain image of the message clamp
    rounds = 0
    converged = False
    for _ in range(max_rounds):
        rounds += 1
        # variable -> check
        for j in range(n):
            tot = prior_llr[j]
            for s in range(var_ptr[j], var_ptr[j + 1]):
                tot += mu_cv[var_edges[s]]
            for s in range(var_ptr[j], var_ptr[j + 1]):
                e = var_edges[s]
                v = tot - mu_cv[e]
                if v > clamp:
                    v = clamp
                elif v < -clamp:
                    v = -clamp
                mu_vc[e] = v
        # check -> variable
        for i in range(m):
            lo = check_ptr[i]
            hi = check_ptr[i + 1]
            if variant == 0:
                run = 1.0
                for s in range(lo, hi):
                    t = math.tanh(0.5 * mu_vc[s])
                    t_buf[s] = t
                    raw_cv[s] = run  # prefix product, overwritten below
                    run *= t
                run2 = 1.0 - 2.0 * syndrome[i]
                for s in range(hi - 1, lo - 1, -1):
                    excl = raw_cv[s] * run2
                    if excl >= 1.0:
                        raw = math.inf
                    elif excl <= -1.0:
                        raw = -math.inf
                    else:
                        raw = 2.0 * math.atanh(excl)
                    raw_cv[s] = raw
                    if raw > clamp:
                        mu_cv[s] = clamp
                    elif raw < -clamp:
                        mu_cv[s] = -clamp
                    else:
                        mu_cv[s] = raw
                    run2 *= t_buf[s]
            else:
                min1 = math.inf
                min2 = math.inf
                argmin = -1
                sign_all = 1.0 - 2.0 * syndrome[i]
                for s in range(lo, hi):
                    v = mu_vc[s]
                    if v < 0.0:
                        sign_all = -sign_all
                        v = -v
                    if v < min1:
                        min2 = min1
                        min1 = v
                        argmin = s
                    elif v < min2:
                        min2 = v
                for s in range(lo, hi):
                    v = mu_vc[s]
                    sgn = sign_all if v >= 0.0 else -sign_all
                    mag = min2 if s == argmin else min1
                    raw = sgn * scale * mag
                    raw_cv[s] = raw
                    if raw > clamp:
                        mu_cv[s] = clamp
                    elif raw < -clamp:
                        mu_cv[s] = -clamp
                    else:
                        mu_cv[s] = raw
        # posteriors and hard decision
        for j in range(n):
            acc = prior_llr[j]
            for s in range(var_ptr[j], var_ptr[j + 1]):
                acc += raw_cv[var_edges[s]]
            if math.isnan(acc):
                acc = 0.0  # conflicting forced evidence: stay undecided
            post_llr[j] = acc
            if acc > 745.0:
                p = 0.0
            elif acc < -745.0:
                p = 1.0
            else:
                p = 1.0 / (1.0 + math.exp(acc))
            post_p[j] = p
            hard[j] = 1 if p >= 0.5 else 0
        ok = True
        for i in range(m):
            par = 0
            for s in range(check_ptr[i], check_ptr[i + 1]):
                par ^= hard[check_var[s]]
            if par != syndrome[i]:
                ok = False
                break
        if ok:
            converged = True
            if early_exit:
                return converged, rounds
    return converged, rounds


def run_bp(problem: DecodingProblem, syndrome: BitVector, config: BpConfig) -> PosteriorVector:
    """Run BP for the configured rounds, stopping early on convergence.

    Args:
        problem: the decoding problem (the graph is cached on it).
        syndrome: observed syndrome, length m.
        config: variant / rounds / clamp settings.

    Returns:
        PosteriorVector with per-column posteriors; ``converged`` is True
        iff the final hard decision reproduces the syndrome exactly.
    """
    if syndrome.n != problem.m:
        raise ValueError(f"syndrome has {syndrome.n} bits, expected {problem.m}")
    g = _graph(problem)
    ne = len(g.check_var)
    mu_vc = np.zeros(ne, dtype=np.float64)
    mu_cv = np.zeros(ne, dtype=np.float64)
    raw_cv = np.zeros(ne, dtype=np.float64)
    t_buf = np.zeros(ne, dtype=np.float64)
    post_llr = np.zeros(g.n, dtype=np.float64)
    post_p = np.zeros(g.n, dtype=np.float64)
    hard = np.zeros(g.n, dtype=np.uint8)
    variant = _SUM_PRODUCT if config.variant == "sum_product" else _MIN_SUM
    converged, rounds = _bp_rounds(
        g.check_ptr,
        g.check_var,
        g.var_ptr,
        g.var_edges,
        problem.llrs,
        syndrome.to_array(),
        variant,
        config.max_rounds,
        config.min_sum_scale,
        config.llr_clamp,
        config.early_exit,
        mu_vc,
        mu_cv,
        raw_cv,
        t_buf,
        post_llr,
        post_p,
        hard,
    )
    return PosteriorVector(post_p, bool(converged), int(rounds))


def hard_decision(posteriors: np.ndarray) -> BitVector:
    """Bitwise most-likely error: e_j = 1 iff p_j >= 1/2."""
    bits = (np.asarray(posteriors) >= 0.5).astype(np.uint8)
    return BitVector(bits.size, _pack(bits)) if bits.size else BitVector(0)


def posteriors_as_llr(posteriors: np.ndarray, llr_clamp: float = 30.0) -> np.ndarray:
    """Map posteriors to log((1-p)/p), clamped to +-llr_clamp."""
    p = np.asarray(posteriors, dtype=np.float64)
    with np.errstate(divide="ignore"):
        llr = np.log1p(-p) - np.log(p)
    return np.clip(llr, -llr_clamp, llr_clamp)
