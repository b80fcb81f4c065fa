"""Ambiguity-clustering decoder.

A short BP attempt runs first; when it converges the hard decision is the
answer.  Otherwise the decoder works directly on the linear system:

* stage 1 pivots on the most plausible columns until every unsatisfied
  check row is a pivot row, which makes He = s trivially solvable;
* stage 2 admits a budget of K extra likely columns next to the action,
  growing clusters (and merging them when a column straddles two) or
  seeding fresh ones when a column still touches an untouched check;
* stage 3 analyses each cluster on its own: either the local syndrome
  already fixes the cluster's logical contribution, or the cluster is
  ambiguous and a small weight-<=2 search votes flip/no-flip per logical
  with prior-probability mass.

Cluster contributions XOR together into the final logical estimate.  The
clusters are exactly the connected components of the admitted submatrix's
Tanner graph, which is what makes the per-cluster analyses independent.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .bp import BpConfig, hard_decision, run_bp
from .gf2 import BitMatrix, BitVector, PivotAssignment, RowOpLog, pivot_at, row_in_span
from .problem import DecodeFailureError, DecodeResult, DecodingProblem

__all__ = [
    "AcConfig",
    "EliminationState",
    "ClusterSet",
    "Cluster",
    "ClusterVerdict",
    "stage1_reduce",
    "stage2_grow",
    "build_clusters",
    "analyse_cluster",
    "combine_verdicts",
    "initial_solution",
    "is_syndrome_reduced",
    "ac_decode",
]


@dataclass(frozen=True)
class AcConfig:
    """Decoder knobs: the stage-2 column budget and the BP attempt."""

    kappa: float = 0.01  # K = round(kappa * n)
    extra_columns: int | None = None  # explicit K, overriding kappa
    bp: BpConfig = field(default_factory=lambda: BpConfig(variant="sum_product", max_rounds=9))

    def __post_init__(self):
        if self.extra_columns is None:
            if not (0.0 <= self.kappa <= 1.0):
                raise ValueError("kappa must lie in [0, 1]")
        elif self.extra_columns < 0:
            raise ValueError("extra_columns must be >= 0")

    def budget(self, n: int) -> int:
        k = self.extra_columns if self.extra_columns is not None else int(round(self.kappa * n))
        if k > n:
            raise ValueError(f"column budget {k} exceeds the {n} available columns")
        return k


class EliminationState:
    """One decode's working copy: matrix, syndrome, pivots, and bookkeeping.

    ``touched`` marks rows that have been a pivot row or had a pivot row
    added to them; ``in_c`` marks columns admitted to the working submatrix
    (every pivot column, plus stage 2's grown columns).  Admitted columns
    only ever have support on pivot rows, a fact stage 2 relies on.
    """

    def __init__(self, matrix: BitMatrix, syndrome: BitVector, keep_log: bool = False):
        self.matrix = matrix
        self.syndrome = syndrome
        self.log = RowOpLog() if keep_log else None
        self.pivots = PivotAssignment()
        self.touched = np.zeros(matrix.m, dtype=bool)
        self.in_c = np.zeros(matrix.n, dtype=bool)

    @classmethod
    def from_problem(cls, problem: DecodingProblem, syndrome: BitVector, keep_log: bool = False):
        if len(syndrome) != problem.m:
            raise ValueError(f"syndrome has {len(syndrome)} bits, expected {problem.m}")
        return cls(problem.h.copy(), syndrome.copy(), keep_log)

    def pivot(self, i: int, j: int) -> np.ndarray:
        targets = pivot_at(self.matrix, self.syndrome, self.log, self.pivots, i, j)
        self.touched[i] = True
        self.touched[targets] = True
        self.in_c[j] = True
        return targets


def stage1_reduce(state: EliminationState, posteriors) -> None:
    """Pivot until every row with a 1 in the syndrome is a pivot row.

    Greedy on the posterior: among columns with a 1 in some unsatisfied
    non-pivot row, take the most likely (ties: lowest column, then lowest
    row).  Every pivot here sits on an unsatisfied row, so each row
    addition flips the target's syndrome bit; targets that turn
    unsatisfied push their support back onto the candidate heap.

    Raises:
        DecodeFailureError: an unsatisfied check ran out of columns, i.e.
            He = s has no solution.
    """
    mat, syn, pivots = state.matrix, state.syndrome, state.pivots
    p = np.asarray(posteriors, dtype=np.float64)
    heap: list[tuple[float, int]] = []

    def push_row_cols(r: int) -> None:
        for j in mat.row_support(r):
            if not state.in_c[j]:
                heapq.heappush(heap, (-p[j], int(j)))

    unsat = 0
    for i in range(mat.m):
        if syn[i]:
            unsat += 1
            push_row_cols(i)

    while unsat:
        if not heap:
            # Only reachable when the remaining unsatisfied rows are zero
            # rows; re-seeding is a guard against a starved heap.
            revived = False
            for i in range(mat.m):
                if syn[i] and not pivots.is_pivot_row(i) and mat.row_weight(i):
                    push_row_cols(i)
                    revived = True
            if not revived:
                raise DecodeFailureError(
                    "an unsatisfied check has no error mechanisms left; He = s is inconsistent"
                )
            continue
        _, j = heapq.heappop(heap)
        if state.in_c[j]:
            continue
        rows = mat.col_support(j)
        pick = -1
        for r in rows:  # ascending, so the first hit is the lowest row
            r = int(r)
            if syn[r] and not pivots.is_pivot_row(r):
                pick = r
                break
        if pick < 0:
            continue  # stale entry; the column may come back later
        unsat -= 1  # pick graduates to pivot row
        targets = state.pivot(pick, j)
        for t in targets:
            t = int(t)
            if pivots.is_pivot_row(t):
                continue
            if syn[t]:
                unsat += 1
                push_row_cols(t)
            else:
                unsat -= 1


def is_syndrome_reduced(state: EliminationState) -> bool:
    """True iff every row with syndrome bit 1 is a pivot row."""
    for i in range(state.matrix.m):
        if state.syndrome[i] and not state.pivots.is_pivot_row(i):
            return False
    return True


def initial_solution(state: EliminationState) -> BitVector:
    """e0: the syndrome read off along pivot columns; satisfies He0 = s."""
    e0 = BitVector(state.matrix.n)
    for i, j in state.pivots.items():
        if state.syndrome[i]:
            e0.set(j, 1)
    return e0


class ClusterSet:
    """Union-find over blocks; merging concatenates row/column sets."""

    def __init__(self):
        self._parent: list[int] = []
        self._size: list[int] = []
        self._rows: list[list[int]] = []
        self._pivot_cols: list[list[int]] = []
        self._free_cols: list[list[int]] = []
        self.block_of_row: dict[int, int] = {}
        self.columns_added = 0
        self.budget = 0
        self.exhausted = False  # ran out of eligible columns before the budget

    def new_block(self, row: int, col: int) -> int:
        b = len(self._parent)
        self._parent.append(b)
        self._size.append(1)
        self._rows.append([row])
        self._pivot_cols.append([col])
        self._free_cols.append([])
        self.block_of_row[row] = b
        return b

    def find(self, b: int) -> int:
        root = b
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[b] != root:
            self._parent[b], b = root, self._parent[b]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self._rows[ra] += self._rows[rb]
        self._pivot_cols[ra] += self._pivot_cols[rb]
        self._free_cols[ra] += self._free_cols[rb]
        self._rows[rb], self._pivot_cols[rb], self._free_cols[rb] = [], [], []
        return ra

    def add_free_column(self, root: int, col: int) -> None:
        self._free_cols[root].append(col)

    def roots(self) -> list[int]:
        return sorted({self.find(b) for b in range(len(self._parent))})

    def members(self, root: int) -> tuple[list[int], list[int], list[int]]:
        return self._rows[root], self._pivot_cols[root], self._free_cols[root]


def stage2_grow(state: EliminationState, posteriors, budget: int) -> ClusterSet:
    """Admit up to ``budget`` extra columns next to the touched rows.

    Each stage-1 pivot starts as a singleton block.  A popped column whose
    support reaches outside the pivot rows seeds a new block by pivoting at
    the lowest such row (its syndrome bit is 0, so the syndrome never
    moves); a column supported only on pivot rows is added as a free
    column, merging every block it straddles.  Early exhaustion of the
    eligible set is legal and recorded on the returned ClusterSet.
    """
    mat, pivots = state.matrix, state.pivots
    p = np.asarray(posteriors, dtype=np.float64)
    cset = ClusterSet()
    cset.budget = budget
    for i, j in sorted(state.pivots.items()):
        cset.new_block(i, j)

    heap: list[tuple[float, int]] = []

    def push_row_cols(r: int) -> None:
        for j in mat.row_support(r):
            if not state.in_c[j]:
                heapq.heappush(heap, (-p[j], int(j)))

    for r in np.nonzero(state.touched)[0]:
        push_row_cols(int(r))

    added = 0
    while added < budget and heap:
        _, j = heapq.heappop(heap)
        if state.in_c[j]:
            continue
        supp = mat.col_support(j)
        if len(supp) == 0 or not state.touched[supp].any():
            continue  # stale: the column lost its touched neighbours
        outside = np.array([r for r in supp if not pivots.is_pivot_row(int(r))], dtype=np.int64)
        if len(outside):
            i = int(outside[0])
            if state.syndrome[i]:
                raise AssertionError("stage-2 seed row carries syndrome; stage 1 did not finish")
            targets = state.pivot(i, j)
            cset.new_block(i, j)
            push_row_cols(i)
            for t in targets:
                push_row_cols(int(t))
        else:
            state.in_c[j] = True
            blocks = {cset.find(cset.block_of_row[int(r)]) for r in supp}
            root = blocks.pop()
            for other in blocks:
                root = cset.union(root, other)
            cset.add_free_column(root, j)
        added += 1

    cset.columns_added = added
    cset.exhausted = added < budget
    return cset


@dataclass
class Cluster:
    """One block of the admitted submatrix, restricted and reduced.

    ``local`` is the current matrix restricted to (rows, cols); each row
    owns one pivot column there, so the restriction is in reduced form.
    """

    rows: np.ndarray  # global check rows, ascending
    cols: np.ndarray  # global columns, ascending
    pivot_cols: np.ndarray
    free_cols: np.ndarray
    local: BitMatrix
    local_pivots: PivotAssignment
    syndrome: BitVector  # global syndrome restricted to rows
    piv_pos: np.ndarray  # local column index of each local row's pivot
    free_pos: np.ndarray  # local column indices of the free columns

    @property
    def m_i(self) -> int:
        return len(self.rows)

    @property
    def n_i(self) -> int:
        return len(self.cols)


def build_clusters(state: EliminationState, cset: ClusterSet) -> list[Cluster]:
    """Materialise Cluster views (sorted by smallest row, for determinism)."""
    out = []
    n = state.matrix.n
    for root in sorted(cset.roots(), key=lambda r: min(cset.members(r)[0])):
        row_list, piv_list, free_list = cset.members(root)
        rows = np.sort(np.asarray(row_list, dtype=np.int64))
        cols = np.sort(np.asarray(piv_list + free_list, dtype=np.int64))
        col_pos = {int(c): idx for idx, c in enumerate(cols)}
        dense = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for li, r in enumerate(rows):
            dense[li] = state.matrix.row(int(r)).to_array()[cols]
        local = BitMatrix.from_dense(dense)
        local_pivots = PivotAssignment()
        piv_pos = np.empty(len(rows), dtype=np.int64)
        for li, r in enumerate(rows):
            pj = col_pos[state.pivots.row_to_col[int(r)]]
            local_pivots.assign(li, pj)
            piv_pos[li] = pj
        free_pos = np.sort(np.array([col_pos[int(c)] for c in free_list], dtype=np.int64))
        sigma = BitVector.from_bits([state.syndrome[int(r)] for r in rows])
        out.append(
            Cluster(
                rows=rows,
                cols=cols,
                pivot_cols=np.sort(np.asarray(piv_list, dtype=np.int64)),
                free_cols=np.sort(np.asarray(free_list, dtype=np.int64)),
                local=local,
                local_pivots=local_pivots,
                syndrome=sigma,
                piv_pos=piv_pos,
                free_pos=free_pos,
            )
        )
    return out


@dataclass
class ClusterVerdict:
    """A cluster's logical contribution plus how it was reached.

    ``evidence`` (ambiguous clusters only) holds per-logical
    (no-flip, flip) probability mass, linear scale after a cluster-wide
    log shift — only the comparison is meaningful, not the absolute size.
    """

    ambiguous: bool
    effect: BitVector
    candidates: int
    evidence: list[tuple[float, float]] | None = None


def analyse_cluster(cluster: Cluster, l_local: BitMatrix, llrs: np.ndarray) -> ClusterVerdict:
    """Fix the cluster's logical bits, or vote them from a weight-<=2 search.

    If every restricted logical row lies in the row span of the cluster
    matrix, each bit is forced: the spanning coefficients dotted with the
    local syndrome.  Otherwise every free-pattern g of weight <= 2 yields
    a local solution (sigma + Bg, g); each logical bit becomes 1 exactly
    when the flip mass strictly exceeds the no-flip mass.
    """
    k = l_local.m
    sig = cluster.syndrome.to_array().astype(np.int64)
    effect = BitVector(k)
    ambiguous = False
    for ell in range(k):
        coeffs = row_in_span(l_local.row(ell), cluster.local, cluster.local_pivots)
        if coeffs is None:
            ambiguous = True
            break
        if int(coeffs.to_array().astype(np.int64) @ sig) & 1:
            effect.set(ell, 1)
    if not ambiguous:
        return ClusterVerdict(False, effect, 1, None)

    dense = cluster.local.to_dense().astype(np.int64)
    bi = dense[:, cluster.free_pos]  # m_i x q
    bf = bi.astype(np.float64)
    q = bi.shape[1]
    w = llrs[cluster.piv_pos]
    lf = llrs[cluster.free_pos]
    sigf = sig.astype(np.float64)
    s0 = float(sigf @ w)
    signed = np.where(sig > 0, -w, w)
    delta1 = signed @ bf
    a_idx, b_idx = np.triu_indices(q, 1)
    pair_fix = 2.0 * np.where(sig > 0, w, -w)
    pc = (bf * pair_fix[:, None]).T @ bf
    scores = np.concatenate(
        [
            [s0],
            s0 + delta1 + lf,
            s0 + delta1[a_idx] + delta1[b_idx] + pc[a_idx, b_idx] + lf[a_idx] + lf[b_idx],
        ]
    )
    logm = -scores  # log prior up to a cluster-wide constant
    mass = np.exp(logm - logm.max())

    ldense = l_local.to_dense().astype(np.int64)
    vpiv = ldense[:, cluster.piv_pos]  # k x m_i
    vfree = ldense[:, cluster.free_pos]  # k x q
    base = (vpiv @ sig) & 1
    d = (vpiv @ bi + vfree) & 1  # value toggles per free column
    vals = np.concatenate(
        [base[:, None], base[:, None] ^ d, base[:, None] ^ d[:, a_idx] ^ d[:, b_idx]],
        axis=1,
    ).astype(np.float64)
    flip = vals @ mass
    noflip = (1.0 - vals) @ mass
    effect = BitVector.from_bits((flip > noflip).astype(np.uint8))
    evidence = list(zip(noflip.tolist(), flip.tolist()))
    return ClusterVerdict(True, effect, 1 + q + q * (q - 1) // 2, evidence)


def combine_verdicts(verdicts, k: int) -> BitVector:
    """GF(2) sum of per-cluster logical contributions."""
    out = BitVector(k)
    for v in verdicts:
        out ^= v.effect
    return out


def _check_stage1(problem: DecodingProblem, state: EliminationState, syndrome: BitVector) -> BitVector:
    e0 = initial_solution(state)
    if problem.syndrome_of(e0) != syndrome:
        raise AssertionError("stage-1 initial solution violates He = s; internal invariant broken")
    if not is_syndrome_reduced(state):
        raise AssertionError("stage-1 left an unsatisfied non-pivot row; internal invariant broken")
    return e0


def ac_decode(
    problem: DecodingProblem,
    syndrome: BitVector,
    config: AcConfig | None = None,
) -> DecodeResult:
    """Decode one syndrome: BP attempt, then the three clustering stages."""
    cfg = config or AcConfig()
    t0 = time.perf_counter()
    pv = run_bp(problem, syndrome, cfg.bp)
    t1 = time.perf_counter()
    if pv.converged:
        e = hard_decision(pv.posteriors)
        return DecodeResult(
            logical_effect=problem.logical_effect_of(e),
            error_estimate=e,
            converged_by_bp=True,
            bp_rounds=pv.rounds_used,
            timings={"bp": t1 - t0, "total": time.perf_counter() - t0},
            decoder="ac",
        )

    state = EliminationState.from_problem(problem, syndrome)
    stage1_reduce(state, pv.posteriors)
    _check_stage1(problem, state, syndrome)
    t2 = time.perf_counter()

    cset = stage2_grow(state, pv.posteriors, cfg.budget(problem.n))
    clusters = build_clusters(state, cset)
    t3 = time.perf_counter()

    ldense = problem.logicals.to_dense()
    verdicts = []
    for c in clusters:
        l_local = BitMatrix.from_dense(ldense[:, c.cols])
        verdicts.append(analyse_cluster(c, l_local, problem.llrs[c.cols]))
    effect = combine_verdicts(verdicts, problem.k)
    t4 = time.perf_counter()

    total_candidates = 0
    product = 1
    for v in verdicts:
        total_candidates += v.candidates
        product *= v.candidates
    return DecodeResult(
        logical_effect=effect,
        error_estimate=None,  # per-logical votes need not agree on one error
        converged_by_bp=False,
        bp_rounds=pv.rounds_used,
        cluster_count=len(clusters),
        cluster_sizes=[(c.m_i, c.n_i) for c in clusters],
        ambiguous_clusters=sum(1 for v in verdicts if v.ambiguous),
        cluster_candidates=[v.candidates for v in verdicts if v.ambiguous],
        candidates_examined=total_candidates,
        search_space_product=product,
        timings={
            "bp": t1 - t0,
            "stage1": t2 - t1,
            "stage2": t3 - t2,
            "stage3": t4 - t3,
            "total": t4 - t0,
        },
        decoder="ac",
    )
