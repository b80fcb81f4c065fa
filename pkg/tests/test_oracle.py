"""Exhaustive-enumeration reference decoder (small n only)."""

import numpy as np
import pytest

from acdec import (
    BitMatrix,
    BitVector,
    DecodingProblem,
    MlResult,
    NoSolutionError,
    canonicalise,
    exact_marginals,
    ml_decode,
    prior_probability,
)


def make_problem(h, priors, logicals):
    h = BitMatrix.from_dense(h)
    l = BitMatrix.from_dense(logicals) if np.size(logicals) else BitMatrix(0, h.n)
    return DecodingProblem(h, l, np.asarray(priors, dtype=np.float64))


def brute_force_masses(problem, syndrome):
    masses = {}
    for mask in range(1 << problem.n):
        e = BitVector.from_bits([(mask >> t) & 1 for t in range(problem.n)])
        if problem.syndrome_of(e).to01() != syndrome.to01():
            continue
        lam = problem.logical_effect_of(e).to01()
        masses[lam] = masses.get(lam, 0.0) + prior_probability(problem, e)
    return masses


def test_two_explanations_worked_example():
    p = make_problem([[1, 1]], [0.1, 0.2], [[1, 0]])
    r = ml_decode(p, BitVector.from_bits([1]))
    assert isinstance(r, MlResult)
    assert r.coset_masses["0"] == pytest.approx(0.18)  # e = 01
    assert r.coset_masses["1"] == pytest.approx(0.08)  # e = 10
    assert r.total_mass == pytest.approx(0.26)
    assert r.logical_effect.to01() == "0"


def test_zero_syndrome_low_priors_prefers_identity():
    p = make_problem(
        [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]],
        [0.1, 0.15, 0.2, 0.25],
        [[1, 0, 0, 0]],
    )
    r = ml_decode(p, BitVector(3))
    assert r.logical_effect.to01() == "0"
    best = max(r.coset_masses.values())
    assert r.coset_masses["0"] == pytest.approx(best)


def test_tie_breaks_to_lexicographically_smallest():
    # Both cosets carry exactly 0.25; '01' < '10' as a bit string.
    p = make_problem([[1, 1]], [0.5, 0.5], [[1, 0], [0, 1]])
    r = ml_decode(p, BitVector.from_bits([1]))
    assert r.coset_masses["10"] == pytest.approx(0.25)
    assert r.coset_masses["01"] == pytest.approx(0.25)
    assert r.logical_effect.to01() == "01"


def test_masses_match_brute_force():
    rng = np.random.default_rng(404)
    for _ in range(25):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(1, 9))
        k = int(rng.integers(0, 3))
        h = (rng.random((m, n)) < 0.5).astype(np.uint8)
        l = (rng.random((k, n)) < 0.5).astype(np.uint8)
        p = make_problem(h, rng.uniform(0.05, 0.6, size=n), l)
        truth = BitVector.from_bits((rng.random(n) < 0.4).astype(np.uint8))
        s = p.syndrome_of(truth)
        r = ml_decode(p, s)
        want = brute_force_masses(p, s)
        assert set(r.coset_masses) == set(want)
        for lam, mass in want.items():
            assert r.coset_masses[lam] == pytest.approx(mass, rel=1e-12)
        assert r.total_mass == pytest.approx(sum(want.values()), rel=1e-12)


def test_duplicate_columns_merge_invariantly():
    # Decoding the raw problem and its canonical form must give the same
    # coset masses: two mechanisms with one footprint act like one merged one.
    h = [[1, 1, 0], [0, 0, 1]]
    l = [[1, 1, 0]]
    raw = make_problem(h, [0.1, 0.2, 0.3], l)
    merged = canonicalise(
        m=2, k=1, columns=[([0], [0], 0.1), ([0], [0], 0.2), ([1], [], 0.3)]
    )
    assert merged.n == 2
    for s_bits in ([0, 0], [1, 0], [0, 1], [1, 1]):
        s = BitVector.from_bits(s_bits)
        a = ml_decode(raw, s)
        b = ml_decode(merged, s)
        assert a.logical_effect.to01() == b.logical_effect.to01()
        for lam in a.coset_masses:
            assert a.coset_masses[lam] == pytest.approx(b.coset_masses[lam], rel=1e-12)


def test_no_solution_raises():
    p = make_problem([[1, 1], [1, 1]], [0.1, 0.1], [[1, 0]])
    with pytest.raises(NoSolutionError):
        ml_decode(p, BitVector.from_bits([1, 0]))


def test_size_cap():
    n = 25
    p = make_problem(np.ones((1, n), dtype=np.uint8), np.full(n, 0.1), np.zeros((0, n), dtype=np.uint8))
    with pytest.raises(ValueError, match="24"):
        ml_decode(p, BitVector.from_bits([1]))


# ---------------------------------------------------------------------------
# exact_marginals


def test_marginals_one_check():
    p = make_problem([[1, 1]], [0.1, 0.2], [[1, 0]])
    m = exact_marginals(p, BitVector.from_bits([1]))
    assert m == pytest.approx([0.08 / 0.26, 0.18 / 0.26], abs=1e-12)


def test_marginals_split_belief_exactly_half():
    p = make_problem([[1, 1], [1, 1]], [0.5, 0.5], [[1, 0]])
    m = exact_marginals(p, BitVector.from_bits([1, 1]))
    assert m == pytest.approx([0.5, 0.5], abs=0.0)


def test_marginals_unique_solution_are_binary():
    p = make_problem(np.eye(3, dtype=np.uint8), [0.1, 0.2, 0.3], [[1, 0, 0]])
    m = exact_marginals(p, BitVector.from_bits([1, 0, 1]))
    assert m == pytest.approx([1.0, 0.0, 1.0], abs=0.0)


def test_marginals_match_direct_sum():
    rng = np.random.default_rng(505)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        m_rows = int(rng.integers(1, 4))
        h = (rng.random((m_rows, n)) < 0.5).astype(np.uint8)
        p = make_problem(h, rng.uniform(0.1, 0.5, size=n), np.zeros((0, n), dtype=np.uint8))
        truth = BitVector.from_bits((rng.random(n) < 0.5).astype(np.uint8))
        s = p.syndrome_of(truth)
        marg = exact_marginals(p, s)
        total = 0.0
        acc = np.zeros(n)
        for mask in range(1 << n):
            e = BitVector.from_bits([(mask >> t) & 1 for t in range(n)])
            if p.syndrome_of(e).to01() != s.to01():
                continue
            w = prior_probability(p, e)
            total += w
            acc += w * e.to_array()
        assert marg == pytest.approx(acc / total, rel=1e-10)
