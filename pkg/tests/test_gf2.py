"""Packed GF(2) vectors, matrices, and pivot-based elimination."""

import numpy as np
import pytest

from acdec.gf2 import (
    BitMatrix,
    BitVector,
    InconsistentSystemError,
    InvalidPivotError,
    PivotAssignment,
    RowOpLog,
    full_reduce,
    is_reduced,
    pivot_at,
    row_in_span,
    solve_from_reduced,
)

# Two parity-check matrices for the same 5-bit repetition code: adjacent-pair
# checks, and each-bit-against-the-last checks.  Row-equivalent, so they share
# every solution set.
H_PAIRS = [
    [1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0],
    [0, 0, 1, 1, 0],
    [0, 0, 0, 1, 1],
]
H_LAST = [
    [1, 0, 0, 0, 1],
    [0, 1, 0, 0, 1],
    [0, 0, 1, 0, 1],
    [0, 0, 0, 1, 1],
]


def all_solutions(dense, syndrome):
    """Brute-force {e : He = s} as a set of bit tuples."""
    h = np.asarray(dense, dtype=np.uint8)
    m, n = h.shape
    out = set()
    for mask in range(1 << n):
        e = np.array([(mask >> j) & 1 for j in range(n)], dtype=np.uint8)
        if np.array_equal(h @ e % 2, np.asarray(syndrome, dtype=np.uint8)):
            out.add(tuple(int(b) for b in e))
    return out


def random_bit_matrix(rng, m, n, density=0.5):
    return BitMatrix.from_dense((rng.random((m, n)) < density).astype(np.uint8))


# ---------------------------------------------------------------------------
# BitVector / BitMatrix basics


def test_bitvector_round_trips():
    v = BitVector.from_string("01101")
    assert v.n == 5
    assert v.to01() == "01101"
    assert v.support().tolist() == [1, 2, 4]
    assert v.weight() == 3
    assert BitVector.from_support(5, [1, 2, 4]).to01() == "01101"
    assert BitVector.from_bits([0, 1, 1, 0, 1]).to01() == "01101"


def test_bitvector_mutation_and_xor():
    v = BitVector(4)
    v.set(2, 1)
    assert v.to01() == "0010"
    v.flip(0)
    assert v.to01() == "1010"
    v.flip_many([0, 1])
    assert v.to01() == "0110"
    w = v.copy()
    w.flip(3)
    assert v.to01() == "0110"  # copy is independent
    assert not v.is_zero() and BitVector(7).is_zero()


def test_bitvector_wide_words():
    # Crossing the 64-bit word boundary must not lose bits.
    rng = np.random.default_rng(7)
    bits = (rng.random(131) < 0.5).astype(np.uint8)
    v = BitVector.from_bits(bits)
    assert np.array_equal(v.to_array(), bits)
    assert v.weight() == int(bits.sum())
    assert v.support().tolist() == np.flatnonzero(bits).tolist()


def test_bitmatrix_dense_round_trip_and_views():
    m = BitMatrix.from_dense(H_PAIRS)
    assert (m.m, m.n) == (4, 5)
    assert np.array_equal(m.to_dense(), np.array(H_PAIRS, dtype=np.uint8))
    assert m.row_support(1).tolist() == [1, 2]
    assert m.col_support(1).tolist() == [0, 1]
    assert m.col_support(1).tolist() == sorted(m.col_support(1).tolist())
    assert m.row_weight(2) == 2
    assert m.get(3, 4) == 1 and m.get(0, 4) == 0


def test_bitmatrix_from_cols():
    m = BitMatrix.from_cols(3, [[0], [0, 1], [1, 2], []])
    assert np.array_equal(
        m.to_dense(), np.array([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0]], dtype=np.uint8)
    )
    assert m.col_bits(3).tolist() == [0, 0, 0]


def test_bitmatrix_from_dense_accepts_column_slices():
    # Fancy-indexing columns out of a wide dense array yields an F-ordered
    # view; packing must not depend on the input's memory layout.
    rng = np.random.default_rng(83)
    dense = (rng.random((8, 700)) < 0.4).astype(np.uint8)
    cols = np.sort(rng.choice(700, size=639, replace=False))
    sliced = dense[:, cols]
    assert not sliced.flags["C_CONTIGUOUS"]
    m = BitMatrix.from_dense(sliced)
    assert np.array_equal(m.to_dense(), sliced)


def test_mat_vec_matches_dense_arithmetic():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m_rows = rng.integers(1, 9)
        n_cols = rng.integers(1, 150)
        mat = random_bit_matrix(rng, m_rows, n_cols)
        e = BitVector.from_bits((rng.random(n_cols) < 0.5).astype(np.uint8))
        expect = mat.to_dense() @ e.to_array() % 2
        assert np.array_equal(mat.mat_vec(e).to_array(), expect)


def test_add_row_to_is_xor():
    m = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    m.add_row_to(0, 1)
    assert np.array_equal(m.to_dense(), np.array([[1, 0, 1], [1, 1, 0]], dtype=np.uint8))
    m.add_row_to_many(1, np.array([0]))
    assert m.row_support(0).tolist() == [1, 2]


# ---------------------------------------------------------------------------
# pivot_at


def test_pivot_clears_column_and_tracks_syndrome():
    # Hand example: adding the pivot row to the one other row supported on
    # column 0 flips that row's syndrome bit in lockstep.
    m = BitMatrix.from_dense([[1, 1], [1, 0]])
    s = BitVector.from_bits([1, 0])
    piv = PivotAssignment()
    targets = pivot_at(m, s, None, piv, 0, 0)
    assert np.array_equal(m.to_dense(), np.array([[1, 1], [0, 1]], dtype=np.uint8))
    assert s.to01() == "11"
    assert targets.tolist() == [1]
    assert piv.row_to_col == {0: 0} and piv.col_to_row == {0: 0}
    assert piv.is_pivot_row(0) and piv.is_pivot_col(0)
    assert not piv.is_pivot_row(1) and not piv.is_pivot_col(1)


def test_pivot_rejects_zero_entry_and_reuse():
    m = BitMatrix.from_dense([[1, 1], [1, 0]])
    s = BitVector.from_bits([1, 0])
    piv = PivotAssignment()
    with pytest.raises(InvalidPivotError):
        pivot_at(m, s, None, piv, 1, 1)  # H[1,1] == 0
    pivot_at(m, s, None, piv, 0, 0)
    with pytest.raises(InvalidPivotError):
        pivot_at(m, s, None, piv, 0, 1)  # row already a pivot row
    with pytest.raises(InvalidPivotError):
        pivot_at(m, s, None, piv, 1, 0)  # column already a pivot column


def test_pivot_preserves_solution_set():
    rng = np.random.default_rng(23)
    for _ in range(60):
        m_rows = rng.integers(1, 5)
        n_cols = rng.integers(1, 8)
        mat = random_bit_matrix(rng, m_rows, n_cols)
        truth = BitVector.from_bits((rng.random(n_cols) < 0.5).astype(np.uint8))
        s = mat.mat_vec(truth)
        before = all_solutions(mat.to_dense(), s.to_array())
        piv = PivotAssignment()
        for _ in range(10):
            choices = [
                (i, j)
                for i in range(m_rows)
                for j in range(n_cols)
                if mat.get(i, j) and not piv.is_pivot_row(i) and not piv.is_pivot_col(j)
            ]
            if not choices:
                break
            i, j = choices[rng.integers(len(choices))]
            pivot_at(mat, s, None, piv, i, j)
            assert all_solutions(mat.to_dense(), s.to_array()) == before


def test_pivot_is_settled_after_elimination():
    # After a pivot, its column has exactly one 1; re-pivoting anywhere in it
    # is rejected rather than silently reshuffling.
    m = BitMatrix.from_dense(H_PAIRS)
    piv = PivotAssignment()
    pivot_at(m, None, None, piv, 1, 1)
    assert m.col_support(1).tolist() == [1]


# ---------------------------------------------------------------------------
# full_reduce / is_reduced / solve_from_reduced


def test_full_reduce_identity_and_zero():
    eye = BitMatrix.from_dense(np.eye(3, dtype=np.uint8))
    piv = full_reduce(eye)
    assert len(piv.row_to_col) == 3 and is_reduced(eye, piv)

    zero = BitMatrix(2, 3)
    piv = full_reduce(zero)
    assert piv.row_to_col == {} and is_reduced(zero, piv)


def test_full_reduce_repetition_code():
    mat = BitMatrix.from_dense(H_PAIRS)
    s = BitVector.from_bits([0, 1, 1, 0])
    piv = full_reduce(mat, s)
    assert len(piv.row_to_col) == 4  # full row rank
    assert is_reduced(mat, piv)
    for i, j in piv.items():
        assert mat.col_support(j).tolist() == [i]
    # The reduced system still has the original solution set.
    assert all_solutions(mat.to_dense(), s.to_array()) == all_solutions(H_PAIRS, [0, 1, 1, 0])


def test_solve_from_reduced_two_explanations():
    # He = s for the each-bit-vs-last form with s = 0110 has exactly two
    # solutions: flip bits {1,2}, or flip the complement {0,3,4}.
    mat = BitMatrix.from_dense(H_LAST)
    s = BitVector.from_bits([0, 1, 1, 0])
    piv = full_reduce(mat, s)
    free = [j for j in range(5) if not piv.is_pivot_col(j)]
    assert free == [4]
    e0 = solve_from_reduced(piv, s, BitVector.from_bits([0]), mat)
    e1 = solve_from_reduced(piv, s, BitVector.from_bits([1]), mat)
    assert e0.to01() == "01100"
    assert e1.to01() == "10011"
    assert BitMatrix.from_dense(H_LAST).mat_vec(e0).to01() == "0110"
    assert BitMatrix.from_dense(H_LAST).mat_vec(e1).to01() == "0110"


def test_solve_from_reduced_zero_syndrome():
    mat = BitMatrix.from_dense(H_LAST)
    s = BitVector(4)
    piv = full_reduce(mat, s)
    e = solve_from_reduced(piv, s, BitVector.from_bits([0]), mat)
    assert e.is_zero()


def test_solve_parameterisation_covers_everything():
    rng = np.random.default_rng(31)
    for _ in range(40):
        m_rows = rng.integers(1, 5)
        n_cols = rng.integers(1, 9)
        mat = random_bit_matrix(rng, m_rows, n_cols)
        truth = BitVector.from_bits((rng.random(n_cols) < 0.5).astype(np.uint8))
        s = mat.mat_vec(truth)
        want = all_solutions(mat.to_dense(), s.to_array())
        red = mat.copy()
        sred = s.copy()
        piv = full_reduce(red, sred)
        free = [j for j in range(n_cols) if not piv.is_pivot_col(j)]
        got = set()
        for mask in range(1 << len(free)):
            g = BitVector.from_bits([(mask >> t) & 1 for t in range(len(free))])
            e = solve_from_reduced(piv, sred, g, red)
            got.add(tuple(int(b) for b in e.to_array()))
        assert got == want  # bijective parameterisation of the solution set


def test_inconsistent_system_detected():
    # Row 2 = row 0 + row 1, but the syndrome disagrees with that dependency.
    mat = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    s = BitVector.from_bits([1, 0, 0])
    piv = full_reduce(mat, s)
    with pytest.raises(InconsistentSystemError):
        solve_from_reduced(piv, s, BitVector(3 - len(piv.row_to_col)), mat)


# ---------------------------------------------------------------------------
# row_in_span


def test_row_in_span_examples():
    basis = BitMatrix.from_dense([[1, 1]])
    piv = full_reduce(basis)
    coeffs = row_in_span(BitVector.from_bits([1, 1]), basis, piv)
    assert coeffs is not None and coeffs.to01() == "1"
    assert row_in_span(BitVector.from_bits([1, 0]), basis, piv) is None
    zero = row_in_span(BitVector(2), basis, piv)
    assert zero is not None and zero.is_zero()


def test_row_in_span_coefficients_reconstruct_target():
    rng = np.random.default_rng(43)
    hits = 0
    for _ in range(80):
        m_rows = rng.integers(1, 6)
        n_cols = rng.integers(1, 10)
        basis = random_bit_matrix(rng, m_rows, n_cols)
        red = basis.copy()
        piv = full_reduce(red)
        # Half the probes are genuine combinations, half are arbitrary.
        if rng.random() < 0.5:
            picks = np.flatnonzero(rng.random(m_rows) < 0.5)
            t = np.zeros(n_cols, dtype=np.uint8)
            for i in picks:
                t ^= basis.to_dense()[i]
            target = BitVector.from_bits(t)
        else:
            target = BitVector.from_bits((rng.random(n_cols) < 0.5).astype(np.uint8))
        coeffs = row_in_span(target, red, piv)
        dense = red.to_dense()
        if coeffs is None:
            # Must genuinely lie outside: compare against brute force.
            combos = set()
            for mask in range(1 << red.m):
                acc = np.zeros(n_cols, dtype=np.uint8)
                for i in range(red.m):
                    if (mask >> i) & 1:
                        acc ^= dense[i]
                combos.add(tuple(acc.tolist()))
            assert tuple(target.to_array().tolist()) not in combos
        else:
            hits += 1
            acc = np.zeros(n_cols, dtype=np.uint8)
            for i in coeffs.support():
                acc ^= dense[i]
            assert np.array_equal(acc, target.to_array())
    assert hits > 10  # the loop exercised the in-span branch


# ---------------------------------------------------------------------------
# RowOpLog


def test_row_op_log_replays_history():
    rng = np.random.default_rng(57)
    for _ in range(25):
        m_rows = rng.integers(2, 6)
        n_cols = rng.integers(2, 12)
        mat = random_bit_matrix(rng, m_rows, n_cols)
        original = mat.copy()
        s = BitVector.from_bits((rng.random(m_rows) < 0.5).astype(np.uint8))
        s_orig = s.copy()
        log = RowOpLog()
        piv = PivotAssignment()
        full_reduce(mat, s, log=log, pivots=piv)
        replay_m = original.copy()
        replay_s = s_orig.copy()
        log.replay(replay_m, replay_s)
        assert np.array_equal(replay_m.to_dense(), mat.to_dense())
        assert replay_s.to01() == s.to01()
