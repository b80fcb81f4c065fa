"""Shared fixtures: warm the jitted BP kernel once so timed tests stay honest."""

import numpy as np
import pytest

from acdec import BitMatrix, BitVector, BpConfig, DecodingProblem, run_bp


@pytest.fixture(scope="session", autouse=True)
def _warm_bp_kernel():
    # First call pays numba compilation (or cache load); do it on a toy
    # instance so no timing assertion elsewhere absorbs that cost.
    problem = DecodingProblem(
        h=BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]]),
        logicals=BitMatrix.from_dense([[1, 0, 0]]),
        priors=np.array([0.1, 0.2, 0.3]),
    )
    syndrome = BitVector.from_bits([1, 0])
    for variant in ("sum_product", "min_sum"):
        run_bp(problem, syndrome, BpConfig(variant=variant, max_rounds=5))
    yield
