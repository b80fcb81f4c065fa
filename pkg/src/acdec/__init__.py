"""Decoders for quantum LDPC detector error models.

The package implements the ambiguity-clustering decoder (belief propagation
followed by syndrome-directed partial elimination and per-cluster analysis),
the BP+OSD baseline, exact small-instance oracles, detector-error-model
ingestion, and a Monte-Carlo benchmarking harness with a CLI.
"""

from .gf2 import (
    BitMatrix,
    BitVector,
    InconsistentSystemError,
    InvalidPivotError,
    PivotAssignment,
    RowOpLog,
    full_reduce,
    pivot_at,
    row_in_span,
    solve_from_reduced,
)
from .problem import (
    DecodeFailureError,
    DecodeResult,
    DecodingProblem,
    canonicalise,
    check_solution,
    log_prior_probability,
    prior_probability,
)
from .ingest import (
    DemParseError,
    PauliString,
    UnsupportedDemError,
    depolarising_to_independent,
    from_classical,
    from_stabilisers,
    parse_dem,
    serialise_dem,
)
from .bp import BpConfig, PosteriorVector, hard_decision, posteriors_as_llr, run_bp
from .osd import OsdConfig, OsdResult, bposd_decode, candidate_count, osd_decode
from .ac import AcConfig, ac_decode
from .oracle import MlResult, NoSolutionError, exact_marginals, ml_decode
from .bench import RunConfig, TrialStats, run_trials, sample_shot

__all__ = [
    "BitMatrix",
    "BitVector",
    "InconsistentSystemError",
    "InvalidPivotError",
    "PivotAssignment",
    "RowOpLog",
    "full_reduce",
    "pivot_at",
    "row_in_span",
    "solve_from_reduced",
    "DecodeFailureError",
    "DecodeResult",
    "DecodingProblem",
    "canonicalise",
    "check_solution",
    "log_prior_probability",
    "prior_probability",
    "DemParseError",
    "PauliString",
    "UnsupportedDemError",
    "depolarising_to_independent",
    "from_classical",
    "from_stabilisers",
    "parse_dem",
    "serialise_dem",
    "BpConfig",
    "PosteriorVector",
    "hard_decision",
    "posteriors_as_llr",
    "run_bp",
    "OsdConfig",
    "OsdResult",
    "bposd_decode",
    "candidate_count",
    "osd_decode",
    "AcConfig",
    "ac_decode",
    "MlResult",
    "NoSolutionError",
    "exact_marginals",
    "ml_decode",
    "RunConfig",
    "TrialStats",
    "run_trials",
    "sample_shot",
]

__version__ = "0.1.0"
