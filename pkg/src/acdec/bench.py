"""Monte Carlo harness: sample errors, decode, tally failure rates and times.

Shots are reproducible and order-independent: each draws its own
counter-based generator keyed by (run seed, shot index), so two decoders
benchmarked under the same seed face byte-identical syndrome streams.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .ac import AcConfig, ac_decode
from .bp import BpConfig, hard_decision, run_bp
from .gf2 import BitVector
from .osd import OsdConfig, bposd_decode
from .problem import DecodeFailureError, DecodeResult, DecodingProblem

__all__ = [
    "RunConfig",
    "TrialStats",
    "shot_rng",
    "sample_shot",
    "make_decoder",
    "bp_decode",
    "run_trials",
    "read_syndromes",
    "write_predictions",
    "format_uncertainty",
    "report",
    "format_report",
]

_MASK64 = (1 << 64) - 1

# CLI shorthand for the OSD candidate families.
OSD_METHODS = {"0": "order_zero", "e": "exhaustive", "cs": "combination_sweep"}


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Independent Philox stream for one shot of one run."""
    key = ((int(seed) & _MASK64) << 64) | (int(shot) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_shot(problem: DecodingProblem, rng: np.random.Generator):
    """Draw e ~ prod Bernoulli(eps_j); return (e, He, Le)."""
    bits = (rng.random(problem.n) < problem.priors).astype(np.uint8)
    e = BitVector.from_bits(bits)
    return e, problem.syndrome_of(e), problem.logical_effect_of(e)


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a benchmark run (seed fixes the stream)."""

    decoder: str = "ac"  # ac | bposd | bp
    shots: int = 1000
    seed: int = 0
    rounds: int = 1  # syndrome-extraction rounds the problem represents
    kappa: float | None = None
    extra_columns: int | None = None
    bp_rounds: int | None = None
    bp_variant: str | None = None
    osd_method: str | None = None  # "0" | "e" | "cs" (or the full names)
    osd_order: int | None = None

    def __post_init__(self):
        if self.decoder not in ("ac", "bposd", "bp"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.bp_variant is not None and self.bp_variant not in ("sum_product", "min_sum"):
            raise ValueError(f"unknown BP variant {self.bp_variant!r}")
        if self.osd_method is not None and not (
            self.osd_method in OSD_METHODS or self.osd_method in OSD_METHODS.values()
        ):
            raise ValueError(f"unknown OSD method {self.osd_method!r}")
        if self.kappa is not None and self.kappa < 0.0:
            raise ValueError("kappa must be >= 0")


@dataclass
class TrialStats:
    """Aggregates from one run.  p_fail = failures / (rounds * shots)."""

    shots: int
    failures: int
    rounds: int
    p_fail: float
    p_fail_std: float
    time_mean: float
    time_std: float
    decode_failures: int  # decoder gave up; counted inside `failures` too
    diagnostics: dict = field(default_factory=dict)


def bp_decode(problem: DecodingProblem, syndrome: BitVector, config: BpConfig) -> DecodeResult:
    """Plain BP with a hard decision, converged or not."""
    t0 = time.perf_counter()
    pv = run_bp(problem, syndrome, config)
    e = hard_decision(pv.posteriors)
    return DecodeResult(
        logical_effect=problem.logical_effect_of(e),
        error_estimate=e,
        converged_by_bp=pv.converged,
        bp_rounds=pv.rounds_used,
        timings={"bp": time.perf_counter() - t0, "total": time.perf_counter() - t0},
        decoder="bp",
    )


def make_decoder(config: RunConfig):
    """Build the decode callable for a RunConfig.

    Defaults follow each decoder's usual operating point: AC runs 9
    sum-product rounds with kappa = 0.01; BP and BP+OSD run min-sum with a
    10000-round cap, OSD in combination-sweep order 7.
    """
    if config.decoder == "ac":
        bp = BpConfig(
            variant=config.bp_variant or "sum_product",
            max_rounds=config.bp_rounds or 9,
        )
        ac_cfg = AcConfig(
            kappa=0.01 if config.kappa is None else config.kappa,
            extra_columns=config.extra_columns,
            bp=bp,
        )
        return lambda problem, syndrome: ac_decode(problem, syndrome, ac_cfg)
    bp = BpConfig(
        variant=config.bp_variant or "min_sum",
        max_rounds=config.bp_rounds or 10_000,
    )
    if config.decoder == "bp":
        return lambda problem, syndrome: bp_decode(problem, syndrome, bp)
    method = OSD_METHODS.get(config.osd_method or "cs", config.osd_method or "combination_sweep")
    osd = OsdConfig(method=method, order=7 if config.osd_order is None else config.osd_order)
    return lambda problem, syndrome: bposd_decode(problem, syndrome, bp, osd)


def run_trials(problem: DecodingProblem, config: RunConfig) -> TrialStats:
    """Sample, decode, and tally.  Only the decode call itself is timed.

    A shot fails when any logical bit of the estimate differs from the
    truth; a decoder that raises DecodeFailureError fails the shot and is
    tallied separately.
    """
    decode = make_decoder(config)
    failures = 0
    decode_failures = 0
    times = np.empty(config.shots, dtype=np.float64)
    converged = 0
    bp_rounds_total = 0
    candidates_total = 0
    clusters_total = 0
    ambiguous_total = 0
    for shot in range(config.shots):
        rng = shot_rng(config.seed, shot)
        _, syndrome, truth = sample_shot(problem, rng)
        t0 = time.perf_counter()
        try:
            result = decode(problem, syndrome)
        except DecodeFailureError:
            times[shot] = time.perf_counter() - t0
            failures += 1
            decode_failures += 1
            continue
        times[shot] = time.perf_counter() - t0
        if result.logical_effect != truth:
            failures += 1
        converged += int(result.converged_by_bp)
        bp_rounds_total += result.bp_rounds
        candidates_total += result.candidates_examined
        clusters_total += result.cluster_count
        ambiguous_total += result.ambiguous_clusters

    shots = config.shots
    p_shot = failures / shots if shots else 0.0
    p_fail = p_shot / config.rounds
    p_std = math.sqrt(p_shot * (1.0 - p_shot) / shots) / config.rounds if shots else 0.0
    decoded = shots - decode_failures
    diagnostics = {
        "bp_converged": converged,
        "bp_convergence_rate": converged / decoded if decoded else 0.0,
        "mean_bp_rounds": bp_rounds_total / decoded if decoded else 0.0,
        "mean_candidates": candidates_total / decoded if decoded else 0.0,
        "mean_clusters": clusters_total / decoded if decoded else 0.0,
        "ambiguous_clusters": ambiguous_total,
    }
    return TrialStats(
        shots=shots,
        failures=failures,
        rounds=config.rounds,
        p_fail=p_fail,
        p_fail_std=p_std,
        time_mean=float(times.mean()) if shots else 0.0,
        time_std=float(times.std(ddof=1)) if shots > 1 else 0.0,
        decode_failures=decode_failures,
        diagnostics=diagnostics,
    )


def read_syndromes(path, m: int) -> list[BitVector]:
    """One m-character 0/1 line per shot; anything else is an error."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if len(line) != m or set(line) - {"0", "1"}:
            raise ValueError(
                f"{path}: line {lineno}: expected {m} characters of 0/1, got {line!r}"
            )
        out.append(BitVector.from_string(line))
    return out


def write_predictions(path, vectors) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for v in vectors:
            fh.write(v.to01())
            fh.write("\n")


def format_uncertainty(value: float, std: float) -> str:
    """Render value ± std like (3.7±0.2)e-2 or (1.56±0.05)e-4.

    The uncertainty keeps one significant figure and the mean matches its
    decimal places (the usual convention for quoting a measurement).
    """
    if value == 0.0:
        return f"0 (±{std:.1e})" if std else "0"
    exp = math.floor(math.log10(abs(value)))
    mant = value / 10.0**exp
    err = std / 10.0**exp
    if err > 0.0:
        scale = 10.0 ** math.floor(math.log10(err))
        err = round(err / scale) * scale  # one significant figure
        decimals = max(0, -math.floor(math.log10(err))) if err < 10 else 0
    else:
        decimals = 1
    return f"({mant:.{decimals}f}±{err:.{decimals}f})e{exp:+d}"


def report(problem: DecodingProblem, config: RunConfig, stats: TrialStats) -> dict:
    """Machine-readable record of one run (the benchmark-table fields)."""
    rec = {
        "problem": problem.name,
        "m": problem.m,
        "n": problem.n,
        "k": problem.k,
        "decoder": config.decoder,
        "kappa": config.kappa,
        "extra_columns": config.extra_columns,
        "bp_rounds": config.bp_rounds,
        "bp_variant": config.bp_variant,
        "osd_method": config.osd_method,
        "osd_order": config.osd_order,
        "shots": stats.shots,
        "rounds": stats.rounds,
        "seed": config.seed,
        "fails_over_shots": f"{stats.failures}/{stats.shots}",
        "decode_failures": stats.decode_failures,
        "logical_error_per_round": stats.p_fail,
        "logical_error_per_round_std": stats.p_fail_std,
        "logical_error_per_round_fmt": format_uncertainty(stats.p_fail, stats.p_fail_std),
        "time_per_shot_mean_s": stats.time_mean,
        "time_per_shot_std_s": stats.time_std,
        "time_per_round_mean_s": stats.time_mean / stats.rounds,
        # Uncertainty on the mean decode time: per-shot std over sqrt(shots).
        "time_per_round_fmt": format_uncertainty(
            stats.time_mean / stats.rounds,
            stats.time_std / (stats.rounds * math.sqrt(max(stats.shots, 1))),
        )
        if stats.time_mean
        else "0",
        "diagnostics": stats.diagnostics,
        "notes": [],
    }
    if stats.failures == 0 and stats.shots:
        bound = 3.0 / (stats.rounds * stats.shots)
        rec["notes"].append(
            f"no failures observed; ~95% upper bound on logical error per round is {bound:.2e}"
        )
    elif stats.failures < 5:
        rec["notes"].append(
            f"only {stats.failures} failures observed; the interval is unreliable below 5"
        )
    return rec


def format_report(record: dict) -> str:
    """Human-oriented rendering of a report record, one field per line."""
    lines = [
        f"problem: {record['problem'] or '(unnamed)'}  [m={record['m']} n={record['n']} k={record['k']}]",
        f"decoder: {record['decoder']}"
        + (f"  kappa={record['kappa']}" if record["kappa"] is not None else "")
        + (f"  K={record['extra_columns']}" if record["extra_columns"] is not None else "")
        + (f"  osd={record['osd_method']}({record['osd_order']})" if record["osd_method"] else ""),
        f"shots: {record['shots']}  rounds: {record['rounds']}  seed: {record['seed']}",
        f"fails/shots: {record['fails_over_shots']}  (decode failures: {record['decode_failures']})",
        f"logical error per round: {record['logical_error_per_round_fmt']}",
        f"decode time per round: {record['time_per_round_fmt']} s",
    ]
    for note in record["notes"]:
        lines.append(f"note: {note}")
    return "\n".join(lines)


def stats_to_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True)
