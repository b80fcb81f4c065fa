"""Command-line front end: decode syndrome files, benchmark, inspect DEMs."""

from __future__ import annotations

import argparse
import sys
from collections import Counter

from .bench import (
    RunConfig,
    format_report,
    make_decoder,
    read_syndromes,
    report,
    run_trials,
    stats_to_json,
    write_predictions,
)
from .gf2 import BitVector
from .ingest import parse_dem
from .problem import DecodeFailureError


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--decoder", choices=["ac", "bposd", "bp"], default="ac")
    p.add_argument("--kappa", type=float, default=None, help="AC stage-2 budget fraction (K = round(kappa*n))")
    p.add_argument("--K", dest="extra_columns", type=int, default=None, help="explicit AC stage-2 column budget (overrides --kappa)")
    p.add_argument("--bp-rounds", type=int, default=None, help="BP round cap (default: 9 for ac, 10000 otherwise)")
    p.add_argument("--bp-variant", choices=["sum_product", "min_sum"], default=None)
    p.add_argument("--osd-method", choices=["0", "e", "cs"], default=None, help="OSD candidate family (bposd only)")
    p.add_argument("--osd-order", type=int, default=None, help="OSD search breadth t (default 7)")


def _run_config(args, shots=1, seed=0, rounds=1) -> RunConfig:
    return RunConfig(
        decoder=args.decoder,
        shots=shots,
        seed=seed,
        rounds=rounds,
        kappa=args.kappa,
        extra_columns=args.extra_columns,
        bp_rounds=args.bp_rounds,
        bp_variant=args.bp_variant,
        osd_method=args.osd_method,
        osd_order=args.osd_order,
    )


def _cmd_decode(args) -> int:
    with open(args.dem, "r", encoding="ascii") as fh:
        problem = parse_dem(fh.read(), name=args.dem)
    decode = make_decoder(_run_config(args))
    syndromes = read_syndromes(args.syndromes, problem.m)
    predictions = []
    failed = 0
    for syndrome in syndromes:
        try:
            predictions.append(decode(problem, syndrome).logical_effect)
        except DecodeFailureError as exc:
            failed += 1
            print(f"warning: shot {len(predictions) + 1}: {exc}", file=sys.stderr)
            predictions.append(BitVector(problem.k))
    write_predictions(args.out, predictions)
    print(f"decoded {len(predictions)} shots -> {args.out}" + (f" ({failed} decode failures)" if failed else ""))
    return 0


def _cmd_bench(args) -> int:
    with open(args.dem, "r", encoding="ascii") as fh:
        problem = parse_dem(fh.read(), name=args.dem)
    config = _run_config(args, shots=args.shots, seed=args.seed, rounds=args.rounds)
    stats = run_trials(problem, config)
    record = report(problem, config, stats)
    print(format_report(record))
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            fh.write(stats_to_json(record))
            fh.write("\n")
        print(f"wrote {args.json}")
    return 0


def _cmd_dem_info(args) -> int:
    with open(args.dem, "r", encoding="ascii") as fh:
        problem = parse_dem(fh.read(), name=args.dem)
    print(f"m = {problem.m} checks")
    print(f"n = {problem.n} error mechanisms")
    print(f"k = {problem.k} logicals")
    weights = Counter(len(problem.h.col_support(j)) for j in range(problem.n))
    print("column weights:")
    for w in sorted(weights):
        print(f"  weight {w}: {weights[w]} columns")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="acdec",
        description="Ambiguity-clustering and BP+OSD decoding for detector error models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser("decode", help="decode a file of syndromes to logical predictions")
    p_dec.add_argument("--dem", required=True)
    p_dec.add_argument("--syndromes", required=True, help="one m-character 0/1 line per shot")
    p_dec.add_argument("--out", required=True, help="predictions: one k-character 0/1 line per shot")
    _add_decoder_flags(p_dec)
    p_dec.set_defaults(func=_cmd_decode)

    p_bench = sub.add_parser("bench", help="Monte Carlo benchmark on a DEM")
    p_bench.add_argument("--dem", required=True)
    p_bench.add_argument("--shots", type=int, default=1000)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--rounds", type=int, default=1, help="syndrome-extraction rounds the DEM represents")
    p_bench.add_argument("--json", default=None, help="also write the report record as JSON")
    _add_decoder_flags(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_info = sub.add_parser("dem-info", help="print size and column-weight histogram")
    p_info.add_argument("--dem", required=True)
    p_info.set_defaults(func=_cmd_dem_info)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
