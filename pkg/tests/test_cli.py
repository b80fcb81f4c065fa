"""Command-line entry points, run in-process through main()."""

import json

import numpy as np
import pytest

from acdec import parse_dem
from acdec.bench import read_syndromes
from acdec.cli import main

DEM = """\
error(0.05) D0 L0
error(0.1) D0 D1
error(0.08) D1 D2
error(0.02) D2 L0
error(0.07) D1 L1
"""


@pytest.fixture
def dem_path(tmp_path):
    path = tmp_path / "model.dem"
    path.write_text(DEM)
    return path


def test_dem_info(dem_path, capsys):
    assert main(["dem-info", "--dem", str(dem_path)]) == 0
    out = capsys.readouterr().out
    assert "m = 3" in out and "n = 5" in out and "k = 2" in out
    assert "weight 1: 3 columns" in out
    assert "weight 2: 2 columns" in out


def test_decode_round_trip(dem_path, tmp_path, capsys):
    problem = parse_dem(DEM)
    rng = np.random.default_rng(0)
    shots = []
    for _ in range(12):
        e = (rng.random(problem.n) < problem.priors).astype(np.uint8)
        shots.append((problem.h.to_dense() @ e % 2, problem.logicals.to_dense() @ e % 2))
    syn = tmp_path / "syn.txt"
    syn.write_text("".join("".join(map(str, s.tolist())) + "\n" for s, _ in shots))
    out = tmp_path / "pred.txt"
    assert main([
        "decode", "--dem", str(dem_path), "--syndromes", str(syn),
        "--out", str(out), "--decoder", "ac", "--kappa", "1.0",
    ]) == 0
    preds = out.read_text().splitlines()
    assert len(preds) == 12
    assert all(len(line) == problem.k and set(line) <= {"0", "1"} for line in preds)
    # The library agrees with its own CLI.
    from acdec import AcConfig, BitVector, ac_decode

    for (s, _), line in zip(shots, preds):
        r = ac_decode(problem, BitVector.from_bits(s), AcConfig(kappa=1.0))
        assert r.logical_effect.to01() == line


def test_decode_inconsistent_syndrome_warns_and_zero_fills(tmp_path, capsys):
    path = tmp_path / "model.dem"
    # Both mechanisms hit both detectors: syndrome 10 is unreachable.
    path.write_text("error(0.2) D0 D1 L0\nerror(0.3) D0 D1\n")
    syn = tmp_path / "syn.txt"
    syn.write_text("10\n11\n")
    out = tmp_path / "pred.txt"
    assert main(["decode", "--dem", str(path), "--syndromes", str(syn), "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "shot 1" in captured.err
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == "0"  # unreachable shot zero-filled rather than dropped


def test_bench_text_and_json(dem_path, tmp_path, capsys):
    record_path = tmp_path / "record.json"
    assert main([
        "bench", "--dem", str(dem_path), "--shots", "200", "--seed", "3",
        "--decoder", "bposd", "--osd-method", "cs", "--osd-order", "2",
        "--json", str(record_path),
    ]) == 0
    out = capsys.readouterr().out
    assert "logical error per round" in out
    assert "fails/shots" in out
    rec = json.loads(record_path.read_text())
    assert rec["decoder"] == "bposd"
    assert rec["shots"] == 200
    assert rec["seed"] == 3
    assert "logical_error_per_round_fmt" in rec


def test_bench_is_seed_reproducible(dem_path, capsys):
    argv = ["bench", "--dem", str(dem_path), "--shots", "150", "--seed", "9", "--kappa", "1.0"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    fails = [l for l in first.splitlines() if "fails/shots" in l]
    assert fails == [l for l in second.splitlines() if "fails/shots" in l]


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_syndrome_width_mismatch_is_reported(dem_path, tmp_path):
    syn = tmp_path / "syn.txt"
    syn.write_text("0101\n")  # DEM has m = 3
    out = tmp_path / "pred.txt"
    with pytest.raises(ValueError, match="line 1"):
        main(["decode", "--dem", str(dem_path), "--syndromes", str(syn), "--out", str(out)])
