"""Building decoding problems: classical codes, stabiliser codes, DEM files.

Three ingestion routes produce the same canonical problem shape:

* ``from_classical`` — a parity-check matrix plus a standard-form message
  length, uniform priors.
* ``from_stabilisers`` — Pauli stabiliser generators and tracked logical
  operators; the check matrix is the anticommutation table against the
  3n single-qubit errors X1, Y1, Z1, X2, ... and priors come from the
  exact depolarising-to-independent conversion at t = 1.
* ``parse_dem`` — the flattened detector-error-model text format
  (``error(p) D0 D1 L0`` lines plus detector/observable declarations).

The depolarising/independent-noise correspondence and the matching
samplers live here too, since they are what make the stabiliser priors
honest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .gf2 import BitMatrix
from .problem import DecodingProblem, canonicalise

__all__ = [
    "PauliString",
    "DemInstruction",
    "DemParseError",
    "UnsupportedDemError",
    "from_classical",
    "from_stabilisers",
    "anticommutation_row",
    "parse_dem",
    "serialise_dem",
    "depolarising_to_independent",
    "independent_pauli_sampler",
    "depolarising_sampler",
    "sample_independent_indices",
    "sample_depolarising_indices",
]

_LETTERS = "IXZY"  # index = x_bit + 2*z_bit


@dataclass(frozen=True)
class PauliString:
    """A Pauli operator as a string over I, X, Y, Z (phase ignored)."""

    letters: str

    def __post_init__(self):
        bad = set(self.letters) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)}")

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    def anticommutes_with(self, other: "PauliString") -> int:
        """Symplectic product: 1 if the operators anticommute, else 0."""
        if self.num_qubits != other.num_qubits:
            raise ValueError("qubit count mismatch")
        count = 0
        for a, b in zip(self.letters, other.letters):
            if a != "I" and b != "I" and a != b:
                count += 1
        return count & 1

    @classmethod
    def from_index(cls, idx: int, t: int) -> "PauliString":
        """Decode a 2t-bit symplectic index (low t bits X, high t bits Z)."""
        letters = []
        for q in range(t):
            x = (idx >> q) & 1
            z = (idx >> (t + q)) & 1
            letters.append(_LETTERS[x + 2 * z])
        return cls("".join(letters))

    def to_index(self) -> int:
        t = self.num_qubits
        idx = 0
        for q, c in enumerate(self.letters):
            pos = _LETTERS.index(c)
            idx |= (pos & 1) << q
            idx |= (pos >> 1) << (t + q)
        return idx

    def __str__(self):
        return self.letters


def anticommutation_row(op: PauliString) -> list[int]:
    """op's anticommutation pattern against X1, Y1, Z1, X2, Y2, Z2, ...

    This is one row of the check (or logical) matrix a stabiliser code
    induces over single-qubit error mechanisms.
    """
    row = []
    for c in op.letters:
        for err in ("X", "Y", "Z"):
            row.append(1 if (c != "I" and c != err) else 0)
    return row


def from_classical(h, k: int, p: float, name: str = "") -> DecodingProblem:
    """Wrap a classical parity-check matrix as a decoding problem.

    ``h`` is the (n-k) x n check matrix of a code whose generator is in
    standard form, so the first k coordinates carry the message and the
    logical matrix is [I_k | 0].  All n columns get the same prior p.
    """
    mat = h if isinstance(h, BitMatrix) else BitMatrix.from_dense(h)
    n = mat.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    if mat.m != n - k:
        raise ValueError(f"H is {mat.m}x{n}; a standard-form code with k={k} needs {n - k} rows")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    logicals = BitMatrix.zeros(k, n)
    for i in range(k):
        logicals.set(i, i, 1)
    return DecodingProblem(mat, logicals, np.full(n, p), name=name)


def from_stabilisers(
    stabilisers,
    logicals,
    p: float,
    name: str = "",
    validate: bool = True,
) -> DecodingProblem:
    """Build the single-qubit-error decoding problem of a stabiliser code.

    Columns are the 3t single-qubit errors in the order X1, Y1, Z1, X2, ...;
    entry (i, j) of H is 1 iff error j anticommutes with stabiliser i, and
    likewise for the logical rows.  Each error's prior is the independent
    rate equivalent to single-qubit depolarising noise of strength p.  The
    result is canonicalised, so errors with identical footprints merge.

    Args:
        stabilisers: iterable of PauliString generators.
        logicals: iterable of tracked logical PauliStrings.
        p: depolarising strength per qubit.
        validate: check that every logical commutes with every stabiliser.
    """
    stabs = [s if isinstance(s, PauliString) else PauliString(s) for s in stabilisers]
    logs = [l if isinstance(l, PauliString) else PauliString(l) for l in logicals]
    if not stabs:
        raise ValueError("need at least one stabiliser")
    t = stabs[0].num_qubits
    for op in stabs + logs:
        if op.num_qubits != t:
            raise ValueError("all operators must act on the same number of qubits")
    if validate:
        for li, l in enumerate(logs):
            for si, s in enumerate(stabs):
                if l.anticommutes_with(s):
                    raise ValueError(
                        f"logical {li} ({l}) anticommutes with stabiliser {si} ({s})"
                    )
    q = depolarising_to_independent(p, 1)
    if not 0.0 < q < 1.0:
        raise ValueError(f"p={p} gives a degenerate per-error rate q={q}")
    h_rows = [anticommutation_row(s) for s in stabs]
    l_rows = [anticommutation_row(l) for l in logs]
    columns = []
    for j in range(3 * t):
        columns.append(
            (
                [i for i, row in enumerate(h_rows) if row[j]],
                [i for i, row in enumerate(l_rows) if row[j]],
                q,
            )
        )
    return canonicalise(len(stabs), len(logs), columns, name=name)


# --- detector error model text format ------------------------------------

_INSTR_RE = re.compile(r"^(\w+)\s*(\(([^)]*)\))?\s*(.*)$")
_TARGET_RE = re.compile(r"^[DL](\d+)$")


class DemParseError(ValueError):
    """Malformed detector-error-model text."""


class UnsupportedDemError(DemParseError):
    """Valid DEM construct that this parser deliberately rejects."""


@dataclass(frozen=True)
class DemInstruction:
    """One parsed DEM line: an error mechanism or a declaration."""

    kind: str  # "error" | "detector" | "logical_observable"
    probability: float | None
    detectors: tuple[int, ...]
    logicals: tuple[int, ...]


def _parse_targets(rest: str, line_no: int):
    dets: set[int] = set()
    logs: set[int] = set()
    for tok in rest.split():
        if tok == "^":
            continue  # separators group targets; the union is what matters
        m = _TARGET_RE.match(tok)
        if not m:
            raise DemParseError(f"line {line_no}: unrecognised target {tok!r}")
        idx = int(m.group(1))
        bag = dets if tok[0] == "D" else logs
        # repeated targets cancel mod 2
        if idx in bag:
            bag.remove(idx)
        else:
            bag.add(idx)
    return tuple(sorted(dets)), tuple(sorted(logs))


def parse_dem_instructions(text: str) -> list[DemInstruction]:
    """Parse flattened DEM text into instructions (no problem-building)."""
    out: list[DemInstruction] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _INSTR_RE.match(line)
        if not m:
            raise DemParseError(f"line {line_no}: cannot parse {raw!r}")
        keyword, _, args, rest = m.groups()
        if keyword == "error":
            if args is None:
                raise DemParseError(f"line {line_no}: error needs a probability argument")
            try:
                p = float(args)
            except ValueError:
                raise DemParseError(f"line {line_no}: bad probability {args!r}") from None
            if not 0.0 <= p <= 1.0:
                raise DemParseError(f"line {line_no}: probability {p} outside [0, 1]")
            dets, logs = _parse_targets(rest, line_no)
            out.append(DemInstruction("error", p, dets, logs))
        elif keyword == "detector":
            dets, logs = _parse_targets(rest, line_no)
            if logs or len(dets) != 1:
                raise DemParseError(f"line {line_no}: detector expects exactly one D target")
            out.append(DemInstruction("detector", None, dets, ()))
        elif keyword == "logical_observable":
            dets, logs = _parse_targets(rest, line_no)
            if dets or len(logs) != 1:
                raise DemParseError(
                    f"line {line_no}: logical_observable expects exactly one L target"
                )
            out.append(DemInstruction("logical_observable", None, (), logs))
        elif keyword == "repeat":
            raise UnsupportedDemError(
                f"line {line_no}: repeat blocks are not supported; flatten the model first"
            )
        else:
            raise UnsupportedDemError(f"line {line_no}: unsupported instruction {keyword!r}")
    return out


def parse_dem(text: str, name: str = "", rounds: int = 1) -> DecodingProblem:
    """Parse flattened DEM text into a canonical decoding problem.

    Detector/observable declarations and error targets jointly fix the
    number of detectors m and observables k, even for indices that no
    error ever flips.  Error mechanisms with identical footprints merge;
    mechanisms with empty footprints or zero probability disappear.
    """
    instructions = parse_dem_instructions(text)
    max_d = -1
    max_l = -1
    columns = []
    for ins in instructions:
        if ins.detectors:
            max_d = max(max_d, ins.detectors[-1])
        if ins.logicals:
            max_l = max(max_l, ins.logicals[-1])
        if ins.kind == "error":
            columns.append((ins.detectors, ins.logicals, ins.probability))
    return canonicalise(max_d + 1, max_l + 1, columns, name=name, rounds=rounds)


def serialise_dem(problem: DecodingProblem) -> str:
    """Write a problem back out as canonical flattened DEM text.

    Error lines come first in column order with sorted targets, followed by
    one declaration per detector and observable so that parsing the output
    reproduces the problem exactly, including never-flipped indices.
    """
    lines = []
    for j in range(problem.n):
        targets = [f"D{int(i)}" for i in problem.h.col_support(j)]
        targets += [f"L{int(i)}" for i in problem.logicals.col_support(j)]
        lines.append(f"error({float(problem.priors[j])!r}) " + " ".join(targets))
    for i in range(problem.m):
        lines.append(f"detector D{i}")
    for i in range(problem.k):
        lines.append(f"logical_observable L{i}")
    return "\n".join(lines) + "\n"


# --- depolarising <-> independent noise ----------------------------------


def depolarising_to_independent(p: float, t: int) -> float:
    """Independent rate q equivalent to t-qubit depolarising strength p.

    Applying each of the 2^(2t) symplectic vectors independently with
    probability q and multiplying the outcomes reproduces depolarising
    noise (uniform over the whole group with probability p) exactly, when

        q = (1 - (1 - p)^(1 / 2^(2t - 1))) / 2.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if t < 1:
        raise ValueError("t must be >= 1")
    return (1.0 - (1.0 - p) ** (1.0 / (1 << (2 * t - 1)))) / 2.0


def sample_independent_indices(q: float, t: int, rng, size: int) -> np.ndarray:
    """Sample symplectic indices of the independent process, vectorised."""
    dim = 1 << (2 * t)
    include = rng.random((size, dim)) < q
    acc = np.zeros(size, dtype=np.int64)
    for v in range(dim):
        acc ^= np.where(include[:, v], v, 0)
    return acc


def sample_depolarising_indices(p: float, t: int, rng, size: int) -> np.ndarray:
    """Sample symplectic indices of t-qubit depolarising noise, vectorised."""
    dim = 1 << (2 * t)
    fire = rng.random(size) < p
    picks = rng.integers(0, dim, size=size)
    return np.where(fire, picks, 0).astype(np.int64)


def independent_pauli_sampler(q: float, t: int, rng) -> PauliString:
    """One draw of the q-independent symplectic-subset process."""
    return PauliString.from_index(int(sample_independent_indices(q, t, rng, 1)[0]), t)


def depolarising_sampler(p: float, t: int, rng) -> PauliString:
    """One draw of t-qubit depolarising noise of strength p."""
    return PauliString.from_index(int(sample_depolarising_indices(p, t, rng, 1)[0]), t)
