"""Dense-packed GF(2) linear algebra: bit vectors, bit matrices, pivots.

Everything downstream (BP post-processing, OSD, cluster growth) reduces to
row operations over GF(2).  Rows are stored as packed 64-bit words in a numpy
array so that adding one row to many others is a single vectorised XOR; column
reads are extracted on demand from the packed rows.  All mutating operations
keep the syndrome and an optional row-operation log in lockstep with the
matrix so a sequence of pivots can be replayed or audited later.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "RowOpLog",
    "PivotAssignment",
    "InvalidPivotError",
    "InconsistentSystemError",
    "pivot_at",
    "full_reduce",
    "solve_from_reduced",
    "row_in_span",
    "is_reduced",
]

_WORD = 64


def _nwords(nbits: int) -> int:
    return (nbits + _WORD - 1) >> 6


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into little-endian uint64 words."""
    bits = np.ascontiguousarray(bits)  # column slices may arrive F-ordered
    n = bits.shape[-1]
    pad = _nwords(n) * _WORD - n
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1)
    packed = np.packbits(bits.astype(np.uint8), axis=-1, bitorder="little")
    return packed.view(np.uint64)


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :n]


class InvalidPivotError(ValueError):
    """A pivot was requested at a position that violates a precondition."""


class InconsistentSystemError(ValueError):
    """The linear system He = s has no solution."""


class BitVector:
    """Fixed-length vector over GF(2), packed into uint64 words.

    Bits beyond the logical length are kept at zero so that equality,
    weight and support queries can work directly on the words.
    """

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray | None = None):
        self.n = n
        if words is None:
            self.words = np.zeros(_nwords(n), dtype=np.uint64)
        else:
            self.words = words

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        arr = np.asarray(list(bits), dtype=np.uint8)
        return cls(arr.size, _pack(arr))

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        if any(c not in "01" for c in s):
            raise ValueError(f"bit string may only contain 0/1, got {s!r}")
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def from_support(cls, n: int, support) -> "BitVector":
        v = cls(n)
        for i in support:
            v.flip(i)
        return v

    def copy(self) -> "BitVector":
        return BitVector(self.n, self.words.copy())

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return int((self.words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def set(self, i: int, value: int) -> None:
        mask = np.uint64(1) << np.uint64(i & 63)
        if value:
            self.words[i >> 6] |= mask
        else:
            self.words[i >> 6] &= ~mask

    def flip(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(i)
        self.words[i >> 6] ^= np.uint64(1) << np.uint64(i & 63)

    def flip_many(self, idx: np.ndarray) -> None:
        """Flip several distinct positions at once."""
        idx = np.asarray(idx, dtype=np.int64)
        np.bitwise_xor.at(self.words, idx >> 6, np.uint64(1) << (idx & 63).astype(np.uint64))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVector(self.n, self.words ^ other.words)

    def __ixor__(self, other: "BitVector") -> "BitVector":
        self.words ^= other.words
        return self

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.n, self.words.tobytes()))

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def support(self) -> np.ndarray:
        return np.nonzero(_unpack(self.words, self.n))[0]

    def to_array(self) -> np.ndarray:
        return _unpack(self.words, self.n).copy()

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in _unpack(self.words, self.n))

    def __repr__(self):
        if self.n <= 64:
            return f"BitVector({self.to01()!r})"
        return f"BitVector(n={self.n}, weight={self.weight()})"


class BitMatrix:
    """An m-by-n matrix over GF(2) with word-packed rows.

    Row supports and column supports both describe the single packed
    representation: ``row_support`` unpacks a row, ``col_support`` extracts
    one bit from every row (vectorised).  Zero rows, zero columns and
    linearly dependent rows are all legal.
    """

    __slots__ = ("m", "n", "words")

    def __init__(self, m: int, n: int, words: np.ndarray | None = None):
        self.m = m
        self.n = n
        if words is None:
            self.words = np.zeros((m, _nwords(n)), dtype=np.uint64)
        else:
            self.words = np.ascontiguousarray(words, dtype=np.uint64)

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        a = np.asarray(arr, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        m, n = a.shape
        if n == 0:
            return cls(m, 0, np.zeros((m, 0), dtype=np.uint64))
        return cls(m, n, _pack(a))

    @classmethod
    def zeros(cls, m: int, n: int) -> "BitMatrix":
        return cls(m, n)

    @classmethod
    def from_cols(cls, m: int, col_supports) -> "BitMatrix":
        """Build from an iterable of per-column row-support sets."""
        cols = list(col_supports)
        mat = cls(m, len(cols))
        for j, rows in enumerate(cols):
            w, bit = j >> 6, np.uint64(1) << np.uint64(j & 63)
            for i in rows:
                mat.words[i, w] |= bit
        return mat

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.m, self.n, self.words.copy())

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def set(self, i: int, j: int, value: int) -> None:
        mask = np.uint64(1) << np.uint64(j & 63)
        if value:
            self.words[i, j >> 6] |= mask
        else:
            self.words[i, j >> 6] &= ~mask

    def row(self, i: int) -> BitVector:
        return BitVector(self.n, self.words[i].copy())

    def row_support(self, i: int) -> np.ndarray:
        """Column indices holding a 1 in row i (sorted)."""
        return np.nonzero(_unpack(self.words[i], self.n))[0]

    def row_weight(self, i: int) -> int:
        return int(np.bitwise_count(self.words[i]).sum())

    def col_bits(self, j: int) -> np.ndarray:
        """Column j as a 0/1 uint64 array of length m."""
        return (self.words[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)

    def col_support(self, j: int) -> np.ndarray:
        """Row indices holding a 1 in column j (sorted)."""
        return np.nonzero(self.col_bits(j))[0]

    def col_as_vector(self, j: int) -> BitVector:
        """Column j packed as a BitVector over the m rows."""
        return BitVector(self.m, _pack(self.col_bits(j).astype(np.uint8)))

    def add_row_to(self, src: int, tgt: int) -> None:
        self.words[tgt] ^= self.words[src]

    def add_row_to_many(self, src: int, tgts: np.ndarray) -> None:
        if len(tgts):
            self.words[tgts] ^= self.words[src]

    def mat_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product over GF(2)."""
        if v.n != self.n:
            raise ValueError("dimension mismatch")
        if self.m == 0:
            return BitVector(0)
        par = (np.bitwise_count(self.words & v.words[None, :]).sum(axis=1) & 1).astype(np.uint8)
        return BitVector(self.m, _pack(par))

    def to_dense(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((self.m, 0), dtype=np.uint8)
        return _unpack(self.words, self.n).copy()

    def __eq__(self, other):
        return (
            isinstance(other, BitMatrix)
            and (self.m, self.n) == (other.m, other.n)
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.m, self.n, self.words.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.m}x{self.n})"


class RowOpLog:
    """Append-only log of row additions ``(source, target)``.

    Replaying the log against a fresh copy of the original matrix (or any
    vector of the right height) reproduces the accumulated row transform.
    """

    __slots__ = ("ops",)

    def __init__(self):
        self.ops: list[tuple[int, int]] = []

    def record(self, src: int, tgt: int) -> None:
        self.ops.append((src, tgt))

    def record_many(self, src: int, tgts) -> None:
        self.ops.extend((src, int(t)) for t in tgts)

    def __len__(self) -> int:
        return len(self.ops)

    def replay(self, matrix: BitMatrix, syndrome: BitVector | None = None) -> None:
        """Apply the logged additions, in order, to a matrix (and syndrome)."""
        for src, tgt in self.ops:
            matrix.add_row_to(src, tgt)
            if syndrome is not None and syndrome[src]:
                syndrome.flip(tgt)


class PivotAssignment:
    """A bijective partial matching between pivot rows and pivot columns."""

    __slots__ = ("row_to_col", "col_to_row")

    def __init__(self):
        self.row_to_col: dict[int, int] = {}
        self.col_to_row: dict[int, int] = {}

    def assign(self, i: int, j: int) -> None:
        if i in self.row_to_col:
            raise InvalidPivotError(f"row {i} is already a pivot row (column {self.row_to_col[i]})")
        if j in self.col_to_row:
            raise InvalidPivotError(f"column {j} is already a pivot column (row {self.col_to_row[j]})")
        self.row_to_col[i] = j
        self.col_to_row[j] = i

    def is_pivot_row(self, i: int) -> bool:
        return i in self.row_to_col

    def is_pivot_col(self, j: int) -> bool:
        return j in self.col_to_row

    def __len__(self) -> int:
        return len(self.row_to_col)

    def items(self):
        return self.row_to_col.items()

    def copy(self) -> "PivotAssignment":
        p = PivotAssignment()
        p.row_to_col = dict(self.row_to_col)
        p.col_to_row = dict(self.col_to_row)
        return p


def pivot_at(
    matrix: BitMatrix,
    syndrome: BitVector | None,
    log: RowOpLog | None,
    pivots: PivotAssignment,
    i: int,
    j: int,
) -> np.ndarray:
    """Pivot on entry (i, j): clear column j everywhere except row i.

    Adds row i to every other row holding a 1 in column j, updating the
    syndrome identically, recording each addition in the log, and marking
    (i, j) in the pivot assignment.  Afterwards column j holds a single 1,
    at row i.

    Args:
        matrix: matrix to reduce in place.
        syndrome: right-hand side kept in lockstep (may be None).
        log: row-operation log to append to (may be None).
        pivots: assignment that (i, j) is recorded in.
        i, j: pivot row and column.

    Returns:
        Array of row indices that received an addition.

    Raises:
        InvalidPivotError: if matrix[i][j] == 0, or row i / column j has
            already been used as a pivot.
    """
    if not (0 <= i < matrix.m and 0 <= j < matrix.n):
        raise InvalidPivotError(f"pivot ({i}, {j}) outside a {matrix.m}x{matrix.n} matrix")
    if pivots.is_pivot_row(i):
        raise InvalidPivotError(f"row {i} is already a pivot row")
    if pivots.is_pivot_col(j):
        raise InvalidPivotError(f"column {j} is already a pivot column")
    if not matrix.get(i, j):
        raise InvalidPivotError(f"matrix[{i}][{j}] is 0; cannot pivot there")
    rows = matrix.col_support(j)
    targets = rows[rows != i]
    matrix.add_row_to_many(i, targets)
    if syndrome is not None and syndrome[i]:
        syndrome.flip_many(targets)
    if log is not None:
        log.record_many(i, targets)
    pivots.assign(i, j)
    return targets


def _default_pivot_order(matrix: BitMatrix, pivots: PivotAssignment):
    for j in range(matrix.n):
        if pivots.is_pivot_col(j):
            continue
        rows = matrix.col_support(j)
        for i in rows:
            if not pivots.is_pivot_row(int(i)):
                return int(i), j
    return None


def full_reduce(
    matrix: BitMatrix,
    syndrome: BitVector | None = None,
    pivot_order=None,
    log: RowOpLog | None = None,
    pivots: PivotAssignment | None = None,
) -> PivotAssignment:
    """Pivot until no further pivot is possible, i.e. full reduced form.

    ``pivot_order(matrix, pivots)`` chooses the next (row, column) pair or
    returns None to stop early; the default scans columns left to right.
    Once exhausted, every unpivoted row is a zero row and every column is
    either a pivot column or supported entirely on pivot rows.
    """
    if pivots is None:
        pivots = PivotAssignment()
    chooser = pivot_order if pivot_order is not None else _default_pivot_order
    while True:
        pick = chooser(matrix, pivots)
        if pick is None:
            return pivots
        i, j = pick
        pivot_at(matrix, syndrome, log, pivots, i, j)


def is_reduced(matrix: BitMatrix, pivots: PivotAssignment) -> bool:
    """True iff every pivot column holds exactly one 1, in its pivot row."""
    for i, j in pivots.items():
        rows = matrix.col_support(j)
        if len(rows) != 1 or int(rows[0]) != i:
            return False
    return True


def solve_from_reduced(
    pivots: PivotAssignment,
    syndrome: BitVector,
    g: BitVector,
    matrix: BitMatrix,
) -> BitVector:
    """Read a solution of He = s off a reduced matrix.

    Free (non-pivot) columns take the bits of ``g`` in increasing column
    order; each pivot column j with pivot row i takes s_i plus the parity
    of row i's overlap with the chosen free bits.  Every assignment of g
    yields a distinct solution and together they enumerate the whole
    solution set.

    Raises:
        InconsistentSystemError: if the syndrome is nonzero on a non-pivot
            row (for a zero row this means no solution exists).
        ValueError: if g's length differs from the number of free columns.
    """
    n = matrix.n
    free_cols = [j for j in range(n) if not pivots.is_pivot_col(j)]
    if g.n != len(free_cols):
        raise ValueError(f"g has {g.n} bits but there are {len(free_cols)} free columns")
    for i in range(matrix.m):
        if not pivots.is_pivot_row(i) and syndrome[i]:
            if matrix.row_weight(i) == 0:
                raise InconsistentSystemError(
                    f"syndrome bit {i} is 1 on an all-zero non-pivot row; no solution exists"
                )
            raise InconsistentSystemError(
                f"syndrome bit {i} is 1 on a non-pivot row; matrix is not reduced there"
            )
    e = BitVector(n)
    for rank, j in enumerate(free_cols):
        if g[rank]:
            e.set(j, 1)
    bg = matrix.mat_vec(e)  # row i picks up (B g)_i; pivot columns of e are still 0
    for i, j in pivots.items():
        e.set(j, syndrome[i] ^ bg[i])
    return e


def row_in_span(target: BitVector, basis: BitMatrix, basis_pivots: PivotAssignment) -> BitVector | None:
    """Decide membership of ``target`` in the row span of a reduced basis.

    Because each basis row owns a pivot column, the only possible
    combination reads its coefficients straight off the target's bits at
    the pivot columns.  The combination is then checked in full.

    Returns the coefficient vector (one bit per basis row) or None.
    """
    if target.n != basis.n:
        raise ValueError("target length must match basis width")
    coeffs = BitVector(basis.m)
    acc = BitVector(basis.n)
    for i, j in basis_pivots.items():
        if target[j]:
            coeffs.set(i, 1)
            acc ^= basis.row(i)
    if acc == target:
        return coeffs
    return None
