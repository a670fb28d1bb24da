"""The m x N binary event matrix over the 2^n outcome basis.

Outcome columns are indexed big-endian: column c encodes the outcome
whose bit for variable i (1-based) is ``(c >> (n - i)) & 1``, so column 0
is the all-complement outcome and column N-1 the all-conjunction one.
Each matrix row is the indicator of a measured event, i.e. the join of
the basis vectors of the outcomes where the event holds:

* row i (1 <= i <= n): the complement event (variable i equal to 0),
  equivalently alternating blocks of 2^(n-i) ones then zeros;
* row for pair (i, j): the conjunction event (variables i and j both 1).

Rows are stored sparse, as sorted arrays of column indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, SizeError
from .marginals import lambda_slot, pair_keys

MAX_N = 14
DENSE_MAX_N = 10


def bits_of_column(n: int, column: int) -> tuple[int, ...]:
    """Big-endian bit tuple (value of variable 1 first) for an outcome column."""
    if not 0 <= column < (1 << n):
        raise SchemaError(f"column {column} out of range for n={n}")
    return tuple((column >> (n - i)) & 1 for i in range(1, n + 1))


def column_of_bits(bits) -> int:
    """Outcome column for a big-endian bit sequence (string or iterable)."""
    vals = [int(b) for b in bits]
    if any(b not in (0, 1) for b in vals):
        raise SchemaError(f"bits must be 0/1, got {bits!r}")
    col = 0
    for b in vals:
        col = (col << 1) | b
    return col


@dataclass(frozen=True)
class OutcomeIndex:
    """One outcome of the n variables: its bit string and basis column."""

    n: int
    column: int
    bits: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", bits_of_column(self.n, self.column))


def outcome_columns(n: int, fixed: dict[int, int]) -> np.ndarray:
    """Sorted columns of the outcomes where each variable i in ``fixed``
    takes the given 0/1 value; the event indicator for that conjunction."""
    cols = np.arange(1 << n)
    mask = np.ones(1 << n, dtype=bool)
    for i, v in fixed.items():
        if not 1 <= i <= n:
            raise SchemaError(f"variable index {i} out of range 1..{n}")
        if v not in (0, 1):
            raise SchemaError(f"variable value must be 0/1, got {v}")
        mask &= ((cols >> (n - i)) & 1) == v
    return cols[mask]


@dataclass(frozen=True)
class EventMatrix:
    """Sparse event matrix: m = n(n+1)/2 indicator rows over N = 2^n columns.

    ``rows[k]`` is the sorted column-index array of row k+1; the first n
    rows are the complement events, the rest the pair conjunctions in
    lexicographic slot order.
    """

    n: int
    rows: tuple[np.ndarray, ...]

    @property
    def m(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def N(self) -> int:
        return 1 << self.n

    def row_not(self, i: int) -> np.ndarray:
        """Stored row for the complement event of variable i."""
        if not 1 <= i <= self.n:
            raise SchemaError(f"variable index {i} out of range 1..{self.n}")
        return self.rows[i - 1]

    def row_pair(self, i: int, j: int) -> np.ndarray:
        """Stored row for the conjunction event of variables i and j."""
        if i > j:
            i, j = j, i
        return self.rows[lambda_slot(self.n, i, j) - 1]

    def row_single(self, i: int) -> np.ndarray:
        """Synthesized row for variable i equal to 1 (complement of row_not)."""
        return complement_row(self.N, self.row_not(i))

    def to_dense(self, max_n: int = DENSE_MAX_N, dtype=np.float64) -> np.ndarray:
        """Materialize the full m x N array.  Guarded by ``max_n`` because the
        default sparse form is the contract for large n."""
        if self.n > max_n:
            raise SizeError(f"dense materialization refused for n={self.n} > {max_n}")
        out = np.zeros((self.m, self.N), dtype=dtype)
        for r, cols in enumerate(self.rows):
            out[r, cols] = 1
        return out


def build(n: int) -> EventMatrix:
    """Construct the event matrix for n variables (2 <= n <= 14)."""
    if not isinstance(n, int) or not 2 <= n <= MAX_N:
        raise SizeError(f"n must be an integer in 2..{MAX_N}, got {n!r}")
    cols = np.arange(1 << n)
    rows = []
    for i in range(1, n + 1):
        rows.append(np.flatnonzero(((cols >> (n - i)) & 1) == 0))
    for (i, j) in pair_keys(n):
        bi = (cols >> (n - i)) & 1
        bj = (cols >> (n - j)) & 1
        rows.append(np.flatnonzero((bi == 1) & (bj == 1)))
    return EventMatrix(n=n, rows=tuple(rows))


def join_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Join of two indicator rows: the union of their column sets.

    For disjoint events this coincides with coordinate-wise addition of
    the indicators, which is how unary rows decompose into pair rows.
    """
    return np.union1d(a, b)


def complement_row(N: int, row: np.ndarray) -> np.ndarray:
    """Columns not present in ``row``."""
    return np.setdiff1d(np.arange(N), row, assume_unique=True)


def row_for_event(matrix: EventMatrix, event) -> np.ndarray:
    """Row lookup by event description.

    ``event`` is an int i for the complement of variable i, a pair
    (i, j) for the conjunction, or ("single", i) for the synthesized
    variable-i-equal-1 row.
    """
    if isinstance(event, int):
        return matrix.row_not(event)
    try:
        kind = tuple(event)
    except TypeError:
        raise SchemaError(f"unrecognized event {event!r}") from None
    if len(kind) == 2 and kind[0] == "single":
        return matrix.row_single(int(kind[1]))
    if len(kind) == 2 and all(isinstance(x, (int, np.integer)) for x in kind):
        return matrix.row_pair(int(kind[0]), int(kind[1]))
    raise SchemaError(f"unrecognized event {event!r}")


def format_ascii(matrix: EventMatrix) -> str:
    """The matrix as an unspaced 0/1 grid, one row per line."""
    lines = []
    for cols in matrix.rows:
        chars = np.zeros(matrix.N, dtype="U1")
        chars[:] = "0"
        chars[cols] = "1"
        lines.append("".join(chars))
    return "\n".join(lines)


def format_triplets(matrix: EventMatrix) -> str:
    """Sparse dump: one ``row column`` pair per line, 1-based indices."""
    lines = [
        f"{r + 1} {c + 1}" for r, cols in enumerate(matrix.rows) for c in cols.tolist()
    ]
    return "\n".join(lines)
