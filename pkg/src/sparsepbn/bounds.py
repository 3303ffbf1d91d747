"""Lower and upper bounds on the length of a decomposition.

Lower bounds come from comparing columns. In any decomposition of length
``K``, the terms routed through each positive entry of a column form a
cell, and the cells of one column partition the ``K`` terms. If column
``i`` has ``d`` positive entries and ``K == d``, every cell of column
``i`` is a single term, so the entries of any other column must be sums
of disjoint groups of column ``i``'s entries. When they are not, ``K``
exceeds ``d``.

The generic rules are combined with a small table of bounds that were
proved by hand for individual reference matrices.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    BnMatrix,
    Decomposition,
    Tpm,
    iter_support,
    positive_count,
    support_size,
)
from .errors import ContractError, InfeasibleSizeError, OracleTimeout

__all__ = [
    "CERTIFIED",
    "BoundReport",
    "BoundWitness",
    "CertifiedBound",
    "ColumnPartition",
    "UpperBounds",
    "block_doubling_reduce",
    "disjoint_support_bound",
    "exact_min_length",
    "extract_column_partition",
    "forced_nonsingleton",
    "lower_bound",
    "max_column_bound",
    "not_partitionable_bound",
    "partitionable",
    "upper_bounds",
]

MAX_COLUMN = "MaxColumn"
NOT_PARTITIONABLE = "NotPartitionable"
NOT_PERMUTATION = "NotPermutation"
DISJOINT_SUPPORT = "DisjointSupport"
BLOCK_DOUBLING = "BlockDoubling"
CERTIFIED_KIND = "Certified"


@dataclass(frozen=True)
class BoundWitness:
    """A lower bound together with the rule and columns that prove it."""

    kind: str
    value: int
    columns: tuple[int, ...] = ()
    citation: str = ""

    def __str__(self):
        cols = ",".join(map(str, self.columns))
        text = f"{self.value} ({self.kind}" + (f", columns {cols}" if cols else "")
        return text + (f"; {self.citation}" if self.citation else "") + ")"


@dataclass(frozen=True)
class UpperBounds:
    """Guaranteed maximum lengths for the entry-removal algorithms."""

    entry_removal: int
    ser1_ger: int
    ser2: int


@dataclass(frozen=True)
class BoundReport:
    value: int
    witness: BoundWitness
    considered: tuple[BoundWitness, ...]
    upper: UpperBounds


@dataclass(frozen=True)
class ColumnPartition:
    """Terms of a decomposition grouped by their target row in one column.

    ``cells[l]`` holds the 1-based term indices routed through row
    ``rows[l]``; ``sums[l]`` is their total weight.
    """

    column: int
    rows: tuple[int, ...]
    cells: tuple[frozenset[int], ...]
    sums: tuple[Fraction, ...]


@dataclass(frozen=True)
class CertifiedBound:
    name: str
    tpm: Tpm
    value: int
    citation: str


def _key(tpm: Tpm):
    return tpm.entries, tpm.denom


def _registry(entries: Sequence[CertifiedBound]) -> Mapping:
    return {_key(e.tpm.normalized()): e for e in entries}


def _certified_table():
    from .corpus import corpus

    rows = [
        (
            "P5",
            7,
            "case analysis: column 2 entry 6/10 exceeds every entry of column 11, "
            "ruling out length 6",
        ),
        (
            "PA1",
            5,
            "case analysis: column 1 entry 7/10 exceeds every entry of column 2, "
            "ruling out length 4",
        ),
        ("PB1", 4, "case analysis of columns 1 to 4 rules out length 3"),
    ]
    return _registry([CertifiedBound(n, corpus(n).tpm, v, c) for n, v, c in rows])


class _LazyRegistry(Mapping):
    """The built-in certified table, built on first use."""

    _table = None

    def _data(self):
        if _LazyRegistry._table is None:
            _LazyRegistry._table = _certified_table()
        return _LazyRegistry._table

    def __getitem__(self, key):
        return self._data()[key]

    def __iter__(self):
        return iter(self._data())

    def __len__(self):
        return len(self._data())


CERTIFIED: Mapping = _LazyRegistry()


def make_registry(entries: Sequence[CertifiedBound]) -> Mapping:
    """A certified-bound table keyed by the normalized matrix."""
    return _registry(entries)


def _positive_values(tpm: Tpm, j: int) -> list[int]:
    return [e for e in tpm.column(j) if e > 0]


def max_column_bound(tpm: Tpm) -> BoundWitness:
    """Every positive entry of a column needs its own term."""
    counts = [len(tpm.positive_rows(j)) for j in range(1, tpm.side + 1)]
    best = max(counts)
    return BoundWitness(MAX_COLUMN, best, (counts.index(best) + 1,))


def partitionable(a: Sequence, b: Sequence) -> tuple[frozenset[int], ...] | None:
    """Split the items of ``a`` into groups whose sums are the items of ``b``.

    Returns one group of 1-based indices into ``a`` per item of ``b``, in
    ``b``'s order, or ``None`` when no such split exists. Items are
    assigned largest first with backtracking.

    >>> partitionable([1, 2, 7], [3, 7])
    (frozenset({1, 2}), frozenset({3}))
    """
    if len(a) < len(b):
        raise ContractError("the first multiset must have at least as many items")
    if sum(a) != sum(b):
        raise ContractError("the two multisets must have the same total")
    if any(x <= 0 for x in a) or any(x <= 0 for x in b):
        raise ContractError("items must be positive")
    order = sorted(range(len(a)), key=lambda k: a[k], reverse=True)
    room = list(b)
    owner = [None] * len(a)

    def place(pos: int) -> bool:
        if pos == len(order):
            return all(r == 0 for r in room)
        item = a[order[pos]]
        tried = set()
        for cell, left in enumerate(room):
            # Two cells with the same room left are interchangeable here.
            if left < item or (left, b[cell]) in tried:
                continue
            tried.add((left, b[cell]))
            room[cell] -= item
            owner[order[pos]] = cell
            if place(pos + 1):
                return True
            room[cell] += item
        return False

    if not place(0):
        return None
    return tuple(
        frozenset(k + 1 for k in range(len(a)) if owner[k] == cell)
        for cell in range(len(b))
    )


def not_partitionable_bound(tpm: Tpm) -> BoundWitness | None:
    """Best bound from a column whose entries cannot be grouped into another's.

    For columns ``i`` and ``j`` with ``d_i >= d_j`` positive entries, if the
    entries of ``i`` cannot be grouped to sum to the entries of ``j`` then
    the length exceeds ``d_i``. Equal counts reduce to asking whether the
    two columns are permutations of each other.
    """
    values = {j: _positive_values(tpm, j) for j in range(1, tpm.side + 1)}
    order = sorted(values, key=lambda j: -len(values[j]))
    best, cache = None, {}
    for i in order:
        d1 = len(values[i])
        if best is not None and d1 + 1 <= best.value:
            break
        for j in order:
            if j == i or len(values[j]) > d1:
                continue
            key = (tuple(sorted(values[i])), tuple(sorted(values[j])))
            if key not in cache:
                cache[key] = partitionable(*key) is None
            if cache[key]:
                kind = NOT_PERMUTATION if len(values[j]) == d1 else NOT_PARTITIONABLE
                best = BoundWitness(kind, d1 + 1, (i, j))
                break
    return best


def disjoint_support_bound(tpm: Tpm) -> BoundWitness | None:
    """Bound from two columns with equal counts and no shared positive value.

    With ``d`` positive entries each and disjoint value sets, the length
    is at least ``4d/3``.
    """
    best = None
    for i, j in itertools.combinations(range(1, tpm.side + 1), 2):
        a, b = set(_positive_values(tpm, i)), set(_positive_values(tpm, j))
        d = len(_positive_values(tpm, i))
        if d != len(_positive_values(tpm, j)) or a & b:
            continue
        value = -(-4 * d // 3)
        if best is None or value > best.value:
            best = BoundWitness(DISJOINT_SUPPORT, value, (i, j))
    return best


def block_doubling_reduce(tpm: Tpm) -> Tpm | None:
    """Return ``P`` when ``tpm`` is exactly ``diag(P, P)``, else ``None``.

    Minimal lengths of ``P`` and ``diag(P, P)`` coincide, so any bound for
    one holds for the other.
    """
    side = tpm.side
    if side < 2:
        return None
    half = side // 2
    rows = tpm.entries
    top = tuple(row[:half] for row in rows[:half])
    bottom = tuple(row[half:] for row in rows[half:])
    if top != bottom:
        return None
    if any(rows[i][j] for i in range(half) for j in range(half, side)):
        return None
    if any(rows[i][j] for i in range(half, side) for j in range(half)):
        return None
    return Tpm.from_rows(
        [[Fraction(e, tpm.denom) for e in row] for row in top], tpm.scale
    )


def forced_nonsingleton(tpm: Tpm, i: int, l: int, j: int) -> bool:
    """True when the ``l``-th positive entry of column ``i`` can never stand alone.

    If that entry is larger than every entry of column ``j``, no single
    term can carry it, because each term also carries a single entry of
    column ``j``. Positive entries are counted from the top row down.
    """
    side = tpm.side
    if not (1 <= i <= side and 1 <= j <= side) or i == j:
        raise ContractError(f"need two distinct columns in 1..{side}, got {i} and {j}")
    entries = _positive_values(tpm, i)
    if not 1 <= l <= len(entries):
        raise ContractError(f"column {i} has {len(entries)} positive entries, not {l}")
    return entries[l - 1] > max(tpm.column(j))


def lower_bound(tpm: Tpm, registry: Mapping | None = CERTIFIED) -> BoundReport:
    """Largest lower bound over all rules, plus the upper bounds.

    ``registry`` maps normalized matrices to hand-proved bounds; pass
    ``None`` or an empty mapping to use the generic rules only.
    """
    found = [max_column_bound(tpm), not_partitionable_bound(tpm), disjoint_support_bound(tpm)]
    if registry:
        entry = registry.get(_key(tpm.normalized()))
        if entry is not None:
            found.append(BoundWitness(CERTIFIED_KIND, entry.value, (), entry.citation))
    half = block_doubling_reduce(tpm)
    if half is not None:
        inner = lower_bound(half, registry)
        note = f"half-size block: {inner.witness}"
        found.append(BoundWitness(BLOCK_DOUBLING, inner.value, inner.witness.columns, note))
    found = tuple(w for w in found if w is not None)
    best = max(found, key=lambda w: w.value)
    return BoundReport(best.value, best, found, upper_bounds(tpm))


def upper_bounds(tpm: Tpm) -> UpperBounds:
    """Length guarantees for the entry-removal algorithms on ``tpm``.

    ``entry_removal`` holds for all three algorithms. ``ser1_ger`` uses
    the smallest positive entry and ``ser2`` the smallest column maximum,
    both measured against the least common denominator.
    """
    smallest = min(e for row in tpm.entries for e in row if e > 0)
    smallest_max = min(max(tpm.column(j)) for j in range(1, tpm.side + 1))
    return UpperBounds(
        positive_count(tpm) - tpm.side + 1,
        tpm.denom - smallest + 1,
        tpm.denom - smallest_max + 1,
    )


def extract_column_partition(decomposition: Decomposition, j: int) -> ColumnPartition:
    """Group the terms of ``decomposition`` by their target row in column ``j``."""
    if not decomposition.is_internally_consistent():
        raise ContractError("decomposition is not internally consistent")
    if not 1 <= j <= decomposition.side:
        raise ContractError(f"column {j} out of range")
    cells = defaultdict(set)
    for k, matrix in enumerate(decomposition.matrices, 1):
        cells[matrix.targets[j - 1]].add(k)
    rows = tuple(sorted(cells))
    weights = decomposition.weights
    return ColumnPartition(
        j,
        rows,
        tuple(frozenset(cells[r]) for r in rows),
        tuple(sum(weights[k - 1] for k in cells[r]) for r in rows),
    )


def _solve_exact(columns: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction] | None:
    """Unique solution of an overdetermined system, or ``None``.

    ``columns`` are the unknowns' coefficient vectors. Returns ``None`` if
    they are linearly dependent or the system is inconsistent.
    """
    width = len(columns)
    rows = [[Fraction(c[r]) for c in columns] + [Fraction(rhs[r])] for r in range(len(rhs))]
    pivot_row = 0
    for col in range(width):
        pivot = next((r for r in range(pivot_row, len(rows)) if rows[r][col]), None)
        if pivot is None:
            return None
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        lead = rows[pivot_row]
        inv = 1 / lead[col]
        for k in range(col, width + 1):
            lead[k] *= inv
        for r, row in enumerate(rows):
            if r != pivot_row and row[col]:
                f = row[col]
                for k in range(col, width + 1):
                    row[k] -= f * lead[k]
        pivot_row += 1
    if any(row[width] for row in rows[pivot_row:]):
        return None
    return [rows[k][width] for k in range(width)]


def exact_min_length(
    tpm: Tpm,
    k_max: int | None = None,
    budget: float | None = 60.0,
    cap: int = 64,
) -> int | None:
    """Smallest number of BN matrices that combine to ``tpm`` exactly.

    Tries every ``k``-subset of the BN matrices in the support, in
    lexicographic order, for ``k = 1, 2, ...``. A subset is accepted when
    its matrices are linearly independent and the unique solution of the
    reconstruction equations is positive. Checking only independent
    subsets loses nothing: a feasible dependent subset always contains a
    smaller feasible independent one, found at an earlier ``k``.

    Raises :class:`InfeasibleSizeError` when the support holds more than
    ``cap`` matrices and :class:`OracleTimeout` after ``budget`` seconds.
    Returns ``None`` if no ``k <= k_max`` works.
    """
    size = support_size(tpm)
    if size > cap:
        raise InfeasibleSizeError(f"{size} BN matrices in the support exceeds the cap {cap}", size)
    deadline = None if budget is None else time.monotonic() + budget
    atoms: list[BnMatrix] = list(iter_support(tpm))
    side = tpm.side
    cells = [(i, j) for j in range(side) for i in range(side) if tpm.entries[i][j] > 0]
    rhs = [tpm.entries[i][j] for i, j in cells]
    vectors = [[int(a.targets[j] == i + 1) for i, j in cells] for a in atoms]
    supports = [set(tpm.positive_rows(j)) for j in range(1, side + 1)]
    start = max(len(s) for s in supports)
    if k_max is None:
        k_max = positive_count(tpm) - side + 1
    for k in range(start, min(k_max, size) + 1):
        for combo in itertools.combinations(range(size), k):
            if deadline is not None and time.monotonic() > deadline:
                raise OracleTimeout(f"no answer within {budget} s (reached k={k})")
            if any(
                {atoms[c].targets[j] for c in combo} != supports[j] for j in range(side)
            ):
                continue
            x = _solve_exact([vectors[c] for c in combo], rhs)
            if x is not None and all(v > 0 for v in x):
                return k
    return None
