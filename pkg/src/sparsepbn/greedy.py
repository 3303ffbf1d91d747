"""Greedy entry-removal decompositions.

Each algorithm repeatedly picks a BN matrix ``A`` and a weight ``x`` with
``x * A <= R`` entrywise, subtracts ``x * A`` from the residue ``R`` and
stops when ``R`` is zero. Every subtraction zeroes at least one entry, so
the number of positive entries strictly decreases.

* ``ser1`` takes the globally smallest positive entry as the weight and
  routes every other column through its largest entry.
* ``ser2`` routes every column through its largest entry and takes the
  smallest of those as the weight.
* ``ger`` tries every candidate weight that occurs in the most columns,
  builds a matrix for each, and keeps the pair whose residue scores best
  under :func:`f_score`, which rewards values shared by many columns.

Whenever a choice is free, the smallest column and then the smallest row
win. All arithmetic happens on the integer numerators of the TPM.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import BnMatrix, Decomposition, Tpm, positive_count
from .errors import ContractError, ValidationError

__all__ = [
    "Candidate",
    "GreedyStep",
    "GreedyTrace",
    "Residue",
    "col_indices",
    "column_frequency",
    "f_score",
    "ger_candidates",
    "ger_decompose",
    "ger_step",
    "geresa",
    "larger",
    "occurrences",
    "ser1_decompose",
    "ser1_step",
    "ser2_decompose",
    "ser2_step",
]


@dataclass(frozen=True)
class Residue:
    """A non-negative integer matrix whose columns share one sum.

    ``entries`` is row-major. The common column sum is :attr:`remaining`.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise ContractError("residue must be a non-empty square matrix")
        if any(e < 0 for row in rows for e in row):
            raise ContractError("residue has a negative entry")
        if len({sum(col) for col in zip(*rows)}) != 1:
            raise ContractError("residue columns do not share a common sum")

    @classmethod
    def from_tpm(cls, tpm: Tpm) -> "Residue":
        return cls(tpm.entries)

    @property
    def side(self) -> int:
        return len(self.entries)

    @property
    def remaining(self) -> int:
        return sum(row[0] for row in self.entries)

    def is_zero(self) -> bool:
        return self.remaining == 0

    def columns(self) -> list[list[int]]:
        return [list(col) for col in zip(*self.entries)]

    def subtract(self, weight: int, matrix: BnMatrix) -> "Residue":
        rows = [list(row) for row in self.entries]
        for j, t in enumerate(matrix.targets):
            rows[t - 1][j] -= weight
        return Residue(tuple(map(tuple, rows)))


@dataclass(frozen=True)
class Candidate:
    """One weight explored by GER together with its matrix and score."""

    value: Fraction
    matrix: BnMatrix
    score: int


@dataclass(frozen=True)
class GreedyStep:
    weight: Fraction
    matrix: BnMatrix
    positives_before: int
    positives_after: int
    candidates: tuple[Candidate, ...] = ()


@dataclass(frozen=True)
class GreedyTrace:
    algorithm: str
    steps: tuple[GreedyStep, ...]

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __str__(self):
        lines = []
        for k, step in enumerate(self.steps, 1):
            lines.append(
                f"step {k}: x={step.weight} A={step.matrix} "
                f"N+ {step.positives_before} -> {step.positives_after}"
            )
            for c in step.candidates:
                lines.append(f"    v={c.value} A={c.matrix} score={c.score}")
        return "\n".join(lines)


def _as_columns(matrix) -> list[Sequence]:
    if isinstance(matrix, (Residue, Tpm)):
        matrix = matrix.entries
    return [list(col) for col in zip(*matrix)]


def col_indices(value, matrix) -> set[int]:
    """1-based indices of the columns of ``matrix`` that contain ``value``."""
    return {j for j, col in enumerate(_as_columns(matrix), 1) if value in col}


def column_frequency(value, matrix) -> int:
    """How many columns of ``matrix`` contain ``value``."""
    return len(col_indices(value, matrix))


def occurrences(value, column: Sequence) -> set[int]:
    """1-based rows of ``column`` equal to ``value``."""
    return {i for i, e in enumerate(column, 1) if e == value}


def larger(value, column: Sequence) -> set[int]:
    """1-based rows of ``column`` strictly greater than ``value``."""
    return {i for i, e in enumerate(column, 1) if e > value}


def _check_z(z: int) -> int:
    if isinstance(z, bool) or not isinstance(z, int) or z < 2:
        raise ContractError(f"score base must be an integer >= 2, got {z!r}")
    return z


def _frequencies(columns: Sequence[Sequence]) -> Counter:
    """Column frequency of every distinct positive value."""
    counts = Counter()
    for col in columns:
        counts.update({e for e in col if e > 0})
    return counts


def f_score(matrix, z: int = 10) -> int:
    """Sum over distinct positive values ``c`` of ``z ** colfreq(c)``.

    >>> f_score([[3, 3], [1, 1]], 10)
    200
    """
    z = _check_z(z)
    return sum(z**freq for freq in _frequencies(_as_columns(matrix)).values())


def _argmax_row(col: Sequence[int]) -> int:
    """0-based row of the largest entry, the smallest row on ties."""
    best = 0
    for i, e in enumerate(col):
        if e > col[best]:
            best = i
    return best


def _require_nonzero(residue: Residue):
    if residue.is_zero():
        raise ContractError("residue is already zero")


def ser1_step(residue: Residue) -> tuple[int, BnMatrix]:
    """Weight and matrix chosen by one SER1 iteration."""
    _require_nonzero(residue)
    columns = residue.columns()
    weight, at = None, None
    for j, col in enumerate(columns):
        for i, e in enumerate(col):
            if e > 0 and (weight is None or e < weight):
                weight, at = e, (i, j)
    targets = [_argmax_row(col) + 1 for col in columns]
    targets[at[1]] = at[0] + 1
    return weight, BnMatrix(tuple(targets))


def ser2_step(residue: Residue) -> tuple[int, BnMatrix]:
    """Weight and matrix chosen by one SER2 iteration."""
    _require_nonzero(residue)
    columns = residue.columns()
    rows = [_argmax_row(col) for col in columns]
    weight = min(col[i] for col, i in zip(columns, rows))
    return weight, BnMatrix(tuple(i + 1 for i in rows))


def _max_bound(columns: Sequence[Sequence[int]]) -> int:
    return min(max(col) for col in columns)


def ger_candidates(residue: Residue) -> list[int]:
    """Candidate weights for one GER iteration, ascending.

    Let ``B`` be the smallest column maximum. The candidates are the
    positive values not above ``B`` whose column frequency is the largest
    among such values.
    """
    _require_nonzero(residue)
    columns = residue.columns()
    bound = _max_bound(columns)
    freqs = {v: f for v, f in _frequencies(columns).items() if v <= bound}
    top = max(freqs.values())
    return sorted(v for v, f in freqs.items() if f == top)


def geresa(residue: Residue, value: int) -> BnMatrix:
    """Build a BN matrix for subtracting ``value`` from ``residue``.

    Columns that contain ``value`` route through its first occurrence.
    The remaining columns, in ascending order, route through the larger
    entry whose leftover ``entry - value`` appears in the most columns
    already settled, so that the next residue repeats values often.
    """
    columns = residue.columns()
    if value <= 0 or not any(value in col for col in columns):
        raise ContractError(f"{value} is not a positive entry of the residue")
    if value > _max_bound(columns):
        raise ContractError(f"{value} exceeds the smallest column maximum")

    side = len(columns)
    targets = [0] * side
    seen = Counter()
    holding = [j for j in range(side) if value in columns[j]]
    for j in holding:
        i = columns[j].index(value)
        targets[j] = i + 1
        leftover = list(columns[j])
        leftover[i] = 0
        seen.update({e for e in leftover if e > 0})
    for j in range(side):
        if targets[j]:
            continue
        col = columns[j]
        best = None
        for i, e in enumerate(col):
            if e > value and (best is None or seen[e - value] > seen[col[best] - value]):
                best = i
        targets[j] = best + 1
        leftover = list(col)
        leftover[best] -= value
        seen.update({e for e in leftover if e > 0})

    picked = [columns[j][targets[j] - 1] for j in range(side)]
    assert min(picked) == value, "chosen entries must bottom out at the weight"
    return BnMatrix(tuple(targets))


def _subtracted_columns(columns, value, matrix):
    out = [list(col) for col in columns]
    for j, t in enumerate(matrix.targets):
        out[j][t - 1] -= value
    return out


def ger_step(residue: Residue, z: int = 10) -> tuple[int, BnMatrix, list[tuple[int, BnMatrix, int]]]:
    """One GER iteration.

    Returns the chosen weight and matrix plus every explored
    ``(value, matrix, score)`` triple. The highest score wins and ties go
    to the larger value.
    """
    z = _check_z(z)
    columns = residue.columns()
    explored = []
    best = None
    for value in ger_candidates(residue):
        matrix = geresa(residue, value)
        after = _subtracted_columns(columns, value, matrix)
        score = sum(z**f for f in _frequencies(after).values())
        explored.append((value, matrix, score))
        if best is None or score > best[2] or (score == best[2] and value > best[0]):
            best = (value, matrix, score)
    return best[0], best[1], explored


def _check_tpm(tpm) -> Tpm:
    if not isinstance(tpm, Tpm):
        raise ValidationError(f"expected a Tpm, got {type(tpm).__name__}")
    return tpm


def _run(tpm: Tpm, name: str, step: Callable) -> tuple[Decomposition, GreedyTrace]:
    tpm = _check_tpm(tpm)
    unit = tpm.scale / tpm.denom
    residue = Residue.from_tpm(tpm)
    weights, matrices, steps = [], [], []
    while not residue.is_zero():
        before = positive_count(residue.entries)
        value, matrix, explored = step(residue)
        residue = residue.subtract(value, matrix)
        after = positive_count(residue.entries)
        if after >= before:
            raise AssertionError(f"{name}: positive count did not drop")
        weights.append(unit * value)
        matrices.append(matrix)
        steps.append(
            GreedyStep(
                unit * value,
                matrix,
                before,
                after,
                tuple(Candidate(unit * v, m, s) for v, m, s in explored),
            )
        )
    decomposition = Decomposition(tuple(weights), tuple(matrices), tpm.scale)
    return decomposition, GreedyTrace(name, tuple(steps))


def ser1_decompose(tpm: Tpm, *, return_trace: bool = False):
    """Decompose ``tpm`` with SER1.

    Returns a :class:`Decomposition`, or ``(decomposition, trace)`` when
    ``return_trace`` is set.
    """
    result = _run(tpm, "ser1", lambda r: (*ser1_step(r), ()))
    return result if return_trace else result[0]


def ser2_decompose(tpm: Tpm, *, return_trace: bool = False):
    """Decompose ``tpm`` with SER2. See :func:`ser1_decompose`."""
    result = _run(tpm, "ser2", lambda r: (*ser2_step(r), ()))
    return result if return_trace else result[0]


def ger_decompose(tpm: Tpm, z: int = 10) -> tuple[Decomposition, GreedyTrace]:
    """Decompose ``tpm`` with GER using score base ``z``."""
    z = _check_z(z)
    return _run(tpm, "ger", lambda r: ger_step(r, z))
