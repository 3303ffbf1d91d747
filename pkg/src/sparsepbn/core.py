"""Exact matrix types, validity predicates and decomposition checks.

A transition probability matrix (TPM) is column stochastic: column ``j``
holds the distribution of the next state given current state ``j``. All
row and column indices exposed by this module are 1-based.

Entries are exact rationals. A :class:`Tpm` stores its matrix as
``scale * entries / denom`` where ``entries`` is a non-negative integer
matrix whose columns all sum to ``denom``. Every algorithm in the package
works on ``entries`` directly, so weights come out as integers over
``denom`` without any rational arithmetic in the inner loops.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Iterator, Sequence

from .errors import ContractError, DimensionError, ParseError, ValidationError

__all__ = [
    "BnMatrix",
    "Check",
    "Decomposition",
    "Tpm",
    "VerificationReport",
    "as_fraction",
    "block_double",
    "format_fraction",
    "in_support",
    "iter_support",
    "lift_block_double",
    "positive_count",
    "support_size",
    "verify_decomposition",
]

_FRACTION_RE = re.compile(r"[+-]?\d+/\d+")
_DECIMAL_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)")


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Strings may be integers, plain decimals (``"0.35"``) or ``"a/b"``.
    Scientific notation is refused because its precision is ambiguous.
    Python floats go through their shortest ``repr`` so ``0.3`` becomes
    ``3/10`` rather than the nearest binary double.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a number: {value!r}")
    if isinstance(value, (Integral, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if _FRACTION_RE.fullmatch(text):
            num, den = text.split("/")
            if int(den) == 0:
                raise ParseError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        if _DECIMAL_RE.fullmatch(text):
            return Fraction(Decimal(text))
        raise ParseError(f"cannot read {value!r} as an exact number")
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ParseError(f"not finite: {value!r}")
        return Fraction(value)
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"not a number: {value!r}") from None
    if not math.isfinite(as_float):
        raise ParseError(f"not finite: {value!r}")
    return Fraction(Decimal(repr(as_float)))


def format_fraction(value: Fraction) -> str:
    """Render ``value`` as ``"a/b"``, or ``"a"`` when it is an integer."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _check_side(side: int) -> int:
    if side < 1 or side & (side - 1):
        raise DimensionError(f"matrix side {side} is not a power of two")
    return side.bit_length() - 1


@dataclass(frozen=True)
class Tpm:
    """A column-stochastic matrix scaled so that every column sums to ``scale``.

    Parameters
    ----------
    entries : tuple of tuple of int
        Row-major non-negative integers; every column sums to ``denom``.
    denom : int
        The least common denominator of the normalized matrix.
    scale : Fraction
        The common column sum ``r0`` of the rational matrix.

    Use :meth:`from_rows` to build one from arbitrary exact numbers.
    """

    entries: tuple[tuple[int, ...], ...]
    denom: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        rows = tuple(tuple(int(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "scale", Fraction(self.scale))
        side = len(rows)
        _check_side(side)
        if any(len(row) != side for row in rows):
            raise DimensionError("matrix is not square")
        if self.scale <= 0:
            raise ValidationError("scale must be positive")
        if self.denom <= 0:
            raise ValidationError("denominator must be positive")
        if any(e < 0 for row in rows for e in row):
            raise ValidationError("matrix has a negative entry")
        for j in range(side):
            total = sum(row[j] for row in rows)
            if total != self.denom:
                raise ValidationError(
                    f"column {j + 1} sums to {total}/{self.denom}, expected 1"
                )
        if math.gcd(self.denom, *(e for row in rows for e in row)) != 1:
            raise ValidationError("denominator is not minimal")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], scale=None) -> "Tpm":
        """Build a TPM from rows of exact numbers.

        All columns must share one sum, which becomes ``scale``. Passing
        ``scale`` rescales the matrix to that column sum instead.
        """
        matrix = [[as_fraction(e) for e in row] for row in rows]
        side = len(matrix)
        _check_side(side)
        if any(len(row) != side for row in matrix):
            raise DimensionError("matrix is not square")
        if any(e < 0 for row in matrix for e in row):
            raise ValidationError("matrix has a negative entry")
        sums = {sum(row[j] for row in matrix) for j in range(side)}
        if len(sums) != 1:
            raise ValidationError(
                "columns do not share a common sum: "
                + ", ".join(sorted(format_fraction(s) for s in sums))
            )
        total = sums.pop()
        if total <= 0:
            raise ValidationError("columns must have a positive sum")
        normalized = [[e / total for e in row] for row in matrix]
        denom = math.lcm(*(e.denominator for row in normalized for e in row))
        entries = tuple(
            tuple(e.numerator * (denom // e.denominator) for e in row)
            for row in normalized
        )
        return cls(entries, denom, total if scale is None else as_fraction(scale))

    @classmethod
    def from_bn(cls, matrix: "BnMatrix", scale=1) -> "Tpm":
        """The TPM ``scale * A`` for a BN matrix ``A``."""
        return cls(matrix.to_dense(), 1, as_fraction(scale))

    @property
    def side(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        """Number of Boolean nodes, so that ``side == 2 ** n``."""
        return self.side.bit_length() - 1

    def value(self, i: int, j: int) -> Fraction:
        """The rational entry at 1-based row ``i`` and column ``j``."""
        return self.scale * Fraction(self.entries[i - 1][j - 1], self.denom)

    def to_fractions(self) -> list[list[Fraction]]:
        factor = self.scale / self.denom
        return [[factor * e for e in row] for row in self.entries]

    def to_numpy(self, normalized: bool = True):
        """Float copy of the matrix, column sums 1 unless ``normalized`` is false."""
        import numpy as np

        factor = 1.0 if normalized else float(self.scale)
        return np.array(self.entries, dtype=float) * (factor / self.denom)

    def normalized(self) -> "Tpm":
        return Tpm(self.entries, self.denom)

    def with_scale(self, scale) -> "Tpm":
        return Tpm(self.entries, self.denom, as_fraction(scale))

    def column(self, j: int) -> tuple[int, ...]:
        """Integer numerators of 1-based column ``j``."""
        return tuple(row[j - 1] for row in self.entries)

    def positive_rows(self, j: int) -> tuple[int, ...]:
        """The 1-based rows where column ``j`` is positive, ascending."""
        return tuple(i + 1 for i, row in enumerate(self.entries) if row[j - 1] > 0)

    def __str__(self):
        cells = [[format_fraction(e) for e in row] for row in self.to_fractions()]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


@dataclass(frozen=True)
class BnMatrix:
    """A Boolean-network matrix given by its 1-based column targets.

    Column ``j`` is the unit vector with its single 1 in row ``targets[j]``.
    """

    targets: tuple[int, ...]

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        side = len(targets)
        _check_side(side)
        bad = [t for t in targets if not 1 <= t <= side]
        if bad:
            raise DimensionError(f"targets {bad} out of range 1..{side}")

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[int]]) -> "BnMatrix":
        side = len(matrix)
        targets = []
        for j in range(side):
            column = [matrix[i][j] for i in range(side)]
            if sorted(column) != [0] * (side - 1) + [1]:
                raise ValidationError(f"column {j + 1} is not a unit vector")
            targets.append(column.index(1) + 1)
        return cls(tuple(targets))

    @property
    def side(self) -> int:
        return len(self.targets)

    def to_dense(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(int(t == i) for t in self.targets) for i in range(1, self.side + 1)
        )

    def __iter__(self):
        return iter(self.targets)

    def __str__(self):
        return "⟨" + ",".join(map(str, self.targets)) + "⟩"


@dataclass(frozen=True)
class Decomposition:
    """An ordered list of weighted BN matrices meant to sum to a TPM.

    Construction only checks shapes; use :func:`verify_decomposition` to
    check the weights and the reconstruction against a particular TPM.
    """

    weights: tuple[Fraction, ...]
    matrices: tuple[BnMatrix, ...]
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        weights = tuple(as_fraction(w) for w in self.weights)
        matrices = tuple(
            m if isinstance(m, BnMatrix) else BnMatrix(tuple(m)) for m in self.matrices
        )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "scale", as_fraction(self.scale))
        if len(weights) != len(matrices):
            raise ContractError("weights and matrices differ in length")
        if not matrices:
            raise ContractError("a decomposition needs at least one term")
        if len({m.side for m in matrices}) != 1:
            raise DimensionError("matrices of different sides")

    @property
    def length(self) -> int:
        return len(self.weights)

    def __len__(self):
        return len(self.weights)

    @property
    def side(self) -> int:
        return self.matrices[0].side

    def terms(self) -> Iterator[tuple[Fraction, BnMatrix]]:
        return zip(self.weights, self.matrices)

    def reconstruct(self) -> list[list[Fraction]]:
        """The matrix ``sum(x_k * A_k)`` with exact entries."""
        side = self.side
        out = [[Fraction(0)] * side for _ in range(side)]
        for weight, matrix in self.terms():
            for j, t in enumerate(matrix.targets):
                out[t - 1][j] += weight
        return out

    def normalized(self) -> "Decomposition":
        """The same matrices with weights divided by the scale."""
        return Decomposition(
            tuple(w / self.scale for w in self.weights), self.matrices, Fraction(1)
        )

    def rescaled(self, scale) -> "Decomposition":
        factor = as_fraction(scale) / self.scale
        return Decomposition(
            tuple(w * factor for w in self.weights), self.matrices, as_fraction(scale)
        )

    def is_internally_consistent(self) -> bool:
        """Positive weights summing to the scale, and distinct matrices."""
        return (
            all(w > 0 for w in self.weights)
            and sum(self.weights) == self.scale
            and len(set(self.matrices)) == len(self.matrices)
        )

    def __str__(self):
        return " + ".join(f"{format_fraction(w)}{m}" for w, m in self.terms())


def positive_count(matrix) -> int:
    """Number of strictly positive entries of a matrix.

    Accepts a :class:`Tpm`, a :class:`BnMatrix`, a numpy array or nested
    sequences.
    """
    if isinstance(matrix, Tpm):
        matrix = matrix.entries
    elif isinstance(matrix, BnMatrix):
        return matrix.side
    return sum(1 for row in matrix for e in row if e > 0)


def in_support(matrix: BnMatrix, tpm: Tpm) -> bool:
    """True iff every target of ``matrix`` hits a positive entry of ``tpm``."""
    if matrix.side != tpm.side:
        raise DimensionError(f"side {matrix.side} does not match TPM side {tpm.side}")
    return all(tpm.entries[t - 1][j] > 0 for j, t in enumerate(matrix.targets))


def support_size(tpm: Tpm) -> int:
    """How many BN matrices lie in the support of ``tpm``."""
    return math.prod(len(tpm.positive_rows(j)) for j in range(1, tpm.side + 1))


def iter_support(tpm: Tpm) -> Iterator[BnMatrix]:
    """All BN matrices inside the support of ``tpm`` in lexicographic order."""
    supports = [tpm.positive_rows(j) for j in range(1, tpm.side + 1)]
    for targets in itertools.product(*supports):
        yield BnMatrix(targets)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of every individual check made by :func:`verify_decomposition`."""

    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def __str__(self):
        lines = []
        for c in self.checks:
            status = "ok  " if c.passed else "FAIL"
            lines.append(f"{status} {c.name}" + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def verify_decomposition(decomposition: Decomposition, tpm: Tpm) -> VerificationReport:
    """Check a decomposition against ``tpm`` exactly.

    Failures are recorded in the report rather than raised.
    """
    d, checks = decomposition, []
    if d.side != tpm.side:
        detail = f"decomposition side {d.side}, TPM side {tpm.side}"
        return VerificationReport((Check("side", False, detail),))
    checks.append(Check("side", True, ""))

    bad = [k + 1 for k, w in enumerate(d.weights) if w <= 0]
    checks.append(Check("weights_positive", not bad, f"terms {bad}" if bad else ""))

    total = sum(d.weights, Fraction(0))
    ok = total == tpm.scale
    detail = "" if ok else f"sum {format_fraction(total)} != {format_fraction(tpm.scale)}"
    checks.append(Check("weight_sum", ok, detail))

    seen, dupes = {}, []
    for k, m in enumerate(d.matrices, 1):
        if m in seen:
            dupes.append((seen[m], k))
        seen.setdefault(m, k)
    checks.append(Check("distinct", not dupes, f"repeated terms {dupes}" if dupes else ""))

    outside = [k for k, m in enumerate(d.matrices, 1) if not in_support(m, tpm)]
    checks.append(
        Check("in_support", not outside, f"terms {outside}" if outside else "")
    )

    rebuilt = d.reconstruct()
    target = tpm.to_fractions()
    wrong = [
        (i + 1, j + 1)
        for i in range(tpm.side)
        for j in range(tpm.side)
        if rebuilt[i][j] != target[i][j]
    ]
    detail = f"{len(wrong)} entries differ, first at {wrong[0]}" if wrong else ""
    checks.append(Check("reconstruction", not wrong, detail))
    return VerificationReport(tuple(checks))


def block_double(tpm: Tpm) -> Tpm:
    """The block-diagonal matrix ``diag(P, P)``."""
    side = tpm.side
    zeros = (0,) * side
    top = tuple(row + zeros for row in tpm.entries)
    bottom = tuple(zeros + row for row in tpm.entries)
    return Tpm(top + bottom, tpm.denom, tpm.scale)


def lift_block_double(decomposition: Decomposition, tpm: Tpm | None = None) -> Decomposition:
    """Turn a decomposition of ``P`` into one of ``diag(P, P)``.

    Each matrix keeps its targets on the first block and repeats them,
    shifted by the side, on the second block. Weights and length carry
    over unchanged. When ``tpm`` is given the input is verified against it,
    otherwise only its internal consistency is checked.
    """
    if tpm is not None:
        if not verify_decomposition(decomposition, tpm):
            raise ContractError("decomposition does not verify against the TPM")
    elif not decomposition.is_internally_consistent():
        raise ContractError("decomposition is not internally consistent")
    side = decomposition.side
    lifted = tuple(
        BnMatrix(m.targets + tuple(side + t for t in m.targets))
        for m in decomposition.matrices
    )
    return Decomposition(decomposition.weights, lifted, decomposition.scale)
