"""Reading and writing matrices and decompositions.

Matrix files are plain text with one row per line and whitespace between
entries. Entries may be integers, decimals such as ``0.35`` or fractions
such as ``7/20``. Blank lines and lines starting with ``#`` are ignored.

Decompositions are stored as JSON::

    {"side": 4, "r0": "1/1",
     "terms": [{"weight": "1/5", "targets": [2, 3, 2, 3]}, ...]}

Every number that could be fractional is written as an ``"a/b"`` string
so files round-trip exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import BnMatrix, Decomposition, Tpm, as_fraction, format_fraction
from .errors import ParseError

__all__ = [
    "decomposition_from_dict",
    "decomposition_to_dict",
    "dumps_decomposition",
    "format_tpm",
    "loads_decomposition",
    "parse_tpm",
    "read_tpm",
]


def _ratio(value) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_tpm(text: str, r0=None) -> Tpm:
    """Parse the text form of a TPM.

    The common column sum becomes the scale ``r0`` unless ``r0`` is given,
    in which case the matrix is rescaled to it.

    Raises :class:`ParseError` for unreadable or ragged input and
    :class:`~sparsepbn.errors.ValidationError` for negative entries,
    unequal column sums or a side that is not a power of two.
    """
    rows = []
    for number, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([as_fraction(tok) for tok in line.split()])
        except ParseError as err:
            raise ParseError(f"line {number}: {err}") from None
    if not rows:
        raise ParseError("no matrix rows found")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ParseError(f"ragged rows: lengths {sorted(widths)}")
    if widths.pop() != len(rows):
        raise ParseError(f"matrix is not square: {len(rows)} rows of {len(rows[0])}")
    return Tpm.from_rows(rows, r0)


def read_tpm(path, r0=None) -> Tpm:
    with open(path, encoding="utf-8") as handle:
        return parse_tpm(handle.read(), r0)


def format_tpm(tpm: Tpm) -> str:
    """Text form of ``tpm`` that :func:`parse_tpm` reads back unchanged."""
    header = f"# {tpm.side}x{tpm.side}, columns sum to {format_fraction(tpm.scale)}"
    return f"{header}\n{tpm}\n"


def decomposition_to_dict(decomposition: Decomposition) -> dict:
    return {
        "side": decomposition.side,
        "r0": _ratio(decomposition.scale),
        "terms": [
            {"weight": _ratio(w), "targets": list(m.targets)}
            for w, m in decomposition.terms()
        ],
    }


def decomposition_from_dict(data: dict) -> Decomposition:
    try:
        side = int(data["side"])
        scale = as_fraction(str(data["r0"]))
        weights, matrices = [], []
        for term in data["terms"]:
            weights.append(as_fraction(str(term["weight"])))
            matrices.append(BnMatrix(tuple(int(t) for t in term["targets"])))
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"malformed decomposition: {err}") from None
    if any(m.side != side for m in matrices):
        raise ParseError(f"terms do not all have side {side}")
    return Decomposition(tuple(weights), tuple(matrices), scale)


def dumps_decomposition(decomposition: Decomposition, indent: int | None = 2) -> str:
    return json.dumps(decomposition_to_dict(decomposition), indent=indent)


def loads_decomposition(text: str) -> Decomposition:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ParseError("decomposition JSON must be an object")
    return decomposition_from_dict(data)
