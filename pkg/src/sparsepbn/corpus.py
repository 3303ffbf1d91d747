"""The 18 reference TPMs used for benchmarking.

Matrices are stored as integer rows over a shared denominator, or as
exact decimal strings, so that every entry is reproduced exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Tpm, as_fraction, block_double

__all__ = ["CorpusEntry", "PERTURBATIONS", "corpus", "corpus_entries", "corpus_names"]

PERTURBATIONS = ("0.01", "0.02", "0.03", "0.04")


def _rows(text: str, denom: int = 1) -> list[list[Fraction]]:
    return [
        [as_fraction(tok) / denom for tok in line.split()]
        for line in text.strip().splitlines()
    ]


def _diag(rows):
    side = len(rows)
    zeros = [Fraction(0)] * side
    return [list(r) + zeros for r in rows] + [zeros + list(r) for r in rows]


_P1 = """
.1 .5 .6 0
.4 0 .2 0
.5 .2 0 1
0 .3 .2 0
"""

_P2 = """
12 30 22 10 10 15 54 34
10 24 19 54 30 0 0 0
54 15 0 12 12 0 0 30
0 0 24 15 24 19 10 0
0 0 0 0 34 10 12 0
19 0 15 0 0 12 0 22
15 19 0 19 0 54 0 24
0 22 30 0 0 0 34 0
"""

_P3 = """
0 0 0 49 0 43 0 49
0 30 12 0 30 0 25 0
25 0 0 15 0 22 12 15
0 0 10 24 19 0 30 0
30 43 15 0 24 15 0 0
43 0 49 0 0 0 19 24
0 22 0 22 12 30 0 12
12 15 24 0 25 0 24 10
"""

_P4 = """
26 0 0 0 59 0 49 0 29 0 0 0 0 9 0 46
0 0 39 17 0 0 0 49 49 0 0 0 0 98 54 17
0 0 26 49 0 0 0 9 0 0 0 59 9 0 0 0
0 0 0 0 0 9 54 0 0 0 0 0 39 0 49 26
49 0 9 0 0 29 0 0 0 0 108 63 0 17 59 0
0 0 0 26 0 0 0 17 39 29 0 0 0 0 0 88
17 63 88 0 0 0 0 98 0 9 37 0 88 0 0 49
0 0 0 0 49 0 0 0 17 37 9 29 63 49 39 0
98 0 0 0 46 108 26 0 0 0 0 9 0 63 9 0
0 29 0 0 17 0 29 0 46 0 26 0 0 0 26 0
29 108 0 88 0 39 0 0 0 0 39 0 0 29 0 0
0 39 0 39 0 0 0 0 26 26 29 39 0 0 0 0
0 0 0 0 29 0 98 29 0 39 0 0 0 0 0 0
46 0 49 37 39 26 9 0 0 108 17 0 49 0 29 0
0 9 54 9 0 54 0 37 0 17 0 49 17 0 0 39
0 17 0 0 26 0 0 26 59 0 0 17 0 0 0 0
"""

_P5 = """
0 6 8 1 7 5 8 5 6 5 3 4 10 2 2 0
8 1 1 0 0 0 0 0 1 0 0 0 0 0 0 3
2 1 0 0 0 0 0 0 1 0 0 0 0 0 0 0
0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 1 1 8 2 4 2 5 0 3 2 3 0 3 4 1
0 0 0 1 0 1 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 1 0 0 0 1 0 0 3 0 0 2 1
0 0 0 0 0 0 0 0 1 2 2 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 3 0 0 4 2 5
0 0 0 0 0 0 0 0 0 0 0 0 0 1 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
"""

_PA1 = """
.1 .3 .2 .1
.2 .3 .2 0
0 0 .6 .4
.7 .4 0 .5
"""

_PA3 = """
.57 0 .1 0 0 .04 0 0
.14 .31 0 .5 .12 .13 .33 .06
0 .08 .4 .25 .25 0 .67 0
0 .15 0 0 0 .08 0 0
0 .15 .3 0 0 .13 0 0
.29 .31 .2 0 .25 .29 0 .39
0 0 0 0 .38 0 0 0
0 0 0 .25 0 .33 0 .55
"""

_PB1 = """
.1 .3 .5 .6
0 .7 0 0
0 0 .5 0
.9 0 0 .4
"""

_PB3 = """
1 0 0 .2 0 0 0 0
0 0 0 .2 0 0 0 0
0 0 0 0 1 0 0 0
0 0 0 0 0 0 0 0
0 0 0 .3 0 0 .5 0
0 0 0 .3 0 0 .5 0
0 1 1 0 0 .5 0 0
0 0 0 0 0 .5 0 1
"""


def _pb4_rows(d: Fraction) -> list[list[Fraction]]:
    rows = _rows(_PB3)
    rows[0][0] = 1 - d
    rows[2][4] = 1 - d
    rows[3] = [d, d, d, Fraction(0), d, Fraction(0), Fraction(0), d]
    rows[6][1] = rows[6][2] = 1 - d
    rows[7][7] = 1 - d
    return rows


@dataclass(frozen=True)
class CorpusEntry:
    """A reference TPM with its published decomposition lengths.

    ``expected`` maps ``"ger"``, ``"ser1"`` and ``"ser2"`` to a length and
    ``"momp"`` to the pair of lengths reported by two different inner
    solvers, or ``None`` when the atom space was too large to run.
    """

    name: str
    tpm: Tpm
    expected: dict = field(hash=False, compare=False)
    d: Fraction | None = None
    certified_bound: int | None = None
    ger_z: int = 10
    momp_tolerance: float = 1e-7

    @property
    def label(self) -> str:
        if self.d is None:
            return self.name
        return f"{self.name}({float(self.d):g})"


def _expect(ger, ser1, ser2, momp):
    return {"ger": ger, "ser1": ser1, "ser2": ser2, "momp": momp}


# name -> (rows, expected lengths, certified lower bound)
_FIXED = {
    "P1": (lambda: _rows(_P1), _expect(4, 7, 4, (5, 5)), None),
    "P2": (lambda: _rows(_P2, 110), _expect(6, 24, 10, (28, 17)), None),
    "P3": (lambda: _rows(_P3, 110), _expect(6, 22, 9, (24, 16)), None),
    "P4": (lambda: _rows(_P4, 265), _expect(8, 46, 13, None), None),
    "P5": (lambda: _rows(_P5, 10), _expect(7, 10, 7, (31, 29)), 7),
    "PA1": (lambda: _rows(_PA1), _expect(5, 7, 5, (5, 5)), 5),
    "PA2": (lambda: _diag(_rows(_PA1)), _expect(5, 9, 5, (5, 5)), None),
    "PA3": (lambda: _rows(_PA3), _expect(11, 20, 11, (26, 22)), None),
    "PB1": (lambda: _rows(_PB1), _expect(4, 5, 4, (6, 5)), 4),
    "PB3": (lambda: _rows(_PB3), _expect(4, 4, 4, (4, 4)), None),
}

_PB4_EXPECTED = {
    "0.01": _expect(5, 11, 5, (5, 6)),
    "0.02": _expect(5, 11, 5, (5, 5)),
    "0.03": _expect(5, 11, 5, (5, 7)),
    "0.04": _expect(5, 11, 5, (5, 6)),
}

_PB6_EXPECTED = {
    "0.01": _expect(5, 16, 5, (7, 6)),
    "0.02": _expect(5, 14, 5, (5, 6)),
    "0.03": _expect(5, 16, 5, (5, 6)),
    "0.04": _expect(5, 16, 5, (5, 6)),
}

_NAME_RE = re.compile(r"\s*(\w+)\s*(?:[:(]\s*([0-9.]+)\s*\)?)?\s*")


def _parse_name(name: str, d) -> tuple[str, Fraction | None]:
    match = _NAME_RE.fullmatch(name)
    if not match:
        raise KeyError(f"unknown corpus entry {name!r}")
    base, inline = match.groups()
    if d is None:
        d = inline
    return base.upper(), None if d is None else as_fraction(str(d))


def corpus(name: str, d=None) -> CorpusEntry:
    """Look up a reference TPM by name.

    The perturbed families take ``d`` in {0.01, 0.02, 0.03, 0.04}, either
    as an argument or inline as ``"PB4:0.02"`` or ``"PB4(0.02)"``.
    """
    base, d = _parse_name(name, d)
    if base in _FIXED:
        if d is not None:
            raise KeyError(f"{base} takes no parameter")
        rows, expected, certified = _FIXED[base]
        z = 2 if base == "PA3" else 10
        tol = 1e-4 if base == "P5" else 1e-7
        return CorpusEntry(
            base, Tpm.from_rows(rows()), expected, None, certified, z, tol
        )
    if base in ("PB4", "PB6"):
        keys = {as_fraction(p): p for p in PERTURBATIONS}
        if d not in keys:
            raise KeyError(f"{base} needs d in {', '.join(PERTURBATIONS)}, got {d}")
        tpm = Tpm.from_rows(_pb4_rows(d))
        if base == "PB6":
            return CorpusEntry(base, block_double(tpm), _PB6_EXPECTED[keys[d]], d)
        return CorpusEntry(base, tpm, _PB4_EXPECTED[keys[d]], d)
    raise KeyError(f"unknown corpus entry {name!r}")


def corpus_names() -> list[str]:
    """Labels of all 18 entries in table order."""
    names = ["P1", "P2", "P3", "P4", "P5", "PA1", "PA2", "PA3", "PB1", "PB3"]
    names += [f"PB4({d})" for d in PERTURBATIONS]
    names += [f"PB6({d})" for d in PERTURBATIONS]
    return names


def corpus_entries() -> list[CorpusEntry]:
    return [corpus(name) for name in corpus_names()]
