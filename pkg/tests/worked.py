"""Small hand-worked matrices shared by several test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from sparsepbn.core import Tpm

# 8x8 integer matrix with column sums 61.
Q_ROWS = [
    [32, 0, 2, 0, 0, 4, 0, 0],
    [0, 0, 0, 36, 4, 13, 0, 0],
    [0, 0, 9, 0, 0, 0, 61, 0],
    [0, 15, 0, 0, 0, 0, 0, 0],
    [0, 15, 30, 0, 0, 13, 0, 0],
    [29, 31, 20, 0, 25, 29, 0, 6],
    [0, 0, 0, 0, 32, 0, 0, 0],
    [0, 0, 0, 25, 0, 2, 0, 55],
]

Q_WEIGHTS = [2, 4, 25, 5, 10, 5, 3, 4, 3]

Q_MATRICES = [
    (1, 6, 1, 2, 7, 8, 3, 6),
    (6, 6, 3, 2, 2, 1, 3, 6),
    (6, 6, 5, 8, 6, 6, 3, 8),
    (1, 4, 3, 2, 7, 2, 3, 8),
    (1, 4, 6, 2, 7, 5, 3, 8),
    (1, 5, 5, 2, 7, 2, 3, 8),
    (1, 5, 6, 2, 7, 2, 3, 8),
    (1, 5, 6, 2, 7, 6, 3, 8),
    (1, 5, 6, 2, 7, 5, 3, 8),
]

# Two-node example with independent function choice.
F1 = ((0, 1, 0, 1), (0, 0, 1, 1))
F2 = ((1, 0, 0, 0), (1, 1, 1, 0))
C1 = (Fraction(1, 10), Fraction(9, 10))
C2 = (Fraction(3, 10), Fraction(7, 10))
INDEPENDENT_TPM = [
    ["0", ".27", ".03", "0"],
    ["1", ".63", ".07", "0"],
    ["0", ".03", ".27", "1"],
    ["0", ".07", ".63", "0"],
]


def q_tpm() -> Tpm:
    return Tpm.from_rows([[Fraction(e) for e in row] for row in Q_ROWS])


@st.composite
def tpms(draw, sides=(4, 8), max_denom=24):
    """Random rational TPMs with a shared small denominator."""
    side = draw(st.sampled_from(sides))
    denom = draw(st.integers(1, max_denom))
    columns = []
    for _ in range(side):
        cuts = sorted(draw(st.lists(st.integers(0, denom), min_size=side - 1, max_size=side - 1)))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
        columns.append(draw(st.permutations(parts)))
    rows = [[Fraction(columns[j][i], denom) for j in range(side)] for i in range(side)]
    return Tpm.from_rows(rows)
