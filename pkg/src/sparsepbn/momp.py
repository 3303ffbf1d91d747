"""Modified orthogonal matching pursuit over BN-matrix atoms.

The dictionary holds one atom per BN matrix in the support of ``P``,
ordered as a mixed-radix number whose last column is the least
significant digit. It is never materialized. Selecting the atom most
correlated with the residual splits into one argmax per column, and the
stopping error is accumulated over the atom space in chunks.

This is the one floating-point module in the package. Its output is an
:class:`ApproximateDecomposition` and is never passed to the exact
verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BnMatrix, Tpm
from .errors import ContractError, InfeasibleSizeError, SolverError

__all__ = [
    "ApproximateDecomposition",
    "AtomSpace",
    "MompState",
    "momp_decompose",
    "momp_error",
    "restricted_simplex_ls",
    "streaming_argmax",
]

DEFAULT_GUARD = 10**9
DROP_BELOW = 1e-12
KKT_TOL = 1e-9


class AtomSpace:
    """Mixed-radix indexing of the BN matrices inside a TPM's support.

    Parameters
    ----------
    supports : sequence of sequence of int
        For each column, the ascending 1-based rows with a positive entry.
    """

    def __init__(self, supports: Sequence[Sequence[int]]):
        self.supports = tuple(tuple(s) for s in supports)
        if not self.supports or any(not s for s in self.supports):
            raise ContractError("every column needs at least one positive row")
        self.radices = tuple(len(s) for s in self.supports)
        self.size = math.prod(self.radices)
        self._lookup = [{row: k for k, row in enumerate(s)} for s in self.supports]

    @classmethod
    def from_tpm(cls, tpm: Tpm) -> "AtomSpace":
        return cls([tpm.positive_rows(j) for j in range(1, tpm.side + 1)])

    @property
    def side(self) -> int:
        return len(self.supports)

    def encode(self, targets: Sequence[int]) -> int:
        index = 0
        for lookup, radix, t in zip(self._lookup, self.radices, targets):
            if t not in lookup:
                raise ContractError(f"target {t} is outside the support")
            index = index * radix + lookup[t]
        return index

    def decode(self, index: int) -> BnMatrix:
        if not 0 <= index < self.size:
            raise ContractError(f"atom index {index} out of range")
        digits = []
        for radix in reversed(self.radices):
            index, digit = divmod(index, radix)
            digits.append(digit)
        digits.reverse()
        return BnMatrix(tuple(s[d] for s, d in zip(self.supports, digits)))

    def digits(self, start: int, stop: int) -> np.ndarray:
        """Per-column digit of every atom in ``range(start, stop)``.

        Returns an integer array of shape ``(stop - start, side)``.
        """
        index = np.arange(start, stop, dtype=np.int64)
        out = np.empty((index.size, self.side), dtype=np.int64)
        for j in range(self.side - 1, -1, -1):
            index, out[:, j] = np.divmod(index, self.radices[j])
        return out

    def dense(self) -> np.ndarray:
        """Every atom as a column of vec'd matrices, shape ``(side**2, size)``.

        Only meant for small spaces, mainly as a brute-force reference.
        """
        side = self.side
        out = np.zeros((side * side, self.size))
        for k in range(self.size):
            out[:, k] = vectorize(self.decode(k))
        return out


def vectorize(matrix: BnMatrix) -> np.ndarray:
    """Column-major flattening of a BN matrix."""
    side = matrix.side
    v = np.zeros(side * side)
    for j, t in enumerate(matrix.targets):
        v[j * side + t - 1] = 1.0
    return v


def _gains(space: AtomSpace, residual: np.ndarray) -> list[np.ndarray]:
    """Residual entries on each column's support rows."""
    return [residual[np.asarray(s) - 1, j] for j, s in enumerate(space.supports)]


def streaming_argmax(space: AtomSpace, residual: np.ndarray) -> int:
    """Index of the atom with the largest inner product with ``residual``.

    The inner product of an atom with a matrix is the sum of the entries
    it selects, one per column, so each column is maximized on its own.
    Ties go to the smallest row.
    """
    residual = np.asarray(residual, dtype=float)
    index = 0
    for radix, gain in zip(space.radices, _gains(space, residual)):
        index = index * radix + int(np.argmax(gain))
    return index


def _atom_products(space: AtomSpace, residual: np.ndarray, indices) -> np.ndarray:
    gains = _gains(space, residual)
    out = np.zeros(len(indices))
    for k, index in enumerate(indices):
        matrix = space.decode(int(index))
        out[k] = sum(g[space._lookup[j][t]] for j, (g, t) in enumerate(zip(gains, matrix.targets)))
    return out


def momp_error(
    space: AtomSpace,
    residual: np.ndarray,
    support: Sequence[int],
    weights: Sequence[float],
    chunk: int = 1 << 18,
) -> float:
    """Stopping error of the pursuit for the current iterate.

    With ``g = A.T @ vec(residual)`` and ``lam = x @ g`` the error is
    ``||g[S] - lam|| + ||max(g[~S] - lam, 0)||``, where ``S`` holds the
    atoms with positive weight. It is accumulated over the atom space in
    chunks, never storing more than ``chunk`` inner products.
    """
    residual = np.asarray(residual, dtype=float)
    weights = np.asarray(weights, dtype=float)
    active = [int(s) for s, w in zip(support, weights) if w > 0]
    active_w = np.array([w for w in weights if w > 0])
    on = _atom_products(space, residual, active)
    lam = float(active_w @ on) if active else 0.0
    first = float(np.sum((on - lam) ** 2))

    gains = _gains(space, residual)
    marked = np.array(sorted(active), dtype=np.int64)
    # Trailing columns whose joint products fit in one chunk form a table;
    # each setting of the leading columns shifts that table by a constant.
    split, block = space.side, 1
    while split > 0 and block * space.radices[split - 1] <= chunk:
        split -= 1
        block *= space.radices[split]
    table = _outer_sum(gains[split:])
    second = 0.0
    for p, base in enumerate(_outer_sum(gains[:split])):
        start = p * block
        excess = np.maximum(table + (base - lam), 0.0)
        lo, hi = np.searchsorted(marked, [start, start + block])
        excess[marked[lo:hi] - start] = 0.0
        second += float(excess @ excess)
    return math.sqrt(first) + math.sqrt(second)


def _outer_sum(gains: Sequence[np.ndarray]) -> np.ndarray:
    """Every sum picking one entry per array, last array varying fastest."""
    out = np.zeros(1)
    for gain in gains:
        out = (out[:, None] + gain[None, :]).ravel()
    return out


def restricted_simplex_ls(
    atoms: np.ndarray,
    target: np.ndarray,
    start: np.ndarray | None = None,
    tol: float = KKT_TOL,
    max_iter: int | None = None,
) -> np.ndarray:
    """Minimize ``0.5 * ||target - atoms @ x||^2`` over the probability simplex.

    A primal active-set method. Each step solves the equality-constrained
    problem on the free coordinates, then either moves to it, stops at the
    first coordinate that would turn negative, or releases the bound with
    the most negative multiplier. ``start`` must lie on the simplex; the
    uniform vector is used by default.

    Raises :class:`SolverError` if the KKT conditions are not met to
    ``tol`` within ``max_iter`` steps.
    """
    atoms = np.asarray(atoms, dtype=float)
    target = np.asarray(target, dtype=float)
    m = atoms.shape[1]
    if m == 0:
        raise ContractError("the support must not be empty")
    gram = atoms.T @ atoms
    linear = atoms.T @ target
    x = np.full(m, 1.0 / m) if start is None else np.asarray(start, dtype=float).copy()
    if np.any(x < 0) or abs(x.sum() - 1) > 1e-12:
        raise ContractError("start must lie on the probability simplex")
    free = x > 0
    max_iter = max_iter or 50 * m + 100

    for _ in range(max_iter):
        idx = np.flatnonzero(free)
        k = idx.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = gram[np.ix_(idx, idx)]
        kkt[:k, k] = kkt[k, :k] = 1.0
        rhs = np.append(linear[idx], 1.0)
        y = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
        step = y - x[idx]
        if np.all(y >= -1e-15):
            x[:] = 0.0
            x[idx] = np.maximum(y, 0.0)
            x /= x.sum()
            grad = gram @ x - linear
            mu = float(np.mean(grad[idx]))
            slack = grad - mu
            slack[idx] = np.inf
            worst = int(np.argmin(slack))
            if slack[worst] >= -tol:
                return x
            free[worst] = True
            continue
        shrinking = step < 0
        ratios = x[idx][shrinking] / -step[shrinking]
        alpha = float(np.min(ratios))
        x[idx] += alpha * step
        blocked = idx[shrinking][int(np.argmin(ratios))]
        x[blocked] = 0.0
        x = np.maximum(x, 0.0)
        x /= x.sum()
        free[blocked] = False
    raise SolverError(f"no KKT point within {max_iter} active-set steps")


@dataclass(frozen=True)
class MompState:
    support: tuple[int, ...]
    weights: tuple[float, ...]
    residual: np.ndarray
    error: float


@dataclass(frozen=True)
class ApproximateDecomposition:
    """Float weights over BN matrices; reconstructs ``P`` only approximately."""

    weights: tuple[float, ...]
    matrices: tuple[BnMatrix, ...]
    scale: float
    error: float
    iterations: int
    approximate: bool = True

    @property
    def length(self) -> int:
        return len(self.weights)

    def __len__(self):
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        side = self.matrices[0].side
        out = np.zeros((side, side))
        for w, m in zip(self.weights, self.matrices):
            out[np.asarray(m.targets) - 1, np.arange(side)] += w
        return out

    def __str__(self):
        return " + ".join(f"{w:.6g}{m}" for w, m in zip(self.weights, self.matrices))


def momp_decompose(
    tpm: Tpm,
    tolerance: float = 1e-7,
    guard: int = DEFAULT_GUARD,
    max_iter: int | None = None,
    return_states: bool = False,
):
    """Approximate decomposition of ``tpm`` by matching pursuit on the simplex.

    Each round adds the atom most correlated with the residual, re-solves
    the least-squares problem on the support, and stops once
    :func:`momp_error` is at most ``tolerance``. The first round starts
    from that single atom. Coefficients below ``1e-12`` are dropped.

    Raises :class:`InfeasibleSizeError` when the atom space exceeds
    ``guard``.
    """
    space = AtomSpace.from_tpm(tpm)
    if space.size > guard:
        raise InfeasibleSizeError(
            f"{space.size} atoms exceed the limit of {guard}", space.size
        )
    side = tpm.side
    target = tpm.to_numpy()
    b = target.flatten(order="F")
    max_iter = max_iter or 4 * side * side
    support: list[int] = []
    columns: list[np.ndarray] = []
    x = np.zeros(0)
    residual = target.copy()
    states = []
    error = math.inf
    while error > tolerance:
        if len(support) >= max_iter:
            raise SolverError(f"no convergence after {max_iter} atoms (error {error:.3g})")
        chosen = streaming_argmax(space, residual)
        if chosen in support:
            raise SolverError(f"atom {chosen} selected twice (error {error:.3g})")
        support.append(chosen)
        columns.append(vectorize(space.decode(chosen)))
        start = np.append(x, 0.0) if support[:-1] else np.ones(1)
        if start.sum() <= 0:
            start = np.full(len(support), 1.0 / len(support))
        x = restricted_simplex_ls(np.column_stack(columns), b, start)
        residual = (b - np.column_stack(columns) @ x).reshape((side, side), order="F")
        error = momp_error(space, residual, support, x)
        if return_states:
            states.append(MompState(tuple(support), tuple(x), residual.copy(), error))

    keep = [k for k in range(len(support)) if x[k] >= DROP_BELOW]
    weights = x[keep] / x[keep].sum()
    scale = float(tpm.scale)
    result = ApproximateDecomposition(
        tuple(float(w) * scale for w in weights),
        tuple(space.decode(support[k]) for k in keep),
        scale,
        error,
        len(support),
    )
    return (result, states) if return_states else result
