"""Probabilistic Boolean networks built from decompositions.

Global states are numbered ``1 .. 2**n`` by reading the node values
``(v_1, ..., v_n)`` as a binary number with ``v_1`` most significant and
adding one. A BN matrix sends state ``j`` to state ``targets[j]``, so the
Boolean function of node ``i`` is bit ``i`` of ``targets[j] - 1``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import BnMatrix, Decomposition, Tpm, as_fraction, format_fraction
from .errors import ContractError, DimensionError

__all__ = [
    "Pbn",
    "TruthTable",
    "assemble_pbn",
    "bn_to_truth_table",
    "pbn_to_tpm",
    "truth_table_to_bn",
]

Bits = tuple[int, ...]


def _node_count(side: int) -> int:
    if side < 2 or side & (side - 1):
        raise ContractError(f"side {side} is not a power of two greater than 1")
    return side.bit_length() - 1


def _state_bits(state: int, n: int) -> Bits:
    """Node values of 1-based ``state``, first node first."""
    return tuple((state - 1) >> (n - 1 - i) & 1 for i in range(n))


@dataclass(frozen=True)
class TruthTable:
    """Output bit of every node for every global state.

    ``outputs[i][j]`` is node ``i + 1``'s next value in state ``j + 1``.
    """

    n: int
    outputs: tuple[Bits, ...]

    def __post_init__(self):
        outputs = tuple(tuple(int(b) for b in row) for row in self.outputs)
        object.__setattr__(self, "outputs", outputs)
        if len(outputs) != self.n or any(len(row) != 2**self.n for row in outputs):
            raise DimensionError(f"expected {self.n} rows of {2 ** self.n} bits")
        if any(b not in (0, 1) for row in outputs for b in row):
            raise ContractError("truth table entries must be 0 or 1")

    def __str__(self):
        header = " ".join(f"v{i + 1}" for i in range(self.n))
        funcs = " ".join(f"f{i + 1}" for i in range(self.n))
        lines = [f"state | {header} | {funcs}"]
        for j in range(2**self.n):
            bits = " ".join(f"{b:>{len(str(i + 1)) + 1}}" for i, b in enumerate(_state_bits(j + 1, self.n)))
            outs = " ".join(f"{row[j]:>{len(str(i + 1)) + 1}}" for i, row in enumerate(self.outputs))
            lines.append(f"{j + 1:>5} | {bits} | {outs}")
        return "\n".join(lines)


def bn_to_truth_table(matrix: BnMatrix) -> TruthTable:
    """The Boolean functions of the network whose transition matrix is ``matrix``."""
    n = _node_count(matrix.side)
    bits = [_state_bits(t, n) for t in matrix.targets]
    return TruthTable(n, tuple(tuple(b[i] for b in bits) for i in range(n)))


def truth_table_to_bn(table: TruthTable) -> BnMatrix:
    """Inverse of :func:`bn_to_truth_table`."""
    n = table.n
    targets = []
    for j in range(2**n):
        value = 0
        for i in range(n):
            value = value << 1 | table.outputs[i][j]
        targets.append(value + 1)
    return BnMatrix(tuple(targets))


@dataclass(frozen=True)
class Pbn:
    """Per-node function lists and a distribution over function choices.

    ``functions[i]`` lists the distinct truth columns available to node
    ``i + 1``. ``pmf`` maps a tuple of 1-based function indices, one per
    node, to its probability.
    """

    functions: tuple[tuple[Bits, ...], ...]
    pmf: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        functions = tuple(tuple(tuple(f) for f in fs) for fs in self.functions)
        pmf = {tuple(k): as_fraction(v) for k, v in dict(self.pmf).items()}
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "pmf", pmf)
        n = len(functions)
        if n == 0:
            raise ContractError("a network needs at least one node")
        for i, fs in enumerate(functions, 1):
            if not fs:
                raise ContractError(f"node {i} has no functions")
            if len(set(fs)) != len(fs):
                raise ContractError(f"node {i} lists a function twice")
            if any(len(f) != 2**n for f in fs):
                raise DimensionError(f"node {i} functions need {2 ** n} bits")
        for key, p in pmf.items():
            if len(key) != n or any(not 1 <= k <= len(fs) for k, fs in zip(key, functions)):
                raise ContractError(f"bad function index tuple {key}")
            if p <= 0:
                raise ContractError(f"non-positive probability for {key}")
        if sum(pmf.values()) != 1:
            raise ContractError("probabilities do not sum to 1")

    @classmethod
    def independent(
        cls,
        functions: Sequence[Sequence[Bits]],
        probabilities: Sequence[Sequence],
    ) -> "Pbn":
        """Network where each node picks its function on its own.

        ``probabilities[i][k]`` is the chance that node ``i + 1`` uses
        function ``k + 1``; each list must sum to 1.
        """
        probs = [[as_fraction(p) for p in ps] for ps in probabilities]
        if len(probs) != len(functions):
            raise ContractError("one probability list per node is required")
        for i, (ps, fs) in enumerate(zip(probs, functions), 1):
            if len(ps) != len(fs) or sum(ps) != 1 or any(p < 0 for p in ps):
                raise ContractError(f"node {i} probabilities are invalid")
        pmf = {}
        for choice in itertools.product(*(range(len(ps)) for ps in probs)):
            p = Fraction(1)
            for ps, k in zip(probs, choice):
                p *= ps[k]
            if p > 0:
                pmf[tuple(k + 1 for k in choice)] = p
        return cls(tuple(tuple(fs) for fs in functions), pmf)

    @property
    def n(self) -> int:
        return len(self.functions)

    def network(self, choice: Sequence[int]) -> BnMatrix:
        """The BN matrix obtained by fixing one function per node."""
        table = TruthTable(
            self.n, tuple(self.functions[i][k - 1] for i, k in enumerate(choice))
        )
        return truth_table_to_bn(table)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "states": [list(_state_bits(j, self.n)) for j in range(1, 2**self.n + 1)],
            "functions": [[list(f) for f in fs] for fs in self.functions],
            "pmf": [
                {"choice": list(k), "probability": format_fraction(p)}
                for k, p in self.pmf.items()
            ],
        }

    def __str__(self):
        n, lines = self.n, []
        for i, fs in enumerate(self.functions, 1):
            lines.append(f"node {i}: {len(fs)} function(s)")
            head = " ".join(f"f{k}" for k in range(1, len(fs) + 1))
            lines.append(f"  {'state':>5} {'bits':>{n}} | {head}")
            for j in range(2**n):
                bits = "".join(map(str, _state_bits(j + 1, n)))
                outs = " ".join(f"{f[j]:>{len(str(k)) + 1}}" for k, f in enumerate(fs, 1))
                lines.append(f"  {j + 1:>5} {bits:>4} | {outs}")
        lines.append("probabilities:")
        for k, p in self.pmf.items():
            lines.append(f"  ({','.join(map(str, k))}) {format_fraction(p)}")
        return "\n".join(lines)


def assemble_pbn(decomposition: Decomposition) -> Pbn:
    """Turn a decomposition into a network with correlated function choice.

    Each node's functions are listed in order of first appearance over the
    terms. Each term selects one function per node with probability
    ``weight / scale``.
    """
    if not decomposition.is_internally_consistent():
        raise ContractError("decomposition is not internally consistent")
    n = _node_count(decomposition.side)
    functions: list[list[Bits]] = [[] for _ in range(n)]
    pmf: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for weight, matrix in decomposition.terms():
        table = bn_to_truth_table(matrix)
        choice = []
        for i, column in enumerate(table.outputs):
            if column not in functions[i]:
                functions[i].append(column)
            choice.append(functions[i].index(column) + 1)
        pmf[tuple(choice)] += weight / decomposition.scale
    return Pbn(tuple(tuple(fs) for fs in functions), dict(pmf))


def pbn_to_tpm(network: Pbn, independence: Sequence[Sequence] | None = None) -> Tpm:
    """Transition matrix of ``network``, normalized to column sums 1.

    When ``independence`` is given it replaces the network's distribution
    with independent per-node choices, as in :meth:`Pbn.independent`.
    """
    if independence is not None:
        network = Pbn.independent(network.functions, independence)
    side = 2**network.n
    rows = [[Fraction(0)] * side for _ in range(side)]
    for choice, p in network.pmf.items():
        for j, t in enumerate(network.network(choice).targets):
            rows[t - 1][j] += p
    return Tpm.from_rows(rows)
