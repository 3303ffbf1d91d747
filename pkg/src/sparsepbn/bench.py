"""Run the decomposition algorithms over the reference corpus."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bounds import BoundReport, lower_bound
from .core import VerificationReport, verify_decomposition
from .corpus import CorpusEntry, corpus
from .errors import InfeasibleSizeError, SparsePbnError
from .greedy import ger_decompose, ser1_decompose, ser2_decompose
from .momp import DEFAULT_GUARD, momp_decompose

__all__ = ["ALGORITHMS", "EXACT_ALGORITHMS", "RunResult", "format_table", "run_bench", "run_one"]

EXACT_ALGORITHMS = ("ger", "ser1", "ser2")
ALGORITHMS = EXACT_ALGORITHMS + ("momp",)


@dataclass(frozen=True)
class RunResult:
    """Outcome of one algorithm on one corpus entry.

    ``status`` is ``"ok"``, ``"ITR"`` when the atom space was too large
    to run, or an error message.
    """

    tpm: str
    algorithm: str
    params: dict = field(compare=False)
    length: int | None
    weights: tuple = ()
    matrices: tuple = ()
    verification: VerificationReport | None = None
    bounds: BoundReport | None = None
    elapsed: float = 0.0
    status: str = "ok"
    expected: object = None

    @property
    def verified(self) -> bool | None:
        return None if self.verification is None else self.verification.passed

    def matches_expected(self) -> bool | None:
        if self.expected is None or self.length is None:
            return None
        if isinstance(self.expected, tuple):
            return min(self.expected) <= self.length <= max(self.expected)
        return self.length == self.expected

    def to_dict(self) -> dict:
        return {
            "tpm": self.tpm,
            "algorithm": self.algorithm,
            "params": self.params,
            "length": self.length,
            "expected": list(self.expected) if isinstance(self.expected, tuple) else self.expected,
            "verified": self.verified,
            "lower_bound": None if self.bounds is None else self.bounds.value,
            "elapsed": self.elapsed,
            "status": self.status,
            "weights": [str(w) for w in self.weights],
            "targets": [list(m.targets) for m in self.matrices],
        }


def run_one(
    entry: CorpusEntry,
    algorithm: str,
    z: int | None = None,
    tolerance: float | None = None,
    guard: int = DEFAULT_GUARD,
    bounds: BoundReport | None = None,
) -> RunResult:
    """Run one algorithm on one entry, timing only the decomposition itself."""
    tpm = entry.tpm
    params: dict = {}
    expected = entry.expected.get(algorithm)
    if bounds is None:
        bounds = lower_bound(tpm)
    start = time.perf_counter()
    try:
        if algorithm == "ger":
            params["z"] = z or entry.ger_z
            result, _ = ger_decompose(tpm, params["z"])
        elif algorithm == "ser1":
            result = ser1_decompose(tpm)
        elif algorithm == "ser2":
            result = ser2_decompose(tpm)
        elif algorithm == "momp":
            params["tolerance"] = tolerance or entry.momp_tolerance
            result = momp_decompose(tpm, params["tolerance"], guard)
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    except InfeasibleSizeError as err:
        params["atoms"] = err.size
        elapsed = time.perf_counter() - start
        return RunResult(entry.label, algorithm, params, None, bounds=bounds,
                         elapsed=elapsed, status="ITR", expected=expected)
    except SparsePbnError as err:
        elapsed = time.perf_counter() - start
        return RunResult(entry.label, algorithm, params, None, bounds=bounds,
                         elapsed=elapsed, status=f"error: {err}", expected=expected)
    elapsed = time.perf_counter() - start
    report = None if algorithm == "momp" else verify_decomposition(result, tpm)
    return RunResult(
        entry.label,
        algorithm,
        params,
        result.length,
        tuple(result.weights),
        tuple(result.matrices),
        report,
        bounds,
        elapsed,
        "ok",
        expected,
    )


def run_bench(
    selection: Iterable[str],
    algorithms: Sequence[str] = EXACT_ALGORITHMS,
    z: int | None = None,
    tolerance: float | None = None,
    guard: int = DEFAULT_GUARD,
) -> list[RunResult]:
    """Run every algorithm on every selected corpus entry.

    GER uses each entry's default score base unless ``z`` is given, and
    MOMP each entry's default tolerance unless ``tolerance`` is given.
    """
    results = []
    for name in selection:
        entry = corpus(name)
        bounds = lower_bound(entry.tpm)
        for algorithm in algorithms:
            results.append(run_one(entry, algorithm, z, tolerance, guard, bounds))
    return results


def format_table(results: Sequence[RunResult]) -> str:
    """Lengths per TPM and algorithm, with reference values in brackets."""
    if not results:
        return "(no results)"
    algorithms = list(dict.fromkeys(r.algorithm for r in results))
    by_key = {(r.tpm, r.algorithm): r for r in results}
    names = list(dict.fromkeys(r.tpm for r in results))

    def cell(r: RunResult | None) -> str:
        if r is None:
            return "-"
        got = r.status if r.length is None and r.status == "ITR" else r.length
        if got is None:
            got = "ERR"
        if isinstance(r.expected, tuple):
            want = "-".join(str(e) for e in sorted(set(r.expected)))
        else:
            want = "ITR" if r.expected is None else r.expected
        mark = "" if r.verified in (None, True) else "!"
        return f"{got}{mark} [{want}]"

    header = ["TPM", "LB"] + [a.upper() for a in algorithms] + ["time(s)"]
    rows = [header]
    for name in names:
        first = next(r for r in results if r.tpm == name)
        total = sum(r.elapsed for r in results if r.tpm == name)
        lb = "-" if first.bounds is None else str(first.bounds.value)
        rows.append([name, lb] + [cell(by_key.get((name, a))) for a in algorithms] + [f"{total:.3f}"])
    widths = [max(len(row[k]) for row in rows) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
