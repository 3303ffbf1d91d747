"""Acceptance criteria 1-10.

Each test carries ``@pytest.mark.criterion(n)``; the conftest hook prints
one PASS/FAIL line per criterion at the end of the run.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from sparsepbn.bench import run_bench
from sparsepbn.bounds import (
    exact_min_length,
    extract_column_partition,
    forced_nonsingleton,
    lower_bound,
    upper_bounds,
)
from sparsepbn.core import (
    BnMatrix,
    Tpm,
    block_double,
    in_support,
    lift_block_double,
    positive_count,
    verify_decomposition,
)
from sparsepbn.corpus import corpus, corpus_entries, corpus_names
from sparsepbn.errors import InfeasibleSizeError
from sparsepbn.greedy import (
    Residue,
    f_score,
    ger_decompose,
    ger_step,
    geresa,
    ser1_decompose,
    ser2_decompose,
)
from sparsepbn.momp import AtomSpace, momp_decompose, momp_error, streaming_argmax
from sparsepbn.pbn import Pbn, assemble_pbn, pbn_to_tpm

from worked import (
    C1,
    C2,
    F1,
    F2,
    INDEPENDENT_TPM,
    Q_MATRICES,
    Q_WEIGHTS,
    q_tpm,
    tpms,
)

ENTRIES = corpus_entries()
IDS = [e.label for e in ENTRIES]
EXACT = {
    "ger": lambda e: ger_decompose(e.tpm, e.ger_z)[0],
    "ser1": lambda e: ser1_decompose(e.tpm),
    "ser2": lambda e: ser2_decompose(e.tpm),
}
PROPERTY = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# 1. GER reproduces the reference lengths --------------------------------------

GER_LENGTHS = {
    "P1": 4, "P2": 6, "P3": 6, "P4": 8, "P5": 7, "PA1": 5, "PA2": 5, "PA3": 11,
    "PB1": 4, "PB3": 4,
    **{f"PB4({d})": 5 for d in ("0.01", "0.02", "0.03", "0.04")},
    **{f"PB6({d})": 5 for d in ("0.01", "0.02", "0.03", "0.04")},
}


@pytest.mark.criterion(1)
@pytest.mark.parametrize("entry", ENTRIES, ids=IDS)
def test_ger_corpus_length(entry):
    start = time.perf_counter()
    result, _ = ger_decompose(entry.tpm, 2 if entry.name == "PA3" else 10)
    elapsed = time.perf_counter() - start
    assert result.length == GER_LENGTHS[entry.label]
    assert verify_decomposition(result, entry.tpm).passed
    assert elapsed < 1.0


# 2. GER worked example ----------------------------------------------------------


@pytest.mark.criterion(2)
def test_ger_worked_example_sequence():
    q = q_tpm()
    assert q.scale == 61
    result, _ = ger_decompose(q, 10)
    assert list(result.weights) == Q_WEIGHTS
    assert [m.targets for m in result.matrices] == Q_MATRICES
    assert verify_decomposition(result, q).passed


@pytest.mark.criterion(2)
def test_geresa_worked_example():
    residue = Residue.from_tpm(q_tpm())
    assert geresa(residue, 2) == BnMatrix((1, 6, 1, 2, 7, 8, 3, 6))
    assert geresa(residue, 4) == BnMatrix((6, 4, 3, 2, 2, 1, 3, 6))


# 3. Scores -------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_f_score_small_examples():
    r = [[45, 9, 85, 1], [81, 52, 16, 36], [0, 65, 26, 94], [5, 5, 4, 0]]
    r_prime = [[45, 9, 84, 1], [81, 52, 6, 36], [0, 65, 36, 94], [5, 5, 5, 0]]
    assert f_score(r, 10) == 220
    assert f_score(r_prime, 10) == 1190


@pytest.mark.criterion(3)
def test_first_iteration_candidate_scores():
    _, _, explored = ger_step(Residue.from_tpm(q_tpm()), 10)
    assert [(v, s) for v, _, s in explored] == [(2, 3170), (4, 3100), (25, 1460), (29, 1390)]


# 4. SER regressions ----------------------------------------------------------------


@pytest.mark.criterion(4)
def test_ser_small_example():
    p1 = corpus("P1").tpm
    ser1 = ser1_decompose(p1)
    ser2 = ser2_decompose(p1)
    assert list(ser1.weights) == [Fraction(k, 10) for k in (1, 2, 2, 2, 1, 1, 1)]
    assert list(ser2.weights) == [Fraction(k, 10) for k in (5, 2, 2, 1)]


@pytest.mark.criterion(4)
@pytest.mark.parametrize("algorithm", ["ser1", "ser2"])
def test_ser_corpus_agreement(algorithm):
    matches = 0
    for entry in ENTRIES:
        result = EXACT[algorithm](entry)
        assert verify_decomposition(result, entry.tpm).passed
        matches += result.length == entry.expected[algorithm]
    assert matches >= 15


@pytest.mark.criterion(4)
@pytest.mark.parametrize("entry", ENTRIES, ids=IDS)
def test_length_guarantees(entry):
    upper = upper_bounds(entry.tpm)
    lengths = {name: run(entry).length for name, run in EXACT.items()}
    assert max(lengths.values()) <= upper.entry_removal
    assert lengths["ser1"] <= upper.ser1_ger
    assert lengths["ger"] <= upper.ser1_ger
    assert lengths["ser2"] <= upper.ser2


# 5. Lower bounds ----------------------------------------------------------------------

GENERIC_BOUNDS = {
    "P1": 4, "P2": 6, "P3": 6, "P4": 8, "P5": 6, "PA1": 4, "PB1": 3, "PB3": 4,
    **{f"PB4({d})": 5 for d in ("0.01", "0.02", "0.03", "0.04")},
    **{f"PB6({d})": 5 for d in ("0.01", "0.02", "0.03", "0.04")},
}


@pytest.mark.criterion(5)
@pytest.mark.parametrize("label", sorted(GENERIC_BOUNDS))
def test_generic_lower_bound(label):
    assert lower_bound(corpus(label).tpm, None).value == GENERIC_BOUNDS[label]


@pytest.mark.criterion(5)
@pytest.mark.parametrize("label,value", [("P5", 7), ("PA1", 5), ("PA2", 5), ("PB1", 4)])
def test_registry_lower_bound(label, value):
    assert lower_bound(corpus(label).tpm).value == value


@pytest.mark.criterion(5)
@pytest.mark.parametrize("entry", [e for e in ENTRIES if e.name != "PA3"], ids=lambda e: e.label)
def test_ger_is_certified_optimal(entry):
    assert lower_bound(entry.tpm).value == ger_decompose(entry.tpm, entry.ger_z)[0].length


# 6. Exact oracle ----------------------------------------------------------------------


@pytest.mark.criterion(6)
@pytest.mark.parametrize("label", ["P1", "PB1"])
def test_exact_oracle(label):
    tpm = corpus(label).tpm
    start = time.perf_counter()
    k = exact_min_length(tpm, budget=60.0)
    assert time.perf_counter() - start < 60.0
    assert k == 4
    assert k == lower_bound(tpm).value
    assert k == ger_decompose(tpm, 10)[0].length


# 7. Properties on random small TPMs ---------------------------------------------------


def _check_exact_output(tpm, result, trace=None):
    assert verify_decomposition(result, tpm).passed
    assert sum(result.weights) == tpm.scale
    assert len(set(result.matrices)) == result.length
    assert all(in_support(m, tpm) for m in result.matrices)
    if trace is not None:
        before = positive_count(tpm)
        for step in trace:
            assert step.positives_before == before
            assert step.positives_after < step.positives_before
            before = step.positives_after
        assert before == 0


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_ger(tpm):
    result, trace = ger_decompose(tpm, 10)
    _check_exact_output(tpm, result, trace)


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_ser1(tpm):
    result, trace = ser1_decompose(tpm, return_trace=True)
    _check_exact_output(tpm, result, trace)


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_ser2(tpm):
    result, trace = ser2_decompose(tpm, return_trace=True)
    _check_exact_output(tpm, result, trace)


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_column_partitions(tpm):
    result, _ = ger_decompose(tpm, 10)
    terms = set(range(1, result.length + 1))
    for j in range(1, tpm.side + 1):
        part = extract_column_partition(result, j)
        assert part.rows == tuple(tpm.positive_rows(j))
        assert set().union(*part.cells) == terms
        assert sum(len(c) for c in part.cells) == result.length
        assert list(part.sums) == [tpm.value(i, j) for i in part.rows]


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_forced_cells(tpm):
    result, _ = ger_decompose(tpm, 10)
    side = tpm.side
    for i in range(1, side + 1):
        part = extract_column_partition(result, i)
        for l in range(1, len(part.rows) + 1):
            for j in range(1, side + 1):
                if j != i and forced_nonsingleton(tpm, i, l, j):
                    assert len(part.cells[l - 1]) >= 2


@pytest.mark.criterion(7)
@PROPERTY
@given(tpms())
def test_property_block_lift(tpm):
    for run in (lambda t: ger_decompose(t, 10)[0], ser1_decompose, ser2_decompose):
        result = run(tpm)
        lifted = lift_block_double(result, tpm)
        assert lifted.length == result.length
        assert verify_decomposition(lifted, block_double(tpm)).passed


# 8. MOMP ------------------------------------------------------------------------------


@pytest.mark.criterion(8)
@pytest.mark.parametrize("label,lengths", [("PA1", {5}), ("PB3", {4})])
def test_momp_converges(label, lengths):
    tpm = corpus(label).tpm
    result = momp_decompose(tpm, 1e-7)
    error = np.linalg.norm(result.reconstruct() - tpm.to_numpy(normalized=False).astype(float))
    assert error <= 1e-6
    assert result.length in lengths


@pytest.mark.criterion(8)
def test_momp_refuses_huge_atom_space():
    with pytest.raises(InfeasibleSizeError) as info:
        momp_decompose(corpus("P4").tpm, 1e-7)
    assert info.value.size == 9682651996416


def _dense_products(space, residual):
    return space.dense().T @ np.asarray(residual, dtype=float).flatten(order="F")


def _dense_error(space, residual, support, weights):
    g = _dense_products(space, residual)
    support = [s for s, w in zip(support, weights) if w > 0]
    weights = np.array([w for w in weights if w > 0])
    lam = float(weights @ g[support]) if support else 0.0
    outside = np.ones(space.size, dtype=bool)
    outside[support] = False
    first = np.linalg.norm(g[support] - lam)
    second = np.linalg.norm(np.maximum(g[outside] - lam, 0.0))
    return first + second


SMALL_SPACES = [e for e in ENTRIES if AtomSpace.from_tpm(e.tpm).size <= 10**4]


@pytest.mark.criterion(8)
@pytest.mark.parametrize("entry", SMALL_SPACES, ids=lambda e: e.label)
def test_streaming_matches_dense_on_corpus(entry):
    space = AtomSpace.from_tpm(entry.tpm)
    _, states = momp_decompose(entry.tpm, entry.momp_tolerance, return_states=True)
    residuals = [entry.tpm.to_numpy()] + [s.residual for s in states]
    for residual in residuals:
        dense = _dense_products(space, residual)
        assert abs(dense[streaming_argmax(space, residual)] - dense.max()) <= 1e-10
    for s in states:
        dense = _dense_error(space, s.residual, s.support, s.weights)
        assert abs(dense - s.error) <= 1e-10
        assert abs(momp_error(space, s.residual, s.support, s.weights, chunk=7) - dense) <= 1e-10


@pytest.mark.criterion(8)
@PROPERTY
@given(tpms(sides=(4,)))
def test_streaming_matches_dense_random(tpm):
    space = AtomSpace.from_tpm(tpm)
    rng = np.random.default_rng(space.size)
    residual = rng.normal(size=(4, 4))
    dense = _dense_products(space, residual)
    assert abs(dense[streaming_argmax(space, residual)] - dense.max()) <= 1e-10
    support = sorted(set(rng.integers(0, space.size, size=3).tolist()))
    weights = rng.dirichlet(np.ones(len(support)))
    expected = _dense_error(space, residual, support, weights)
    assert abs(momp_error(space, residual, support, weights, chunk=5) - expected) <= 1e-10


# 9. PBN round trip ----------------------------------------------------------------------


@pytest.mark.criterion(9)
@pytest.mark.parametrize("entry", ENTRIES, ids=IDS)
def test_pbn_round_trip_corpus(entry):
    for run in EXACT.values():
        assert pbn_to_tpm(assemble_pbn(run(entry))) == entry.tpm.normalized()


@pytest.mark.criterion(9)
def test_independent_pbn_matrix():
    network = Pbn.independent((F1, F2), (C1, C2))
    assert pbn_to_tpm(network) == Tpm.from_rows(INDEPENDENT_TPM)


@pytest.mark.criterion(9)
def test_ser2_pbn_distribution():
    network = assemble_pbn(ser2_decompose(corpus("P1").tpm))
    assert network.pmf == {
        (1, 1): Fraction(1, 2),
        (2, 2): Fraction(1, 5),
        (3, 3): Fraction(1, 5),
        (2, 4): Fraction(1, 10),
    }


# 10. Timing ceilings ----------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_exact_bench_timing():
    start = time.perf_counter()
    results = run_bench(corpus_names())
    total = time.perf_counter() - start
    assert len(results) == 54
    assert all(r.status == "ok" and r.verified for r in results)
    assert max(r.elapsed for r in results) < 1.0
    assert total < 30.0
