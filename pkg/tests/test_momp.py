import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from sparsepbn.core import BnMatrix, Tpm, iter_support
from sparsepbn.corpus import corpus
from sparsepbn.errors import ContractError, InfeasibleSizeError
from sparsepbn.momp import (
    AtomSpace,
    momp_decompose,
    restricted_simplex_ls,
    vectorize,
)

from worked import tpms


class TestAtomSpace:
    def test_small_example(self):
        space = AtomSpace.from_tpm(corpus("P1").tpm)
        assert space.radices == (3, 3, 3, 1)
        assert space.size == 27
        assert space.decode(0) == BnMatrix((1, 1, 1, 3))
        assert space.decode(26) == BnMatrix((3, 4, 4, 3))

    def test_order_matches_support_enumeration(self):
        tpm = corpus("PB3").tpm
        space = AtomSpace.from_tpm(tpm)
        assert [space.decode(k) for k in range(space.size)] == list(iter_support(tpm))

    def test_reference_sizes(self):
        assert AtomSpace.from_tpm(corpus("PB6:0.02").tpm).size == 262144
        assert AtomSpace.from_tpm(corpus("P5").tpm).size == 37324800

    def test_digits_agree_with_decode(self):
        space = AtomSpace.from_tpm(corpus("PA1").tpm)
        digits = space.digits(10, 20)
        for k, row in zip(range(10, 20), digits):
            targets = tuple(space.supports[j][d] for j, d in enumerate(row))
            assert space.decode(k).targets == targets

    def test_contract(self):
        space = AtomSpace.from_tpm(corpus("P1").tpm)
        with pytest.raises(ContractError):
            space.decode(27)
        with pytest.raises(ContractError):
            space.encode((4, 1, 1, 3))
        with pytest.raises(ContractError):
            AtomSpace([[1], []])


def test_vectorize_is_column_major():
    v = vectorize(BnMatrix((2, 1)))
    assert v.tolist() == [0.0, 1.0, 1.0, 0.0]


@settings(max_examples=200, deadline=None)
@given(tpms(), st.data())
def test_codec_round_trip(tpm, data):
    space = AtomSpace.from_tpm(tpm)
    index = data.draw(st.integers(0, space.size - 1))
    matrix = space.decode(index)
    assert space.encode(matrix.targets) == index
    assert all(t in space.supports[j] for j, t in enumerate(matrix.targets))


def _kkt_gap(atoms, target, x):
    g = atoms.T @ (atoms @ x - target)
    lam = float(x @ g)
    on = x > 1e-12
    return max(np.max(np.abs(g[on] - lam)), np.max(lam - g[~on], initial=0.0))


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, (6, 4), elements=st.floats(0, 1)),
    arrays(np.float64, 6, elements=st.floats(-1, 1)),
)
def test_simplex_ls_against_slsqp(atoms, target):
    assume(np.linalg.matrix_rank(atoms) == 4)
    x = restricted_simplex_ls(atoms, target)
    assert np.all(x >= 0)
    assert abs(x.sum() - 1) < 1e-12
    assert _kkt_gap(atoms, target, x) < 1e-7

    def objective(y):
        return 0.5 * np.sum((atoms @ y - target) ** 2)

    other = minimize(
        objective,
        np.full(4, 0.25),
        method="SLSQP",
        bounds=[(0, 1)] * 4,
        constraints=[{"type": "eq", "fun": lambda y: y.sum() - 1}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    assert objective(x) <= other.fun + 1e-9


class TestMomp:
    @pytest.mark.parametrize(
        "label,length",
        [("P1", 5), ("PA2", 5), ("PB4:0.01", 6), ("PB4:0.02", 5), ("PB4:0.03", 6), ("PB4:0.04", 5)],
    )
    def test_reference_lengths(self, label, length):
        tpm = corpus(label).tpm
        result = momp_decompose(tpm, 1e-7)
        assert result.length == length
        assert result.error <= 1e-7
        assert abs(sum(result.weights) - 1) < 1e-12

    def test_large_atom_space(self):
        result = momp_decompose(corpus("P5").tpm, 1e-4)
        assert result.length == 28
        assert result.error <= 1e-4

    def test_guard(self):
        with pytest.raises(InfeasibleSizeError) as info:
            momp_decompose(corpus("PA1").tpm, guard=80)
        assert info.value.size == 81

    def test_scale_carried(self):
        tpm = corpus("PB3").tpm.with_scale(10)
        result = momp_decompose(tpm)
        assert abs(sum(result.weights) - 10) < 1e-9
        assert np.allclose(result.reconstruct(), 10 * tpm.to_numpy())

    def test_states_grow_by_one(self):
        _, states = momp_decompose(corpus("PA1").tpm, return_states=True)
        assert [len(s.support) for s in states] == list(range(1, len(states) + 1))
        assert states[-1].error <= 1e-7

    def test_permutation(self):
        result = momp_decompose(Tpm.from_bn(BnMatrix((2, 1, 4, 3))))
        assert result.length == 1
        assert result.matrices == (BnMatrix((2, 1, 4, 3)),)


@settings(max_examples=200, deadline=None)
@given(tpms(sides=(4,)))
def test_momp_reconstructs_random(tpm):
    result = momp_decompose(tpm, 1e-7)
    assert np.linalg.norm(result.reconstruct() - tpm.to_numpy(normalized=False).astype(float)) <= 1e-6
    assert all(w > 0 for w in result.weights)
    assert len(set(result.matrices)) == result.length
