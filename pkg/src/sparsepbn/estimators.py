"""Scikit-learn style wrappers around the decomposition functions.

The estimators follow the usual ``fit`` / ``get_params`` / ``set_params``
protocol so they can be cloned, configured from dictionaries and used in
parameter sweeps. ``X`` is a single TPM rather than a sample matrix, so
there is no ``predict``; :meth:`transform` maps a TPM to its weight
vector over the fitted matrices.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .bounds import lower_bound
from .core import Tpm, verify_decomposition
from .errors import ContractError, ValidationError
from .greedy import ger_decompose, ser1_decompose, ser2_decompose
from .momp import DEFAULT_GUARD, momp_decompose
from .pbn import assemble_pbn

__all__ = ["GreedyDecomposer", "MompDecomposer", "check_tpm"]


def check_tpm(X, r0=None) -> Tpm:
    """Validate ``X`` and return it as a :class:`Tpm`.

    Accepts a :class:`Tpm` or any 2-D array-like of exact numbers, decimal
    strings or floats. Floats are read through their shortest decimal
    form, so ``0.1`` is taken as exactly one tenth.
    """
    if isinstance(X, Tpm):
        return X if r0 is None else X.with_scale(r0)
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValidationError(f"expected a 2-D array, got {X.ndim} dimensions")
        X = X.tolist()
    try:
        rows = [list(row) for row in X]
    except TypeError:
        raise ValidationError("expected a 2-D array-like") from None
    return Tpm.from_rows(rows, r0)


def _check_fitted(estimator):
    if not hasattr(estimator, "decomposition_"):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet")


class GreedyDecomposer(BaseEstimator):
    """Exact decomposition with one of the entry-removal algorithms.

    Parameters
    ----------
    algorithm : {"ger", "ser1", "ser2"}
    z : int
        Score base for GER, at least 2.

    Attributes
    ----------
    decomposition_ : Decomposition
    weights_ : tuple of Fraction
    matrices_ : tuple of BnMatrix
    n_terms_ : int
    lower_bound_ : int
        Best proven lower bound on the length for the fitted TPM.
    trace_ : GreedyTrace
    """

    def __init__(self, algorithm="ger", z=10):
        self.algorithm = algorithm
        self.z = z

    def fit(self, X, y=None):
        tpm = check_tpm(X)
        if self.algorithm == "ger":
            result, trace = ger_decompose(tpm, self.z)
        elif self.algorithm == "ser1":
            result, trace = ser1_decompose(tpm, return_trace=True)
        elif self.algorithm == "ser2":
            result, trace = ser2_decompose(tpm, return_trace=True)
        else:
            raise ContractError(f"unknown algorithm {self.algorithm!r}")
        self.tpm_ = tpm
        self.decomposition_ = result
        self.trace_ = trace
        self.weights_ = result.weights
        self.matrices_ = result.matrices
        self.n_terms_ = result.length
        self.lower_bound_ = lower_bound(tpm).value
        return self

    def transform(self, X):
        """Weights that rebuild ``X`` from the fitted matrices.

        Only defined for the fitted TPM up to scale; any other input
        raises :class:`ValidationError`.
        """
        _check_fitted(self)
        tpm = check_tpm(X)
        if tpm.normalized() != self.tpm_.normalized():
            raise ValidationError("transform only accepts the fitted TPM")
        factor = tpm.scale / self.tpm_.scale
        return np.array([w * factor for w in self.weights_], dtype=object)

    def to_pbn(self):
        _check_fitted(self)
        return assemble_pbn(self.decomposition_)

    def score(self, X, y=None):
        """Negative length, so that sparser is better; ``-inf`` if it fails to verify."""
        _check_fitted(self)
        if not verify_decomposition(self.decomposition_, check_tpm(X)):
            return -np.inf
        return -float(self.n_terms_)


class MompDecomposer(BaseEstimator):
    """Approximate decomposition by matching pursuit on the simplex.

    Parameters
    ----------
    tolerance : float
    guard : int
        Largest atom count accepted before refusing to run.
    """

    def __init__(self, tolerance=1e-7, guard=DEFAULT_GUARD):
        self.tolerance = tolerance
        self.guard = guard

    def fit(self, X, y=None):
        tpm = check_tpm(X)
        result = momp_decompose(tpm, self.tolerance, self.guard)
        self.tpm_ = tpm
        self.decomposition_ = result
        self.weights_ = np.asarray(result.weights)
        self.matrices_ = result.matrices
        self.n_terms_ = result.length
        self.error_ = result.error
        return self

    def reconstruction_error(self) -> float:
        """Frobenius distance between the normalized TPM and the fitted mixture."""
        _check_fitted(self)
        rebuilt = self.decomposition_.reconstruct() / float(self.tpm_.scale)
        return float(np.linalg.norm(rebuilt - self.tpm_.to_numpy()))
