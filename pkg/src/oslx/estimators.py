"""Estimator-style wrappers over the operator kernels.

These adapt the grid operators to the fit/transform protocol so batches of
signals can sit inside ordinary pipelines.  Rows of X are independent 1-d
signals on the unit interval; 2-d grids should use the functional API
directly.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .grid import GridFunction, is_power_of_two
from .operators import HARDY_LITTLEWOOD, MODES, RESTRICTED, SHARP, maximal, sharp_maximal
from .oscillation import FAMILIES, blo_seminorm, bmo_seminorm


def _check_signals(X) -> np.ndarray:
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if not is_power_of_two(X.shape[1]):
        raise ValueError(
            f"signal length must be a power of two, got {X.shape[1]}"
        )
    return X


class MaximalTransformer(TransformerMixin, BaseEstimator):
    """Apply a maximal operator to each row of X.

    Parameters
    ----------
    kind : {"hardy_littlewood", "sharp"}
        Which operator field to compute.
    mode : {"restricted", "zero", "dyadic"}
        Boundary proxy for the whole-space operator.
    """

    def __init__(self, kind: str = HARDY_LITTLEWOOD, mode: str = RESTRICTED):
        self.kind = kind
        self.mode = mode

    def fit(self, X, y=None):
        if self.kind not in (HARDY_LITTLEWOOD, SHARP):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        X = _check_signals(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = _check_signals(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        op = maximal if self.kind == HARDY_LITTLEWOOD else sharp_maximal
        out = np.empty_like(X)
        for i, row in enumerate(X):
            out[i] = op(GridFunction.from_values(row), self.mode).values
        return out


class OscillationFeatures(TransformerMixin, BaseEstimator):
    """Summarize each row by its oscillation seminorms.

    Produces two columns per signal: the mean-oscillation supremum and the
    lower-oscillation supremum over the chosen cube family.
    """

    def __init__(self, family: str = "all"):
        self.family = family

    def fit(self, X, y=None):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        X = _check_signals(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = _check_signals(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            f = GridFunction.from_values(row)
            out[i, 0] = bmo_seminorm(f, self.family).value
            out[i, 1] = blo_seminorm(f, self.family).value
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["mean_oscillation_sup", "lower_oscillation_sup"])
