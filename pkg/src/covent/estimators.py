"""scikit-learn style wrappers over batches of states.

Each transformer takes ``X`` as a stack of density matrices, shape
``(n, d, d)`` (or a list of :class:`~covent.states.DensityMatrix`), and
returns one feature row per state. ``fit`` only validates and records the
input shape, so the objects compose with ``Pipeline`` and ``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .entangle import MEASURES, OptimizerSettings, covariance_entanglement, named_operator
from .exceptions import DimensionError
from .invariants import chi_invariants
from .majorana import SpinState, dispersion
from .states import DensityMatrix


def check_dims(dims):
    if dims is None or len(dims) != 2:
        raise DimensionError(f"dims must be a pair (d1, d2), got {dims!r}")
    d1, d2 = (int(d) for d in dims)
    if d1 < 1 or d2 < 1:
        raise DimensionError(f"dims must be positive, got {dims!r}")
    return d1, d2


def check_density_batch(X, dims=None):
    """Validate ``X`` as a batch of density matrices on a common space.

    Returns a list of :class:`DensityMatrix`; ``dims``, when given, is
    attached to each (and must match the matrix size).
    """
    if isinstance(X, DensityMatrix):
        X = [X]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        X = X[None]
    items = list(X)
    if not items:
        raise ValueError("empty batch")
    out = []
    for k, x in enumerate(items):
        mat = x.mat if isinstance(x, DensityMatrix) else x
        d = dims if dims is not None else (x.dims if isinstance(x, DensityMatrix) else None)
        try:
            out.append(DensityMatrix(mat, d))
        except ValueError as exc:
            raise type(exc)(f"X[{k}]: {exc}") from None
    size = out[0].dim
    if any(r.dim != size for r in out):
        raise DimensionError("states in the batch have different dimensions")
    return out


def check_amplitude_batch(X):
    """Validate ``X`` as unit-norm spin amplitude vectors, shape ``(n, 2j + 1)``."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected shape (n, 2j+1), got {arr.shape}")
    return [SpinState(row) for row in arr]


class CovarianceEntanglement(TransformerMixin, BaseEstimator):
    """Maximal local covariance of each state in a batch.

    Parameters
    ----------
    dims : tuple of int
        Bipartition ``(d1, d2)``.
    operators : {"sigma3", "equal-weight", "pair"}
        Local operator family, the same on both sides.
    measure : {"cov", "altcov"}
    restarts, seed, tol
        Passed to the multi-start search.

    Attributes
    ----------
    n_features_in_ : int
        Matrix size ``d1 * d2`` seen in ``fit``.
    """

    def __init__(self, dims=(2, 2), operators="sigma3", measure="cov", restarts=32, seed=0, tol=1e-9):
        self.dims = dims
        self.operators = operators
        self.measure = measure
        self.restarts = restarts
        self.seed = seed
        self.tol = tol

    def _validate_params(self):
        d1, d2 = check_dims(self.dims)
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        a, b = named_operator(self.operators, d1), named_operator(self.operators, d2)
        settings = OptimizerSettings(restarts=self.restarts, seed=self.seed, tol=self.tol)
        return (d1, d2), a, b, settings

    def fit(self, X, y=None):
        dims, _, _, _ = self._validate_params()
        batch = check_density_batch(X, dims)
        self.n_features_in_ = batch[0].dim
        return self

    def transform(self, X):
        """Return shape ``(n, 1)``: the maximal magnitude per state."""
        check_is_fitted(self, "n_features_in_")
        dims, a, b, settings = self._validate_params()
        batch = check_density_batch(X, dims)
        if batch[0].dim != self.n_features_in_:
            raise DimensionError(f"fitted on size {self.n_features_in_}, got {batch[0].dim}")
        vals = [covariance_entanglement(r, a, b, self.measure, settings).max_value for r in batch]
        return np.asarray(vals, dtype=float)[:, None]


class LocalInvariants(TransformerMixin, BaseEstimator):
    """Columns ``chi1, chi2, purity, eps``; ``eps`` is NaN outside 2x2."""

    feature_names = ("chi1", "chi2", "purity", "eps")

    def __init__(self, dims=(2, 2)):
        self.dims = dims

    def fit(self, X, y=None):
        batch = check_density_batch(X, check_dims(self.dims))
        self.n_features_in_ = batch[0].dim
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rows = []
        for r in check_density_batch(X, check_dims(self.dims)):
            inv = chi_invariants(r)
            rows.append([inv.chi1, inv.chi2, inv.purity, np.nan if inv.eps is None else inv.eps])
        return np.asarray(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)


class SpinDispersion(TransformerMixin, BaseEstimator):
    """Total-spin dispersion of each amplitude vector, shape ``(n, 1)``."""

    def fit(self, X, y=None):
        self.n_features_in_ = check_amplitude_batch(X)[0].amplitudes.size
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        states = check_amplitude_batch(X)
        if states[0].amplitudes.size != self.n_features_in_:
            raise DimensionError(f"fitted on length {self.n_features_in_}, got {states[0].amplitudes.size}")
        return np.asarray([dispersion(s) for s in states], dtype=float)[:, None]
