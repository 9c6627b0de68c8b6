"""Covariance-based entanglement measures for bipartite states, spin-state
constellations and local-unitary invariants."""

from .correlation import alt_cov, alt_variance, cov, inequality_audit, variance
from .entangle import (
    KrausChannel,
    LocalOperator,
    LocalUnitary,
    OptimizationResult,
    OptimizerSettings,
    apply_channel,
    covariance_entanglement,
    equal_weight_operator,
    lgm_channel,
    max_cov_unequal_dims,
    pair_discrimination_operator,
)
from .exceptions import DimensionError, InvalidStateError, NotHermitianError, NumericalError
from .invariants import InvariantSet, chi_invariants, generating_series, singlet_count
from .majorana import (
    Constellation,
    MajoranaPolynomial,
    SpinState,
    dispersion,
    max_dispersion_catalog,
    polynomial_to_state,
    roots,
    state_to_polynomial,
)
from .states import DensityMatrix, PureState, bell, named_state

__version__ = "0.1.0"
