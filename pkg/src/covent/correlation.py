"""Ordinary and alternative covariance of operator pairs in a state.

``cov`` is the usual ``<AB> - <A><B>``. ``alt_cov`` is the commutator form
``tr([rho, A][B, rho]) / 2``, which treats the state and the operators
symmetrically, vanishes for the maximally mixed state, and coincides with
``cov`` on pure states whenever ``[A, B] = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .exceptions import DimensionError, InvalidStateError, NotHermitianError, NumericalError
from .states import DensityMatrix

SLACK = 1e-9


def _rho(rho):
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return DensityMatrix(rho).mat


def _ops(rho, *ops):
    out = []
    for k, op in enumerate(ops):
        op = qmat.as_matrix(op, f"operator {k}")
        if op.shape != rho.shape:
            raise DimensionError(f"operator {k} has shape {op.shape}, state has {rho.shape}")
        out.append(op)
    return out


def _tr(m) -> complex:
    return complex(np.trace(m))


def cov(rho, a, b) -> complex:
    """``tr(rho a b) - tr(rho a) tr(rho b)``."""
    r = _rho(rho)
    a, b = _ops(r, a, b)
    return _tr(r @ a @ b) - _tr(r @ a) * _tr(r @ b)


def alt_cov(rho, a, b) -> complex:
    """Alternative covariance ``tr([rho, a][b, rho]) / 2``.

    The expanded form ``tr(rho^2 {a, b}/2 - rho a rho b)`` is evaluated as
    well and the two must agree.
    """
    r = _rho(rho)
    a, b = _ops(r, a, b)
    ra, rb = r @ a, r @ b
    commutator_form = _tr((ra - a @ r) @ (b @ r - rb)) / 2
    expanded = _tr(r @ r @ (a @ b + b @ a)) / 2 - _tr(ra @ rb)
    scale = 1 + np.linalg.norm(a) * np.linalg.norm(b)
    if abs(commutator_form - expanded) > 1e-9 * scale:
        raise NumericalError(
            f"alternative covariance forms disagree: {commutator_form!r} vs {expanded!r}"
        )
    return commutator_form


def _require_hermitian(a, name="a"):
    if not qmat.is_hermitian(a, qmat.ATOL):
        raise NotHermitianError(f"{name} must be Hermitian")


def variance(rho, a) -> float:
    r = _rho(rho)
    (a,) = _ops(r, a)
    _require_hermitian(a)
    return float((_tr(r @ a @ a) - _tr(r @ a) ** 2).real)


def alt_variance(rho, a) -> float:
    """``C(a, a) = tr([a, rho][a, rho]^dagger) / 2``, never negative."""
    r = _rho(rho)
    (a,) = _ops(r, a)
    _require_hermitian(a)
    c = a @ r - r @ a
    return float(np.sum(np.abs(c) ** 2) / 2)


@dataclass(frozen=True)
class CovarianceReport:
    cov: complex
    alt_cov: complex
    var_a: float
    var_b: float
    alt_var_a: float
    alt_var_b: float

    def as_dict(self):
        return {
            "cov": [self.cov.real, self.cov.imag],
            "alt_cov": [self.alt_cov.real, self.alt_cov.imag],
            "abs_cov": abs(self.cov),
            "abs_cov_sq": abs(self.cov) ** 2,
            "abs_alt_cov": abs(self.alt_cov),
            "abs_alt_cov_sq": abs(self.alt_cov) ** 2,
            "var_a": self.var_a,
            "var_b": self.var_b,
            "alt_var_a": self.alt_var_a,
            "alt_var_b": self.alt_var_b,
        }


def report(rho, a, b) -> CovarianceReport:
    r = _rho(rho)
    return CovarianceReport(
        cov=cov(r, a, b),
        alt_cov=alt_cov(r, a, b),
        var_a=variance(r, a),
        var_b=variance(r, b),
        alt_var_a=alt_variance(r, a),
        alt_var_b=alt_variance(r, b),
    )


@dataclass(frozen=True)
class InequalityAudit:
    """Both sides of each variance-product bound, plus pass flags.

    ``var_ge_alt_var`` checks var(A) >= C(A, A) and var(B) >= C(B, B);
    ``cov_bound`` var.var >= |cov|^2; ``alt_bound`` C(A,A)C(B,B) >= |C(A,B)|^2
    (with Hermitian operators, so A = A^dagger); ``heisenberg`` var.var >=
    |tr(rho [A, B])|^2 / 4.
    """

    var_product: float
    alt_var_product: float
    abs_cov_sq: float
    abs_alt_cov_sq: float
    heisenberg: float
    var_ge_alt_var: bool
    cov_bound: bool
    alt_bound: bool
    heisenberg_bound: bool
    min_slack: float

    @property
    def satisfied(self) -> bool:
        return self.var_ge_alt_var and self.cov_bound and self.alt_bound and self.heisenberg_bound


def inequality_audit(rho, a, b, slack=SLACK) -> InequalityAudit:
    r = _rho(rho)
    a, b = _ops(r, a, b)
    _require_hermitian(a, "a")
    _require_hermitian(b, "b")
    va, vb = variance(r, a), variance(r, b)
    ca, cb = alt_variance(r, a), alt_variance(r, b)
    cov_sq = abs(cov(r, a, b)) ** 2
    alt_sq = abs(alt_cov(r, a, b)) ** 2
    heis = abs(_tr(r @ (a @ b - b @ a))) ** 2 / 4
    gaps = {
        "var_a": va - ca,
        "var_b": vb - cb,
        "cov": va * vb - cov_sq,
        "alt": ca * cb - alt_sq,
        "heis": va * vb - heis,
    }
    ok = {k: g >= -slack for k, g in gaps.items()}
    return InequalityAudit(
        var_product=va * vb,
        alt_var_product=ca * cb,
        abs_cov_sq=cov_sq,
        abs_alt_cov_sq=alt_sq,
        heisenberg=heis,
        var_ge_alt_var=ok["var_a"] and ok["var_b"],
        cov_bound=ok["cov"],
        alt_bound=ok["alt"],
        heisenberg_bound=ok["heis"],
        min_slack=min(gaps.values()),
    )


def odd_commutator_trace(rho, ops) -> complex:
    """``tr([A_1, rho][A_2, rho] ... [A_n, rho])`` for odd ``n``.

    Only meaningful on pure states, where it vanishes identically.
    """
    r = _rho(rho)
    ops = list(ops)
    if len(ops) % 2 == 0:
        raise ValueError(f"odd_commutator_trace needs an odd number of operators, got {len(ops)}")
    if abs(float(np.sum(np.abs(r) ** 2)) - 1) > 1e-8:
        raise InvalidStateError("odd_commutator_trace requires a pure state")
    prod = np.eye(r.shape[0], dtype=complex)
    for op in _ops(r, *ops):
        prod = prod @ (op @ r - r @ op)
    return _tr(prod)


def _eigen_basis_weights(rho, basis):
    r = _rho(rho)
    v = qmat.as_matrix(basis, "basis")
    if v.shape != r.shape:
        raise DimensionError("basis and state dimensions differ")
    if not qmat.is_unitary(v):
        raise ValueError("basis must be unitary")
    return qmat.adjoint(v) @ r @ v


def cov_symmetrized(rho, a_eigs, b_eigs, basis=None) -> complex:
    """Covariance of commuting ``A = V diag(a) V^dagger``, ``B = V diag(b) V^dagger``
    as ``sum_ij (a_i - a_j)(b_i - b_j) rho_ii rho_jj / 2`` in the shared eigenbasis."""
    r = _eigen_basis_weights(rho, np.eye(len(a_eigs)) if basis is None else basis)
    a, b = np.asarray(a_eigs, dtype=complex), np.asarray(b_eigs, dtype=complex)
    p = np.diag(r)
    da, db = a[:, None] - a[None, :], b[:, None] - b[None, :]
    return complex(np.sum(da * db * np.outer(p, p)) / 2)


def alt_cov_symmetrized(rho, a_eigs, b_eigs, basis=None) -> complex:
    """Same pair, alternative covariance: weights ``|rho_ij|^2`` replace ``rho_ii rho_jj``."""
    r = _eigen_basis_weights(rho, np.eye(len(a_eigs)) if basis is None else basis)
    a, b = np.asarray(a_eigs, dtype=complex), np.asarray(b_eigs, dtype=complex)
    da, db = a[:, None] - a[None, :], b[:, None] - b[None, :]
    return complex(np.sum(da * db * np.abs(r) ** 2) / 2)
