"""Small dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
``@``, ``+`` and scalar ``*`` serve as mul/add/scale. Composite indices of
a Kronecker product put the first factor on the slow axis, so the product
basis of two qubits is ordered ``|uu>, |ud>, |du>, |dd>``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, NotHermitianError

ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(m, name="matrix"):
    """Return ``m`` as a finite, square complex array.

    Raises
    ------
    DimensionError
        If ``m`` is not two-dimensional and square, or is empty.
    ValueError
        If any entry is NaN or infinite.
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def adjoint(m):
    return np.conj(np.transpose(m))


def trace(m) -> complex:
    return complex(np.trace(as_matrix(m)))


def commutator(a, b):
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    _same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b):
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    _same_dim(a, b)
    return a @ b + b @ a


def kron(a, b):
    """Kronecker product with the first factor as the slow index."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def allclose(a, b, atol=ATOL) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def is_hermitian(m, atol=ATOL) -> bool:
    m = np.asarray(m)
    return bool(np.all(np.abs(m - adjoint(m)) <= atol))


def is_unitary(m, atol=ATOL) -> bool:
    m = np.asarray(m)
    return allclose(adjoint(m) @ m, np.eye(m.shape[0]), atol)


def partial_trace(m, dims, trace_out):
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : array_like
        Operator on the product space, shape ``(d1*d2, d1*d2)``.
    dims : tuple of int
        The bipartition ``(d1, d2)``.
    trace_out : {1, 2}
        Factor to remove. Tracing out factor 2 leaves a ``d1 x d1`` matrix.
    """
    m = as_matrix(m)
    d1, d2 = (int(d) for d in dims)
    if d1 < 1 or d2 < 1 or d1 * d2 != m.shape[0]:
        raise DimensionError(f"bipartition {dims} does not match dimension {m.shape[0]}")
    t = m.reshape(d1, d2, d1, d2)
    if trace_out == 2:
        return np.einsum("aibi->ab", t)
    if trace_out == 1:
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"trace_out must be 1 or 2, got {trace_out!r}")


def herm_eig(m, atol=ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary whose columns are the
    matching eigenvectors.
    """
    m = as_matrix(m)
    if not is_hermitian(m, atol):
        raise NotHermitianError("herm_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + adjoint(m)) / 2)
    return w, v


def expm_hermitian(h, atol=ATOL):
    """Return ``exp(i h)`` for Hermitian ``h``; the result is unitary."""
    w, v = herm_eig(h, atol)
    return (v * np.exp(1j * w)) @ adjoint(v)


def hermitian_from_params(theta, d):
    """Hermitian ``d x d`` matrix from ``d**2`` real coordinates.

    The first ``d`` entries fill the diagonal; the remaining ones are the
    real then imaginary parts of the strict upper triangle, row by row.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (d * d,):
        raise DimensionError(f"expected {d * d} parameters for d={d}, got {theta.shape}")
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = theta[:d]
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    h[iu] = theta[d:d + k] + 1j * theta[d + k:]
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def unitary_from_params(theta, d):
    return expm_hermitian(hermitian_from_params(theta, d))


def random_hermitian(rng, d, scale=1.0):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (g + adjoint(g)) / 2


def random_unitary(rng, d):
    return expm_hermitian(random_hermitian(rng, d, scale=np.pi))


def random_ket(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(rng, d, rank=None):
    """Random density matrix ``G G^dagger / tr`` with ``G`` of shape ``(d, rank)``."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ adjoint(g)
    return rho / np.trace(rho).real
