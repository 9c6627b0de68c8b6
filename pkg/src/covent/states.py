"""Density matrices, pure states and the catalog of named two-qubit states."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import qmat
from .exceptions import DimensionError, InvalidStateError

TOL = 1e-10

U = np.array([1, 0], dtype=complex)
D = np.array([0, 1], dtype=complex)


def product_ket(*factors):
    """Tensor product of local kets, first factor slow (unnormalized)."""
    out = np.array([1], dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def _check_dims(dims, dim):
    if dims is None:
        return None
    if len(dims) != 2:
        raise DimensionError(f"bipartition must have two factors, got {dims!r}")
    d1, d2 = int(dims[0]), int(dims[1])
    if d1 < 1 or d2 < 1 or d1 * d2 != dim:
        raise DimensionError(f"bipartition {tuple(dims)} does not match dimension {dim}")
    return (d1, d2)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix.

    The invariants are enforced on construction; ``mat`` is stored as a
    read-only array.
    """

    mat: np.ndarray
    dims: tuple | None = None

    def __post_init__(self):
        m = qmat.as_matrix(self.mat, "density matrix").copy()
        if not qmat.is_hermitian(m, TOL):
            raise InvalidStateError("density matrix is not Hermitian")
        m = (m + qmat.adjoint(m)) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > TOL:
            raise InvalidStateError(f"density matrix has trace {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -TOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {lo!r}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", _check_dims(self.dims, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def purity(self) -> float:
        return purity(self)

    def eigvals(self):
        return np.linalg.eigvalsh(self.mat)

    def reduced(self, trace_out):
        if self.dims is None:
            raise DimensionError("state carries no bipartition")
        return DensityMatrix(qmat.partial_trace(self.mat, self.dims, trace_out))

    def conjugate_by(self, u):
        """Return ``u rho u^dagger`` with the same bipartition."""
        u = np.asarray(u, dtype=complex)
        return DensityMatrix(u @ self.mat @ qmat.adjoint(u), self.dims)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dims: tuple | None = None

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel().copy()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidStateError("amplitudes must be a finite non-empty vector")
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidStateError("zero vector is not a state")
        if abs(n - 1) > TOL:
            raise InvalidStateError(f"amplitudes have norm {n!r}, expected 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "dims", _check_dims(self.dims, v.size))

    @classmethod
    def normalized(cls, amplitudes, dims=None):
        v = np.asarray(amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidStateError("zero vector is not a state")
        return cls(v / n, dims)

    def projector(self) -> DensityMatrix:
        return projector(self)


def projector(state: PureState) -> DensityMatrix:
    v = state.amplitudes
    return DensityMatrix(np.outer(v, np.conj(v)), state.dims)


def from_kets(terms, dims=None) -> DensityMatrix:
    """Build ``sum_k c_k |v_k><v_k|`` from literal prefactors and raw kets.

    Kets are used as given, normalized or not, so an expression such as
    ``|uu+dd><uu+dd|/4`` is entered as ``(0.25, uu + dd)``. The result must
    still have unit trace.
    """
    mat = None
    for c, v in terms:
        v = np.asarray(v, dtype=complex).ravel()
        term = c * np.outer(v, np.conj(v))
        mat = term if mat is None else mat + term
    if mat is None:
        raise InvalidStateError("no terms given")
    return DensityMatrix(mat, dims)


def mix(terms, dims=None) -> DensityMatrix:
    """Convex combination ``sum_k w_k rho_k`` of density matrices."""
    terms = list(terms)
    if not terms:
        raise InvalidStateError("no terms given")
    weights = np.array([float(w) for w, _ in terms])
    if np.any(weights < 0):
        raise InvalidStateError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1) > TOL:
        raise InvalidStateError(f"mixture weights sum to {weights.sum()!r}, expected 1")
    mats = [r.mat if isinstance(r, DensityMatrix) else qmat.as_matrix(r) for _, r in terms]
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise DimensionError("mixture terms have different dimensions")
    if dims is None:
        dims = next((r.dims for _, r in terms if isinstance(r, DensityMatrix) and r.dims), None)
    return DensityMatrix(sum(w * m for w, m in zip(weights, mats)), dims)


def purity(rho) -> float:
    m = rho.mat if isinstance(rho, DensityMatrix) else qmat.as_matrix(rho)
    # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def maximally_mixed(d, dims=None) -> DensityMatrix:
    return DensityMatrix(np.eye(d) / d, dims)


_BELL = {
    "phi+": (U, U, D, D, 1),
    "phi-": (U, U, D, D, -1),
    "psi+": (U, D, D, U, 1),
    "psi-": (U, D, D, U, -1),
}
# labels used in the two-qubit literature for the same four states
_BELL_ALIASES = {"1+": "phi+", "1-": "phi-", "10": "psi+", "00": "psi-"}


def bell(kind="phi+") -> PureState:
    """One of the four Bell states: ``phi+/-`` = (|uu> +/- |dd>)/sqrt2, ``psi+/-`` = (|ud> +/- |du>)/sqrt2."""
    key = _BELL_ALIASES.get(kind, kind)
    if key not in _BELL:
        raise ValueError(f"unknown Bell state {kind!r}; choose from {sorted(_BELL)}")
    a, b, c, d, s = _BELL[key]
    return PureState((product_ket(a, b) + s * product_ket(c, d)) / np.sqrt(2), (2, 2))


def pure_family(x) -> PureState:
    """``cos(x)|uu> + sin(x)|dd>``."""
    return PureState(np.cos(x) * product_ket(U, U) + np.sin(x) * product_ket(D, D), (2, 2))


def maximally_correlated(d, terms=None) -> PureState:
    """``sum_{i<terms} |a_i b_i> / sqrt(terms)`` in ``d x d``."""
    terms = d if terms is None else terms
    if not 1 <= terms <= d:
        raise ValueError(f"terms must lie in 1..{d}")
    v = np.zeros(d * d, dtype=complex)
    for i in range(terms):
        v[i * d + i] = 1
    return PureState(v / np.sqrt(terms), (d, d))


def named_mixtures() -> dict:
    """Catalog of the named two-qubit states, each with its literal prefactors.

    Keys: ``rho1`` .. ``rho4`` (the four-state comparison), ``counterexample``
    (zero covariance but nonzero alternative covariance), ``lgm_input`` and
    ``lgm_output`` (the local-measurement pair).
    """
    uu, ud, du, dd = (product_ket(a, b) for a, b in ((U, U), (U, D), (D, U), (D, D)))
    plus = U + D
    pp = product_ket(plus, plus)
    dims = (2, 2)
    return {
        "rho1": from_kets([(0.5, uu), (0.5, dd)], dims),
        "rho2": from_kets([(0.5, uu), (0.25, uu + dd)], dims),
        "rho3": from_kets([(1.0, uu)], dims),
        "rho4": from_kets([(0.5, uu + dd)], dims),
        "counterexample": from_kets([(0.25, uu + dd), (0.25, ud), (0.25, du)], dims),
        "lgm_input": from_kets([(1.0, uu)], dims),
        "lgm_output": from_kets([(0.5, uu), (0.125, pp)], dims),
    }


def named_state(name) -> DensityMatrix:
    """Resolve a catalog name, a Bell label, or ``maxcorr<d>`` / ``twoterm<d>``."""
    catalog = named_mixtures()
    if name in catalog:
        return catalog[name]
    key = _BELL_ALIASES.get(name, name)
    if key in _BELL:
        return bell(key).projector()
    for prefix, terms in (("maxcorr", None), ("twoterm", 2)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return maximally_correlated(int(name[len(prefix):]), terms).projector()
    known = sorted(catalog) + sorted(_BELL) + ["maxcorr<d>", "twoterm<d>"]
    raise ValueError(f"unknown state {name!r}; known: {', '.join(known)}")


# -- JSON exchange format ----------------------------------------------------
# {"dims": [d1, d2], "matrix": [[[re, im], ...], ...]}


def to_json_dict(rho: DensityMatrix) -> dict:
    out = {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat]}
    if rho.dims is not None:
        out = {"dims": list(rho.dims), **out}
    return out


def _parse_entry(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)):
        return complex(x[0], x[1])
    raise InvalidStateError(f"{where}: expected a number or [re, im] pair, got {x!r}")


def from_json_dict(obj) -> DensityMatrix:
    """Parse the JSON exchange format; errors name the offending path."""
    if not isinstance(obj, dict):
        raise InvalidStateError("top level: expected an object with a 'matrix' key")
    if "matrix" not in obj:
        raise InvalidStateError("top level: missing 'matrix'")
    rows = obj["matrix"]
    if not isinstance(rows, list) or not rows:
        raise InvalidStateError("matrix: expected a non-empty list of rows")
    n = len(rows)
    mat = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InvalidStateError(f"matrix[{i}]: expected a row of length {n}")
        for j, x in enumerate(row):
            mat[i, j] = _parse_entry(x, f"matrix[{i}][{j}]")
    dims = obj.get("dims")
    if dims is not None:
        if (not isinstance(dims, list) or len(dims) != 2
                or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims)):
            raise InvalidStateError(f"dims: expected [d1, d2] integers, got {dims!r}")
        dims = tuple(dims)
    return DensityMatrix(mat, dims)


def loads(text) -> DensityMatrix:
    """Parse a JSON document; syntax errors report line and column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_json_dict(obj)


def load(path) -> DensityMatrix:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text)
    except InvalidStateError as exc:
        raise InvalidStateError(f"{path}: {exc}") from None
