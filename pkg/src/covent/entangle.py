"""Covariance entanglement: maximal local covariance over local unitaries.

For a bipartite state ``rho`` and local operators ``A (x) 1`` and
``1 (x) B`` the measure is

    E(rho) = max over U = U1 (x) U2 of |cov_{U rho U^dagger}(A (x) 1, 1 (x) B)|

or the same with the alternative covariance. Conjugating the state is the
same as conjugating the operators, ``A -> U1^dagger A U1``, and both
covariances are bilinear in the rotated pair, so each state is reduced
once to a ``d1^2 x d2^2`` kernel and the search only touches small
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from . import qmat
from .correlation import alt_cov, cov, variance
from .exceptions import DimensionError, InvalidStateError
from .states import DensityMatrix, PureState, bell, mix, pure_family

MEASURES = ("cov", "altcov")


# -- local operators -----------------------------------------------------------


def pair_discrimination_operator(d, slots=(0, 1)):
    """``diag`` with +1 at ``slots[0]``, -1 at ``slots[1]`` and zeros elsewhere."""
    i, j = slots
    if d < 2:
        raise ValueError("pair discrimination needs d >= 2")
    if i == j or not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"slots must be distinct indices in 0..{d - 1}, got {slots!r}")
    diag = np.zeros(d, dtype=complex)
    diag[i], diag[j] = 1, -1
    return np.diag(diag)


def equal_weight_operator(d):
    """``diag(exp(2 pi i k / d))`` for ``k = 1..d``: unitary and traceless."""
    if d < 2:
        raise ValueError("equal-weight operator needs d >= 2")
    return np.diag(np.exp(2j * np.pi * np.arange(1, d + 1) / d))


def named_operator(kind, d):
    """``sigma3`` (d = 2 only), ``equal-weight`` or ``pair`` (slots 0, 1)."""
    if kind == "sigma3":
        if d != 2:
            raise DimensionError("sigma3 operators need local dimension 2")
        return qmat.SIGMA_Z.copy()
    if kind == "equal-weight":
        return equal_weight_operator(d)
    if kind == "pair":
        return pair_discrimination_operator(d)
    raise ValueError(f"unknown operator kind {kind!r}")


@dataclass(frozen=True)
class LocalOperator:
    """An operator on one factor and its embedding into the product space."""

    side: int
    local_mat: np.ndarray
    other_dim: int

    def __post_init__(self):
        if self.side not in (1, 2):
            raise ValueError(f"side must be 1 or 2, got {self.side!r}")
        m = qmat.as_matrix(self.local_mat, "local operator").copy()
        m.setflags(write=False)
        object.__setattr__(self, "local_mat", m)

    @property
    def dim(self) -> int:
        return self.local_mat.shape[0]

    @property
    def dims(self):
        return (self.dim, self.other_dim) if self.side == 1 else (self.other_dim, self.dim)

    @property
    def embedded(self):
        eye = np.eye(self.other_dim)
        return np.kron(self.local_mat, eye) if self.side == 1 else np.kron(eye, self.local_mat)


def local_pair(a, b, dims):
    """Coerce ``(a, b)`` into side-1 and side-2 :class:`LocalOperator` objects."""
    d1, d2 = dims
    if isinstance(a, LocalOperator):
        if a.side != 1:
            raise ValueError("first operator must act on side 1")
    else:
        a = LocalOperator(1, a, d2)
    if isinstance(b, LocalOperator):
        if b.side != 2:
            raise ValueError("second operator must act on side 2")
    else:
        b = LocalOperator(2, b, d1)
    if a.dims != (d1, d2) or b.dims != (d1, d2):
        raise DimensionError(f"local operators {a.dim}x{b.dim} do not fit bipartition {dims}")
    return a, b


# -- local unitaries -------------------------------------------------------------


@lru_cache(maxsize=None)
def _index_cache(d):
    iu = np.triu_indices(d, 1)
    return np.diag_indices(d), iu, (iu[1], iu[0]), len(iu[0])


def _unitary(theta, d):
    # unchecked fast path of qmat.unitary_from_params for the search loop
    diag, iu, il, k = _index_cache(d)
    h = np.zeros((d, d), dtype=complex)
    h[diag] = theta[:d]
    h[iu] = theta[d:d + k] + 1j * theta[d + k:]
    h[il] = np.conj(h[iu])
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


@dataclass(frozen=True)
class LocalUnitary:
    u1: np.ndarray
    u2: np.ndarray
    params: np.ndarray

    @classmethod
    def from_params(cls, params, dims):
        d1, d2 = dims
        params = np.asarray(params, dtype=float)
        if params.shape != (d1 * d1 + d2 * d2,):
            raise DimensionError(f"expected {d1 * d1 + d2 * d2} parameters, got {params.shape}")
        return cls(
            qmat.unitary_from_params(params[:d1 * d1], d1),
            qmat.unitary_from_params(params[d1 * d1:], d2),
            params,
        )

    @classmethod
    def identity(cls, dims):
        d1, d2 = dims
        return cls.from_params(np.zeros(d1 * d1 + d2 * d2), dims)

    @property
    def dims(self):
        return (self.u1.shape[0], self.u2.shape[0])

    @property
    def matrix(self):
        return np.kron(self.u1, self.u2)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return rho.conjugate_by(self.matrix)


def random_local_unitary(rng, dims) -> LocalUnitary:
    d1, d2 = dims
    return LocalUnitary.from_params(rng.uniform(-np.pi, np.pi, d1 * d1 + d2 * d2), dims)


# -- objective ---------------------------------------------------------------------


def _state(rho, dims=None):
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho, dims)
    elif dims is not None and rho.dims != tuple(dims):
        rho = DensityMatrix(rho.mat, dims)
    if rho.dims is None:
        raise DimensionError("state needs a bipartition (d1, d2)")
    return rho


def covariance_kernel(rho, measure="cov"):
    """Reduce a bipartite state to ``(K, l1, l2)`` with

        value(a, b) = vec(a) . K . vec(b) - (l1 . vec(a)) (l2 . vec(b))

    where ``vec`` is the row-major flattening of a local operator. For
    ``altcov`` the linear terms are absent and ``l1``, ``l2`` are ``None``.
    """
    rho = _state(rho)
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}")
    d1, d2 = rho.dims
    r = rho.mat
    r4 = r.reshape(d1, d2, d1, d2)
    if measure == "cov":
        k = r4.transpose(2, 0, 3, 1).reshape(d1 * d1, d2 * d2)
        l1 = qmat.partial_trace(r, rho.dims, 2).T.ravel()
        l2 = qmat.partial_trace(r, rho.dims, 1).T.ravel()
        return k, l1, l2
    sq4 = (r @ r).reshape(d1, d2, d1, d2)
    k = sq4.transpose(2, 0, 3, 1).reshape(d1 * d1, d2 * d2)
    k = k - np.einsum("aibj,cjak->bcki", r4, r4).reshape(d1 * d1, d2 * d2)
    return k, None, None


def _kernel_value(kernel, a, b):
    k, l1, l2 = kernel
    va, vb = a.ravel(), b.ravel()
    val = va @ k @ vb
    if l1 is not None:
        val = val - (l1 @ va) * (l2 @ vb)
    return val


def local_covariance(rho, a, b, unitary=None, measure="cov") -> complex:
    """Covariance of ``A (x) 1`` and ``1 (x) B`` in ``U rho U^dagger`` by direct evaluation."""
    rho = _state(rho)
    a, b = local_pair(a, b, rho.dims)
    if unitary is not None:
        rho = unitary.apply(rho)
    fn = cov if measure == "cov" else alt_cov
    return fn(rho, a.embedded, b.embedded)


# -- maximizer -----------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 32
    seed: int = 0
    tol: float = 1e-9
    max_iters: int = 5000

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class OptimizationResult:
    max_value: float
    optimizer: LocalUnitary
    restarts: int
    converged: bool
    history: tuple
    measure: str = "cov"
    state: PureState | None = None
    extras: dict = field(default_factory=dict)

    @property
    def squared(self) -> float:
        return self.max_value ** 2

    def as_dict(self):
        out = {
            "measure": self.measure,
            "max_value": self.max_value,
            "max_value_sq": self.squared,
            "restarts": self.restarts,
            "converged": self.converged,
            "history": list(self.history),
            "u1": _cplx(self.optimizer.u1),
            "u2": _cplx(self.optimizer.u2),
        }
        if self.state is not None:
            out["state"] = [[float(z.real), float(z.imag)] for z in self.state.amplitudes]
        out.update(self.extras)
        return out


def _cplx(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def multistart_maximize(fn, n_params, settings, x0=None):
    """Maximize ``fn`` by derivative-free Powell searches from seeded starts.

    Restart 0 begins at ``x0`` (zeros by default, the identity for a unitary
    parametrization); later ones draw uniformly from ``[-pi, pi]``. Ties are
    resolved in favour of the lower restart index, so the outcome depends
    only on ``settings``.

    Returns ``(best_x, best_value, history, converged)``.
    """
    rng = np.random.default_rng(settings.seed)
    starts = [np.zeros(n_params) if x0 is None else np.asarray(x0, dtype=float)]
    starts += [rng.uniform(-np.pi, np.pi, n_params) for _ in range(settings.restarts - 1)]
    best = None
    history = []
    for x in starts:
        res = minimize(
            lambda t: -fn(t), x, method="Powell",
            options={"maxiter": settings.max_iters, "xtol": 1e-8, "ftol": settings.tol},
        )
        val = float(-res.fun)
        history.append(val)
        if best is None or val > best[1]:
            best = (np.asarray(res.x), val, bool(res.success))
    return best[0], best[1], tuple(history), best[2]


def covariance_entanglement(rho, a, b, measure="cov", settings=None, dims=None) -> OptimizationResult:
    """Maximal ``|cov|`` (or ``|C|`` for ``measure="altcov"``) over local unitaries.

    Parameters
    ----------
    rho : DensityMatrix or array_like
        Bipartite state; ``dims`` is required when it carries no bipartition.
    a, b : LocalOperator or array_like
        Local operators on side 1 and side 2.
    measure : {"cov", "altcov"}
    settings : OptimizerSettings, optional

    Returns
    -------
    OptimizationResult
        ``max_value`` is the magnitude, not its square.
    """
    settings = settings or OptimizerSettings()
    rho = _state(rho, dims)
    a, b = local_pair(a, b, rho.dims)
    d1, d2 = rho.dims
    kernel = covariance_kernel(rho, measure)
    am, bm = a.local_mat, b.local_mat
    n1 = d1 * d1

    def value(theta):
        u1 = _unitary(theta[:n1], d1)
        u2 = _unitary(theta[n1:], d2)
        return abs(_kernel_value(kernel, u1.conj().T @ am @ u1, u2.conj().T @ bm @ u2))

    x, best, history, ok = multistart_maximize(value, n1 + d2 * d2, settings)
    return OptimizationResult(
        max_value=best,
        optimizer=LocalUnitary.from_params(x, rho.dims),
        restarts=settings.restarts,
        converged=ok,
        history=history,
        measure=measure,
    )


def max_cov_unequal_dims(d1=2, d2=3, settings=None) -> OptimizationResult:
    """Best ``|cov|`` over pure ``d1 x d2`` states for equal-weight operators.

    The operators are ``diag(1, -1)`` on side 1 (for ``d1 = 2``; the
    equal-weight operator otherwise) and ``diag(1, w, w^2, ...)`` with
    ``w = exp(2 pi i / d2)`` on side 2. A pure state is written as local
    unitaries applied to ``sqrt(p)|00> + sqrt(1-p)|11>``, so the search runs
    over one Schmidt angle plus the two unitaries. ``extras["gap"]`` holds
    ``1 - max_value``.
    """
    settings = settings or OptimizerSettings(restarts=64)
    if d1 > d2:
        raise ValueError("expects d1 <= d2")
    a = np.diag([1.0, -1.0]).astype(complex) if d1 == 2 else equal_weight_operator(d1)
    b = np.diag(np.exp(2j * np.pi * np.arange(d2) / d2))
    ae, be = np.kron(a, np.eye(d2)), np.kron(np.eye(d1), b)
    abe = ae @ be
    n1, n2 = d1 * d1, d2 * d2

    def state_of(theta):
        phi = theta[0]
        psi0 = np.zeros(d1 * d2, dtype=complex)
        psi0[0] = np.cos(phi)
        psi0[1 * d2 + 1] = np.sin(phi)
        u = np.kron(_unitary(theta[1:1 + n1], d1), _unitary(theta[1 + n1:], d2))
        return u @ psi0

    def value(theta):
        psi = state_of(theta)
        c = np.vdot(psi, abe @ psi) - np.vdot(psi, ae @ psi) * np.vdot(psi, be @ psi)
        return abs(c)

    x, best, history, ok = multistart_maximize(value, 1 + n1 + n2, settings)
    psi = state_of(x)
    return OptimizationResult(
        max_value=best,
        optimizer=LocalUnitary.from_params(x[1:], (d1, d2)),
        restarts=settings.restarts,
        converged=ok,
        history=history,
        measure="cov",
        state=PureState(psi / np.linalg.norm(psi), (d1, d2)),
        extras={"gap": 1.0 - best, "schmidt_weight": float(np.cos(x[0]) ** 2)},
    )


def minimize_local_variance(rho, a, side=1, settings=None) -> float:
    """Smallest variance of the rotated local operator ``u^dagger a u`` on one side."""
    settings = settings or OptimizerSettings(restarts=8)
    rho = _state(rho)
    d1, d2 = rho.dims
    d, other = (d1, d2) if side == 1 else (d2, d1)
    a = qmat.as_matrix(a)
    if a.shape != (d, d):
        raise DimensionError(f"operator of size {a.shape} does not act on side {side}")
    reduced = qmat.partial_trace(rho.mat, rho.dims, 2 if side == 1 else 1)

    def neg_var(theta):
        u = _unitary(theta, d)
        ar = u.conj().T @ a @ u
        m1 = np.trace(reduced @ ar)
        m2 = np.trace(reduced @ ar @ ar)
        return -(m2 - m1 * m1).real

    _, best, _, _ = multistart_maximize(neg_var, d * d, settings)
    return -best


# -- channels ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KrausChannel:
    """Kraus operators ``V_i`` with ``sum V_i^dagger V_i = gamma * I``."""

    ops: tuple
    completeness: float = 0.0

    def __post_init__(self):
        ops = tuple(qmat.as_matrix(v, f"Kraus operator {k}") for k, v in enumerate(self.ops))
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        n = ops[0].shape[0]
        if any(v.shape != (n, n) for v in ops):
            raise DimensionError("Kraus operators have different dimensions")
        s = sum(qmat.adjoint(v) @ v for v in ops)
        gamma = float(np.trace(s).real / n)
        if gamma <= 0 or not qmat.allclose(s, gamma * np.eye(n), 1e-10):
            raise ValueError("sum of V^dagger V is not proportional to the identity")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "completeness", gamma)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]


def apply_channel(rho, channel: KrausChannel, renormalize=False) -> DensityMatrix:
    """``sum V rho V^dagger``; divided by its trace only when ``renormalize`` is set."""
    dims = rho.dims if isinstance(rho, DensityMatrix) else None
    r = rho.mat if isinstance(rho, DensityMatrix) else DensityMatrix(rho).mat
    if channel.dim != r.shape[0]:
        raise DimensionError(f"channel acts on dimension {channel.dim}, state has {r.shape[0]}")
    out = sum(v @ r @ qmat.adjoint(v) for v in channel.ops)
    tr = float(np.trace(out).real)
    if tr <= 1e-14:
        raise InvalidStateError("channel output has zero trace")
    if renormalize:
        out = out / tr
    elif abs(tr - 1) > 1e-8:
        raise InvalidStateError(f"channel output has trace {tr!r}; pass renormalize=True to rescale")
    return DensityMatrix(out, dims)


def lgm_channel() -> KrausChannel:
    """Eight local product measurements taking ``|uu><uu|`` to
    ``|uu><uu|/2 + |(u+d)(u+d)><(u+d)(u+d)|/8``.

    For each product basis bra ``<k|`` in ``<uu|, <ud|, <du|, <dd|`` there
    is ``|uu><k| / sqrt2`` and ``|(u+d)(u+d)><k| / (2 sqrt2)``.
    """
    u, d = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    plus = u + d
    uu, pp = np.kron(u, u), np.kron(plus, plus)
    ops = []
    for bra in (np.kron(u, u), np.kron(u, d), np.kron(d, u), np.kron(d, d)):
        ops.append(np.outer(uu, bra) / np.sqrt(2))
        ops.append(np.outer(pp, bra) / (2 * np.sqrt(2)))
    return KrausChannel(tuple(ops))


# -- separable mixtures --------------------------------------------------------------------


def separable_mixture(terms) -> DensityMatrix:
    """``sum_k w_k rho1_k (x) rho2_k`` from ``(w, rho1, rho2)`` triples."""
    terms = list(terms)
    if not terms:
        raise ValueError("no terms given")
    d1 = qmat.as_matrix(terms[0][1]).shape[0]
    d2 = qmat.as_matrix(terms[0][2]).shape[0]
    return mix([(w, np.kron(qmat.as_matrix(p1), qmat.as_matrix(p2))) for w, p1, p2 in terms], (d1, d2))


def separable_mixture_altcov_audit(terms, a, b) -> float:
    """``|C(A (x) 1, 1 (x) B)|`` for a mixture of local product terms.

    Zero whenever the local states on each side are mutually orthogonal
    projectors; generally nonzero for overlapping ones.
    """
    rho = separable_mixture(terms)
    a, b = local_pair(a, b, rho.dims)
    return abs(alt_cov(rho, a.embedded, b.embedded))


def has_orthogonal_local_projectors(terms, atol=1e-10) -> bool:
    """True when ``rho_i rho_j = delta_ij rho_i`` holds on both sides."""
    for side in (1, 2):
        mats = [qmat.as_matrix(t[side]) for t in terms]
        for i, p in enumerate(mats):
            for j, q in enumerate(mats):
                target = p if i == j else np.zeros_like(p)
                if not qmat.allclose(p @ q, target, atol):
                    return False
    return True


# -- identity-orientation sweeps -------------------------------------------------------------


def pure_family_scan(points=101, start=0.0, stop=np.pi / 2):
    """cov, C and var(sigma3 (x) 1) along ``cos(x)|uu> + sin(x)|dd>``."""
    xs = np.linspace(start, stop, points)
    a = np.kron(qmat.SIGMA_Z, np.eye(2))
    b = np.kron(np.eye(2), qmat.SIGMA_Z)
    rows = {"x": xs, "abs_cov": [], "abs_alt_cov": [], "var_a": []}
    for x in xs:
        rho = pure_family(x).projector()
        rows["abs_cov"].append(abs(cov(rho, a, b)))
        rows["abs_alt_cov"].append(abs(alt_cov(rho, a, b)))
        rows["var_a"].append(variance(rho, a))
    return {k: np.asarray(v, dtype=float) for k, v in rows.items()}


def bell_mixture_scan(points=101, b1="phi+", b2="psi+", operators="equal-weight"):
    """``|cov|`` and ``|C|`` for ``x P_b1 + (1 - x) P_b2`` at identity orientation."""
    p1, p2 = bell(b1).projector(), bell(b2).projector()
    a = named_operator(operators, 2)
    ae, be = np.kron(a, np.eye(2)), np.kron(np.eye(2), a)
    xs = np.linspace(0.0, 1.0, points)
    rows = {"x": xs, "abs_cov": [], "abs_alt_cov": []}
    for x in xs:
        rho = DensityMatrix(x * p1.mat + (1 - x) * p2.mat, (2, 2))
        rows["abs_cov"].append(abs(cov(rho, ae, be)))
        rows["abs_alt_cov"].append(abs(alt_cov(rho, ae, be)))
    return {k: np.asarray(v, dtype=float) for k, v in rows.items()}


def bell_rotation_scan(points=101, state="phi+", operators="equal-weight", stop=np.pi):
    """Rotate both local operators together by ``exp(-i theta sigma/2)``, about x and about y."""
    rho = bell(state).projector()
    a = named_operator(operators, 2)
    thetas = np.linspace(0.0, stop, points)
    rows = {"theta": thetas}
    for axis, gen in (("x", qmat.SIGMA_X), ("y", qmat.SIGMA_Y)):
        c, ca = [], []
        for t in thetas:
            u = qmat.expm_hermitian(-t * gen / 2)
            ar = qmat.adjoint(u) @ a @ u
            ae, be = np.kron(ar, np.eye(2)), np.kron(np.eye(2), ar)
            c.append(abs(cov(rho, ae, be)))
            ca.append(abs(alt_cov(rho, ae, be)))
        rows[f"abs_cov_{axis}"] = np.asarray(c)
        rows[f"abs_alt_cov_{axis}"] = np.asarray(ca)
    return rows
