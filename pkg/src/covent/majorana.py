"""Symmetric spin states as polynomials and constellations on the sphere.

A spin-j state ``sum_m psi_m |j, m>`` maps to the polynomial
``p(z) = sum_k a_k z^k`` with ``a_k = sqrt(C(2j, k)) psi_{k-j}``. Its roots,
lifted to the unit sphere by inverse stereographic projection, form the
constellation; a polynomial of degree ``2j - r`` contributes ``r`` extra
points at the South pole.

Amplitude vectors are indexed by ``k = j + m = 0 .. 2j`` (ascending m).
Sphere convention: ``z = x + iy`` maps to ``(2x, 2y, 1 - |z|^2) / (1 + |z|^2)``,
so ``z = 0`` is the North pole.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.linalg import expm

from .exceptions import InvalidStateError

LEADING_TOL = 1e-12


def _two_j(j) -> int:
    tj = 2 * j
    if abs(tj - round(tj)) > 1e-12 or round(tj) < 0:
        raise ValueError(f"j must be a nonnegative half-integer, got {j!r}")
    return int(round(tj))


def _binomials(two_j):
    return np.array([comb(two_j, k) for k in range(two_j + 1)], dtype=float)


@dataclass(frozen=True)
class SpinState:
    """Unit-norm amplitudes ``psi_m`` for ``m = -j .. j``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel().copy()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvalidStateError("amplitudes must be a finite non-empty vector")
        if abs(np.linalg.norm(v) - 1) > 1e-10:
            raise InvalidStateError(f"spin state has norm {np.linalg.norm(v)!r}, expected 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def normalized(cls, amplitudes):
        v = np.asarray(amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidStateError("zero vector is not a state")
        return cls(v / n)

    @classmethod
    def basis(cls, j, m):
        tj = _two_j(j)
        k = j + m
        if abs(k - round(k)) > 1e-12 or not 0 <= round(k) <= tj:
            raise ValueError(f"m={m} out of range for j={j}")
        v = np.zeros(tj + 1, dtype=complex)
        v[int(round(k))] = 1
        return cls(v)

    @property
    def two_j(self) -> int:
        return self.amplitudes.size - 1

    @property
    def j(self) -> float:
        return self.two_j / 2


@dataclass(frozen=True)
class MajoranaPolynomial:
    """Coefficients ``a_0 .. a_{2j}`` in ascending powers of ``z``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel().copy()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be a finite non-empty vector")
        if not np.any(c != 0):
            raise InvalidStateError("the zero polynomial represents no state")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def two_j(self) -> int:
        return self.coeffs.size - 1

    @property
    def j(self) -> float:
        return self.two_j / 2

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


@dataclass(frozen=True)
class Constellation:
    two_j: int
    points: np.ndarray
    roots_at_infinity: int
    roots: np.ndarray

    @property
    def j(self) -> float:
        return self.two_j / 2

    def as_dict(self):
        return {
            "j": self.j,
            "points": [[float(x) for x in p] for p in self.points],
            "roots_at_infinity": int(self.roots_at_infinity),
        }


def state_to_polynomial(state: SpinState) -> MajoranaPolynomial:
    return MajoranaPolynomial(np.sqrt(_binomials(state.two_j)) * state.amplitudes)


def _fix_phase(v):
    k = int(np.argmax(np.abs(v)))
    out = v * (abs(v[k]) / v[k])
    out[k] = abs(v[k])
    return out


def polynomial_to_state(p: MajoranaPolynomial) -> SpinState:
    """Inverse map; normalizes and makes the largest amplitude real positive."""
    psi = p.coeffs / np.sqrt(_binomials(p.two_j))
    return SpinState(_fix_phase(psi / np.linalg.norm(psi)))


def stereographic_lift(z):
    """Complex plane to the unit sphere, ``z = 0`` at the North pole."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    return np.stack([2 * z.real, 2 * z.imag, 1 - r2], axis=-1) / (1 + r2)[..., None]


def stereographic_project(points):
    """Unit sphere back to the plane; the South pole maps to ``inf``."""
    p = np.asarray(points, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (p[..., 0] + 1j * p[..., 1]) / (1 + p[..., 2])


def companion_roots(coeffs):
    """Roots of ``sum_k c_k z^k`` (trailing zero top coefficients already trimmed)
    as eigenvalues of the companion matrix."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp)


def roots(p: MajoranaPolynomial) -> Constellation:
    c = p.coeffs
    scale = np.max(np.abs(c))
    deg = p.two_j
    while deg > 0 and abs(c[deg]) < LEADING_TOL * scale:
        deg -= 1
    finite = companion_roots(c[:deg + 1])
    at_inf = p.two_j - deg
    pts = stereographic_lift(finite) if finite.size else np.zeros((0, 3))
    south = np.tile([0.0, 0.0, -1.0], (at_inf, 1))
    return Constellation(p.two_j, np.vstack([pts, south]), at_inf, finite)


def spin_matrices(two_j):
    """``(Jx, Jy, Jz, J+, J-)`` in the basis ``m = -j .. j``."""
    j = two_j / 2
    m = np.arange(two_j + 1) - j
    jz = np.diag(m).astype(complex)
    # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = np.diag(up, -1).astype(complex)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return jx, jy, jz, jp, jm


def mean_spin(state: SpinState):
    jx, jy, jz, _, _ = spin_matrices(state.two_j)
    v = state.amplitudes
    return np.array([np.vdot(v, op @ v).real for op in (jx, jy, jz)])


def dispersion(state: SpinState) -> float:
    """``<J.J> - <J>.<J>`` = ``j(j+1) - |<J>|^2``; rotation invariant."""
    j = state.j
    mj = mean_spin(state)
    return float(j * (j + 1) - mj @ mj)


_GENERATORS = {"Jz": 2, "J+": 3, "J-": 4}


def su2_action(state: SpinState, generator, xi) -> SpinState:
    """Apply ``exp(xi * generator)`` (``"Jz"``, ``"J+"`` or ``"J-"``) and renormalize."""
    if generator not in _GENERATORS:
        raise ValueError(f"generator must be one of {sorted(_GENERATORS)}, got {generator!r}")
    op = spin_matrices(state.two_j)[_GENERATORS[generator]]
    return SpinState.normalized(expm(xi * op) @ state.amplitudes)


def rotate(state: SpinState, theta, axis="y") -> SpinState:
    """Unitary rotation ``exp(-i theta J_axis)``."""
    idx = {"x": 0, "y": 1, "z": 2}[axis]
    op = spin_matrices(state.two_j)[idx]
    return SpinState(expm(-1j * theta * op) @ state.amplitudes)


def polynomial_flow(p: MajoranaPolynomial, generator, xi) -> MajoranaPolynomial:
    """The same flows acting directly on coefficients.

    ``Jz``: ``exp(-xi j) p(z e^xi)``; ``J-``: ``p(z + xi)``;
    ``J+``: ``(1 + xi z)^{2j} p(z / (1 + xi z))``. No renormalization.
    """
    n = p.two_j
    a = p.coeffs
    k = np.arange(n + 1)
    if generator == "Jz":
        return MajoranaPolynomial(np.exp(-xi * n / 2) * np.exp(xi * k) * a)
    out = np.zeros(n + 1, dtype=complex)
    if generator == "J-":
        # a_k (z + xi)^k = a_k sum_i C(k, i) xi^(k-i) z^i
        for kk in range(n + 1):
            for i in range(kk + 1):
                out[i] += a[kk] * comb(kk, i) * xi ** (kk - i)
        return MajoranaPolynomial(out)
    if generator == "J+":
        # a_k z^k (1 + xi z)^(n-k) = a_k sum_i C(n-k, i) xi^i z^(k+i)
        for kk in range(n + 1):
            for i in range(n - kk + 1):
                out[kk + i] += a[kk] * comb(n - kk, i) * xi ** i
        return MajoranaPolynomial(out)
    raise ValueError(f"generator must be one of {sorted(_GENERATORS)}, got {generator!r}")


def overlap_from_polynomials(p: MajoranaPolynomial, q: MajoranaPolynomial) -> complex:
    """``<psi_q | psi_p> = sum_k a_k conj(b_k) / C(2j, k)``."""
    if p.two_j != q.two_j:
        raise ValueError(f"spin mismatch: j={p.j} vs j={q.j}")
    return complex(np.sum(p.coeffs * np.conj(q.coeffs) / _binomials(p.two_j)))


def coherent_polynomial(a, b, two_j) -> MajoranaPolynomial:
    """``(a z + b)^{2j}``: all roots coincide at ``-b/a``."""
    c = np.array([comb(two_j, k) * a ** k * b ** (two_j - k) for k in range(two_j + 1)], dtype=complex)
    return MajoranaPolynomial(c)


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    polynomial: MajoranaPolynomial
    state: SpinState
    constellation: Constellation
    dispersion: float

    def as_dict(self):
        return {
            "label": self.label,
            "j": self.polynomial.j,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.polynomial.coeffs],
            "amplitudes": [[float(c.real), float(c.imag)] for c in self.state.amplitudes],
            "dispersion": self.dispersion,
            "constellation": self.constellation.as_dict(),
        }


def _entry(label, coeffs):
    p = MajoranaPolynomial(coeffs)
    s = polynomial_to_state(p)
    return CatalogEntry(label, p, s, roots(p), dispersion(s))


def max_dispersion_catalog(j):
    """Symmetric states of maximal dispersion ``j(j+1)`` for ``j`` in 1, 3/2, 2, 5/2."""
    tj = _two_j(j)
    if tj == 2:
        return [_entry("antipodal: z^2 + 1", [1, 0, 1])]
    if tj == 3:
        return [_entry("triangle: z^3 + 1", [1, 0, 0, 1])]
    if tj == 4:
        return [_entry("tetrahedron: z^4 + 2 sqrt2 z", [0, 2 * np.sqrt(2), 0, 0, 1])]
    if tj == 5:
        return [
            _entry("pyramid: z^5 + 5 z / sqrt3", [0, 5 / np.sqrt(3), 0, 0, 0, 1]),
            _entry("bipyramid: z^4 + z", [0, 1, 0, 0, 1, 0]),
        ]
    raise ValueError(f"no catalog for j={j}; supported: 1, 3/2, 2, 5/2")
