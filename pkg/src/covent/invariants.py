"""Local-unitary invariants of bipartite states and singlet counting."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qmat
from .exceptions import DimensionError
from .states import DensityMatrix

EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class InvariantSet:
    """Quadratic invariants; ``eps`` is ``None`` outside 2x2."""

    chi1: float
    chi2: float
    purity: float
    eps: float | None = None

    def as_dict(self):
        return {"chi1": self.chi1, "chi2": self.chi2, "purity": self.purity, "eps": self.eps}


def _bipartite(rho, dims):
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho, dims)
    elif dims is not None:
        rho = DensityMatrix(rho.mat, dims)
    if rho.dims is None:
        raise DimensionError("invariants need a bipartition; pass dims=(d1, d2)")
    return rho


def eps_contraction(mat):
    """``eps_{aa'} eps^{bb'} eps_{ii'} eps^{jj'} rho^{ai}_{bj} rho^{a'i'}_{b'j'}``
    with ``rho^{ai}_{bj} = <a,i|rho|b,j>``, for 2x2 only."""
    r = np.asarray(mat, dtype=complex).reshape(2, 2, 2, 2)  # a, i, b, j
    e = EPSILON
    val = np.einsum("ac,bd,ik,jl,aibj,ckdl->", e, e, e, e, r, r)
    return float(val.real)


def chi_invariants(rho, dims=None) -> InvariantSet:
    rho = _bipartite(rho, dims)
    r1 = qmat.partial_trace(rho.mat, rho.dims, 2)
    r2 = qmat.partial_trace(rho.mat, rho.dims, 1)
    chi1 = float(np.sum(np.abs(r1) ** 2))
    chi2 = float(np.sum(np.abs(r2) ** 2))
    eps = eps_contraction(rho.mat) if rho.dims == (2, 2) else None
    return InvariantSet(chi1, chi2, rho.purity, eps)


def entanglement_form(f, g):
    """Evaluator ``rho -> f(chi1, chi2) + purity * g(chi1, chi2)`` on 2x2 states.

    Any local-unitary-invariant quantity quadratic in the integrity basis
    has this shape; ``f`` and ``g`` are left to the caller.
    """

    def evaluate(rho, dims=(2, 2)):
        inv = chi_invariants(rho, dims)
        return f(inv.chi1, inv.chi2) + inv.purity * g(inv.chi1, inv.chi2)

    return evaluate


@lru_cache(maxsize=None)
def partitions_at_most(n: int, parts: int) -> int:
    """Number of partitions of ``n`` into at most ``parts`` parts."""
    if n < 0 or parts < 0:
        raise ValueError("n and parts must be nonnegative")
    # table[k] counts partitions of k with parts <= m, building m up to `parts`
    # (conjugation: at most `parts` parts <=> largest part <= `parts`)
    table = [1] + [0] * n
    for m in range(1, parts + 1):
        for k in range(m, n + 1):
            table[k] += table[k - m]
    return table[n]


def singlet_count(n: int, d1: int, d2: int) -> int:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if d1 < 1 or d2 < 1:
        raise ValueError(f"dimensions must be >= 1, got {d1}, {d2}")
    return partitions_at_most(n, d1) * partitions_at_most(n, d2)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def series_divide(num, den, terms):
    """First ``terms`` coefficients of ``num / den`` as a power series.

    Integer arithmetic throughout; ``den[0]`` must be +-1.
    """
    if den[0] not in (1, -1):
        raise ValueError("constant term of the denominator must be +-1")
    num = list(num) + [0] * max(0, terms - len(num))
    out = []
    for n in range(terms):
        acc = num[n] - sum(den[k] * out[n - k] for k in range(1, min(n, len(den) - 1) + 1))
        out.append(acc * den[0])
    return out


def generating_series(q_terms: int):
    """Taylor coefficients of ``(1 + q^2) / ((1 - q^2)^2 (1 - q))``."""
    if q_terms < 1:
        raise ValueError(f"q_terms must be >= 1, got {q_terms}")
    den = _poly_mul(_poly_mul([1, 0, -1], [1, 0, -1]), [1, -1])
    return series_divide([1, 0, 1], den, q_terms)
