"""Dense alternating tensors on a 6-dimensional space.

A k-form is stored as a full ``(n,)*k`` array with
``alpha[i1, ..., ik] = alpha(e_i1, ..., e_ik)``; the wedge product uses the
determinant convention, so ``(e^1 ^ e^2)[0, 1] = 1``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial

import numpy as np

__all__ = [
    "alternate",
    "wedge",
    "wedge_all",
    "pullback",
    "form_norm",
    "independent_components",
    "is_alternating",
    "hermitian_norm",
    "orthonormal_basis",
]


@lru_cache(maxsize=None)
def _perms(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    out = []
    for p in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        out.append((p, -1 if inv % 2 else 1))
    return tuple(out)


def alternate(t: np.ndarray) -> np.ndarray:
    """Antisymmetrisation ``(1/k!) sum sgn(s) t o s`` over all axes."""
    k = t.ndim
    if k < 2:
        return np.array(t, copy=True)
    out = np.zeros_like(t)
    for p, s in _perms(k):
        out = out + s * np.transpose(t, p)
    return out / factorial(k)


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k, l = a.ndim, b.ndim
    if k == 0 or l == 0:
        return a * b
    coef = factorial(k + l) / (factorial(k) * factorial(l))
    return coef * alternate(np.multiply.outer(a, b))


def wedge_all(*forms: np.ndarray) -> np.ndarray:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def pullback(alpha: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Components of ``alpha`` on the columns of ``basis``."""
    out = alpha
    for axis in range(alpha.ndim):
        out = np.moveaxis(np.tensordot(out, basis, axes=([axis], [0])), -1, axis)
    return out


def independent_components(alpha: np.ndarray) -> np.ndarray:
    """Components ``alpha[I]`` over strictly increasing index tuples."""
    n, k = alpha.shape[0], alpha.ndim
    idx = list(itertools.combinations(range(n), k))
    return np.array([alpha[i] for i in idx])


def form_norm(alpha: np.ndarray, metric: np.ndarray | None = None) -> float:
    """Pointwise norm ``sqrt(sum_{I increasing} |alpha_I|^2)`` in an
    orthonormal frame of ``metric`` (identity when omitted)."""
    if metric is not None and alpha.ndim > 0:
        alpha = pullback(alpha, orthonormal_basis(metric))
    if alpha.ndim == 0:
        return float(abs(alpha))
    return float(np.sqrt(np.sum(np.abs(independent_components(alpha)) ** 2)))


def orthonormal_basis(metric: np.ndarray) -> np.ndarray:
    """Columns ``B`` with ``B.T @ metric @ B = 1`` (upper triangular, smooth in the metric)."""
    chol = np.linalg.cholesky(metric)
    return np.linalg.inv(chol).T


def is_alternating(t: np.ndarray, tol: float = 1e-12) -> bool:
    for i in range(t.ndim - 1):
        if np.max(np.abs(t + np.swapaxes(t, i, i + 1)), initial=0.0) > tol:
            return False
    return True


def hermitian_norm(alpha: np.ndarray, metric: np.ndarray | None = None) -> float:
    """Norm for which ``dz = e1 + i e2`` of an orthonormal pair has unit length.

    This is ``form_norm / 2**(k/2)``: the Hermitian metric on complex
    covectors is half the sesquilinear extension of ``g``.
    """
    return form_norm(alpha, metric) / 2.0 ** (alpha.ndim / 2.0)
