"""(p,q)-type decomposition of complexified forms relative to an arbitrary
almost complex structure.

Each argument of the form is projected by ``P10 = (1 - i I)/2`` or its
conjugate ``P01 = (1 + i I)/2``; no coframe is needed, so this works for any
almost complex structure and serves as the brute-force oracle for every type
statement.
"""
from __future__ import annotations

import itertools

import numpy as np

from nkverify.errors import DegreeMismatchError, NotTopTypeError
from nkverify.forms import independent_components, wedge_all

__all__ = [
    "projectors",
    "pq_project",
    "decompose",
    "type_residual",
    "is_type",
    "coefficient_in_coframe",
]


def projectors(acs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = acs.shape[0]
    p10 = 0.5 * (np.eye(n) - 1j * acs)
    return p10, p10.conj()


def _on_slots(alpha: np.ndarray, mats) -> np.ndarray:
    out = alpha
    for axis, m in enumerate(mats):
        out = np.moveaxis(np.tensordot(out, m, axes=([axis], [0])), -1, axis)
    return out


def pq_project(form: np.ndarray, acs: np.ndarray, p: int, q: int) -> np.ndarray:
    """The (p,q) component of ``form`` with respect to ``acs``."""
    k = form.ndim
    if p < 0 or q < 0 or p + q != k:
        raise DegreeMismatchError(f"type ({p},{q}) does not fit a {k}-form")
    p10, p01 = projectors(acs)
    out = np.zeros(form.shape, dtype=complex)
    for slots in itertools.combinations(range(k), p):
        mats = [p10 if s in slots else p01 for s in range(k)]
        out += _on_slots(form.astype(complex), mats)
    return out


def decompose(form: np.ndarray, acs: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    k = form.ndim
    return {(p, k - p): pq_project(form, acs, p, k - p) for p in range(k + 1)}


def type_residual(form: np.ndarray, acs: np.ndarray, allowed) -> float:
    """Largest component magnitude outside the ``allowed`` types."""
    k = form.ndim
    allowed = {tuple(t) for t in allowed}
    worst = 0.0
    for p in range(k + 1):
        if (p, k - p) in allowed:
            continue
        part = pq_project(form, acs, p, k - p)
        worst = max(worst, float(np.max(np.abs(part), initial=0.0)))
    return worst


def is_type(form: np.ndarray, acs: np.ndarray, allowed, tol: float) -> bool:
    return type_residual(form, acs, allowed) < tol


def coefficient_in_coframe(form30: np.ndarray, coframe: np.ndarray, tol: float = 1e-9) -> complex:
    """Scalar ``c`` with ``form30 = c * theta1 ^ theta2 ^ theta3``.

    ``coframe`` holds the three (1,0) covectors as rows.  Raises
    :class:`NotTopTypeError` when ``form30`` is not a multiple of the wedge.
    """
    w = independent_components(wedge_all(*coframe))
    f = independent_components(np.asarray(form30, dtype=complex))
    c = np.vdot(w, f) / np.vdot(w, w)
    mismatch = float(np.max(np.abs(f - c * w), initial=0.0))
    if mismatch > tol * max(1.0, float(np.max(np.abs(f), initial=0.0))):
        raise NotTopTypeError(f"form is not of top type in this coframe (mismatch {mismatch:.3e})")
    return complex(c)
