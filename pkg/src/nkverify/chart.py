"""Coordinate charts and finite-difference calculus.

The sphere chart is the orthographic graph chart
``q(x) = sqrt(1 - |x|^2) p0 + E x`` over the unit ball in R^6.  All
derivatives of fields on the sphere are taken in these coordinates with the
second-order central stencil.  :class:`FlatChart` is the identity chart of
flat R^6 and shares every code path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from nkverify.errors import DomainError, NormalizationError
from nkverify.forms import orthonormal_basis

__all__ = [
    "SphereChart",
    "FlatChart",
    "chart_embed",
    "coordinate_frame",
    "metric_components",
    "christoffel",
    "partials_fd",
    "exterior_derivative_fd",
    "random_tangent_frame",
    "orthonormal_basis",
    "DEFAULT_FD_STEP",
]

DEFAULT_FD_STEP = 1e-4

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SphereChart:
    base_point: np.ndarray
    frame: np.ndarray
    fd_step: float = DEFAULT_FD_STEP
    richardson: bool = False
    dim: int = field(default=6, init=False)

    def __post_init__(self):
        p0 = np.array(self.base_point, dtype=float)
        e = np.array(self.frame, dtype=float)
        if p0.shape != (7,) or e.shape != (7, 6):
            raise ValueError("need a 7-vector base point and a 7x6 frame")
        if abs(np.linalg.norm(p0) - 1.0) > 1e-9:
            raise NormalizationError(f"|p0| = {np.linalg.norm(p0)!r}")
        if np.max(np.abs(e.T @ e - np.eye(6))) > 1e-12 or np.max(np.abs(e.T @ p0)) > 1e-12:
            raise ValueError("frame must be orthonormal and orthogonal to p0")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        p0.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "base_point", p0)
        object.__setattr__(self, "frame", e)

    @classmethod
    def random(cls, rng: np.random.Generator, **kwargs) -> "SphereChart":
        p0 = rng.normal(size=7)
        p0 /= np.linalg.norm(p0)
        return cls(p0, random_tangent_frame(p0, rng), **kwargs)

    def check(self, x: np.ndarray, margin: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (6,):
            raise DomainError(f"expected 6 coordinates, got shape {x.shape}")
        if np.linalg.norm(x) >= 1.0 - margin:
            raise DomainError(f"|x| = {np.linalg.norm(x):.6g} outside chart (margin {margin:g})")
        return x

    def embed(self, x) -> np.ndarray:
        x = self.check(x)
        return np.sqrt(1.0 - x @ x) * self.base_point + self.frame @ x

    def coordinate_frame(self, x) -> np.ndarray:
        x = self.check(x)
        s = np.sqrt(1.0 - x @ x)
        return self.frame - np.outer(self.base_point, x / s)

    def metric(self, x) -> np.ndarray:
        x = self.check(x)
        return np.eye(6) + np.outer(x, x) / (1.0 - x @ x)

    def inverse_metric(self, x) -> np.ndarray:
        x = self.check(x)
        return np.eye(6) - np.outer(x, x)


@dataclass(frozen=True)
class FlatChart:
    """Identity chart of flat R^6; the coordinate domain is ``|x| < radius``."""

    radius: float = 10.0
    fd_step: float = DEFAULT_FD_STEP
    richardson: bool = False
    dim: int = field(default=6, init=False)

    def check(self, x, margin: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (6,):
            raise DomainError(f"expected 6 coordinates, got shape {x.shape}")
        if np.linalg.norm(x) >= self.radius - margin:
            raise DomainError("outside flat chart")
        return x

    def embed(self, x) -> np.ndarray:
        return self.check(x).copy()

    def coordinate_frame(self, x) -> np.ndarray:
        self.check(x)
        return np.eye(6)

    def metric(self, x) -> np.ndarray:
        self.check(x)
        return np.eye(6)

    def inverse_metric(self, x) -> np.ndarray:
        self.check(x)
        return np.eye(6)


def random_tangent_frame(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random orthonormal basis of the orthogonal complement of ``p``."""
    a = np.column_stack([p, rng.normal(size=(7, 6))])
    qmat, _ = np.linalg.qr(a)
    frame = qmat[:, 1:].copy()
    if np.linalg.det(np.column_stack([p, frame])) < 0:
        frame[:, -1] *= -1.0
    return frame


def chart_embed(chart, x) -> np.ndarray:
    return chart.embed(x)


def coordinate_frame(chart, x) -> np.ndarray:
    return chart.coordinate_frame(x)


def metric_components(chart, x) -> np.ndarray:
    return chart.metric(x)


def _central(f: Field, x: np.ndarray, h: float) -> np.ndarray:
    cols = []
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h))
    return np.stack(cols)


def partials_fd(f: Field, x, h: float = DEFAULT_FD_STEP, richardson: bool = False) -> np.ndarray:
    """Central-difference partials; the derivative index is axis 0.

    With ``richardson`` the h and h/2 stencils are combined to cancel the
    leading h^2 term.
    """
    x = np.asarray(x, dtype=float)
    d = _central(f, x, h)
    if richardson:
        d = (4.0 * _central(f, x, h / 2.0) - d) / 3.0
    return d


def _stencil_margin(chart) -> float:
    return 2.0 * chart.fd_step


def christoffel(chart, x) -> np.ndarray:
    """``gamma[k, i, j]`` of the Levi-Civita connection, FD in the metric."""
    x = chart.check(x, margin=_stencil_margin(chart))
    dg = partials_fd(chart.metric, x, chart.fd_step, chart.richardson)  # dg[l, i, j] = d_l g_ij
    ginv = np.linalg.inv(chart.metric(x))
    # lowered: G_lij = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, low)


def exterior_derivative_fd(form_field: Field, x, chart=None, h: float | None = None) -> np.ndarray:
    """``(d alpha)_{i0..ik} = sum_m (-1)^m d_{i_m} alpha_{i0..^i_m..ik}``."""
    if chart is not None:
        x = chart.check(x, margin=_stencil_margin(chart))
        h = chart.fd_step if h is None else h
        richardson = chart.richardson
    else:
        x = np.asarray(x, dtype=float)
        h = DEFAULT_FD_STEP if h is None else h
        richardson = False
    da = partials_fd(form_field, x, h, richardson)  # da[i0, i1..ik]
    k = da.ndim - 1
    if k == 0:
        return da
    out = np.zeros_like(da)
    for m in range(k + 1):
        # move derivative index from slot 0 to slot m
        order = list(range(1, m + 1)) + [0] + list(range(m + 1, k + 1))
        out = out + (-1) ** m * np.transpose(da, order)
    return out
