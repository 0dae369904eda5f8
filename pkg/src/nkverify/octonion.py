"""Octonion algebra over the frozen Cayley-Dickson table, and the induced
cross product on the imaginary part.

Octonions are plain length-8 float arrays ``(c0, c1, ..., c7)``; imaginary
vectors are length-7 arrays holding ``(c1, ..., c7)``.  :class:`Octonion` is
a thin convenience wrapper.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from nkverify._backend import kernels
from nkverify._table import INDEX, SIGN

__all__ = [
    "Octonion",
    "oct_mul",
    "oct_conj",
    "oct_norm",
    "associator",
    "cross7",
    "cross_matrix",
    "basis",
    "g2_signed_permutations",
    "embed_imaginary",
]


def basis(i: int) -> np.ndarray:
    e = np.zeros(8)
    e[i] = 1.0
    return e


def oct_mul(a, b) -> np.ndarray:
    """Octonion product; batched when both arguments are ``(n, 8)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 2:
        return kernels.oct_mul_batch(a, b)
    return kernels.oct_mul(a, b)


def oct_conj(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a[..., 1:] *= -1.0
    return a


def oct_norm(a) -> np.ndarray:
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def associator(a, b, c) -> np.ndarray:
    """``(ab)c - a(bc)``; alternating, vanishes iff the triple associates."""
    return oct_mul(oct_mul(a, b), c) - oct_mul(a, oct_mul(b, c))


def cross7(u, v) -> np.ndarray:
    """Cross product on R^7 = Im(O): ``u x v = (uv - vu)/2``.

    For imaginary arguments this is the imaginary part of ``uv``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim == 2:
        return kernels.cross7_batch(u, v)
    return kernels.cross7(u, v)


def cross_matrix(p) -> np.ndarray:
    """7x7 matrix of ``v -> p x v``."""
    return kernels.cross_matrix(np.asarray(p, dtype=float))


def embed_imaginary(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape[:-1] + (8,))
    out[..., 1:] = u
    return out


class Octonion:
    """Value wrapper around an 8-vector of real coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        c = np.array(coefficients, dtype=float)
        if c.shape != (8,):
            raise ValueError(f"an octonion needs 8 coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self.coefficients = c

    @classmethod
    def unit(cls, i: int) -> "Octonion":
        return cls(basis(i))

    @property
    def real(self) -> float:
        return float(self.coefficients[0])

    @property
    def imag(self) -> np.ndarray:
        return self.coefficients[1:].copy()

    def conj(self) -> "Octonion":
        return Octonion(oct_conj(self.coefficients))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(oct_mul(self.coefficients, other.coefficients))
        return Octonion(self.coefficients * float(other))

    __rmul__ = __mul__

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coefficients + other.coefficients)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coefficients - other.coefficients)

    def __neg__(self) -> "Octonion":
        return Octonion(-self.coefficients)

    def __eq__(self, other) -> bool:
        return isinstance(other, Octonion) and bool(
            np.array_equal(self.coefficients, other.coefficients)
        )

    def __hash__(self) -> int:
        return hash(self.coefficients.tobytes())

    def __repr__(self) -> str:
        return f"Octonion({self.coefficients.tolist()})"


def _unit_product(i: int, si: int, j: int, sj: int) -> tuple[int, int]:
    return INDEX[i][j], si * sj * SIGN[i][j]


@lru_cache(maxsize=1)
def g2_signed_permutations() -> tuple[np.ndarray, ...]:
    """All signed permutations of ``e1..e7`` that are algebra automorphisms.

    An automorphism is fixed by the images of the generators ``e1, e2, e4``;
    the remaining images follow from the table and every candidate is checked
    against all 49 imaginary products.  Returns 7x7 matrices acting on
    imaginary vectors; they lie in G2 and hence in SO(7).
    """
    found = []
    signed = [(k, s) for k in range(1, 8) for s in (1, -1)]
    for (a, sa), (b, sb) in itertools.permutations(signed, 2):
        if a == b:
            continue
        c, sc = _unit_product(a, sa, b, sb)
        for d, sd in signed:
            if d in (a, b, c):
                continue
            img = {1: (a, sa), 2: (b, sb), 3: (c, sc), 4: (d, sd)}
            img[5] = _unit_product(a, sa, d, sd)
            img[6] = _unit_product(b, sb, d, sd)
            img[7] = _unit_product(c, sc, d, sd)
            if len({k for k, _ in img.values()}) != 7:
                continue
            ok = True
            for i in range(1, 8):
                for j in range(1, 8):
                    if i == j:
                        continue
                    k, s = INDEX[i][j], SIGN[i][j]
                    lhs = _unit_product(*img[i], *img[j])
                    if lhs != (img[k][0], s * img[k][1]):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                m = np.zeros((7, 7))
                for i, (k, s) in img.items():
                    m[k - 1, i - 1] = s
                found.append(m)
    return tuple(found)
