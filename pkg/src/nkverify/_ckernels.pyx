# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: octonion product, 7d cross product and the per-point
evaluation of the octonionic structure in an orthographic sphere chart.

Signatures and results match :mod:`nkverify._pykernels` exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

from nkverify._table import INDEX, SIGN

cnp.import_array()

cdef int _IDX[8][8]
cdef double _SGN[8][8]
cdef int _i, _j
for _i in range(8):
    for _j in range(8):
        _IDX[_i][_j] = INDEX[_i][_j]
        _SGN[_i][_j] = SIGN[_i][_j]


cdef inline void _mul(const double[:] a, const double[:] b, double* out) noexcept nogil:
    cdef int i, j
    for i in range(8):
        out[i] = 0.0
    for i in range(8):
        if a[i] == 0.0:
            continue
        for j in range(8):
            out[_IDX[i][j]] += _SGN[i][j] * a[i] * b[j]


cdef inline void _cross(const double* u, const double* v, double* out) noexcept nogil:
    # imaginary units e1..e7 map to slots 0..6
    cdef int i, j, k
    for k in range(7):
        out[k] = 0.0
    for i in range(7):
        if u[i] == 0.0:
            continue
        for j in range(7):
            if i == j:
                continue
            k = _IDX[i + 1][j + 1]
            out[k - 1] += _SGN[i + 1][j + 1] * u[i] * v[j]


def oct_mul(a, b):
    cdef const double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty(8)
    cdef double[:] ov = out
    _mul(av, bv, &ov[0])
    return out


def oct_mul_batch(a, b):
    cdef const double[:, :] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, :] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], r
    out = np.empty((n, 8))
    cdef double[:, :] ov = out
    with nogil:
        for r in range(n):
            _mul(av[r], bv[r], &ov[r, 0])
    return out


def cross7(u, v):
    cdef const double[:] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] vv = np.ascontiguousarray(v, dtype=np.float64)
    out = np.empty(7)
    cdef double[:] ov = out
    _cross(&uv[0], &vv[0], &ov[0])
    return out


def cross7_batch(u, v):
    cdef const double[:, :] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:, :] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0], r
    out = np.empty((n, 7))
    cdef double[:, :] ov = out
    with nogil:
        for r in range(n):
            _cross(&uv[r, 0], &vv[r, 0], &ov[r, 0])
    return out


def cross_matrix(p):
    cdef const double[:] pv = np.ascontiguousarray(p, dtype=np.float64)
    out = np.zeros((7, 7))
    cdef double[:, :] ov = out
    cdef int i, j, k
    for i in range(7):
        for j in range(7):
            if i == j:
                continue
            k = _IDX[i + 1][j + 1] - 1
            # (p x e_j)_k gets sign * p_i
            ov[k, j] += _SGN[i + 1][j + 1] * pv[i]
    return out


def sphere_chart_eval(p0, frame, rotation, x):
    """Return ``(q, F, J, omega)`` at chart coordinates ``x``.

    ``q`` is the embedded point, ``F`` the 7x6 coordinate frame, ``J`` the
    almost complex structure in coordinates and ``omega`` the 2-form
    components ``omega[i, j] = <R(R^T q x R^T F_i), F_j>``.
    """
    cdef const double[:] pv = np.ascontiguousarray(p0, dtype=np.float64)
    cdef const double[:, :] ev = np.ascontiguousarray(frame, dtype=np.float64)
    cdef const double[:, :] rv = np.ascontiguousarray(rotation, dtype=np.float64)
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    q = np.empty(7)
    F = np.empty((7, 6))
    J = np.empty((6, 6))
    om = np.empty((6, 6))
    cdef double[:] qv = q
    cdef double[:, :] fv = F
    cdef double[:, :] jv = J
    cdef double[:, :] wv = om
    cdef double qr[7]
    cdef double fr[6][7]
    cdef double w[6][7]
    cdef double r2 = 0.0, s, acc
    cdef int a, b, i, j
    for i in range(6):
        r2 += xv[i] * xv[i]
    if r2 >= 1.0:
        raise ValueError("chart coordinates outside the unit ball")
    s = sqrt(1.0 - r2)
    for a in range(7):
        acc = s * pv[a]
        for i in range(6):
            acc += ev[a, i] * xv[i]
            fv[a, i] = ev[a, i] - xv[i] / s * pv[a]
        qv[a] = acc
    for a in range(7):
        acc = 0.0
        for b in range(7):
            acc += rv[b, a] * qv[b]
        qr[a] = acc
        for i in range(6):
            acc = 0.0
            for b in range(7):
                acc += rv[b, a] * fv[b, i]
            fr[i][a] = acc
    for i in range(6):
        _cross(qr, fr[i], w[i])
    for i in range(6):
        for j in range(6):
            acc = 0.0
            for a in range(7):
                acc += w[i][a] * fr[j][a]
            wv[i, j] = acc
    # J = g^{-1} omega^T with g^{-1} = 1 - x x^T for this chart
    for i in range(6):
        for j in range(6):
            acc = wv[j, i]
            for b in range(6):
                acc -= xv[i] * xv[b] * wv[j, b]
            jv[i, j] = acc
    return q, F, J, om
