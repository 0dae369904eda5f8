"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np

from nkverify._table import INDEX, SIGN

# structure constants: e_i e_j = sum_k C[i, j, k] e_k
STRUCTURE = np.zeros((8, 8, 8))
for _i in range(8):
    for _j in range(8):
        STRUCTURE[_i, _j, INDEX[_i][_j]] = SIGN[_i][_j]

# cross product constants on the imaginary units, the associative 3-form
PHI = STRUCTURE[1:, 1:, 1:].copy()


def oct_mul(a, b):
    return np.einsum("i,j,ijk->k", np.asarray(a, float), np.asarray(b, float), STRUCTURE)


def oct_mul_batch(a, b):
    return np.einsum("ni,nj,ijk->nk", np.asarray(a, float), np.asarray(b, float), STRUCTURE)


def cross7(u, v):
    return np.einsum("i,j,ijk->k", np.asarray(u, float), np.asarray(v, float), PHI)


def cross7_batch(u, v):
    return np.einsum("ni,nj,ijk->nk", np.asarray(u, float), np.asarray(v, float), PHI)


def cross_matrix(p):
    return np.einsum("i,ijk->kj", np.asarray(p, float), PHI)


def sphere_chart_eval(p0, frame, rotation, x):
    x = np.asarray(x, float)
    r2 = float(x @ x)
    if r2 >= 1.0:
        raise ValueError("chart coordinates outside the unit ball")
    s = np.sqrt(1.0 - r2)
    q = s * p0 + frame @ x
    F = frame - np.outer(p0, x / s)
    qr = rotation.T @ q
    fr = rotation.T @ F
    w = cross_matrix(qr) @ fr
    om = w.T @ fr
    J = (np.eye(6) - np.outer(x, x)) @ om.T
    return q, F, J, om
