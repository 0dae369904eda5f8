"""Pointwise linear algebra of the taming cone.

Unless a metric is passed explicitly, matrices are expressed in a
g-orthonormal tangent frame, so g-symmetry is ordinary symmetry and the
action of K on covectors is the plain transpose.  Forms are matrices with
``omega(X, Y) = X^T W Y``; for the reference structure ``W = J^T``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from nkverify.errors import ClusterError, RejectionExhaustedError, SingularOperatorError
from nkverify.nk import unitary_coframe
from nkverify.typedecomp import coefficient_in_coframe, pq_project

__all__ = [
    "TamingResult",
    "KBlockForm",
    "ProofChain",
    "orientation_sign",
    "taming_membership",
    "lemma_nondegeneracy_check",
    "degenerate_acs",
    "k_from_i",
    "k_formulas",
    "i_from_k",
    "k_property_residuals",
    "sample_k",
    "sample_tamed_direct",
    "k_block_form",
    "eigen_nu_coframe",
    "theta_coframe",
    "block_inverse_check",
    "predicted_domega30_coefficient",
    "theorem_chain",
]

_COND_LIMIT = 1e12


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def orientation_sign(acs: np.ndarray) -> int:
    """Sign of ``det(a1, I a1, a2, I a2, a3, I a3)`` for a complex basis ``a_k``.

    The columns of ``(1 - iI)/2`` span the +i eigenspace; any complex basis of
    it gives the same sign because GL(3, C) has positive real determinant.
    """
    n = acs.shape[0]
    p10 = 0.5 * (np.eye(n) - 1j * acs)
    u, _, _ = np.linalg.svd(p10)
    cols = []
    for k in range(n // 2):
        a = u[:, k].real
        # the real part may vanish for a badly phased vector; rotate the phase
        if np.linalg.norm(a) < 1e-6:
            a = (1j * u[:, k]).real
        cols.extend([a, acs @ a])
    return 1 if np.linalg.det(np.column_stack(cols)) > 0 else -1


@dataclass(frozen=True)
class TamingResult:
    tamed: bool
    invariance_residual: float
    min_positivity: float
    orientation_ok: bool
    acs_residual: float

    def __bool__(self) -> bool:
        return self.tamed


def taming_membership(acs, omega, metric=None, tol: float = 1e-9) -> TamingResult:
    """Membership in the set of almost complex structures compatible with ``omega``.

    Requires ``omega(IX, IY) = omega(X, Y)`` (residual below ``tol``),
    positivity of the symmetric form ``(X, Y) -> omega(X, IY)``, and the
    orientation of the structure ``g^{-1} omega^T`` that ``omega`` defines.
    """
    acs = np.asarray(acs, dtype=float)
    w = np.asarray(omega, dtype=float)
    n = acs.shape[0]
    g = np.eye(n) if metric is None else metric
    acs_res = float(np.max(np.abs(acs @ acs + np.eye(n))))
    inv = float(np.max(np.abs(acs.T @ w @ acs - w)))
    sym = w @ acs
    sym = 0.5 * (sym + sym.T)
    if metric is not None:
        # eigenvalues relative to g
        from scipy.linalg import eigvalsh

        pos = float(eigvalsh(sym, g)[0])
    else:
        pos = float(np.linalg.eigvalsh(sym)[0])
    ref = np.linalg.solve(g, w.T)
    orient = orientation_sign(acs) == orientation_sign(ref) if acs_res < 1e-6 else False
    ok = acs_res < 1e-8 and inv < tol and pos > 0.0 and orient
    return TamingResult(ok, inv, pos, orient, acs_res)


def lemma_nondegeneracy_check(acs, j) -> float:
    """``det(J + I)``; nonzero for every structure in the taming cone."""
    return float(np.linalg.det(np.asarray(j) + np.asarray(acs)))


def degenerate_acs(j: np.ndarray, plane: int = 0) -> np.ndarray:
    """``-J`` on the 2-plane ``(e_2k, J e_2k)``, ``J`` elsewhere.

    Needs a J-adapted frame; ``(J + I) e_2k = 0`` so ``J + I`` is singular.
    """
    i = np.array(j, dtype=float)
    s = slice(2 * plane, 2 * plane + 2)
    i[:, s] = -j[:, s]
    return i


def _check_cond(a: np.ndarray, what: str):
    c = np.linalg.cond(a)
    if not np.isfinite(c) or c > _COND_LIMIT:
        raise SingularOperatorError(f"{what} is numerically singular (cond {c:.3e})")


def k_formulas(acs, j) -> tuple[np.ndarray, np.ndarray]:
    """Both expressions ``(J+I)^{-1}(I-J)`` and ``(1-IJ)^{-1}(1+IJ)``."""
    n = j.shape[0]
    one = np.eye(n)
    _check_cond(j + acs, "J + I")
    k1 = np.linalg.solve(j + acs, acs - j)
    k2 = np.linalg.solve(one - acs @ j, one + acs @ j)
    return k1, k2


def k_from_i(acs, j) -> np.ndarray:
    return k_formulas(acs, j)[0]


def i_from_k(k, j) -> np.ndarray:
    """``(1 - K) J (1 - K)^{-1}``."""
    a = np.eye(j.shape[0]) - k
    _check_cond(a, "1 - K")
    return np.linalg.solve(a.T, (a @ j).T).T


def k_property_residuals(k, j, metric=None) -> dict[str, float]:
    """Residuals of ``KJ = -JK``, g-symmetry, ``omega(KX,Y) = -omega(X,KY)``
    and the least eigenvalue of ``1 - K^2``."""
    n = j.shape[0]
    g = np.eye(n) if metric is None else metric
    w = (g @ j).T
    gk = g @ k
    ev = np.linalg.eigvals(np.eye(n) - k @ k)
    return {
        "anticommute": float(np.max(np.abs(k @ j + j @ k))),
        "g_symmetric": float(np.max(np.abs(gk - gk.T))),
        "omega_skew": float(np.max(np.abs(k.T @ w + w @ k))),
        "min_eig_1_minus_k2": float(np.min(ev.real)),
    }


def sample_k(j, rho: float, seed=None) -> np.ndarray:
    """Random K with ``KJ = -JK``, ``K = K^T`` and spectral norm ``rho``."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    rng = _rng(seed)
    n = j.shape[0]
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    s = 0.5 * (a + a.T)
    k0 = 0.5 * (s + j @ s @ j)
    return rho * k0 / max(np.linalg.norm(k0, 2), 1e-12)


def sample_tamed_direct(j, seed=None, scale: float = 0.5, max_attempts: int = 100, stats=None) -> np.ndarray:
    """``I = Q J Q^{-1}`` for ``Q = exp(scale * J S)``, ``S`` random symmetric.

    ``J S`` lies in the symplectic Lie algebra of ``omega``, so invariance
    holds by construction; candidates are still screened by
    :func:`taming_membership`.  ``stats``, when given, is a dict that
    receives ``attempts`` and ``accepted`` counts.
    """
    rng = _rng(seed)
    n = j.shape[0]
    w = j.T
    for attempt in range(1, max_attempts + 1):
        a = rng.normal(size=(n, n))
        q = expm(scale * (j @ (0.5 * (a + a.T))))
        acs = q @ j @ np.linalg.inv(q)
        if taming_membership(acs, w):
            if stats is not None:
                stats["attempts"] = stats.get("attempts", 0) + attempt
                stats["accepted"] = stats.get("accepted", 0) + 1
            return acs
    raise RejectionExhaustedError(f"no tamed structure after {max_attempts} attempts")


@dataclass(frozen=True)
class KBlockForm:
    """K in a unitary (1,0)-coframe ``nu``.

    ``nu^k o (1 + K) = nu^k + sum_l V[l, k] conj(nu^l)``, so the operator on
    the coframe ``(nu, conj nu)`` has block matrix ``[[1, conj V], [V, 1]]``.
    ``lam`` is the diagonal of ``1 - conj(V) V``; for the eigen-adapted coframe
    it holds the eigenvalues of ``1 - K^2``.
    """

    nu: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    unitary: np.ndarray | None = None

    @property
    def lam_product(self) -> float:
        return float(np.prod(self.lam))


def _coframe_coefficients(nu: np.ndarray, op: np.ndarray) -> np.ndarray:
    """Rows: coefficients of ``nu^k o op`` on ``(nu, conj nu)``."""
    full = np.vstack([nu, nu.conj()])
    return np.linalg.solve(full.T, (nu @ op).T).T


def k_block_form(k, nu) -> KBlockForm:
    c = _coframe_coefficients(nu, k)
    v = c[:, 3:].T
    lam = np.real(np.diag(np.eye(3) - v.conj() @ v))
    return KBlockForm(nu=nu, v=v, lam=lam)


def eigen_nu_coframe(k, j, base=None, commute_tol: float = 1e-8) -> KBlockForm:
    """Unitary (1,0)-coframe diagonalising ``1 - K^2``.

    ``1 - K^2`` commutes with J, so on the (1,0) covectors it is a Hermitian
    3x3 matrix; its unitary eigenvectors give the coframe, with each
    eigenvalue appearing twice in the real 6x6 spectrum.
    """
    n = j.shape[0]
    a = np.eye(n) - k @ k
    if np.max(np.abs(a @ j - j @ a)) > commute_tol:
        raise ClusterError("1 - K^2 does not commute with J; no J-adapted eigenbasis")
    nu0 = (base if base is not None else unitary_coframe(j)).nu
    c = _coframe_coefficients(nu0, a)
    h = c[:, :3]
    if np.max(np.abs(c[:, 3:])) > commute_tol or np.max(np.abs(h - h.conj().T)) > commute_tol:
        raise ClusterError("1 - K^2 is not Hermitian on (1,0)-covectors")
    evals, wmat = np.linalg.eigh(0.5 * (h + h.conj().T))
    u = wmat.conj().T
    nu = u @ nu0
    blocks = k_block_form(k, nu)
    return KBlockForm(nu=nu, v=blocks.v, lam=evals, unitary=u)


def theta_coframe(blocks: KBlockForm, k) -> np.ndarray:
    """``theta^k = nu^k o (1 + K)``: rows are (1,0)-covectors of ``(1-K) J (1-K)^{-1}``."""
    return blocks.nu @ (np.eye(k.shape[0]) + k)


def block_inverse_check(blocks: KBlockForm) -> float:
    """Deviation of ``[[1, conj V], [V, 1]] @ [[L^-1, -conj V L^-1], [-V L^-1, L^-1]]`` from 1."""
    v = blocks.v
    linv = np.diag(1.0 / blocks.lam)
    one = np.eye(3)
    m = np.block([[one, v.conj()], [v, one]])
    minv = np.block([[linv, -v.conj() @ linv], [-v @ linv, linv]])
    return float(np.max(np.abs(m @ minv - np.eye(6))))


def predicted_domega30_coefficient(blocks: KBlockForm, mu: complex) -> tuple[complex, complex]:
    """Closed forms for the (3,0) coefficient of ``d omega`` w.r.t. I on theta.

    ``mu`` is the (3,0) coefficient w.r.t. J on the same ``nu``.  Returns
    ``(mu / sqrt(det(1 - K^2)), (mu - conj(mu) det(conj V)) / prod(lam))``;
    the second keeps the contribution of ``conj(nu1^nu2^nu3)``.
    """
    prod = blocks.lam_product
    short = mu / prod  # sqrt(det(1 - K^2)) = prod(lam)
    full = (mu - np.conj(mu) * np.linalg.det(blocks.v.conj())) / prod
    return complex(short), complex(full)


@dataclass(frozen=True)
class ProofChain:
    det_j_plus_i: float
    omega_11_residual: float
    block_inverse_residual: float
    theta_residual: float
    theta_rank: int
    v_symmetry_residual: float
    min_eig_1_minus_vv: float
    mu: complex
    lam: np.ndarray
    det_v: complex
    coefficient: complex
    short_value: complex
    extended_value: complex

    @property
    def lower_bound(self) -> float:
        return abs(self.mu) * (1.0 - abs(self.det_v)) / float(np.prod(self.lam))


def theorem_chain(k, j, domega, base=None) -> ProofChain:
    """Run the non-integrability argument for ``I = i_from_k(K)`` at one point.

    ``domega`` is the 3-form in the same orthonormal frame as ``j``; only its
    (3,0)+(0,3) part w.r.t. J enters.  The (3,0) coefficient w.r.t. I is
    computed by brute-force projection and compared with the closed forms.
    """
    acs = i_from_k(k, j)
    base = base if base is not None else unitary_coframe(j)
    pure = pq_project(domega, j, 3, 0)
    mu0 = coefficient_in_coframe(pure, base.nu)
    pure = (pure + pure.conj()).real
    blocks = eigen_nu_coframe(k, j, base)
    mu = mu0 / np.linalg.det(blocks.unitary)
    theta = theta_coframe(blocks, k)
    omega = j.T
    om11 = max(
        float(np.max(np.abs(pq_project(omega, acs, 2, 0)))),
        float(np.max(np.abs(pq_project(omega, acs, 0, 2)))),
    )
    coef = coefficient_in_coframe(pq_project(pure, acs, 3, 0), theta)
    short, extended = predicted_domega30_coefficient(blocks, mu)
    v = blocks.v
    return ProofChain(
        det_j_plus_i=lemma_nondegeneracy_check(acs, j),
        omega_11_residual=om11,
        block_inverse_residual=block_inverse_check(blocks),
        theta_residual=float(np.max(np.abs(theta @ acs - 1j * theta))),
        theta_rank=int(np.linalg.matrix_rank(np.vstack([theta, theta.conj()]))),
        v_symmetry_residual=float(np.max(np.abs(v - v.T))),
        min_eig_1_minus_vv=float(np.linalg.eigvalsh(np.eye(3) - v @ v.conj())[0]),
        mu=complex(mu),
        lam=blocks.lam,
        det_v=complex(np.linalg.det(v)),
        coefficient=coef,
        short_value=short,
        extended_value=extended,
    )
