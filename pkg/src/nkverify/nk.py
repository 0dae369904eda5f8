"""The strictly nearly Kaehler structure on S^6 and its SO(7)-rotated family.

At ``p`` on the unit sphere the structure is ``J_p X = R(R^T p x R^T X)`` and
``omega(X, Y) = g(JX, Y)`` with ``g`` the round metric.  A rotation ``R`` in
G2 leaves the structure unchanged; SO(7)/G2 parametrises the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import special_ortho_group

from nkverify._backend import kernels
from nkverify.chart import (
    christoffel,
    exterior_derivative_fd,
    partials_fd,
    random_tangent_frame,
)
from nkverify.errors import (
    DegenerateFrameError,
    NormalizationError,
    NotOrthogonalError,
    ZeroFormError,
)
from nkverify.forms import hermitian_norm, orthonormal_basis, pullback, wedge
from nkverify.typedecomp import coefficient_in_coframe, pq_project, type_residual

__all__ = [
    "NKStructure",
    "SU3Coframe",
    "LambdaOmega",
    "ConditionReport",
    "NK_TOLERANCES",
    "acs_octonionic",
    "kaehler_form",
    "j_adapted_frame",
    "d_omega",
    "unitary_coframe",
    "hermitian_gram",
    "extract_lambda_omega",
    "verify_nk_conditions",
    "rotate_structure",
    "random_rotation",
    "to_orthonormal",
]

NK_TOLERANCES = {
    "skew": 1e-4,
    "nabla_omega": 1e-4,
    "domega_type": 1e-4,
    "dim_omega": 1e-4,
    "lambda_rel": 1e-5,
    # strictness floor: |nabla_X J| is 2 for unit X on the unit sphere
    "nabla_j_floor": 0.1,
}


def _check_unit(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (7,) or abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise NormalizationError(f"point must be a unit 7-vector, |p| = {np.linalg.norm(p)!r}")
    return p


@dataclass(frozen=True)
class NKStructure:
    rotation: np.ndarray = field(default_factory=lambda: np.eye(7))

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float)
        r.flags.writeable = False
        object.__setattr__(self, "rotation", r)

    def cross(self, u, v) -> np.ndarray:
        r = self.rotation
        return r @ kernels.cross7(r.T @ u, r.T @ v)

    def cross_matrix(self, p) -> np.ndarray:
        r = self.rotation
        return r @ kernels.cross_matrix(r.T @ p) @ r.T

    def acs_in_frame(self, p, frame) -> np.ndarray:
        """J at ``p`` as a 6x6 matrix in an orthonormal tangent ``frame``."""
        p = _check_unit(p)
        return frame.T @ self.cross_matrix(p) @ frame

    def kaehler_in_frame(self, p, frame) -> np.ndarray:
        # omega[i, j] = g(J e_i, e_j) = J[j, i]
        return self.acs_in_frame(p, frame).T

    def chart_eval(self, chart, x):
        """``(q, F, J, omega)`` at chart coordinates ``x`` (compiled kernel)."""
        x = chart.check(x)
        return kernels.sphere_chart_eval(chart.base_point, chart.frame, self.rotation, x)

    def j_field(self, chart):
        return lambda x: self.chart_eval(chart, x)[2]

    def omega_field(self, chart):
        return lambda x: self.chart_eval(chart, x)[3]


def rotate_structure(rotation) -> NKStructure:
    r = np.asarray(rotation, dtype=float)
    if r.shape != (7, 7) or np.max(np.abs(r.T @ r - np.eye(7))) > 1e-10:
        raise NotOrthogonalError("rotation must be a 7x7 orthogonal matrix")
    if np.linalg.det(r) <= 0:
        raise NotOrthogonalError("rotation must have determinant +1")
    return NKStructure(r)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return special_ortho_group.rvs(7, random_state=rng)


def acs_octonionic(structure: NKStructure, p, frame=None) -> np.ndarray:
    if frame is None:
        frame = j_adapted_frame(structure, p, np.random.default_rng(0))
    return structure.acs_in_frame(p, frame)


def kaehler_form(structure: NKStructure, p, frame) -> np.ndarray:
    return structure.kaehler_in_frame(p, frame)


def j_adapted_frame(structure: NKStructure, p, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal tangent frame ``(X1, JX1, X2, JX2, X3, JX3)`` at ``p``.

    In this frame J is block diagonal with blocks ``[[0, -1], [1, 0]]``.
    """
    p = _check_unit(p)
    jmat = structure.cross_matrix(p)
    vecs = [p]
    while len(vecs) < 7:
        v = rng.normal(size=7)
        for u in vecs:
            v -= (u @ v) * u
        n = np.linalg.norm(v)
        if n < 1e-6:
            continue
        v /= n
        w = jmat @ v
        w -= (p @ w) * p
        w /= np.linalg.norm(w)
        vecs.extend([v, w])
    return np.column_stack(vecs[1:])


def to_orthonormal(metric: np.ndarray):
    """Return ``(B, B^{-1})`` with ``B`` an orthonormal basis for ``metric``."""
    b = orthonormal_basis(metric)
    return b, np.linalg.inv(b)


def d_omega(structure: NKStructure, chart, x) -> np.ndarray:
    return exterior_derivative_fd(structure.omega_field(chart), x, chart)


@dataclass(frozen=True)
class SU3Coframe:
    """Unitary (1,0)-coframe: rows of ``nu`` satisfy ``nu(JX) = i nu(X)``.

    ``nu^k = X_k^flat + i (J X_k)^flat`` for g-orthonormal ``X_k``; the
    Hermitian Gram matrix (half the sesquilinear extension of g) is the
    identity.
    """

    nu: np.ndarray
    vectors: np.ndarray
    mu: complex | None = None
    lam: float | None = None


def unitary_coframe(acs: np.ndarray, metric: np.ndarray | None = None, pivot_tol: float = 1e-10) -> SU3Coframe:
    """Gram-Schmidt over J-pairs producing a unitary (1,0)-coframe."""
    n = acs.shape[0]
    g = np.eye(n) if metric is None else metric
    vecs: list[np.ndarray] = []
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        for u in vecs:
            v = v - (u @ g @ v) * u
            ju = acs @ u
            v = v - (ju @ g @ v) * ju
        pivot = np.sqrt(v @ g @ v)
        if pivot < pivot_tol:
            continue
        vecs.append(v / pivot)
        if len(vecs) == n // 2:
            break
    if len(vecs) < n // 2:
        raise DegenerateFrameError("Gram-Schmidt pivot below tolerance")
    x = np.column_stack(vecs)
    nu = (g @ x).T + 1j * (g @ acs @ x).T
    return SU3Coframe(nu=nu, vectors=x)


def hermitian_gram(nu: np.ndarray, metric: np.ndarray | None = None) -> np.ndarray:
    ginv = np.eye(nu.shape[1]) if metric is None else np.linalg.inv(metric)
    return 0.5 * nu @ ginv @ nu.conj().T


@dataclass(frozen=True)
class LambdaOmega:
    lam: float
    mu: complex
    omega3: np.ndarray
    coframe: SU3Coframe
    dim_omega_residual: float
    omega3_norm: float


def _omega3_at(structure, chart, y, jfield):
    dw = d_omega(structure, chart, y)
    jmat = jfield(y)
    g = chart.metric(y)
    frame = unitary_coframe(jmat, g)
    dw30 = pq_project(dw, jmat, 3, 0)
    mu = coefficient_in_coframe(dw30, frame.nu)
    if abs(mu) < 1e-8:
        raise ZeroFormError(f"|mu| = {abs(mu):.3e}")
    return dw30 / abs(mu), mu, frame


def extract_lambda_omega(structure: NKStructure, chart, x) -> LambdaOmega:
    """Measure ``lambda`` and the unit (3,0)-form with ``d omega = 3 lambda Re Omega``.

    ``mu`` is the coefficient of ``(d omega)^{3,0}`` on ``nu1^nu2^nu3``;
    ``Omega = (mu/|mu|) nu1^nu2^nu3`` and ``lambda = 2|mu|/3``.  The
    residual of ``d Im Omega + 2 lambda omega^2`` is measured by a second
    finite-difference pass.
    """
    x = chart.check(x, margin=4.0 * chart.fd_step)
    jfield = structure.j_field(chart)
    omega3, mu, frame = _omega3_at(structure, chart, x, jfield)
    lam = 2.0 * abs(mu) / 3.0

    def im_omega3(y):
        return _omega3_at(structure, chart, y, jfield)[0].imag

    d_im = exterior_derivative_fd(im_omega3, x, chart)
    om = structure.omega_field(chart)(x)
    resid = d_im + 2.0 * lam * wedge(om, om)
    b, _ = to_orthonormal(chart.metric(x))
    return LambdaOmega(
        lam=lam,
        mu=mu,
        omega3=omega3,
        coframe=SU3Coframe(frame.nu, frame.vectors, mu=mu, lam=lam),
        dim_omega_residual=float(np.max(np.abs(pullback(resid, b)))),
        omega3_norm=hermitian_norm(omega3, chart.metric(x)),
    )


@dataclass
class ConditionReport:
    points: np.ndarray
    skew_residual: np.ndarray
    nabla_j_min_norm: np.ndarray
    nabla_omega_residual: np.ndarray
    domega_type_residual: np.ndarray
    dim_omega_residual: np.ndarray
    acs_square_residual: np.ndarray
    orthogonality_residual: np.ndarray
    lambdas: np.ndarray

    @property
    def lambda_spread(self) -> float:
        if self.lambdas.size == 0:
            return 0.0
        return float((self.lambdas.max() - self.lambdas.min()) / self.lambdas.mean())

    def checks(self, tolerances: dict | None = None) -> dict[str, bool]:
        tol = dict(NK_TOLERANCES, **(tolerances or {}))

        def mx(a):
            return float(np.max(a, initial=0.0))

        return {
            "skew": mx(self.skew_residual) < tol["skew"],
            "strict": float(np.min(self.nabla_j_min_norm, initial=np.inf)) > tol["nabla_j_floor"],
            "nabla_omega": mx(self.nabla_omega_residual) < tol["nabla_omega"],
            "domega_type": mx(self.domega_type_residual) < tol["domega_type"],
            "dim_omega": mx(self.dim_omega_residual) < tol["dim_omega"],
            "lambda_constant": self.lambda_spread < tol["lambda_rel"],
        }

    def passed(self, tolerances: dict | None = None) -> bool:
        return all(self.checks(tolerances).values())


def _nabla_j(structure, chart, x):
    jfield = structure.j_field(chart)
    jmat = jfield(x)
    gam = christoffel(chart, x)
    dj = partials_fd(jfield, x, chart.fd_step, chart.richardson)
    # T[i, k, j] = (nabla_i J)^k_j
    return (
        dj
        + np.einsum("kil,lj->ikj", gam, jmat)
        - np.einsum("lij,kl->ikj", gam, jmat)
    ), gam, jmat


def verify_nk_conditions(structure: NKStructure, chart, sample_points) -> ConditionReport:
    """Check the nearly Kaehler conditions at each chart point.

    All residuals are maximal absolute components in a g-orthonormal frame.
    """
    rows = []
    omega_field = structure.omega_field(chart)
    for x in np.atleast_2d(sample_points):
        x = chart.check(x, margin=4.0 * chart.fd_step)
        g = chart.metric(x)
        b, binv = to_orthonormal(g)
        t, gam, jmat = _nabla_j(structure, chart, x)
        t_on = np.einsum("ak,ikj,ib,jc->bac", binv, t, b, b)  # [X, out, Y]
        skew = 0.5 * np.max(np.abs(t_on + np.transpose(t_on, (2, 1, 0))))
        # |nabla_X J|^2 = X^T Q X; the minimum over unit X is the least eigenvalue
        qform = np.einsum("bac,dac->bd", t_on, t_on)
        min_norm = float(np.sqrt(max(np.linalg.eigvalsh(qform)[0], 0.0)))

        om = omega_field(x)
        dom = partials_fd(omega_field, x, chart.fd_step, chart.richardson)
        nab_om = dom - np.einsum("lij,lk->ijk", gam, om) - np.einsum("lik,jl->ijk", gam, om)
        dw = exterior_derivative_fd(omega_field, x, chart)
        nab_resid = float(np.max(np.abs(pullback(nab_om - dw / 3.0, b))))

        j_on = binv @ jmat @ b
        type_resid = type_residual(pullback(dw, b), j_on, [(3, 0), (0, 3)])
        lo = extract_lambda_omega(structure, chart, x)
        rows.append(
            (
                x,
                skew,
                min_norm,
                nab_resid,
                type_resid,
                lo.dim_omega_residual,
                float(np.max(np.abs(j_on @ j_on + np.eye(6)))),
                float(np.max(np.abs(j_on.T @ j_on - np.eye(6)))),
                lo.lam,
            )
        )
    cols = list(zip(*rows)) if rows else [[]] * 9
    return ConditionReport(*(np.array(c, dtype=float) for c in cols))
