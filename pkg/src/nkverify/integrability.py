"""Nijenhuis tensors of almost complex structure fields and pointwise
non-integrability certificates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import special_ortho_group

from nkverify.chart import FlatChart, exterior_derivative_fd, partials_fd
from nkverify.forms import pullback
from nkverify.nk import NKStructure, to_orthonormal
from nkverify.tamed import (
    eigen_nu_coframe,
    i_from_k,
    k_from_i,
    taming_membership,
    theorem_chain,
    theta_coframe,
)
from nkverify.typedecomp import coefficient_in_coframe, pq_project, type_residual

__all__ = [
    "ACSField",
    "Certificate",
    "NON_INTEGRABLE",
    "NOT_APPLICABLE",
    "INCONCLUSIVE",
    "NIJENHUIS_BASELINE",
    "NIJENHUIS_FLOOR_FRACTION",
    "DEFAULT_THRESHOLDS",
    "nk_field",
    "build_k_field",
    "flat_integrable_field",
    "standard_flat_acs",
    "nijenhuis_fd",
    "nijenhuis_norm",
    "certify_point",
    "sample_orthogonal_acs",
    "orthogonal_field",
    "nijenhuis_baseline",
]

NON_INTEGRABLE = "NonIntegrable"
NOT_APPLICABLE = "NotApplicable"
INCONCLUSIVE = "Inconclusive"

# |N| of the nearly Kaehler J on the unit sphere, orthonormal Frobenius norm,
# measured by ``nijenhuis_baseline`` at fd_step 1e-4 (constant over S^6)
NIJENHUIS_BASELINE = 8.0 * np.sqrt(6.0)
NIJENHUIS_FLOOR_FRACTION = 0.05

DEFAULT_THRESHOLDS = {
    "omega_11": 1e-9,
    "domega_type": 1e-4,
    "domega30": 1e-6,
    "nijenhuis_floor": NIJENHUIS_FLOOR_FRACTION * NIJENHUIS_BASELINE,
}


@dataclass(frozen=True)
class ACSField:
    func: Callable[[np.ndarray], np.ndarray]
    chart: object
    tag: str

    def __call__(self, x) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))


def nk_field(structure: NKStructure, chart) -> ACSField:
    return ACSField(structure.j_field(chart), chart, "nearly-kaehler")


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def build_k_field(structure: NKStructure, chart, seed, rho: float):
    """Smooth tamed field ``I(x) = (1 - K) J (1 - K)^{-1}``.

    ``S(x)`` is a seeded quadratic polynomial with symmetric 6x6
    coefficients; ``K(x)`` is the J-anticommuting part of the g-self-adjoint
    ``g^{-1} S``, scaled by ``rho / sqrt(tr(K0^2)/2)``.  The eigenvalues of
    ``K0`` come in pairs ``+-a``, so that scale bounds the spectral norm by
    ``rho`` while staying smooth in ``x``.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s0 = _sym(rng.uniform(-1, 1, size=(6, 6)))
    s1 = _sym(rng.uniform(-1, 1, size=(6, 6, 6)))
    s2 = _sym(rng.uniform(-1, 1, size=(6, 6, 6, 6)))
    jfield = structure.j_field(chart)

    def k_of(x):
        x = np.asarray(x, dtype=float)
        s = s0 + np.tensordot(x, s1, axes=1) + np.einsum("i,j,ijab->ab", x, x, s2)
        jmat = jfield(x)
        a = np.linalg.solve(chart.metric(x), s)
        k0 = 0.5 * (a + jmat @ a @ jmat)
        scale = np.sqrt(max(np.trace(k0 @ k0) / 2.0, 0.0))
        return rho * k0 / max(scale, 1e-12), jmat

    def i_of(x):
        k, jmat = k_of(x)
        return i_from_k(k, jmat)

    return (lambda x: k_of(x)[0]), ACSField(i_of, chart, "tamed-via-k-field")


def standard_flat_acs() -> np.ndarray:
    j0 = np.zeros((6, 6))
    for k in range(3):
        j0[2 * k + 1, 2 * k] = 1.0
        j0[2 * k, 2 * k + 1] = -1.0
    return j0


def flat_integrable_field(chart=None, strength: float = 0.3, linear=None) -> ACSField:
    """Pull back the standard structure of C^3 by the real diffeomorphism
    ``(z1, z2, z3) -> (z1, z2 + s conj(z1)^2, z3)``; integrable, not constant.

    ``linear``, an invertible 6x6 matrix, is precomposed so that the field has
    no zero pattern in coordinates.
    """
    chart = chart if chart is not None else FlatChart()
    j0 = standard_flat_acs()
    lin = np.eye(6) if linear is None else np.asarray(linear, dtype=float)

    def jac(y):
        d = np.eye(6)
        # w2 = z2 + s conj(z1)^2: Re = y2 + s(y0^2 - y1^2), Im = y3 - 2 s y0 y1
        d[2, 0], d[2, 1] = 2 * strength * y[0], -2 * strength * y[1]
        d[3, 0], d[3, 1] = -2 * strength * y[1], -2 * strength * y[0]
        return d

    def i_of(x):
        d = jac(lin @ x) @ lin
        return np.linalg.solve(d, j0 @ d)

    return ACSField(i_of, chart, "flat-integrable")


def nijenhuis_fd(field: ACSField, chart, x) -> np.ndarray:
    """``N[k, i, j]`` from central differences of the field in chart coordinates."""
    x = chart.check(x, margin=2.0 * chart.fd_step)
    acs = field(x)
    d = partials_fd(field, x, chart.fd_step, chart.richardson)  # d[l, k, j]
    t1 = np.einsum("li,lkj->kij", acs, d)
    t3 = np.einsum("kl,ilj->kij", acs, d)
    return t1 - np.transpose(t1, (0, 2, 1)) - (t3 - np.transpose(t3, (0, 2, 1)))


def nijenhuis_norm(n: np.ndarray, metric: np.ndarray | None = None) -> float:
    if metric is None:
        return float(np.linalg.norm(n))
    b, binv = to_orthonormal(metric)
    return float(np.linalg.norm(np.einsum("ak,kij,ib,jc->abc", binv, n, b, b)))


@dataclass
class Certificate:
    point: np.ndarray
    nijenhuis_norm: float
    domega30_coefficient: complex
    omega_11_residual: float
    domega_mixed_residual: float
    domega_pure_norm: float
    tamed: bool
    verdict: str
    det_j_plus_i: float | None = None
    predicted_extended: complex | None = None
    predicted_short: complex | None = None
    lower_bound: float | None = None
    lam_product: float | None = None
    abs_det_v: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def non_integrable(self) -> bool:
        return self.verdict == NON_INTEGRABLE


def _i_coframe(acs: np.ndarray) -> np.ndarray:
    # rows span the (1,0)-covectors: the row space of (1 - iI)/2
    _, _, vh = np.linalg.svd(0.5 * (np.eye(acs.shape[0]) - 1j * acs))
    return vh[:3]


def certify_point(
    field: ACSField,
    chart,
    x,
    *,
    structure: NKStructure | None = None,
    omega_field=None,
    reference_field=None,
    thresholds: dict | None = None,
) -> Certificate:
    """Pointwise non-integrability certificate for ``field`` at ``x``.

    Hypotheses: ``omega`` is of type (1,1) w.r.t. I with positivity (I in the
    taming cone), and ``d omega`` is of type (3,0)+(0,3) w.r.t. the reference
    structure with a non-zero (3,0) part.  Passing ``structure`` takes omega
    and the reference from the nearly Kaehler structure; any other 2-form
    field and reference field may be supplied instead.
    """
    th = dict(DEFAULT_THRESHOLDS, **(thresholds or {}))
    if structure is not None:
        omega_field = omega_field or structure.omega_field(chart)
        reference_field = reference_field or structure.j_field(chart)
    if omega_field is None or reference_field is None:
        raise ValueError("need a structure or both omega_field and reference_field")
    x = chart.check(x, margin=4.0 * chart.fd_step)
    b, binv = to_orthonormal(chart.metric(x))
    i_on = binv @ field(x) @ b
    j_on = binv @ reference_field(x) @ b
    om_on = pullback(omega_field(x), b)
    dw_on = pullback(exterior_derivative_fd(omega_field, x, chart), b)

    om11 = max(
        float(np.max(np.abs(pq_project(om_on, i_on, 2, 0)))),
        float(np.max(np.abs(pq_project(om_on, i_on, 0, 2)))),
    )
    mixed = type_residual(dw_on, j_on, [(3, 0), (0, 3)])
    pure_norm = float(np.max(np.abs(pq_project(dw_on, j_on, 3, 0))))
    nij = nijenhuis_norm(nijenhuis_fd(field, chart, x), chart.metric(x))
    tam = taming_membership(i_on, om_on, tol=th["omega_11"])

    cert = Certificate(
        point=x,
        nijenhuis_norm=nij,
        domega30_coefficient=0j,
        omega_11_residual=om11,
        domega_mixed_residual=mixed,
        domega_pure_norm=pure_norm,
        tamed=bool(tam),
        verdict=NOT_APPLICABLE,
    )
    dw30_i = pq_project(dw_on, i_on, 3, 0)
    if tam and pure_norm > th["domega30"]:
        k = k_from_i(i_on, j_on)
        chain = theorem_chain(k, j_on, dw_on)

        theta = theta_coframe(eigen_nu_coframe(k, j_on), k)
        cert.domega30_coefficient = coefficient_in_coframe(dw30_i, theta, tol=1e-6)
        cert.det_j_plus_i = chain.det_j_plus_i
        cert.predicted_extended = chain.extended_value
        cert.predicted_short = chain.short_value
        cert.lower_bound = chain.lower_bound
        cert.lam_product = float(np.prod(chain.lam))
        cert.abs_det_v = abs(chain.det_v)
    else:
        cert.domega30_coefficient = coefficient_in_coframe(dw30_i, _i_coframe(i_on), tol=1e-6)

    hypotheses = (
        cert.tamed
        and om11 < th["omega_11"]
        and mixed < th["domega_type"]
        and pure_norm > th["domega30"]
    )
    if not hypotheses:
        cert.verdict = NOT_APPLICABLE
    elif nij > th["nijenhuis_floor"] and abs(cert.domega30_coefficient) > th["domega30"]:
        cert.verdict = NON_INTEGRABLE
    else:
        cert.verdict = INCONCLUSIVE
    return cert


def sample_orthogonal_acs(structure: NKStructure, p, seed, frame) -> tuple[np.ndarray, np.ndarray]:
    """Random g-orthogonal positive structure ``Q J Q^T`` at ``p``.

    Returns ``(I, Q)`` in the orthonormal tangent ``frame``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    q = special_ortho_group.rvs(6, random_state=rng)
    j = structure.acs_in_frame(p, frame)
    return q @ j @ q.T, q


def orthogonal_field(structure: NKStructure, chart, rotation: np.ndarray) -> ACSField:
    """Field ``Q J Q^T`` with ``Q`` held constant in the g-orthonormal frame."""
    jfield = structure.j_field(chart)

    def i_of(x):
        b, binv = to_orthonormal(chart.metric(x))
        j_on = binv @ jfield(x) @ b
        return b @ rotation @ j_on @ rotation.T @ binv

    return ACSField(i_of, chart, "orthogonal-sample")


def nijenhuis_baseline(structure: NKStructure, charts_and_points) -> np.ndarray:
    """|N| of the nearly Kaehler J at each ``(chart, x)`` pair."""
    out = []
    for chart, x in charts_and_points:
        f = nk_field(structure, chart)
        out.append(nijenhuis_norm(nijenhuis_fd(f, chart, x), chart.metric(x)))
    return np.array(out)
