import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nkverify.errors import DegreeMismatchError, NotTopTypeError
from nkverify.forms import (
    alternate,
    form_norm,
    hermitian_norm,
    independent_components,
    is_alternating,
    orthonormal_basis,
    pullback,
    wedge,
    wedge_all,
)
from nkverify.integrability import standard_flat_acs
from nkverify.nk import unitary_coframe
from nkverify.typedecomp import coefficient_in_coframe, decompose, is_type, pq_project, type_residual

E = np.eye(6)
J0 = standard_flat_acs()


def random_form(rng, k, n=6):
    return alternate(rng.normal(size=(n,) * k))


def test_wedge_determinant_convention():
    w = wedge(E[0], E[1])
    assert w[0, 1] == 1.0 and w[1, 0] == -1.0
    vol = wedge_all(*E)
    assert vol[tuple(range(6))] == pytest.approx(1.0)
    assert vol[(1, 0, 2, 3, 4, 5)] == pytest.approx(-1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_wedge_graded_commutative(seed, k, l):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, k), random_form(rng, l)
    np.testing.assert_allclose(wedge(a, b), (-1) ** (k * l) * wedge(b, a), atol=1e-12)
    assert is_alternating(wedge(a, b), tol=1e-12)


def test_wedge_associative(rng):
    a, b, c = random_form(rng, 1), random_form(rng, 2), random_form(rng, 2)
    np.testing.assert_allclose(wedge(wedge(a, b), c), wedge(a, wedge(b, c)), atol=1e-12)


def test_pullback_of_top_form_is_determinant(rng):
    m = rng.normal(size=(6, 6))
    vol = wedge_all(*E)
    assert pullback(vol, m)[tuple(range(6))] == pytest.approx(np.linalg.det(m))


def test_form_norm_and_metric(rng):
    a = wedge(E[0], E[1]) * 3.0
    assert form_norm(a) == pytest.approx(3.0)
    assert len(independent_components(a)) == 15
    g = np.diag([4.0, 1, 1, 1, 1, 1])
    assert form_norm(a, g) == pytest.approx(1.5)
    b = orthonormal_basis(g)
    np.testing.assert_allclose(b.T @ g @ b, np.eye(6), atol=1e-14)


def test_hermitian_norm_of_dz():
    dz = E[0] + 1j * E[1]
    assert hermitian_norm(dz) == pytest.approx(1.0)
    vol = wedge_all(E[0] + 1j * E[1], E[2] + 1j * E[3], E[4] + 1j * E[5])
    assert hermitian_norm(vol) == pytest.approx(1.0)


def test_decomposition_reassembles(rng):
    for k in (1, 2, 3):
        a = random_form(rng, k)
        parts = decompose(a, J0)
        np.testing.assert_allclose(sum(parts.values()), a, atol=1e-12)
        for (p, q), part in parts.items():
            assert type_residual(part, J0, [(p, q)]) < 1e-12


def test_dz_wedge_types():
    dz1, dz2 = E[0] + 1j * E[1], E[2] + 1j * E[3]
    assert is_type(dz1, J0, [(1, 0)], 1e-14)
    assert is_type(wedge(dz1, dz2.conj()), J0, [(1, 1)], 1e-14)
    assert not is_type(wedge(dz1, dz2), J0, [(1, 1)], 1e-3)


def test_kaehler_form_is_11(rng):
    omega = J0.T
    assert type_residual(omega, J0, [(1, 1)]) < 1e-14


def test_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        pq_project(np.zeros((6, 6)), J0, 2, 1)


def test_coefficient_in_coframe():
    co = unitary_coframe(J0).nu
    vol = wedge_all(*co)
    assert coefficient_in_coframe((2 - 1j) * vol, co) == pytest.approx(2 - 1j)
    with pytest.raises(NotTopTypeError):
        coefficient_in_coframe(vol.conj(), co)
