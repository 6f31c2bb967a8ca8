import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectrabound.geometry import Disk, DomainError, Ellipse
from spectrabound.operators import RationalFunction, operator_norm
from spectrabound.similarity import (
    build_similarity,
    canonicalize,
    conformal_a,
    conformal_a_matrix,
    degree_one_bound_check,
    degree_one_trials,
    disk_similarity_jordan,
    ellipse_dilation_verify,
    numerical_range_2x2,
    random_dilation,
    rho_from_gamma,
    rotation_identity_residual,
    series_terms,
    verify_c2_bound,
)

GAMMAS = [0.1, 0.5, 1.5, 3.0, 10.0]
# X = rho * a(1), 30-digit mpmath evaluations of the product formula
X_ORACLE = {
    0.1: 1.0512492197250392893,
    0.5: 1.2805369121577982565,
    1.5: 1.7846739157615145842,
    3.0: 1.9670787512892450368,
    10.0: 1.9996155509644133263,
}


@pytest.mark.parametrize("gamma", GAMMAS)
def test_similarity_identities(gamma):
    s = build_similarity(gamma)
    assert s.b_norm_error < 1e-10
    assert 1 < s.X < 2
    assert s.quadratic_residual < 1e-9
    assert s.conjugation_residual < 1e-9
    assert s.a_matrix_residual < 1e-9
    assert s.cond_S == pytest.approx(s.X, rel=1e-9)
    assert s.X == pytest.approx(X_ORACLE[gamma], abs=1e-10)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_conformal_map_boundary(gamma):
    rho = rho_from_gamma(gamma)
    w = rho * np.exp(2j * math.pi * np.arange(100) / 100)
    sigma = 0.5 * (w + 1 / w)
    np.testing.assert_allclose(np.abs(conformal_a(sigma, rho)), 1.0, atol=1e-8)


def test_conformal_map_properties():
    rho = rho_from_gamma(1.0)
    assert conformal_a(0.0, rho) == 0
    z = np.array([0.3 + 0.1j, -0.2 + 0.3j])
    # odd and real-symmetric
    np.testing.assert_allclose(conformal_a(-z, rho), -conformal_a(z, rho), atol=1e-15)
    np.testing.assert_allclose(conformal_a(np.conj(z), rho), np.conj(conformal_a(z, rho)), atol=1e-15)
    assert np.all(np.abs(conformal_a(z, rho)) < 1)
    with pytest.raises(DomainError):
        conformal_a(5.0, rho)


def test_similarity_trend_to_one():
    Xs = [build_similarity(g).X for g in (1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0)]
    assert all(a < b for a, b in zip(Xs, Xs[1:]))
    assert Xs[0] < 1.001
    assert Xs[-1] < 2


def test_series_terms_grow_as_rho_approaches_one():
    assert series_terms(rho_from_gamma(10.0)) == 8
    assert series_terms(rho_from_gamma(0.01)) > series_terms(rho_from_gamma(0.5))
    with pytest.raises(ValueError):
        series_terms(1.0)
    with pytest.raises(ValueError):
        rho_from_gamma(0.0)


def test_conformal_matrix_matches_scalar_on_diagonal():
    rho = rho_from_gamma(2.0)
    D = np.diag([0.3, -0.5 + 0.2j])
    np.testing.assert_allclose(np.diag(conformal_a_matrix(D, rho)), conformal_a(np.diag(D), rho), atol=1e-14)


# --- canonical forms -------------------------------------------------------


@given(seed=st.integers(0, 100_000))
def test_canonicalize_reconstructs(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    form = canonicalize(A)
    assert form.case == "distinct_eigenvalues"
    assert form.param >= 0
    np.testing.assert_allclose(form.reconstruct(), A, atol=1e-12)
    U = form.unitary
    np.testing.assert_allclose(U.conj().T @ U, np.eye(2), atol=1e-13)


def test_canonicalize_equal_eigenvalues():
    A = np.array([[2, 3j], [0, 2]])
    form = canonicalize(A)
    assert form.case == "equal_eigenvalues"
    assert form.param == pytest.approx(3.0)
    np.testing.assert_allclose(form.reconstruct(), A, atol=1e-13)
    with pytest.raises(ValueError):
        canonicalize(np.eye(3))


def test_numerical_range_2x2():
    W = numerical_range_2x2([[1, 1.5], [0, -1]])
    assert isinstance(W, Ellipse)
    assert W.b == pytest.approx(0.75)
    assert W.a == pytest.approx(1.25)
    D = numerical_range_2x2([[1j, 2], [0, 1j]])
    assert isinstance(D, Disk) and D.radius == pytest.approx(1.0) and D.center == pytest.approx(1j)
    with pytest.raises(DomainError):
        numerical_range_2x2(np.diag([1.0, 2.0]))


@given(seed=st.integers(0, 100_000))
def test_numerical_range_2x2_matches_support(seed):
    from spectrabound.operators import numerical_range_support

    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    W = numerical_range_2x2(A)
    from spectrabound.geometry import support_function

    t = np.linspace(0, 2 * math.pi, 17)
    np.testing.assert_allclose(support_function(W, t), numerical_range_support(A, t), atol=1e-9)


def test_disk_similarity_jordan():
    for c in (0.5, 1.0, 1.7, 2.0):
        S, kappa = disk_similarity_jordan(c)
        A = np.array([[0, c], [0, 0]], dtype=complex)
        assert operator_norm(S @ A @ np.linalg.inv(S)) <= 1 + 1e-14
        assert kappa <= 2 + 1e-14
    with pytest.raises(ValueError):
        disk_similarity_jordan(2.5)


@given(seed=st.integers(0, 100_000), degree=st.integers(1, 3))
def test_c2_bound_random(seed, degree):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    W = numerical_range_2x2(A)
    c = complex(np.trace(A)) / 2
    R = 2 * W.scale + 1
    poles = c + R * (1.5 + rng.uniform(size=degree)) * np.exp(2j * math.pi * rng.uniform(size=degree))
    r = RationalFunction.from_roots(rng.normal(size=degree) + 1j * rng.normal(size=degree), poles)
    assert verify_c2_bound(A, r) <= 2 + 1e-6


def test_c2_bound_attained_by_jordan_block():
    A = np.array([[0, 2], [0, 0]], dtype=complex)
    assert verify_c2_bound(A, RationalFunction.identity()) == pytest.approx(2.0, abs=1e-12)


# --- dilations and degree-one polynomials ---------------------------------


@pytest.mark.parametrize("params", [(1.0, -1.0, 1.5), (0.5j, 2.0, 0.3), (0.0, 0.0, 2.0)])
def test_dilation_round_trip(params):
    V, A = random_dilation(4, params, 7)
    assert ellipse_dilation_verify(V, params, A)
    assert not ellipse_dilation_verify(V, params, A + 0.1 * np.eye(4))


def test_dilation_bad_shapes():
    V, A = random_dilation(3, (1.0, -1.0, 1.0), 1)
    with pytest.raises(ValueError):
        ellipse_dilation_verify(V[:, :2], (1.0, -1.0, 1.0), A)
    with pytest.raises(ValueError):
        ellipse_dilation_verify(2 * V, (1.0, -1.0, 1.0), A)


@given(theta=st.floats(-10, 10))
def test_rotation_identity(theta):
    assert rotation_identity_residual(theta) < 1e-14


def test_degree_one_check_simple():
    e = Ellipse(0, 2, 1)
    A = np.diag([1.0, -1.0]).astype(complex)
    ratio = degree_one_bound_check(A, [[1.0]], [[0.5]], e)
    assert ratio <= 1 + 1e-12
    with pytest.raises(DomainError):
        degree_one_bound_check(np.diag([3.0]), [[1.0]], [[1.0]], e)


def test_degree_one_trials_small():
    ratios = degree_one_trials(trials=15, seed=3)
    assert ratios.shape == (15,)
    assert np.all(ratios <= 2 + 1e-6)
    assert np.all(ratios > 0)
