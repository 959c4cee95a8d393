import numpy as np
import pytest

from acc.errors import BracketError, DimensionError, DomainError
from acc.utils.numerics import (
    affine_flow,
    eigenvalues,
    expm,
    expm_integral,
    find_root_scalar,
    solve_linear,
)


def random_matrices(count=10, n=4, seed=1):
    rng = np.random.default_rng(seed)
    return [rng.normal(size=(n, n)) for _ in range(count)]


def test_expm_zero_time_is_identity():
    a = random_matrices(1)[0]
    assert np.array_equal(expm(a, 0.0), np.eye(4))


def test_expm_diagonal():
    a = np.diag([-1.0, 0.5, 2.0])
    np.testing.assert_allclose(expm(a, 0.3), np.diag(np.exp([-0.3, 0.15, 0.6])), rtol=1e-13)


@pytest.mark.parametrize("a", random_matrices())
def test_expm_semigroup(a):
    s, t = 0.37, 0.61
    np.testing.assert_allclose(expm(a, s + t), expm(a, s) @ expm(a, t), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("a", random_matrices(seed=2))
def test_expm_negative_time_is_inverse(a):
    np.testing.assert_allclose(expm(a, 0.8) @ expm(a, -0.8), np.eye(4), atol=1e-10)


@pytest.mark.parametrize("a", random_matrices(seed=3))
def test_expm_integral_identity(a):
    t = 0.7
    lhs = a @ expm_integral(a, t)
    np.testing.assert_allclose(lhs, expm(a, t) - np.eye(4), rtol=1e-9, atol=1e-11)


def test_expm_integral_singular_matrix():
    # nilpotent: integral of I + a s is t I + a t^2 / 2
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm_integral(a, 2.0), np.array([[2.0, 2.0], [0.0, 2.0]]), atol=1e-13)
    np.testing.assert_allclose(expm_integral(np.zeros((3, 3)), 0.5), 0.5 * np.eye(3), atol=1e-15)


def test_expm_integral_rejects_negative_time():
    with pytest.raises(DomainError):
        expm_integral(np.eye(2), -1.0)


@pytest.mark.parametrize("a", random_matrices(count=5, seed=4))
def test_affine_flow_matches_separate_kernels(a):
    b = np.arange(1.0, 5.0)
    phi, g = affine_flow(a, b, 0.4)
    np.testing.assert_allclose(phi, expm(a, 0.4), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(g, expm_integral(a, 0.4) @ b, rtol=1e-10, atol=1e-12)


def test_affine_flow_backwards_undoes_forwards():
    a = random_matrices(1, seed=5)[0]
    b = np.array([1.0, -2.0, 0.5, 3.0])
    x0 = np.array([0.1, 0.2, -0.3, 0.4])
    phi_f, g_f = affine_flow(a, b, 0.3)
    phi_b, g_b = affine_flow(a, b, -0.3)
    np.testing.assert_allclose(phi_b @ (phi_f @ x0 + g_f) + g_b, x0, atol=1e-11)


def test_affine_flow_dimension_mismatch():
    with pytest.raises(DimensionError):
        affine_flow(np.eye(3), np.ones(2), 1.0)


@pytest.mark.parametrize("a", random_matrices(seed=6))
def test_eigenvalue_invariants(a):
    vals = eigenvalues(a)
    assert len(vals) == 4
    assert abs(np.sum(vals) - np.trace(a)) <= 1e-10 * max(1.0, np.abs(a).sum())
    assert abs(np.prod(vals) - np.linalg.det(a)) <= 1e-9 * max(1.0, abs(np.linalg.det(a)))
    # real matrix: spectrum closed under conjugation
    for v in vals:
        assert np.min(np.abs(vals - np.conj(v))) <= 1e-9 * max(1.0, abs(v))


def test_eigenvalues_rotation():
    vals = eigenvalues(np.array([[0.0, -2.0], [2.0, 0.0]]))
    np.testing.assert_allclose(sorted(vals.imag), [-2.0, 2.0], atol=1e-14)


def test_non_square_rejected():
    with pytest.raises(DimensionError):
        expm(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        eigenvalues(np.ones(3))


def test_non_finite_rejected():
    with pytest.raises(DomainError):
        expm(np.array([[np.nan]]))


def test_solve_linear_complex():
    a = np.array([[2.0, 1.0j], [0.0, 1.0]])
    b = np.array([1.0, 1.0j])
    x = solve_linear(a, b)
    np.testing.assert_allclose(a @ x, b, atol=1e-14)


def test_find_root_scalar():
    root = find_root_scalar(np.cos, 0.0, 3.0)
    assert root == pytest.approx(np.pi / 2, abs=1e-12)


def test_find_root_scalar_endpoint_root():
    assert find_root_scalar(lambda t: t - 1.0, 1.0, 2.0) == 1.0


def test_find_root_scalar_no_sign_change():
    with pytest.raises(BracketError):
        find_root_scalar(lambda t: t * t + 1.0, -1.0, 1.0)


def test_expm_nilpotent():
    np.testing.assert_allclose(expm([[0.0, 1.0], [0.0, 0.0]], 1.0), [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)


@pytest.mark.parametrize("a", random_matrices(count=3, seed=7))
def test_expm_time_derivative(a):
    t, h = 0.5, 1e-6
    fd = (expm(a, t + h) - expm(a, t - h)) / (2 * h)
    np.testing.assert_allclose(fd, a @ expm(a, t), rtol=1e-6, atol=1e-8)


def test_companion_eigenvalues():
    # z^2 - z + 0.24 = (z - 0.4)(z - 0.6)
    vals = eigenvalues([[1.0, -0.24], [1.0, 0.0]])
    np.testing.assert_allclose(sorted(vals.real), [0.4, 0.6], atol=1e-12)
    np.testing.assert_allclose(vals.imag, 0.0, atol=1e-12)
