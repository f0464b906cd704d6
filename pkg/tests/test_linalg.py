import numpy as np
import pytest

from robonav.linalg import LinAlgError, canonical_sign, solve_homogeneous, solve_least_squares, svd


def test_identity_singular_values():
    _, s, _ = svd(np.eye(3))
    assert np.allclose(s, 1.0)


def test_null_vector_of_diagonal():
    x, s = solve_homogeneous(np.diag([3.0, 2.0, 0.0]))
    assert np.array_equal(x, [0.0, 0.0, 1.0])
    assert s[-1] == 0.0


def test_random_reconstruction(rng):
    A = rng.normal(size=(10, 6))
    U, s, Vt = svd(A)
    assert np.linalg.norm(A - U @ np.diag(s) @ Vt) < 1e-9 * np.linalg.norm(A)
    assert np.all(np.diff(s) <= 0)


def test_wide_matrix_has_null_vector(rng):
    A = rng.normal(size=(2, 4))
    x, s = solve_homogeneous(A)
    assert s.shape == (4,)
    assert np.linalg.norm(A @ x) < 1e-12
    assert abs(np.linalg.norm(x) - 1.0) < 1e-12


def test_sign_is_canonical(rng):
    A = rng.normal(size=(8, 9))
    x, _ = solve_homogeneous(A)
    y, _ = solve_homogeneous(-A)
    first = np.flatnonzero(x)[0]
    assert x[first] > 0
    assert np.allclose(x, y)


def test_canonical_sign_zero_vector():
    z = np.zeros(3)
    assert np.array_equal(canonical_sign(z), z)
    assert np.array_equal(canonical_sign(np.array([0.0, -2.0, 1.0])), [0.0, 2.0, -1.0])


def test_least_squares(rng):
    A = rng.normal(size=(20, 3))
    x_true = np.array([1.0, -2.0, 0.5])
    assert np.allclose(solve_least_squares(A, A @ x_true), x_true)


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_non_finite_rejected(bad):
    A = np.eye(3)
    A[1, 1] = bad
    for fn in (svd, solve_homogeneous):
        with pytest.raises(LinAlgError):
            fn(A)
    with pytest.raises(LinAlgError):
        solve_least_squares(A, np.ones(3))
