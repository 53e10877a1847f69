"""Linear-algebra kernel contracts against numpy reference results."""

import numpy as np
import pytest

from ddewave import linalg
from ddewave.errors import DimensionCapError, SingularMatrixError


def random_cmatrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_determinant_matches_numpy():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = rng.integers(1, 9)
        m = random_cmatrix(rng, n)
        d = linalg.det(m)
        ref = np.linalg.det(m)
        assert abs(d - ref) <= 1e-10 * (abs(ref) + 1.0)


def test_solve_residual_small():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = rng.integers(2, 10)
        m = random_cmatrix(rng, n)
        b = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
        fact, _ = linalg.lu_factor(m)
        x = linalg.solve(fact, b)
        assert np.max(np.abs(m @ x - b)) <= 1e-9 * np.max(np.abs(b))


def test_singular_matrix_rejected():
    m = np.array([[1.0, 2.0], [2.0, 4.0]])
    fact, det = linalg.lu_factor(m)
    assert fact.singular
    assert abs(det) <= 1e-12
    with pytest.raises(SingularMatrixError):
        linalg.solve(fact, np.ones(2))


def test_dimension_cap_enforced():
    with pytest.raises(DimensionCapError):
        linalg.lu_factor(np.eye(linalg.DIMENSION_CAP + 1))


def test_nonfinite_entries_rejected():
    with pytest.raises(ValueError):
        linalg.as_cmatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        linalg.as_cmatrix(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_eigenvalue_ordering_and_residual():
    rng = np.random.default_rng(13)
    for _ in range(15):
        n = rng.integers(2, 12)
        m = random_cmatrix(rng, n)
        spec = linalg.eigenvalues(m)
        mods = np.abs(spec.eigenvalues)
        assert np.all(np.diff(mods) <= 1e-12 * (mods[:-1] + 1.0))
        assert spec.residual_bound <= 1e-10 * np.max(np.abs(m))
        # same input, same output, bitwise
        again = linalg.eigenvalues(m)
        assert np.array_equal(spec.eigenvalues, again.eigenvalues)


def test_eigenvalues_known_diagonal():
    m = np.diag([3.0, -5.0, 1.0 + 1.0j])
    spec = linalg.eigenvalues(m)
    assert np.allclose(spec.eigenvalues, [-5.0, 3.0, 1.0 + 1.0j])


def test_det_batch_matches_scalar_path():
    rng = np.random.default_rng(14)
    ms = rng.standard_normal((6, 4, 4)) + 1j * rng.standard_normal((6, 4, 4))
    batch = linalg.det_batch(ms)
    for i in range(6):
        assert abs(batch[i] - linalg.det(ms[i])) <= 1e-10 * (abs(batch[i]) + 1)
