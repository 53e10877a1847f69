"""Flow integration against the matrix-exponential oracle, and the
segmented power-series propagator against the direct integrator."""

import numpy as np
import pytest
import scipy.linalg

from ddewave import catalog
from ddewave.errors import IntegrationError
from ddewave.flow import (SegmentedPropagator, check_flow_symmetry,
                          fundamental_solution, y_a_flow, y_a_sweep)
from ddewave.model import LinearCoefficients


def constant_coeffs(rng, n, scale=1.0):
    a = scale * rng.standard_normal((n, n))
    b = scale * rng.standard_normal((n, n))
    return LinearCoefficients(A=lambda t: a, B=lambda t: b, h=np.eye(n),
                              tau=1.0), a, b


def test_flow_matches_matrix_exponential():
    """For constant coefficients, F(t, z) = expm((A + z B) t)."""
    rng = np.random.default_rng(31)
    for _ in range(8):
        n = rng.integers(1, 5)
        coeffs, a, b = constant_coeffs(rng, n, scale=0.7)
        z = complex(rng.standard_normal(), rng.standard_normal())
        t_end = float(rng.uniform(0.3, 2.0))
        res = fundamental_solution(coeffs, z, t_end, tol=1e-12)
        ref = scipy.linalg.expm((a + z * b) * t_end)
        assert np.max(np.abs(res.F - ref)) <= 1e-8 * np.max(np.abs(ref)) + 1e-10


def test_dfdz_matches_finite_difference():
    rng = np.random.default_rng(32)
    for _ in range(6):
        n = rng.integers(1, 4)
        coeffs, _, _ = constant_coeffs(rng, n, scale=0.5)
        z = complex(rng.standard_normal(), rng.standard_normal())
        res = fundamental_solution(coeffs, z, 1.2, tol=1e-12)
        eps = 1e-6
        fp = fundamental_solution(coeffs, z + eps, 1.2, tol=1e-12).F
        fm = fundamental_solution(coeffs, z - eps, 1.2, tol=1e-12).F
        fd = (fp - fm) / (2 * eps)
        scale = np.max(np.abs(res.dFdz)) + 1.0
        assert np.max(np.abs(res.dFdz - fd)) / scale <= 1e-6


def test_y_a_sweep_matches_individual_integrations():
    b = catalog.make("antiphase_pair")
    times = np.array([-1.5, -0.2, 0.0, 0.7, 2.4, 1.1])
    swept = y_a_sweep(b.coeffs, times, tol=1e-12)
    for t, y in zip(times, swept):
        ref = y_a_flow(b.coeffs, float(t), tol=1e-12)
        assert np.max(np.abs(y - ref)) <= 1e-8


def test_segmented_propagator_matches_direct_integration():
    b = catalog.make("antiphase_pair")
    prop = SegmentedPropagator(b.coeffs, b.coeffs.tau, radius=25.0, tol=1e-12)
    rng = np.random.default_rng(33)
    zs = 24.0 * (rng.uniform(-1, 1, 12) + 1j * rng.uniform(-1, 1, 12)) / np.sqrt(2)
    F, dF = prop.eval(zs)
    for i, z in enumerate(zs):
        ref = fundamental_solution(b.coeffs, complex(z), b.coeffs.tau,
                                   tol=1e-12)
        scale = np.max(np.abs(ref.F)) + 1.0
        assert np.max(np.abs(F[i] - ref.F)) / scale <= 1e-8
        dscale = np.max(np.abs(ref.dFdz)) + 1.0
        assert np.max(np.abs(dF[i] - ref.dFdz)) / dscale <= 1e-7


def test_segmented_propagator_rejects_outside_disk():
    b = catalog.make("scalar_linear")
    prop = SegmentedPropagator(b.coeffs, 1.0, radius=2.0, tol=1e-10)
    with pytest.raises(ValueError):
        prop.eval([3.0 + 0.0j])


def test_zero_coupling_propagator_is_z_independent():
    b = catalog.make("stuart_landau")  # B = 0
    prop = SegmentedPropagator(b.coeffs, b.coeffs.tau, radius=50.0, tol=1e-12)
    F, dF = prop.eval([0.1 + 0.0j, 40.0 - 10.0j])
    assert np.array_equal(F[0], F[1])
    assert np.max(np.abs(dF)) == 0.0


def test_flow_symmetry_positive_and_negative_control():
    b = catalog.make("antiphase_pair")
    assert check_flow_symmetry(b.coeffs, 0.4 + 0.3j, 1.2, 0.5,
                               tol=1e-11) <= 1e-8
    # break the shifted-conjugation relation with a half-period modulation
    tau = b.coeffs.tau
    broken = LinearCoefficients(
        A=b.coeffs.A,
        B=lambda t: b.coeffs.B(t) * (1.0 + 2.0 * np.sin(np.pi * t / tau)),
        h=b.coeffs.h, tau=tau, dim=b.coeffs.dim)
    assert check_flow_symmetry(broken, 0.4 + 0.3j, 1.2, 0.5,
                               tol=1e-11) >= 1e-2


def test_integration_error_on_blowup():
    coeffs = LinearCoefficients(
        A=lambda t: np.array([[1.0 / (1.0000001 - t)]]),
        B=lambda t: np.zeros((1, 1)), h=np.eye(1), tau=2.0)
    with pytest.raises(IntegrationError):
        y_a_flow(coeffs, 2.0, tol=1e-10)
