"""Equivariant delayed-feedback control and gain scanning."""

import numpy as np
import pytest

from ddewave import CharMatrixEvaluator, catalog, control
from ddewave.errors import ValidationError


@pytest.fixture(scope="module")
def sl():
    return catalog.make("stuart_landau")


def test_zero_gain_reproduces_uncontrolled_delta(sl):
    controlled = control.build_controlled(sl.base_rhs, sl.base_jacobian,
                                          sl.orbit, np.zeros((2, 2)))
    c_coeffs = controlled.linearize()
    ev_c = CharMatrixEvaluator(c_coeffs, tol=1e-10, radius=3.0)
    ev_u = CharMatrixEvaluator(sl.coeffs, tol=1e-10, radius=3.0)
    rng = np.random.default_rng(51)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert np.max(np.abs(ev_c.delta(z) - ev_u.delta(z))) <= 1e-10


def test_controlled_linearization_coefficients(sl):
    """A(t) picks up +K and B is the constant -K h."""
    k = 0.3
    controlled = control.build_controlled(sl.base_rhs, sl.base_jacobian,
                                          sl.orbit, k * np.eye(2))
    coeffs = controlled.linearize()
    h = sl.orbit.h
    for t in (0.0, 0.7, 2.0):
        expected_a = sl.base_jacobian(sl.orbit.x(t)) + k * np.eye(2)
        assert np.max(np.abs(coeffs.A(t) - expected_a)) <= 1e-12
        assert np.max(np.abs(coeffs.B(t) - (-k * h))) <= 1e-12


def test_commutation_violation_rejected():
    b = catalog.make("stuart_landau", phi=np.pi / 2)  # non-central rotation
    bad = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        control.build_controlled(b.base_rhs, b.base_jacobian, b.orbit, bad)


def test_feedback_must_vanish_on_orbit(sl):
    # declare the wrong phase fraction: the feedback no longer vanishes
    from ddewave.model import OrbitWithSymmetry
    wrong = OrbitWithSymmetry(x=sl.orbit.x, xdot=sl.orbit.xdot,
                              period=sl.orbit.period, h=sl.orbit.h,
                              theta=sl.orbit.theta * 0.8)
    with pytest.raises(ValidationError):
        control.build_controlled(sl.base_rhs, sl.base_jacobian, wrong,
                                 0.2 * np.eye(2))


def test_trivial_root_persists_under_control(sl):
    for k in (0.1, 0.5, 1.5):
        controlled = control.build_controlled(sl.base_rhs, sl.base_jacobian,
                                              sl.orbit, k * np.eye(2))
        ev = CharMatrixEvaluator(controlled.linearize(), tol=1e-10,
                                 radius=1.5)
        assert abs(np.linalg.det(ev.delta(1.0 + 0.0j))) <= 1e-8


def test_single_point_scan_equals_direct_analysis(sl):
    grid_result = control.scan_gain(sl.base_rhs, sl.base_jacobian, sl.orbit,
                                    [0.25], mu_min=0.5)
    controlled = control.build_controlled(sl.base_rhs, sl.base_jacobian,
                                          sl.orbit, 0.25 * np.eye(2))
    mset, verdict, triv = control.analyze_point(controlled, mu_min=0.5)
    p = grid_result.points[0]
    assert p.classification == verdict.classification
    assert p.max_nontrivial_modulus == max(
        (abs(r.mu) for r in mset.nontrivial()), default=0.0)
    assert p.trivial_residual == triv


def test_scan_verdicts_consistent_with_moduli(sl):
    gains = np.linspace(0.0, 0.6, 13)
    res = control.scan_gain(sl.base_rhs, sl.base_jacobian, sl.orbit, gains,
                            mu_min=0.5)
    for p in res.points:
        assert p.error is None
        assert p.trivial_residual <= 1e-8
        if p.classification == "stable":
            assert p.max_nontrivial_modulus < 1.0
        if p.classification == "unstable":
            assert p.max_nontrivial_modulus > 1.0
    intervals = res.stable_intervals()
    assert len(intervals) == 1
    lo, hi = intervals[0]
    assert lo == 0.0
    # destabilization boundary at k = 1/tau = 1/pi
    assert hi < 1.0 / np.pi < hi + 2 * (gains[1] - gains[0])


def test_stable_intervals_from_runs():
    from ddewave.control import GainScanPoint, GainScanResult
    mk = lambda k, c: GainScanPoint(gain=k, classification=c,
                                    max_nontrivial_modulus=0.0,
                                    trivial_residual=0.0, margin=0.0)
    res = GainScanResult(points=[mk(0.0, "unstable"), mk(0.1, "stable"),
                                 mk(0.2, "stable"), mk(0.3, "inconclusive"),
                                 mk(0.4, "stable")],
                         structure=np.eye(1), mu_min=0.5)
    assert res.stable_intervals() == [(0.1, 0.2), (0.4, 0.4)]
