"""Delayed-feedback control that respects a spatio-temporal symmetry.

Given an ODE x' = F(x) with a periodic orbit carrying the symmetry
h x(t) = x(t + theta * period), the feedback term K [x(t) - h x(t - tau)]
with tau = theta * period vanishes identically on the orbit, so the orbit
survives the control unchanged while its stability can shift.  The gain must
commute with the symmetry (h K = K h) for the controlled system to stay
equivariant.  The linearization has A(t) = F'(x(t)) + K and constant
B = -K h, so the parameterized coefficient A(t) + z B h^-1 collapses to
F'(x(t)) + (1 - z) K.

:func:`scan_gain` sweeps a scalar gain k along a fixed commuting structure
K0 and classifies the orbit at every grid point, reporting maximal stable
parameter intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import model, roots
from .charmat import CharMatrixEvaluator
from .errors import DdeWaveError, ValidationError
from .model import DdeProblem, LinearCoefficients, OrbitWithSymmetry


@dataclass
class ControlledProblem:
    """A base ODE plus symmetry-compatible delayed feedback."""

    base_rhs: Callable[[np.ndarray], np.ndarray]
    base_jacobian: Callable[[np.ndarray], np.ndarray]
    gain: np.ndarray
    orbit: OrbitWithSymmetry
    problem: DdeProblem

    def linearize(self, symmetry_tol: float = 1e-8) -> LinearCoefficients:
        return model.linearize(self.problem, self.orbit,
                               symmetry_tol=symmetry_tol)


def build_controlled(base_rhs, base_jacobian, orbit: OrbitWithSymmetry,
                     gain, commute_tol: float = 1e-12,
                     feedback_tol: float = 1e-8,
                     n_samples: int = model.DEFAULT_GRID) -> ControlledProblem:
    """Assemble the controlled delay problem and verify its preconditions.

    Checks that the gain commutes with the symmetry matrix and that the
    feedback term vanishes along the supplied orbit (if it does not, the
    orbit is not a solution of the controlled system and the stability
    question is ill-posed).
    """
    h = orbit.h
    n = h.shape[0]
    K = np.asarray(gain, dtype=float)
    if K.shape != (n, n):
        raise ValidationError(f"gain must be {n}x{n}, got {K.shape}")
    scale = float(np.max(np.abs(K))) + 1.0
    comm = float(np.max(np.abs(h @ K - K @ h)))
    if comm > commute_tol * scale:
        raise ValidationError(
            f"gain does not commute with the symmetry matrix "
            f"(residual {comm:.3e})")
    tau = orbit.shift
    if tau <= 0:
        raise ValidationError("symmetry shift theta * period must be positive")

    worst = 0.0
    for t in np.linspace(0.0, orbit.period, n_samples, endpoint=False):
        fb = K @ (orbit.x(t) - h @ orbit.x(t - tau))
        worst = max(worst, float(np.max(np.abs(fb))))
    if worst > feedback_tol:
        raise ValidationError(
            f"feedback term does not vanish on the orbit "
            f"(residual {worst:.3e}); the orbit is not a controlled solution")

    Kh = K @ h

    def f(x, y):
        return base_rhs(x) + K @ x - Kh @ y

    def d1f(x, y):
        return base_jacobian(x) + K

    def d2f(x, y):
        return -Kh

    problem = DdeProblem(dim=n, f=f, d1f=d1f, d2f=d2f, tau=tau)
    return ControlledProblem(base_rhs=base_rhs, base_jacobian=base_jacobian,
                             gain=K, orbit=orbit, problem=problem)


@dataclass
class GainScanPoint:
    """Outcome of the stability pipeline at one gain value."""

    gain: float
    classification: str
    max_nontrivial_modulus: float
    trivial_residual: float
    margin: float
    error: str | None = None


@dataclass
class GainScanResult:
    """Per-gain verdicts over a grid plus the derived stable intervals."""

    points: list[GainScanPoint]
    structure: np.ndarray
    mu_min: float

    def stable_intervals(self) -> list[tuple[float, float]]:
        """Maximal contiguous runs of grid points classified as stable."""
        intervals: list[tuple[float, float]] = []
        start = None
        for p in self.points:
            if p.classification == "stable":
                if start is None:
                    start = p.gain
                end = p.gain
            else:
                if start is not None:
                    intervals.append((start, end))
                    start = None
        if start is not None:
            intervals.append((start, end))
        return intervals


def analyze_point(controlled: ControlledProblem, mu_min: float,
                  flow_tol: float = 1e-10,
                  settings: roots.RootSettings | None = None,
                  tol_unit: float = 1e-6):
    """Run the characteristic-matrix pipeline on one controlled problem.

    Returns (MultiplierSet, StabilityVerdict, trivial_residual) where the
    trivial residual is |det Delta(1)| (the trivial multiplier must persist
    for every gain, because the feedback vanishes on the orbit).
    """
    coeffs = controlled.linearize()
    radius = 1.0 / mu_min
    evaluator = CharMatrixEvaluator(coeffs, tol=flow_tol,
                                    radius=radius * 1.1)
    region = roots.SearchRegion.disk(mu_min)
    mset = roots.find_all(evaluator, region, settings)
    verdict = roots.classify(mset, tol_unit=tol_unit)
    try:
        trivial_residual = abs(evaluator.det_delta(1.0 + 0.0j))
    except DdeWaveError:
        trivial_residual = 0.0
    return mset, verdict, trivial_residual


def scan_gain(base_rhs, base_jacobian, orbit: OrbitWithSymmetry, gains,
              structure=None, mu_min: float = 0.5, flow_tol: float = 1e-10,
              settings: roots.RootSettings | None = None,
              tol_unit: float = 1e-6) -> GainScanResult:
    """Classify the orbit of the controlled system at every gain k in `gains`.

    The gain matrix is k * K0 with a fixed structure K0 (identity by
    default).  Grid points are processed in order and independently; a
    failure at one point is recorded on that point and the scan continues.
    """
    n = orbit.h.shape[0]
    K0 = np.eye(n) if structure is None else np.asarray(structure, dtype=float)
    if K0.shape != (n, n):
        raise ValidationError(f"gain structure must be {n}x{n}, got {K0.shape}")
    comm = float(np.max(np.abs(orbit.h @ K0 - K0 @ orbit.h)))
    if comm > 1e-12 * (float(np.max(np.abs(K0))) + 1.0):
        raise ValidationError(
            f"gain structure does not commute with the symmetry matrix "
            f"(residual {comm:.3e})")
    gains = [float(k) for k in gains]
    points: list[GainScanPoint] = []
    for k in gains:
        try:
            controlled = build_controlled(base_rhs, base_jacobian, orbit,
                                          k * K0)
            mset, verdict, triv_res = analyze_point(
                controlled, mu_min, flow_tol=flow_tol, settings=settings,
                tol_unit=tol_unit)
            nontrivial = mset.nontrivial()
            max_mod = max((abs(r.mu) for r in nontrivial), default=0.0)
            points.append(GainScanPoint(
                gain=k, classification=verdict.classification,
                max_nontrivial_modulus=float(max_mod),
                trivial_residual=float(triv_res),
                margin=float(verdict.margin)))
        except DdeWaveError as exc:
            points.append(GainScanPoint(
                gain=k, classification="error", max_nontrivial_modulus=0.0,
                trivial_residual=float("nan"), margin=0.0, error=str(exc)))
    return GainScanResult(points=points, structure=K0, mu_min=mu_min)
