"""Problem definitions: DDE right-hand sides, periodic orbits with a
spatio-temporal symmetry, and the linearized coefficient families.

The standing assumptions are never taken on faith: :func:`validate_hypotheses`
checks them numerically on a sample grid (orbit residual, equivariance of the
right-hand side, the spatio-temporal relation, and the shift-equals-delay
identity), and :func:`linearize` re-checks the induced shifted-conjugation
relation of the coefficient matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError
from .linalg import as_cmatrix

#: sample times per period used by the validation grids
DEFAULT_GRID = 64


@dataclass
class DdeProblem:
    """A delay differential equation x'(t) = f(x(t), x(t - tau)).

    ``d1f``/``d2f`` are the partial derivative maps of f with respect to the
    instantaneous and delayed argument; they must agree with finite
    differences of ``f`` (see :meth:`check_derivatives`).
    """

    dim: int
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d1f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    tau: float

    def __post_init__(self):
        if self.dim <= 0:
            raise ValidationError("state dimension must be positive")
        if self.tau <= 0:
            raise ValidationError("delay must be positive")

    def check_derivatives(self, points=None, rtol: float = 1e-5,
                          rng=None) -> float:
        """Max relative mismatch between d1f/d2f and central differences."""
        if rng is None:
            rng = np.random.default_rng(2024)
        if points is None:
            points = [(rng.standard_normal(self.dim), rng.standard_normal(self.dim))
                      for _ in range(10)]
        worst = 0.0
        for x, y in points:
            step = 1e-6 * (np.linalg.norm(x) + np.linalg.norm(y) + 1.0)
            j1 = np.empty((self.dim, self.dim))
            j2 = np.empty((self.dim, self.dim))
            for k in range(self.dim):
                e = np.zeros(self.dim)
                e[k] = step
                j1[:, k] = (self.f(x + e, y) - self.f(x - e, y)) / (2 * step)
                j2[:, k] = (self.f(x, y + e) - self.f(x, y - e)) / (2 * step)
            scale = np.max(np.abs(j1)) + np.max(np.abs(j2)) + 1.0
            worst = max(worst,
                        float(np.max(np.abs(np.real(self.d1f(x, y)) - j1)) / scale),
                        float(np.max(np.abs(np.real(self.d2f(x, y)) - j2)) / scale))
        if worst > rtol:
            raise ValidationError(
                f"analytic Jacobians disagree with finite differences: {worst:.3e}")
        return worst


@dataclass
class OrbitWithSymmetry:
    """A periodic orbit together with one spatio-temporal symmetry element.

    ``h`` is a real invertible matrix and ``theta`` in (0, 1) the phase
    fraction with h x(t) = x(t + theta * period).  The product theta * period
    must equal the delay of the problem the orbit belongs to.
    """

    x: Callable[[float], np.ndarray]
    xdot: Callable[[float], np.ndarray]
    period: float
    h: np.ndarray
    theta: float

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        if self.period <= 0:
            raise ValidationError("period must be positive")
        if not 0 <= self.theta < 1:
            raise ValidationError("theta must lie in [0, 1)")
        if abs(np.linalg.det(self.h)) < 1e-12:
            raise ValidationError("symmetry matrix is singular")

    @property
    def shift(self) -> float:
        return self.theta * self.period


@dataclass
class LinearCoefficients:
    """Coefficients A(t), B(t) of a linear DDE with symmetry matrix h.

    Satisfies (and is checked for) h A(t) h^-1 = A(t + tau) and the same for
    B on a sample grid.
    """

    A: Callable[[float], np.ndarray]
    B: Callable[[float], np.ndarray]
    h: np.ndarray
    tau: float
    dim: int = field(default=0)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        if self.dim == 0:
            self.dim = self.h.shape[0]
        self.h_inv = np.linalg.inv(self.h.astype(complex))

    def symmetry_residual(self, n_samples: int = DEFAULT_GRID) -> tuple[float, float]:
        """Max residual of the shifted-conjugation relation, and the worst t."""
        h = self.h.astype(complex)
        worst = 0.0
        worst_t = 0.0
        for t in np.linspace(0.0, self.tau, n_samples, endpoint=False):
            ra = np.max(np.abs(h @ self.A(t) @ self.h_inv - self.A(t + self.tau)))
            rb = np.max(np.abs(h @ self.B(t) @ self.h_inv - self.B(t + self.tau)))
            r = max(float(ra), float(rb))
            if r > worst:
                worst, worst_t = r, float(t)
        return worst, worst_t


@dataclass
class ValidationReport:
    """Residuals of the standing hypotheses, each flagged against a tolerance."""

    orbit_residual: float
    equivariance_residual: float
    spatiotemporal_residual: float
    shift_delay_residual: float
    tol: float

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "orbit_satisfies_dde": self.orbit_residual <= self.tol,
            "rhs_equivariance": self.equivariance_residual <= self.tol,
            "spatio_temporal_relation": self.spatiotemporal_residual <= self.tol,
            "shift_equals_delay": self.shift_delay_residual <= self.tol,
        }

    @property
    def all_passed(self) -> bool:
        return all(self.checks.values())


def validate_hypotheses(problem: DdeProblem, orbit: OrbitWithSymmetry,
                        tol: float = 1e-8, n_samples: int = DEFAULT_GRID,
                        rng=None) -> ValidationReport:
    """Numerically check every standing assumption of the stability theory.

    Checks, on a sample grid over one period: the orbit solves the DDE; the
    right-hand side commutes with the symmetry at random states; the orbit
    satisfies h x(t) = x(t + theta p); and theta * period equals the delay.
    Failures are reported, not raised, so callers can inspect partial results.
    """
    if rng is None:
        rng = np.random.default_rng(7)
    ts = np.linspace(0.0, orbit.period, n_samples, endpoint=False)
    h = orbit.h

    orbit_res = 0.0
    st_res = 0.0
    for t in ts:
        xt = orbit.x(t)
        xd = orbit.x(t - problem.tau)
        orbit_res = max(orbit_res, float(np.max(np.abs(
            orbit.xdot(t) - problem.f(xt, xd)))))
        st_res = max(st_res, float(np.max(np.abs(
            h @ xt - orbit.x(t + orbit.shift)))))

    equi_res = 0.0
    scale = max(1.0, float(np.max(np.abs([orbit.x(t) for t in ts]))))
    for _ in range(50):
        x = rng.uniform(-scale, scale, problem.dim)
        y = rng.uniform(-scale, scale, problem.dim)
        equi_res = max(equi_res, float(np.max(np.abs(
            problem.f(h @ x, h @ y) - h @ problem.f(x, y)))))

    shift_res = abs(orbit.shift - problem.tau) / problem.tau
    return ValidationReport(orbit_residual=orbit_res,
                            equivariance_residual=equi_res,
                            spatiotemporal_residual=st_res,
                            shift_delay_residual=shift_res,
                            tol=tol)


def linearize(problem: DdeProblem, orbit: OrbitWithSymmetry,
              symmetry_tol: float = 1e-8) -> LinearCoefficients:
    """Coefficients of the linearization along the orbit.

    A(t) and B(t) are the two partial derivatives of f evaluated on
    (x(t), x(t - tau)).  The induced shifted-conjugation relation is verified
    on a sample grid; a violation aborts with the worst sample time named.
    """
    tau = problem.tau

    def A(t):
        return np.asarray(problem.d1f(orbit.x(t), orbit.x(t - tau)), dtype=complex)

    def B(t):
        return np.asarray(problem.d2f(orbit.x(t), orbit.x(t - tau)), dtype=complex)

    coeffs = LinearCoefficients(A=A, B=B, h=orbit.h, tau=tau, dim=problem.dim)
    resid, worst_t = coeffs.symmetry_residual()
    if resid > symmetry_tol:
        raise ValidationError(
            f"coefficient symmetry residual {resid:.3e} at t={worst_t:.6g} "
            f"exceeds {symmetry_tol:.1e}")
    return coeffs


def fourier_orbit(coefficients, period: float):
    """Periodic vector function from a truncated Fourier series.

    ``coefficients`` is a list of (cos_coeff, sin_coeff) vector pairs for
    modes k = 0, 1, ...; returns callables (x, xdot) evaluating the series
    and its exact termwise derivative.
    """
    if period <= 0:
        raise ValidationError("period must be positive")
    cos_c = [np.asarray(c, dtype=float) for c, _ in coefficients]
    sin_c = [np.asarray(s, dtype=float) for _, s in coefficients]
    omegas = [2 * np.pi * k / period for k in range(len(coefficients))]

    def x(t):
        return sum(c * np.cos(w * t) + s * np.sin(w * t)
                   for c, s, w in zip(cos_c, sin_c, omegas))

    def xdot(t):
        return sum(-c * w * np.sin(w * t) + s * w * np.cos(w * t)
                   for c, s, w in zip(cos_c, sin_c, omegas))

    return x, xdot


def fourier_matrix(tables, period: float):
    """Periodic matrix function from Fourier coefficient tables.

    Same layout as :func:`fourier_orbit` but with matrix-valued coefficients;
    used to feed externally supplied linear coefficient families.
    """
    if period <= 0:
        raise ValidationError("period must be positive")
    cos_c = [as_cmatrix(c) for c, _ in tables]
    sin_c = [as_cmatrix(s) for _, s in tables]
    omegas = [2 * np.pi * k / period for k in range(len(tables))]

    def m(t):
        return sum(c * np.cos(w * t) + s * np.sin(w * t)
                   for c, s, w in zip(cos_c, sin_c, omegas))

    return m
