"""Evaluation of the characteristic matrix and its determinant.

For a coefficient family (A, B, h, tau) the characteristic matrix is

    Delta(z) = I - z h^-1 F(tau, z)

where F(., z) is the fundamental solution of y' = [A(t) + z B(t) h^-1] y.
The roots of det Delta, with multiplicities, are the reciprocals of the
nonzero eigenvalues of the symmetry-reduced time-tau solution map of the
linear delay equation; the logarithmic derivative tr(Delta^-1 Delta') is the
integrand of the contour counts used by the root finder.
"""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from . import linalg
from .errors import SingularMatrixError, ValidationError
from .flow import SegmentedPropagator, fundamental_solution

_CACHE_CAPACITY = 4096

#: relative determinant magnitude below which Delta(z) is treated as singular
_SINGULAR_DET_RTOL = 1e-13


class CharMatrixEvaluator:
    """Evaluates Delta(z), det Delta(z) and d/dz log det Delta(z).

    The z -> F(tau, z) map is served from a :class:`SegmentedPropagator`
    power series precomputed over the disk of interest (contour integration
    revisits thousands of z values; a fresh integration per z would dominate
    the runtime by orders of magnitude).  Evaluations outside the current
    disk transparently enlarge it.  Scalar results are memoized in a small
    LRU cache keyed by the exact complex argument, so repeated evaluations at
    identical z are bitwise identical.

    With ``assume_identity_symmetry`` the h^-1 factor is skipped entirely,
    realizing the specialized periodic-coefficient (monodromy) formula
    Delta(z) = I - z F(tau, z).
    """

    def __init__(self, coeffs, tol: float = 1e-10, radius: float = 1.5,
                 assume_identity_symmetry: bool = False):
        if coeffs.tau <= 0:
            raise ValidationError("delay must be positive")
        self.coeffs = coeffs
        self.tol = float(tol)
        self.dim = coeffs.dim
        self.shift = float(coeffs.tau)
        if assume_identity_symmetry and np.max(np.abs(
                coeffs.h - np.eye(self.dim))) > 1e-14:
            raise ValidationError("identity-symmetry mode requires h = I")
        self.assume_identity_symmetry = assume_identity_symmetry
        self.h_inv = coeffs.h_inv
        self._eye = np.eye(self.dim, dtype=complex)
        self._prop: SegmentedPropagator | None = None
        self._cache: OrderedDict = OrderedDict()
        self.cache_hits = 0
        self.cache_misses = 0
        self.ensure_radius(radius)

    # -- propagator management -------------------------------------------

    def ensure_radius(self, radius: float) -> None:
        """Make the series representation valid on |z| <= radius."""
        if self._prop is None or self._prop.radius < radius:
            self._prop = SegmentedPropagator(self.coeffs, self.shift,
                                             radius * 1.25, tol=self.tol)
            self._cache.clear()

    @property
    def radius(self) -> float:
        return self._prop.radius

    # -- batch evaluation ------------------------------------------------

    def _flow_batch(self, zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        zmax = float(np.max(np.abs(zs))) if len(zs) else 0.0
        self.ensure_radius(zmax)
        return self._prop.eval(zs)

    def delta_batch(self, zs) -> np.ndarray:
        """Delta(z) for a batch of z values; shape (len(zs), N, N)."""
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        F, _ = self._flow_batch(zs)
        hF = F if self.assume_identity_symmetry else self.h_inv[None] @ F
        return self._eye[None] - zs[:, None, None] * hF

    def delta_with_derivative_batch(self, zs):
        """(Delta(z), Delta'(z)) for a batch of z values."""
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        F, dF = self._flow_batch(zs)
        if not self.assume_identity_symmetry:
            F = self.h_inv[None] @ F
            dF = self.h_inv[None] @ dF
        delta = self._eye[None] - zs[:, None, None] * F
        dprime = -F - zs[:, None, None] * dF
        return delta, dprime

    def det_logderiv_batch(self, zs) -> tuple[np.ndarray, np.ndarray]:
        """det Delta(z) and tr(Delta^-1 Delta') for a batch, cached per z.

        Raises :class:`SingularMatrixError` when Delta(z) is singular to
        working precision at some batch point (a root sitting on a contour);
        the caller is expected to perturb the contour and retry.
        """
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        dets = np.empty(len(zs), dtype=complex)
        logd = np.empty(len(zs), dtype=complex)
        missing = []
        for i, z in enumerate(zs):
            key = complex(z)
            hit = self._cache.get(key)
            if hit is not None:
                self._cache.move_to_end(key)
                dets[i], logd[i] = hit
                self.cache_hits += 1
            else:
                missing.append(i)
                self.cache_misses += 1
        if missing:
            idx = np.array(missing)
            delta, dprime = self.delta_with_derivative_batch(zs[idx])
            d = linalg.det_batch(delta)
            scale = np.max(np.abs(delta), axis=(1, 2)) ** self.dim + 1.0
            bad = (~np.isfinite(d)) | (np.abs(d) < _SINGULAR_DET_RTOL * scale)
            if np.any(bad):
                zb = zs[idx][np.argmax(bad)]
                raise SingularMatrixError(
                    f"Delta(z) singular to working precision at z={zb!r}")
            sol = np.linalg.solve(delta, dprime)
            tr = np.trace(sol, axis1=1, axis2=2)
            for j, i in enumerate(missing):
                dets[i] = d[j]
                logd[i] = tr[j]
                self._cache[complex(zs[i])] = (d[j], tr[j])
                if len(self._cache) > _CACHE_CAPACITY:
                    self._cache.popitem(last=False)
        return dets, logd

    # -- scalar interface --------------------------------------------------

    def delta(self, z: complex) -> np.ndarray:
        """The characteristic matrix I - z h^-1 F(tau, z)."""
        return self.delta_batch([z])[0]

    def det_delta(self, z: complex) -> complex:
        d, _ = self.det_logderiv_batch([z])
        return complex(d[0])

    def log_derivative(self, z: complex) -> complex:
        """d/dz log det Delta(z) = tr(Delta(z)^-1 Delta'(z))."""
        _, l = self.det_logderiv_batch([z])
        return complex(l[0])

    def delta_prime(self, z: complex) -> np.ndarray:
        _, dprime = self.delta_with_derivative_batch([z])
        return dprime[0]

    # -- reference path ----------------------------------------------------

    def delta_direct(self, z: complex) -> np.ndarray:
        """Delta(z) via a fresh per-z adaptive integration (no series).

        Slow reference path used to cross-validate the series representation.
        """
        res = fundamental_solution(self.coeffs, z, self.shift, tol=self.tol)
        hF = res.F if self.assume_identity_symmetry else self.h_inv @ res.F
        return self._eye - z * hF
