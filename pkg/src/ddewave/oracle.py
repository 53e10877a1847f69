"""Independent cross-check: dense discretization of the reduced time-shift map.

The symmetry-reduced solution map U_h = h^-1 U(tau, 0) acts on continuous
histories on [-tau, 0].  Writing the variation-of-constants formula with the
fundamental solution Y of y' = A(t) y,

    (U_h phi)(theta) = h^-1 Y(tau+theta) phi(0)
        + h^-1 Y(tau+theta) * integral_{-tau}^{theta}
              Y(tau+s)^-1 B(tau+s) phi(s) ds,

the map splits into a rank-limited part R (depending on phi(0) only) and a
Volterra part V whose spectrum clusters at zero.  Discretizing phi by
piecewise-linear hat functions on a uniform mesh and collocating at the nodes
yields a dense matrix whose dominant eigenvalues converge (second order in
the mesh width) to the Floquet multipliers.  This route never touches the
characteristic matrix, the power-series propagator, or contour integration,
so agreement with the root finder is a genuine cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import linalg
from .errors import DimensionCapError, DiscrepancyError, ValidationError
from .flow import y_a_sweep
from .linalg import DIMENSION_CAP, Spectrum
from .roots import MultiplierSet

# 3-point Gauss-Legendre rule on [0, 1]
_GAUSS_X = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5,
                     0.5 + np.sqrt(15.0) / 10.0])
_GAUSS_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass
class DiscretizedOperator:
    """Hat-function collocation matrix of the reduced solution map.

    ``matrix`` is the full map (Volterra part plus the phi(0) rank part) on
    node values; ``volterra`` is the Volterra part alone.  Node j of the
    mesh corresponds to history time -tau + j * tau / mesh_size.
    """

    matrix: np.ndarray
    volterra: np.ndarray
    mesh_size: int
    dim: int
    tau: float

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


def discretize(coeffs, mesh_size: int = 200,
               flow_tol: float = 1e-12) -> DiscretizedOperator:
    """Assemble the collocation matrix of U_h on a uniform mesh.

    The per-interval integrals use a 3-point Gauss rule; the inner kernel
    Y(tau+s)^-1 B(tau+s) is accumulated once per interval, so assembly costs
    O(mesh_size) matrix solves plus O(mesh_size^2) block updates.
    """
    if mesh_size < 2:
        raise ValidationError("mesh_size must be at least 2")
    n = coeffs.dim
    m = mesh_size
    if (m + 1) * n > DIMENSION_CAP:
        raise DimensionCapError(
            f"discretization order {(m + 1) * n} exceeds cap {DIMENSION_CAP}")
    tau = float(coeffs.tau)
    dt = tau / m

    # all flow evaluation times in [0, tau]: the m+1 nodes and 3 Gauss points
    # per interval (history time s maps to flow time tau + s)
    node_t = np.linspace(0.0, tau, m + 1)
    gauss_t = (node_t[:-1, None] + dt * _GAUSS_X[None, :]).ravel()
    all_t = np.concatenate([node_t, gauss_t])
    ys = y_a_sweep(coeffs, all_t, tol=flow_tol)
    y_nodes = ys[:m + 1]
    y_gauss = ys[m + 1:].reshape(m, 3, n, n)

    h_inv = coeffs.h_inv
    # W_i = h^-1 Y(tau + theta_i)
    w = np.einsum("ab,ibc->iac", h_inv, y_nodes)

    # G(s) = Y(tau+s)^-1 B(tau+s) at every Gauss point
    g = np.empty((m, 3, n, n), dtype=complex)
    for k in range(m):
        for q in range(3):
            t = gauss_t[3 * k + q]
            g[k, q] = linalg.solve_matrix(y_gauss[k, q],
                                          np.asarray(coeffs.B(t), dtype=complex))

    order = (m + 1) * n
    volterra = np.zeros((order, order), dtype=complex)
    # running integral of the kernel against the hat basis, updated interval
    # by interval: after interval k it equals integral_{-tau}^{theta_{k+1}}
    cum = np.zeros((n, order), dtype=complex)
    for i in range(1, m + 1):
        k = i - 1
        left = slice(k * n, (k + 1) * n)
        right = slice((k + 1) * n, (k + 2) * n)
        for q in range(3):
            lam = _GAUSS_X[q]
            wq = dt * _GAUSS_W[q]
            cum[:, left] += wq * (1.0 - lam) * g[k, q]
            cum[:, right] += wq * lam * g[k, q]
        volterra[i * n:(i + 1) * n] = w[i] @ cum
    full = volterra.copy()
    last = slice(m * n, (m + 1) * n)
    for i in range(m + 1):
        full[i * n:(i + 1) * n, last] += w[i]
    return DiscretizedOperator(matrix=full, volterra=volterra, mesh_size=m,
                               dim=n, tau=tau)


def operator_spectrum(disc: DiscretizedOperator,
                      with_vectors: bool = False) -> Spectrum:
    """Eigenvalues of the discretized map, descending modulus."""
    return linalg.eigenvalues(disc.matrix, with_vectors=with_vectors)


def volterra_spectral_radius(disc: DiscretizedOperator) -> float:
    """Spectral radius of the discretized Volterra part.

    The continuous operator is quasi-nilpotent, so this must shrink toward
    zero as the mesh refines; a large value signals an assembly defect.
    """
    spec = linalg.eigenvalues(disc.volterra)
    return float(np.max(np.abs(spec.eigenvalues))) if spec.eigenvalues.size else 0.0


@dataclass
class OracleComparison:
    """Matching between root-finder multipliers and oracle eigenvalues."""

    pairs: list[tuple[complex, complex, float]]
    max_mismatch: float
    counts_agree: bool
    expected_count: int
    observed_count: int
    eigen_residual_bound: float
    warnings: list[str] = field(default_factory=list)

    def within(self, tol: float) -> bool:
        return self.counts_agree and self.max_mismatch <= tol


def compare(multipliers: MultiplierSet, spectrum: Spectrum,
            mu_min: float, guard: float = 0.5) -> OracleComparison:
    """Pair each multiplier (with multiplicity) to an oracle eigenvalue.

    Multipliers of modulus >= mu_min are expanded by multiplicity and matched
    to the equally many largest-modulus eigenvalues by a minimum-cost
    assignment.  ``counts_agree`` additionally demands that no unmatched
    eigenvalue sits above the threshold inflated by ``guard``: eigenvalues
    slightly below the floor are expected (the operator has a whole tail of
    smaller multipliers), but an unmatched eigenvalue well above the floor
    means the root finder missed a multiplier outright.
    """
    expected = []
    for r in multipliers.roots:
        if abs(r.mu) >= mu_min:
            expected.extend([r.mu] * r.multiplicity)
    eigs = spectrum.eigenvalues
    ne = len(expected)
    warnings: list[str] = []
    if ne == 0:
        surplus = int(np.sum(np.abs(eigs) >= mu_min * (1.0 + guard)))
        return OracleComparison(pairs=[], max_mismatch=0.0,
                                counts_agree=surplus == 0, expected_count=0,
                                observed_count=surplus,
                                eigen_residual_bound=spectrum.residual_bound,
                                warnings=warnings)
    if len(eigs) < ne:
        raise DiscrepancyError(
            f"oracle produced {len(eigs)} eigenvalues but {ne} multipliers "
            "are expected above the threshold")
    observed = eigs[:ne]
    cost = np.abs(np.asarray(expected)[:, None] - observed[None, :])
    rows, cols = linear_sum_assignment(cost)
    pairs = [(expected[i], complex(observed[j]), float(cost[i, j]))
             for i, j in zip(rows, cols)]
    max_mismatch = max(d for _, _, d in pairs)

    cutoff = mu_min * (1.0 + guard)
    surplus = int(np.sum(np.abs(eigs[ne:]) >= cutoff))
    if surplus:
        warnings.append(
            f"{surplus} oracle eigenvalue(s) above the guard threshold were "
            "not matched to any multiplier")
    return OracleComparison(pairs=pairs, max_mismatch=float(max_mismatch),
                            counts_agree=surplus == 0, expected_count=ne,
                            observed_count=ne + surplus,
                            eigen_residual_bound=spectrum.residual_bound,
                            warnings=warnings)
