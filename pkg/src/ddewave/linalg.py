"""Dense complex linear algebra kernels.

Thin, contract-checked wrappers around LAPACK (via numpy/scipy): LU
factorization with the determinant as a by-product, linear solves, and full
dense eigenvalue extraction with a deterministic ordering.  Every matrix-valued
object in the package (symmetry matrices, coefficient matrices, characteristic
matrices, discretized operators) passes through here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionCapError, SingularMatrixError

DIMENSION_CAP = 4096

# pivot magnitude below this fraction of the largest entry flags the matrix as
# singular to working precision
_SINGULAR_PIVOT_RTOL = 1e-14


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a 2-d complex array and reject non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass
class LuFactorization:
    """LU factors with partial pivoting, reusable for repeated solves."""

    lu: np.ndarray
    piv: np.ndarray
    determinant: complex
    singular: bool
    n: int


@dataclass
class Spectrum:
    """All eigenvalues of a dense matrix, ordered by descending modulus.

    ``residual_bound`` is max over eigenpairs of ||M v - lambda v||_2 for unit
    eigenvectors v, which bounds the smallest singular value of M - lambda I.
    """

    eigenvalues: np.ndarray
    residual_bound: float
    vectors: np.ndarray | None = field(default=None, repr=False)


def _check_square(a: np.ndarray) -> int:
    n, m = a.shape
    if n != m:
        raise ValueError(f"matrix is {n}x{m}, expected square")
    if n > DIMENSION_CAP:
        raise DimensionCapError(f"dimension {n} exceeds cap {DIMENSION_CAP}")
    return n


def lu_factor(m) -> tuple[LuFactorization, complex]:
    """LU-factorize a square matrix; returns the factorization and det(M).

    The determinant is the product of pivots times the permutation sign.  A
    pivot smaller than 1e-14 times the largest entry marks the factorization
    as singular to working precision; the determinant is still returned.
    """
    a = as_cmatrix(m)
    n = _check_square(a)
    with warnings.catch_warnings():
        # exact-zero pivots are expected here; singularity is reported via
        # the `singular` flag rather than scipy's LinAlgWarning
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.diag(lu)
    # each piv[i] != i contributes a row swap
    sign = 1.0 if np.count_nonzero(piv != np.arange(n)) % 2 == 0 else -1.0
    det = complex(sign * np.prod(diag))
    scale = np.max(np.abs(a)) if a.size else 0.0
    singular = bool(scale == 0.0 or np.min(np.abs(diag)) < _SINGULAR_PIVOT_RTOL * scale)
    return LuFactorization(lu=lu, piv=piv, determinant=det, singular=singular, n=n), det


def solve(factorization: LuFactorization, b) -> np.ndarray:
    """Solve M x = b using a previously computed LU factorization."""
    if factorization.singular:
        raise SingularMatrixError("system is singular to working precision")
    rhs = np.asarray(b, dtype=complex)
    return scipy.linalg.lu_solve((factorization.lu, factorization.piv), rhs,
                                 check_finite=False)


def solve_matrix(m, b) -> np.ndarray:
    """One-shot solve M x = b (factorize and discard)."""
    fact, _ = lu_factor(m)
    return solve(fact, b)


def det(m) -> complex:
    """Determinant via LU with partial pivoting."""
    _, d = lu_factor(m)
    return d


def det_batch(ms: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices (LAPACK LU underneath)."""
    return np.linalg.det(np.asarray(ms, dtype=complex))


def _order_desc_modulus(vals: np.ndarray) -> np.ndarray:
    """Descending modulus; ties broken by descending real then imaginary part."""
    return np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))


def eigenvalues(m, with_vectors: bool = False) -> Spectrum:
    """Full eigenvalue set of a dense square matrix.

    Uses the LAPACK Hessenberg-reduction + shifted-QR driver.  Eigenvalues are
    sorted by descending modulus with deterministic tie-breaking so golden
    tests are reproducible.
    """
    a = as_cmatrix(m)
    n = _check_square(a)
    if n == 0:
        return Spectrum(eigenvalues=np.empty(0, dtype=complex), residual_bound=0.0)
    vals, vecs = np.linalg.eig(a)
    order = _order_desc_modulus(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    resid = a @ vecs - vecs * vals[None, :]
    norms = np.linalg.norm(vecs, axis=0)
    residual_bound = float(np.max(np.linalg.norm(resid, axis=0) / norms))
    return Spectrum(eigenvalues=vals, residual_bound=residual_bound,
                    vectors=vecs if with_vectors else None)
