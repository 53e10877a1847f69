"""Shared fixtures and independent numerical oracles for the test suite.

The oracles here deliberately avoid the package's own machinery: Lambert-W
values come from a plain Newton iteration on w e^w = x, and constant
-coefficient flows from scipy's matrix exponential, so agreement with the
package is evidence rather than tautology.
"""

import numpy as np
import pytest

from ddewave import CharMatrixEvaluator, catalog, oracle, roots


def lambert_w_newton(x: complex, branch: int, tol: float = 1e-14) -> complex:
    """W_branch(x) by Newton iteration on w e^w = x.

    Start from the asymptotic guess log(x) + 2*pi*i*branch (with a nudge for
    the branch-0 neighborhood of the cut) and iterate to machine precision.
    """
    x = complex(x)
    if branch == 0 and abs(x) < 1.0:
        w = x if abs(x) < 0.5 else np.log(x + 0j) + 0.5j
    else:
        w = np.log(x + 0j) + 2j * np.pi * branch
    for _ in range(200):
        ew = np.exp(w)
        f = w * ew - x
        step = f / (ew * (1.0 + w))
        w = w - step
        if abs(step) <= tol * (1.0 + abs(w)):
            return w
    raise RuntimeError(f"Lambert-W Newton failed for x={x}, branch={branch}")


def lambert_multipliers(mu_floor: float) -> list[complex]:
    """Multipliers exp(W_k(-1)) of x'(t) = -x(t-1) with |mu| >= mu_floor.

    Conjugate-symmetric enumeration over branches until the moduli drop
    below the floor.
    """
    out = []
    for k in range(0, 40):
        w = lambert_w_newton(-1.0, k)
        mu = np.exp(w)
        if abs(mu) < mu_floor:
            break
        out.append(complex(mu))
        if abs(w.imag) > 1e-12:
            out.append(complex(np.conj(mu)))
    return out


# ---------------------------------------------------------------------------
# session-scoped pipeline products shared across test modules

@pytest.fixture(scope="session")
def lw_bundle():
    """Benchmark x'(t) = -x(t-1): problem, evaluator and multiplier set."""
    b = catalog.make("scalar_linear", a=0.0, b=-1.0, tau=1.0)
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.05))
    return b, ev, mset


@pytest.fixture(scope="session")
def lw_disc(lw_bundle):
    b, _, _ = lw_bundle
    return oracle.discretize(b.coeffs, mesh_size=200)


@pytest.fixture(scope="session")
def antiphase_bundle():
    b = catalog.make("antiphase_pair")
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.05))
    return b, ev, mset


@pytest.fixture(scope="session")
def antiphase_disc(antiphase_bundle):
    b, _, _ = antiphase_bundle
    return oracle.discretize(b.coeffs, mesh_size=200)


@pytest.fixture(scope="session")
def stuart_bundle():
    b = catalog.make("stuart_landau")
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.05))
    return b, ev, mset


@pytest.fixture(scope="session")
def zn_bundle():
    b = catalog.make("zn_ring", n=3)
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.05))
    return b, ev, mset


@pytest.fixture(scope="session")
def zn_disc(zn_bundle):
    b, _, _ = zn_bundle
    return oracle.discretize(b.coeffs, mesh_size=200)


@pytest.fixture(scope="session")
def block_double_bundle():
    b = catalog.make("block_double")
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=2.5)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.5))
    return b, ev, mset
