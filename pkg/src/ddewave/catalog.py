"""Builtin problem catalog with analytically known ground truth.

Each entry bundles the linearized coefficient family (and, where one exists,
the nonlinear problem, the orbit, and the uncontrolled base ODE) so tests,
demos and the command line can refer to problems by name:

* ``trivial``        -- A = B = 0; the only multiplier is the trivial 1.
* ``scalar_linear``  -- scalar coefficients (a, b, tau); for a=0, b=-1,
  tau=1 the multipliers are exp(W_k(-1)) over Lambert-W branches.
* ``block_double``   -- two decoupled growing modes; det Delta has a double
  root, exercising multiplicity counting.
* ``stuart_landau``  -- planar limit-cycle oscillator with rotation
  symmetry; reduced-map multipliers are {1, exp(-2*lambda0*tau)}.
* ``antiphase_pair`` -- two delay-coupled planar oscillators in anti-phase
  (swap symmetry, theta = 1/2).
* ``zn_ring``        -- n delay-coupled planar oscillators in a discrete
  rotating wave (cyclic shift symmetry, theta = 1/n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import model
from .errors import ConfigError
from .model import DdeProblem, LinearCoefficients, OrbitWithSymmetry


@dataclass
class BuiltinProblem:
    """A named problem instance, optionally with orbit and base ODE."""

    name: str
    params: dict
    coeffs: LinearCoefficients
    problem: DdeProblem | None = None
    orbit: OrbitWithSymmetry | None = None
    base_rhs: Callable | None = None
    base_jacobian: Callable | None = None
    #: whether z = 1 must be a root of det Delta (true for genuine orbit
    #: linearizations, where the orbit's own derivative is a Floquet mode)
    has_trivial_root: bool = False


# -- planar limit-cycle oscillator building blocks --------------------------

def _sl_rhs(lambda0: float, omega: float):
    def f0(x):
        u, v = x
        r2 = u * u + v * v
        return np.array([lambda0 * u - omega * v - r2 * u,
                         omega * u + lambda0 * v - r2 * v])
    return f0


def _sl_jacobian(lambda0: float, omega: float):
    def df0(x):
        u, v = x
        return np.array([
            [lambda0 - 3 * u * u - v * v, -omega - 2 * u * v],
            [omega - 2 * u * v, lambda0 - u * u - 3 * v * v],
        ])
    return df0


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _circle_orbit(radius: float, omega: float, phase: float = 0.0):
    """Position and velocity of r * (cos, sin)(omega t + phase)."""

    def x(t):
        a = omega * t + phase
        return radius * np.array([np.cos(a), np.sin(a)])

    def xdot(t):
        a = omega * t + phase
        return radius * omega * np.array([-np.sin(a), np.cos(a)])

    return x, xdot


# -- builtins ---------------------------------------------------------------

def make_trivial() -> BuiltinProblem:
    coeffs = LinearCoefficients(A=lambda t: np.zeros((1, 1)),
                                B=lambda t: np.zeros((1, 1)),
                                h=np.eye(1), tau=1.0)
    return BuiltinProblem(name="trivial", params={}, coeffs=coeffs,
                          has_trivial_root=True)


def make_scalar_linear(a: float = 0.0, b: float = -1.0,
                       tau: float = 1.0) -> BuiltinProblem:
    coeffs = LinearCoefficients(A=lambda t: np.array([[a]], dtype=float),
                                B=lambda t: np.array([[b]], dtype=float),
                                h=np.eye(1), tau=tau)
    return BuiltinProblem(name="scalar_linear",
                          params={"a": a, "b": b, "tau": tau}, coeffs=coeffs)


def make_block_double(growth: float = 1.0,
                      tau: float = float(np.log(2.0))) -> BuiltinProblem:
    """Two identical decoupled modes: det Delta(z) = (1 - z e^{g tau})^2."""
    coeffs = LinearCoefficients(A=lambda t: growth * np.eye(2),
                                B=lambda t: np.zeros((2, 2)),
                                h=np.eye(2), tau=tau)
    return BuiltinProblem(name="block_double",
                          params={"growth": growth, "tau": tau},
                          coeffs=coeffs)


def make_stuart_landau(lambda0: float = 0.1, omega: float = 1.0,
                       phi: float = float(np.pi)) -> BuiltinProblem:
    """Planar oscillator with continuous rotation symmetry.

    The circular orbit of radius sqrt(lambda0) carries h = rotation(phi)
    with phase fraction theta = phi / (2 pi); the delay is tau = phi / omega.
    """
    if lambda0 <= 0:
        raise ConfigError("lambda0 must be positive (no periodic orbit otherwise)")
    if not 0 < phi < 2 * np.pi:
        raise ConfigError("phi must lie in (0, 2 pi)")
    f0 = _sl_rhs(lambda0, omega)
    df0 = _sl_jacobian(lambda0, omega)
    tau = phi / omega

    def f(x, y):
        return f0(x)

    def d1f(x, y):
        return df0(x)

    def d2f(x, y):
        return np.zeros((2, 2))

    problem = DdeProblem(dim=2, f=f, d1f=d1f, d2f=d2f, tau=tau)
    x, xdot = _circle_orbit(np.sqrt(lambda0), omega)
    orbit = OrbitWithSymmetry(x=x, xdot=xdot, period=2 * np.pi / omega,
                              h=_rotation(phi), theta=phi / (2 * np.pi))
    coeffs = model.linearize(problem, orbit)
    return BuiltinProblem(name="stuart_landau",
                          params={"lambda0": lambda0, "omega": omega,
                                  "phi": phi},
                          coeffs=coeffs, problem=problem, orbit=orbit,
                          base_rhs=f0, base_jacobian=df0,
                          has_trivial_root=True)


def make_antiphase_pair(lambda0: float = 0.1, omega: float = 1.0,
                        c: float = 0.05) -> BuiltinProblem:
    """Two delay-coupled planar oscillators oscillating in anti-phase.

    Coupling c * (other cell delayed - own cell) vanishes on the anti-phase
    orbit because the half-period delay flips the sign twice; the symmetry
    is the cell swap with theta = 1/2.
    """
    if lambda0 <= 0:
        raise ConfigError("lambda0 must be positive")
    f0 = _sl_rhs(lambda0, omega)
    df0 = _sl_jacobian(lambda0, omega)
    period = 2 * np.pi / omega
    tau = period / 2

    def f(x, y):
        x1, x2 = x[:2], x[2:]
        y1, y2 = y[:2], y[2:]
        return np.concatenate([f0(x1) + c * (y2 - x1),
                               f0(x2) + c * (y1 - x2)])

    def d1f(x, y):
        j = np.zeros((4, 4))
        j[:2, :2] = df0(x[:2]) - c * np.eye(2)
        j[2:, 2:] = df0(x[2:]) - c * np.eye(2)
        return j

    swap = np.zeros((4, 4))
    swap[:2, 2:] = np.eye(2)
    swap[2:, :2] = np.eye(2)

    def d2f(x, y):
        return c * swap

    problem = DdeProblem(dim=4, f=f, d1f=d1f, d2f=d2f, tau=tau)
    x1, x1dot = _circle_orbit(np.sqrt(lambda0), omega)

    def x(t):
        v = x1(t)
        return np.concatenate([v, -v])

    def xdot(t):
        v = x1dot(t)
        return np.concatenate([v, -v])

    orbit = OrbitWithSymmetry(x=x, xdot=xdot, period=period, h=swap,
                              theta=0.5)
    coeffs = model.linearize(problem, orbit)
    return BuiltinProblem(name="antiphase_pair",
                          params={"lambda0": lambda0, "omega": omega, "c": c},
                          coeffs=coeffs, problem=problem, orbit=orbit,
                          has_trivial_root=True)


def make_zn_ring(n: int = 3, lambda0: float = 0.1, omega: float = 1.0,
                 c: float = 0.05) -> BuiltinProblem:
    """Ring of n delay-coupled planar oscillators, discrete rotating wave.

    Cell j leads cell j-1 by 1/n of the period; with delay tau = period/n
    the coupling c * (next cell delayed - own cell) vanishes on the wave.
    The symmetry is the cyclic cell shift with theta = 1/n.
    """
    if n < 2:
        raise ConfigError("ring size must be at least 2")
    if lambda0 <= 0:
        raise ConfigError("lambda0 must be positive")
    f0 = _sl_rhs(lambda0, omega)
    df0 = _sl_jacobian(lambda0, omega)
    period = 2 * np.pi / omega
    tau = period / n
    dim = 2 * n

    def f(x, y):
        out = np.empty(dim)
        for j in range(n):
            xj = x[2 * j:2 * j + 2]
            y_next = y[2 * ((j + 1) % n):2 * ((j + 1) % n) + 2]
            out[2 * j:2 * j + 2] = f0(xj) + c * (y_next - xj)
        return out

    def d1f(x, y):
        j_mat = np.zeros((dim, dim))
        for j in range(n):
            sl = slice(2 * j, 2 * j + 2)
            j_mat[sl, sl] = df0(x[sl]) - c * np.eye(2)
        return j_mat

    shift = np.zeros((dim, dim))
    for j in range(n):
        shift[2 * j:2 * j + 2, 2 * ((j + 1) % n):2 * ((j + 1) % n) + 2] = np.eye(2)

    def d2f(x, y):
        return c * shift

    problem = DdeProblem(dim=dim, f=f, d1f=d1f, d2f=d2f, tau=tau)
    r0 = np.sqrt(lambda0)
    cells = [_circle_orbit(r0, omega, 2 * np.pi * j / n) for j in range(n)]

    def x(t):
        return np.concatenate([cx(t) for cx, _ in cells])

    def xdot(t):
        return np.concatenate([cd(t) for _, cd in cells])

    orbit = OrbitWithSymmetry(x=x, xdot=xdot, period=period, h=shift,
                              theta=1.0 / n)
    coeffs = model.linearize(problem, orbit)
    return BuiltinProblem(name="zn_ring",
                          params={"n": n, "lambda0": lambda0,
                                  "omega": omega, "c": c},
                          coeffs=coeffs, problem=problem, orbit=orbit,
                          has_trivial_root=True)


BUILTINS: dict[str, Callable[..., BuiltinProblem]] = {
    "trivial": make_trivial,
    "scalar_linear": make_scalar_linear,
    "block_double": make_block_double,
    "stuart_landau": make_stuart_landau,
    "antiphase_pair": make_antiphase_pair,
    "zn_ring": make_zn_ring,
}


def names() -> list[str]:
    return sorted(BUILTINS)


def make(name: str, **params) -> BuiltinProblem:
    """Instantiate a catalog problem by name with keyword parameters."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ConfigError(
            f"unknown builtin {name!r}; available: {', '.join(names())}")
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for builtin {name!r}: {exc}")
