"""Problem configuration files: a small, strictly validated JSON schema.

A config names either a catalog problem (builtin + parameter map) or an
explicit coefficient family given by Fourier tables, plus solver knobs, an
optional gain-scan block and an output directory.  Validation is structural
and happens before any numerics: unknown keys anywhere are rejected so typos
cannot silently fall back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog, model
from .catalog import BuiltinProblem
from .errors import ConfigError
from .model import LinearCoefficients

SCHEMA_VERSION = 1


def _require_keys(block: dict, allowed: set[str], where: str,
                  required: set[str] = frozenset()):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {sorted(missing)}")


def _number(block, key, where, default=None, kind=float):
    if key not in block:
        if default is None:
            raise ConfigError(f"missing {where}.{key}")
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return kind(v)


@dataclass
class SolverOptions:
    flow_tol: float = 1e-10
    mu_min: float = 0.05
    mesh: int = 200
    tol_unit: float = 1e-6
    compare_tol: float = 1e-4

    @classmethod
    def parse(cls, block: dict) -> "SolverOptions":
        _require_keys(block, {"flow_tol", "mu_min", "mesh", "tol_unit",
                              "compare_tol"}, "solver")
        opts = cls(
            flow_tol=_number(block, "flow_tol", "solver", cls.flow_tol),
            mu_min=_number(block, "mu_min", "solver", cls.mu_min),
            mesh=_number(block, "mesh", "solver", cls.mesh, kind=int),
            tol_unit=_number(block, "tol_unit", "solver", cls.tol_unit),
            compare_tol=_number(block, "compare_tol", "solver",
                                cls.compare_tol),
        )
        if not 0 < opts.mu_min < 1:
            raise ConfigError("solver.mu_min must lie in (0, 1)")
        if opts.mesh < 2:
            raise ConfigError("solver.mesh must be at least 2")
        return opts


@dataclass
class ScanOptions:
    k_min: float = 0.0
    k_max: float = 2.0
    points: int = 101
    structure: np.ndarray | None = None
    mu_min: float = 0.5

    @classmethod
    def parse(cls, block: dict) -> "ScanOptions":
        _require_keys(block, {"k_min", "k_max", "points", "structure",
                              "mu_min"}, "scan")
        structure = None
        if "structure" in block:
            structure = np.asarray(block["structure"], dtype=float)
            if structure.ndim != 2 or structure.shape[0] != structure.shape[1]:
                raise ConfigError("scan.structure must be a square matrix")
        opts = cls(
            k_min=_number(block, "k_min", "scan", cls.k_min),
            k_max=_number(block, "k_max", "scan", cls.k_max),
            points=_number(block, "points", "scan", cls.points, kind=int),
            structure=structure,
            mu_min=_number(block, "mu_min", "scan", cls.mu_min),
        )
        if opts.points < 1:
            raise ConfigError("scan.points must be at least 1")
        if opts.k_max < opts.k_min:
            raise ConfigError("scan.k_max must be >= scan.k_min")
        return opts

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.k_min])
        return np.linspace(self.k_min, self.k_max, self.points)


@dataclass
class ProblemConfig:
    """Parsed and validated configuration; numerics have not run yet."""

    schema_version: int
    problem_block: dict
    solver: SolverOptions
    scan: ScanOptions | None
    output_dir: Path

    def build_problem(self) -> BuiltinProblem:
        """Instantiate the configured problem (catalog or explicit)."""
        block = self.problem_block
        if "builtin" in block:
            return catalog.make(block["builtin"],
                                **block.get("parameters", {}))
        return _build_explicit(block)


def _parse_fourier_tables(raw, dim: int, where: str):
    """[[cos_matrix, sin_matrix], ...] -> list of validated array pairs."""
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where} must be a non-empty list of [cos, sin] "
                          "matrix pairs")
    tables = []
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{where}[{k}] must be a [cos, sin] pair")
        c = np.asarray(pair[0], dtype=float)
        s = np.asarray(pair[1], dtype=float)
        if c.shape != (dim, dim) or s.shape != (dim, dim):
            raise ConfigError(f"{where}[{k}] matrices must be {dim}x{dim}")
        tables.append((c, s))
    return tables


def _build_explicit(block: dict) -> BuiltinProblem:
    _require_keys(block, {"dimension", "delay", "period", "symmetry",
                          "coefficients"}, "problem",
                  required={"dimension", "delay", "period", "symmetry",
                            "coefficients"})
    dim = _number(block, "dimension", "problem", kind=int)
    delay = _number(block, "delay", "problem")
    period = _number(block, "period", "problem")
    if dim < 1:
        raise ConfigError("problem.dimension must be positive")
    if delay <= 0 or period <= 0:
        raise ConfigError("problem.delay and problem.period must be positive")

    sym = block["symmetry"]
    _require_keys(sym, {"h", "theta"}, "problem.symmetry",
                  required={"h", "theta"})
    h = np.asarray(sym["h"], dtype=float)
    if h.shape != (dim, dim):
        raise ConfigError(f"symmetry.h must be {dim}x{dim}")
    theta = _number(sym, "theta", "problem.symmetry")
    if not 0 < theta < 1:
        raise ConfigError("symmetry.theta must lie in (0, 1)")
    if abs(theta * period - delay) > 1e-10 * max(1.0, delay):
        raise ConfigError(
            f"theta * period = {theta * period!r} must equal the delay "
            f"{delay!r}")

    co = block["coefficients"]
    _require_keys(co, {"A", "B"}, "problem.coefficients",
                  required={"A", "B"})
    a_fn = model.fourier_matrix(
        _parse_fourier_tables(co["A"], dim, "problem.coefficients.A"), period)
    b_fn = model.fourier_matrix(
        _parse_fourier_tables(co["B"], dim, "problem.coefficients.B"), period)
    coeffs = LinearCoefficients(A=a_fn, B=b_fn, h=h, tau=delay, dim=dim)
    return BuiltinProblem(name="custom", params={}, coeffs=coeffs)


def parse_config(data: dict, base_dir: Path | None = None) -> ProblemConfig:
    _require_keys(data, {"schema_version", "problem", "solver", "scan",
                         "output"}, "config",
                  required={"schema_version", "problem"})
    version = data["schema_version"]
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r} (expected "
            f"{SCHEMA_VERSION})")

    problem = data["problem"]
    if not isinstance(problem, dict):
        raise ConfigError("problem must be an object")
    if "builtin" in problem:
        _require_keys(problem, {"builtin", "parameters"}, "problem")
        if problem["builtin"] not in catalog.BUILTINS:
            raise ConfigError(
                f"unknown builtin {problem['builtin']!r}; available: "
                f"{', '.join(catalog.names())}")
        params = problem.get("parameters", {})
        if not isinstance(params, dict):
            raise ConfigError("problem.parameters must be an object")
    else:
        # validate the explicit problem block eagerly (construction is
        # cheap: closures and one small matrix inverse, no integration)
        _build_explicit(problem)

    solver = SolverOptions.parse(data.get("solver", {}))
    scan = ScanOptions.parse(data["scan"]) if "scan" in data else None

    out_block = data.get("output", {})
    _require_keys(out_block, {"directory"}, "output")
    out_dir = Path(out_block.get("directory", "."))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    return ProblemConfig(schema_version=version, problem_block=problem,
                         solver=solver, scan=scan, output_dir=out_dir)


def load_config(path) -> ProblemConfig:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return parse_config(data, base_dir=p.parent)
