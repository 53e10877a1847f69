"""Command-line front end.

Subcommands::

    ddewave analyze <config>         multipliers + stability verdict
    ddewave roots <config>           multiplier set only
    ddewave oracle-compare <config>  both pipelines + mismatch report
    ddewave scan-gain <config>       feedback gain scan over a grid
    ddewave selftest                 invariant suite over the builtin catalog

Exit codes: 0 success (analyze: stable or unstable verdict; oracle-compare:
mismatch within tolerance; scan-gain: a stable interval exists), 1 error,
2 inconclusive verdict, 3 scan found no stable interval.

All numeric output is printed with 17 significant digits so serialized
results round-trip double precision losslessly.  ``DDEWAVE_THREADS`` caps
the number of threads used by the underlying linear-algebra libraries.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog, control, oracle, roots
from .charmat import CharMatrixEvaluator
from .config import ProblemConfig, load_config
from .errors import ConfigError, DdeWaveError
from .flow import check_flow_symmetry


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _cplx(z: complex) -> list[float]:
    z = complex(z)
    return [float(_fmt(z.real)), float(_fmt(z.imag))]


class _Float17(float):
    def __repr__(self):
        return f"{float(self):.17g}"


def _jsonable(obj):
    """Recursively wrap floats so json emits 17 significant digits."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _Float17(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")


def _apply_thread_cap() -> None:
    cap = os.environ.get("DDEWAVE_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        raise ConfigError(f"DDEWAVE_THREADS must be an integer, got {cap!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(limits=n)
    except ImportError:
        pass


# ---------------------------------------------------------------------------
# serialization

def serialize_multipliers(mset: roots.MultiplierSet,
                          mark_trivial: bool = True) -> dict:
    region = {
        "kind": mset.region.kind,
        "mu_min": mset.region.mu_min,
        "center": _cplx(mset.region.center),
        "radius": mset.region.radius,
    }
    return {
        "total_count": mset.total_count,
        "region": region,
        "max_winding_deviation": max(mset.winding_deviations, default=0.0),
        "roots": [
            {
                "z": _cplx(r.z),
                "mu": _cplx(r.mu),
                "multiplicity": r.multiplicity,
                "residual": r.newton_residual,
                "trivial": mark_trivial and r is mset.trivial_root,
            }
            for r in mset.roots
        ],
    }


def serialize_verdict(verdict: roots.StabilityVerdict) -> dict:
    return {
        "classification": verdict.classification,
        "trivial_simple": verdict.trivial_simple,
        "margin": verdict.margin,
        "witness_mu": _cplx(verdict.witness.mu) if verdict.witness else None,
        "warnings": list(verdict.warnings),
    }


def _print_summary(name: str, mset: roots.MultiplierSet,
                   verdict: roots.StabilityVerdict | None,
                   mark_trivial: bool = True) -> None:
    print(f"problem: {name}")
    print(f"roots found: {len(mset.roots)} "
          f"(total multiplicity {mset.total_count})")
    for r in mset.roots:
        tag = " [trivial]" if mark_trivial and r is mset.trivial_root else ""
        print(f"  mu = {r.mu.real:.17g} {r.mu.imag:+.17g}i  "
              f"|mu| = {_fmt(abs(r.mu))}  m = {r.multiplicity}{tag}")
    if verdict is not None:
        print(f"verdict: {verdict.classification} "
              f"(margin {_fmt(verdict.margin)})")
        for w in verdict.warnings:
            print(f"warning: {w}")


# ---------------------------------------------------------------------------
# pipeline helpers

def _run_pipeline(cfg: ProblemConfig):
    builtin = cfg.build_problem()
    mu_min = cfg.solver.mu_min
    evaluator = CharMatrixEvaluator(builtin.coeffs, tol=cfg.solver.flow_tol,
                                    radius=1.1 / mu_min)
    region = roots.SearchRegion.disk(mu_min)
    mset = roots.find_all(evaluator, region)
    return builtin, evaluator, mset


def cmd_analyze(cfg: ProblemConfig) -> int:
    builtin, evaluator, mset = _run_pipeline(cfg)
    verdict = roots.classify(mset, tol_unit=cfg.solver.tol_unit,
                             expect_trivial=builtin.has_trivial_root)
    _write_json(cfg.output_dir / "analysis.json", {
        "problem": builtin.name,
        "parameters": builtin.params,
        "multipliers": serialize_multipliers(mset, builtin.has_trivial_root),
        "verdict": serialize_verdict(verdict),
    })
    _print_summary(builtin.name, mset, verdict, builtin.has_trivial_root)
    if verdict.classification == "inconclusive":
        return 2
    return 0


def cmd_roots(cfg: ProblemConfig) -> int:
    builtin, _, mset = _run_pipeline(cfg)
    _write_json(cfg.output_dir / "multipliers.json", {
        "problem": builtin.name,
        "parameters": builtin.params,
        "multipliers": serialize_multipliers(mset, builtin.has_trivial_root),
    })
    _print_summary(builtin.name, mset, None, builtin.has_trivial_root)
    return 0


def cmd_oracle_compare(cfg: ProblemConfig) -> int:
    builtin, _, mset = _run_pipeline(cfg)
    disc = oracle.discretize(builtin.coeffs, mesh_size=cfg.solver.mesh,
                             flow_tol=min(cfg.solver.flow_tol, 1e-12))
    spectrum = oracle.operator_spectrum(disc)
    comparison = oracle.compare(mset, spectrum, mu_min=cfg.solver.mu_min)
    _write_json(cfg.output_dir / "comparison.json", {
        "problem": builtin.name,
        "mesh": disc.mesh_size,
        "max_mismatch": comparison.max_mismatch,
        "counts_agree": comparison.counts_agree,
        "expected_count": comparison.expected_count,
        "observed_count": comparison.observed_count,
        "eigen_residual_bound": comparison.eigen_residual_bound,
        "pairs": [
            {"mu": _cplx(mu), "eig": _cplx(eig), "distance": d}
            for mu, eig, d in comparison.pairs
        ],
        "warnings": list(comparison.warnings),
    })
    ok = comparison.within(cfg.solver.compare_tol)
    print(f"problem: {builtin.name}")
    print(f"max mismatch: {_fmt(comparison.max_mismatch)} "
          f"(tolerance {_fmt(cfg.solver.compare_tol)})")
    print(f"counts agree: {comparison.counts_agree}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_scan_gain(cfg: ProblemConfig) -> int:
    if cfg.scan is None:
        raise ConfigError("scan-gain requires a scan block in the config")
    builtin = cfg.build_problem()
    if builtin.orbit is None or builtin.base_rhs is None:
        raise ConfigError(
            f"builtin {builtin.name!r} has no base orbit/ODE to control")
    result = control.scan_gain(builtin.base_rhs, builtin.base_jacobian,
                               builtin.orbit, cfg.scan.grid(),
                               structure=cfg.scan.structure,
                               mu_min=cfg.scan.mu_min,
                               flow_tol=cfg.solver.flow_tol,
                               tol_unit=cfg.solver.tol_unit)
    intervals = result.stable_intervals()

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    tsv = cfg.output_dir / "scan.tsv"
    lines = ["k\tverdict\tmax_nontrivial_mu\ttrivial_residual"]
    for p in result.points:
        lines.append(f"{_fmt(p.gain)}\t{p.classification}\t"
                     f"{_fmt(p.max_nontrivial_modulus)}\t"
                     f"{_fmt(p.trivial_residual)}")
    tsv.write_text("\n".join(lines) + "\n")
    _write_json(cfg.output_dir / "scan.json", {
        "problem": builtin.name,
        "mu_min": result.mu_min,
        "structure": [[float(v) for v in row] for row in result.structure],
        "points": [
            {
                "k": p.gain,
                "verdict": p.classification,
                "max_nontrivial_mu": p.max_nontrivial_modulus,
                "trivial_residual": p.trivial_residual,
                "margin": p.margin,
                "error": p.error,
            }
            for p in result.points
        ],
        "stable_intervals": [[a, b] for a, b in intervals],
    })
    print(f"scanned {len(result.points)} gain values")
    for a, b in intervals:
        print(f"stable interval: [{_fmt(a)}, {_fmt(b)}]")
    if not intervals:
        print("no stable interval found")
        return 3
    return 0


def cmd_selftest() -> int:
    """Invariant suite over the builtin catalog; prints a pass/fail matrix."""
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

    # trivial multiplier persists for every orbit linearization
    for name in ("trivial", "stuart_landau", "antiphase_pair", "zn_ring"):
        b = catalog.make(name)
        ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=1.5)
        resid = abs(np.linalg.det(ev.delta(1.0 + 0.0j)))
        record(f"trivial-root/{name}", resid <= 1e-6, f"|det Delta(1)| = {resid:.3e}")

    # fundamental-solution symmetry relation
    for name in ("stuart_landau", "antiphase_pair"):
        b = catalog.make(name)
        worst = 0.0
        for (t, s, z) in [(1.0, 0.3, 0.7 + 0.2j), (2.0, 1.0, -0.5 + 1.0j)]:
            worst = max(worst, check_flow_symmetry(b.coeffs, z, t, s, tol=1e-11))
        record(f"flow-symmetry/{name}", worst <= 1e-7,
               f"residual = {worst:.3e}")

    # discretized Volterra part is quasi-nilpotent in the limit
    for name in ("scalar_linear", "antiphase_pair"):
        b = catalog.make(name)
        r_coarse = oracle.volterra_spectral_radius(
            oracle.discretize(b.coeffs, mesh_size=60))
        r_fine = oracle.volterra_spectral_radius(
            oracle.discretize(b.coeffs, mesh_size=120))
        ok = r_fine < 0.1 and r_fine < r_coarse
        record(f"volterra/{name}", ok,
               f"radius {r_coarse:.3e} -> {r_fine:.3e}")

    # two-pipeline agreement on the analytic scalar benchmark
    b = catalog.make("scalar_linear", a=0.0, b=-1.0, tau=1.0)
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset = roots.find_all(ev, roots.SearchRegion.disk(0.05))
    disc = oracle.discretize(b.coeffs, mesh_size=150)
    comparison = oracle.compare(mset, oracle.operator_spectrum(disc),
                                mu_min=0.05)
    record("oracle-agreement/scalar_linear", comparison.within(1e-4),
           f"max mismatch = {comparison.max_mismatch:.3e}")

    failed = [name for name, ok, _ in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def _load_with_overrides(args) -> ProblemConfig:
    cfg = load_config(args.config)
    if args.tol is not None:
        cfg.solver.flow_tol = args.tol
    if args.mesh is not None:
        cfg.solver.mesh = args.mesh
    if args.mu_min is not None:
        if not 0 < args.mu_min < 1:
            raise ConfigError("--mu-min must lie in (0, 1)")
        cfg.solver.mu_min = args.mu_min
    if args.out is not None:
        cfg.output_dir = Path(args.out)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddewave",
        description="Stability of symmetric periodic orbits of delay "
                    "differential equations via the characteristic matrix.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a JSON problem config")
        p.add_argument("--tol", type=float, default=None,
                       help="override solver.flow_tol")
        p.add_argument("--mesh", type=int, default=None,
                       help="override solver.mesh (oracle mesh size)")
        p.add_argument("--mu-min", type=float, default=None,
                       help="override solver.mu_min (multiplier floor)")
        p.add_argument("--out", default=None,
                       help="override the output directory")
        return p

    add_config_command("analyze", "locate multipliers and classify stability")
    add_config_command("roots", "locate multipliers only")
    add_config_command("oracle-compare",
                       "cross-validate against the dense discretization")
    add_config_command("scan-gain", "scan delayed-feedback control gains")
    sub.add_parser("selftest", help="run the builtin invariant suite")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _apply_thread_cap()
        if args.command == "selftest":
            return cmd_selftest()
        cfg = _load_with_overrides(args)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "roots":
            return cmd_roots(cfg)
        if args.command == "oracle-compare":
            return cmd_oracle_compare(cfg)
        if args.command == "scan-gain":
            return cmd_scan_gain(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except DdeWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
