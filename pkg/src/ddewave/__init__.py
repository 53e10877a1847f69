"""Stability of discrete-wave periodic orbits of delay differential equations.

Periodic orbits that repeat up to a fixed spatial symmetry after a fraction
of their period ("discrete waves") admit a finite-dimensional characteristic
matrix whose determinant encodes every Floquet multiplier of the orbit,
multiplicities included.  This package constructs that matrix from a problem
description, finds all determinant roots inside a disk by argument-principle
contour counting with adaptive subdivision, classifies orbit stability, and
cross-validates the result against an independent dense discretization of
the reduced time-shift operator.  A delayed-feedback control workflow scans
symmetry-commuting gain matrices for stabilizing intervals.
"""

from .catalog import BUILTINS, BuiltinProblem, make
from .charmat import CharMatrixEvaluator
from .config import ProblemConfig, ScanOptions, SolverOptions, load_config, parse_config
from .control import (ControlledProblem, GainScanPoint, GainScanResult,
                      build_controlled, scan_gain)
from .errors import (ClusterResolutionError, ConfigError, ContourError,
                     DdeWaveError, DimensionCapError, DiscrepancyError,
                     IntegrationError, SingularMatrixError, ValidationError)
from .flow import (FlowResult, SegmentedPropagator, check_flow_symmetry,
                   fundamental_solution, y_a_flow, y_a_sweep)
from .model import (DdeProblem, LinearCoefficients, OrbitWithSymmetry,
                    ValidationReport, fourier_matrix, fourier_orbit,
                    linearize, validate_hypotheses)
from .oracle import (DiscretizedOperator, OracleComparison, compare,
                     discretize, operator_spectrum, volterra_spectral_radius)
from .roots import (MultiplierSet, RootRecord, RootSettings, SearchRegion,
                    StabilityVerdict, classify, find_all, winding_count)

__version__ = "1.0.0"

__all__ = [
    "BUILTINS", "BuiltinProblem", "make",
    "CharMatrixEvaluator",
    "ProblemConfig", "ScanOptions", "SolverOptions", "load_config",
    "parse_config",
    "ControlledProblem", "GainScanPoint", "GainScanResult",
    "build_controlled", "scan_gain",
    "ClusterResolutionError", "ConfigError", "ContourError", "DdeWaveError",
    "DimensionCapError", "DiscrepancyError", "IntegrationError",
    "SingularMatrixError", "ValidationError",
    "FlowResult", "SegmentedPropagator", "check_flow_symmetry",
    "fundamental_solution", "y_a_flow", "y_a_sweep",
    "DdeProblem", "LinearCoefficients", "OrbitWithSymmetry",
    "ValidationReport", "fourier_matrix", "fourier_orbit", "linearize",
    "validate_hypotheses",
    "DiscretizedOperator", "OracleComparison", "compare", "discretize",
    "operator_spectrum", "volterra_spectral_radius",
    "MultiplierSet", "RootRecord", "RootSettings", "SearchRegion",
    "StabilityVerdict", "classify", "find_all", "winding_count",
    "__version__",
]
