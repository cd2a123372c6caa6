"""Diffractionless image propagation and frequency conversion by
four-wave mixing in a pumped five-level thermal vapor."""

__version__ = "0.1.0"

from .atom import (DensityMatrix, DriveConfig, LevelScheme, Liouvillian,
                   build_liouvillian, steady_state)
from .beamprop import (FieldPair, PropagationPlan, PropagationResult,
                       TransverseGrid, build_plan, gaussian_input,
                       load_field_pair, make_grid, propagate,
                       save_field_pair, transform)
from .diagnostics import (BeamMetrics, balance_point, beam_metrics,
                          image_fidelity, metrics_row, pair_metrics,
                          write_metrics_csv)
from .errors import (BadGrid, DegenerateImage, DegenerateSteadyState,
                     FitFailed, FormatError, FwmError, IoError, NoRoot,
                     NotReached, ParseError, TableRange, ValidationError,
                     WrongSpace)
from .susceptibility import (KFactors, OpticalTransitions,
                             SusceptibilitySet, ThermalParameters,
                             balanced_detuning, bandwidth_scales,
                             calibrate_density, chi_dicke, chi_full,
                             chi_nopump, chi_three_level_probe,
                             dicke_ratio, dominant_eigenvalue,
                             doppler_kernel, k_factors, mode_matrix,
                             optimal_detuning)

__all__ = [
    "__version__",
    "BadGrid", "BeamMetrics", "DegenerateImage", "DegenerateSteadyState",
    "DensityMatrix", "DriveConfig", "FieldPair", "FitFailed",
    "FormatError", "FwmError", "IoError", "KFactors", "LevelScheme",
    "Liouvillian", "NoRoot", "NotReached", "OpticalTransitions",
    "ParseError", "PropagationPlan", "PropagationResult",
    "SusceptibilitySet", "TableRange", "ThermalParameters",
    "TransverseGrid", "ValidationError", "WrongSpace", "balance_point",
    "balanced_detuning", "bandwidth_scales", "beam_metrics",
    "build_liouvillian", "build_plan", "calibrate_density", "chi_dicke",
    "chi_full", "chi_nopump", "chi_three_level_probe", "dicke_ratio",
    "dominant_eigenvalue", "doppler_kernel", "gaussian_input",
    "image_fidelity", "k_factors", "load_field_pair", "make_grid",
    "metrics_row", "mode_matrix", "optimal_detuning", "pair_metrics",
    "propagate",
    "save_field_pair", "steady_state", "transform", "write_metrics_csv",
]
