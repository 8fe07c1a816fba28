"""comettail: comet-tail interference patterns and ridge-based b2 recovery.

A grating dispersing a broadband down-conversion beam turns its concentric
frequency rings into a nested, offset family whose envelope is a bright
parabolic ridge. This package synthesizes those patterns from first
principles (Sellmeier dispersion -> parabolic tuning curve -> per-wavelength
ring -> grating remap -> sum) and runs the inverse road: extract the ridge
from an image, fit x = a y^2 - c, and invert either coefficient back to the
tuning-curve steepness b2 with propagated uncertainties.

Entry points: the comettail command line (predict | simulate | fit |
tuning-curve | sweep) or the same operations as library calls.
"""
from .constants import C_UM_PER_S, angular_frequency, wavelength_from_omega
from .dispersion import (BUILTIN_SELLMEIER, DispersionModel, SellmeierSet,
                         TuningCurve, compute_b1, compute_b2, dn_domega,
                         qpm_mismatch, refractive_index, tuning_curve)
from .errors import (CometTailError, ConfigError, DegenerateFitError,
                     EvanescentOrderError, OffRingError, TooFewPointsError,
                     WavelengthRangeError)
from .geometry import (DetectorSpec, OpticalConfig, PlaneCoord, reflect_angle,
                       ring_abscissa, translate_exact, translate_linearized)
from .pattern import (ImageGrid, LinewidthMap, RingProfile, SpectralBand,
                      SynthResult, fringe_weight, local_linewidth_map,
                      remap_through_grating, render_ring, synthesize)
from .analysis import (B2Estimate, RidgeFit, RidgePoint, RidgeWindow,
                       analytic_x, analyze_image, b2_from_a, b2_from_c,
                       extract_ridge, fit_parabola, linewidth_asymmetry,
                       ridge_parabola, stationary_wavelength,
                       tuning_curve_samples)
from .config import RunConfig, load_config
from .backend import BACKEND_NAME, available_backends

__version__ = "0.1.0"

__all__ = [
    "C_UM_PER_S", "angular_frequency", "wavelength_from_omega",
    "BUILTIN_SELLMEIER", "DispersionModel", "SellmeierSet", "TuningCurve",
    "compute_b1", "compute_b2", "dn_domega", "qpm_mismatch",
    "refractive_index", "tuning_curve",
    "CometTailError", "ConfigError", "DegenerateFitError",
    "EvanescentOrderError", "OffRingError", "TooFewPointsError",
    "WavelengthRangeError",
    "DetectorSpec", "OpticalConfig", "PlaneCoord", "reflect_angle",
    "ring_abscissa", "translate_exact", "translate_linearized",
    "ImageGrid", "LinewidthMap", "RingProfile", "SpectralBand", "SynthResult",
    "fringe_weight", "local_linewidth_map", "remap_through_grating",
    "render_ring", "synthesize",
    "B2Estimate", "RidgeFit", "RidgePoint", "RidgeWindow", "analytic_x",
    "analyze_image", "b2_from_a", "b2_from_c", "extract_ridge", "fit_parabola",
    "linewidth_asymmetry", "ridge_parabola", "stationary_wavelength",
    "tuning_curve_samples",
    "RunConfig", "load_config",
    "BACKEND_NAME", "available_backends",
    "__version__",
]
