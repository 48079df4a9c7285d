"""fracorder: forward solver and order-recovery toolkit for the fractional
subdiffusion equation with a possibly negative leading eigenvalue."""

from .errors import FracOrderError
from .mittag_leffler import MLQuery, MLValue, ml, ml_point
from .spectral import (
    MonitorPoint,
    SpectralMode,
    SpectralModel,
    check_assumption6,
    solve_forward,
    solve_forward_log,
)
from .cylinder import CylinderConfig, build_model
from .estimators import (
    ObservationSeries,
    OrderEstimate,
    add_noise,
    estimate_hatano_large_t,
    estimate_hatano_small_t,
    estimate_slope,
    estimate_thm1,
)
from .experiment import ExperimentConfig, run_experiment

__version__ = "1.0.0"

__all__ = [
    "FracOrderError",
    "MLQuery", "MLValue", "ml", "ml_point",
    "MonitorPoint", "SpectralMode", "SpectralModel",
    "check_assumption6", "solve_forward", "solve_forward_log",
    "CylinderConfig", "build_model",
    "ObservationSeries", "OrderEstimate", "add_noise",
    "estimate_hatano_large_t", "estimate_hatano_small_t",
    "estimate_slope", "estimate_thm1",
    "ExperimentConfig", "run_experiment",
]
