"""Monte-Carlo experiments, figure presets, CSV/SVG output and the command line."""

from .config import ExperimentConfig, config_from_text, config_hash, config_to_text, load_config
from .experiment import (
    NormCdfResult,
    Overlay,
    SrpCurve,
    empirical_guarantee_edge,
    run_experiment,
    run_norm_cdf,
)
from .presets import figure_preset, preset_names

__all__ = [
    "ExperimentConfig", "config_from_text", "config_hash", "config_to_text", "load_config",
    "NormCdfResult", "Overlay", "SrpCurve", "empirical_guarantee_edge", "run_experiment",
    "run_norm_cdf", "figure_preset", "preset_names",
]
