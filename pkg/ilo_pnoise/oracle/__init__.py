"""Monte-Carlo oracle: ensemble SDE simulation and Welch spectrum estimation."""

from .psd import estimate_psd, recentre
from .sde import (
    DiffusionEstimate,
    EnsembleRun,
    OracleSettings,
    diffusion_slope,
    orbit_deviation,
    path_generator,
    resolve_step,
    simulate_paths,
)

__all__ = [
    "estimate_psd",
    "recentre",
    "DiffusionEstimate",
    "EnsembleRun",
    "OracleSettings",
    "diffusion_slope",
    "orbit_deviation",
    "path_generator",
    "resolve_step",
    "simulate_paths",
]
