"""Utility modules for ilo_pnoise: error hierarchy and logging setup."""

from .exceptions import (
    ArtifactWriteError,
    BiorthogonalityLoss,
    ComparisonThresholdError,
    DegenerateJacobian,
    FloquetError,
    InsufficientRecord,
    IntegrationFailure,
    ModelError,
    ModelEvaluationError,
    NearDegenerate,
    NoConvergence,
    OracleError,
    PathDivergence,
    PNoiseError,
    PoorFit,
    SolverError,
    SpectrumError,
    UncoupledSingularity,
    UnderResolved,
    UnstablePSS,
    ZeroCarrier,
)
from .log_setup import configure_logging

__all__ = [
    "PNoiseError",
    "ModelError",
    "ModelEvaluationError",
    "SolverError",
    "IntegrationFailure",
    "NoConvergence",
    "DegenerateJacobian",
    "UnderResolved",
    "FloquetError",
    "UnstablePSS",
    "NearDegenerate",
    "BiorthogonalityLoss",
    "SpectrumError",
    "UncoupledSingularity",
    "ZeroCarrier",
    "PoorFit",
    "OracleError",
    "InsufficientRecord",
    "PathDivergence",
    "ComparisonThresholdError",
    "ArtifactWriteError",
    "configure_logging",
]
