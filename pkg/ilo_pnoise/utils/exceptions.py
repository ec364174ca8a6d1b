"""
Custom exception classes for oscillator phase-noise analysis.

This module defines all custom exceptions used throughout the ilo_pnoise
library. Each pipeline stage (circuit models, periodic steady state, Floquet
decomposition, spectrum assembly, Monte-Carlo oracle) has its own branch of
the hierarchy so callers can react to a failing stage specifically.

Author: ILO PNoise Team
"""

from typing import Any, Dict, List, Optional, Sequence


class PNoiseError(Exception):
    """
    Base exception class for all phase-noise analysis errors.

    All other ilo_pnoise exceptions inherit from this base class, allowing
    users to catch every library-specific error with a single except clause.

    Attributes:
        message (str): Human-readable error description
        context (Optional[str]): Scenario point, circuit or artifact involved
        details (dict): Additional error context information
    """

    def __init__(
        self,
        message: str,
        context: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """
        Initialize phase-noise error.

        Args:
            message: Human-readable error description
            context: Optional scenario point, circuit or artifact name
            details: Optional dictionary with additional error context
        """
        super().__init__(message)
        self.message = message
        self.context = context
        self.details = details or {}

    def __str__(self) -> str:
        """Return formatted error message."""
        base_msg = self.message
        if self.context:
            base_msg += f" (context: {self.context})"
        return base_msg

    def with_context(self, context: str) -> "PNoiseError":
        """
        Attach scenario context to an error raised deeper in the pipeline.

        An existing context is kept and the new one is prefixed, so nested
        stages read outermost first (``fig4/pset1-a: ilo``).

        Args:
            context: Context label to attach

        Returns:
            The same exception instance
        """
        self.context = f"{context}: {self.context}" if self.context else context
        return self


class ModelError(PNoiseError):
    """
    Raised when a circuit model cannot be constructed.

    Covers nonpositive tank components or frequency targets, unknown state
    labels and out-of-range coupling or observation indices.

    Attributes:
        parameter (Optional[str]): Name of the offending parameter
        value (Optional[Any]): Value that was rejected
    """

    def __init__(
        self,
        message: str,
        parameter: Optional[str] = None,
        value: Optional[Any] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.parameter = parameter
        self.value = value


class ModelEvaluationError(PNoiseError):
    """
    Raised when a vector field evaluation produces non-finite values.

    Attributes:
        equation (Optional[int]): Index of the state equation that overflowed
        state_label (Optional[str]): Label of that state
    """

    def __init__(
        self,
        message: str,
        equation: Optional[int] = None,
        state_label: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.equation = equation
        self.state_label = state_label


class SolverError(PNoiseError):
    """Base class for periodic steady-state solver failures."""


class IntegrationFailure(SolverError):
    """
    Raised when the ODE integrator cannot complete an interval.

    Attributes:
        t_failed (Optional[float]): Time reached when the integrator stopped (s)
        solver_message (Optional[str]): Message reported by the integrator
    """

    def __init__(
        self,
        message: str,
        t_failed: Optional[float] = None,
        solver_message: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.t_failed = t_failed
        self.solver_message = solver_message


class NoConvergence(SolverError):
    """
    Raised when shooting-Newton iterations do not reach the closure tolerance.

    Attributes:
        iterations (int): Number of Newton iterations performed
        residual (float): Final scaled closure residual
    """

    def __init__(self, message: str, iterations: int, residual: float, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.iterations = iterations
        self.residual = residual


class DegenerateJacobian(SolverError):
    """
    Raised when the shooting Newton matrix is singular beyond the phase shift.

    For a coupled ensemble this signals unlocked or quasi-periodic operation
    and is reported to the user as "lock not detected".

    Attributes:
        singular_ratio (float): Smallest over largest singular value
    """

    def __init__(self, message: str, singular_ratio: float, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.singular_ratio = singular_ratio


class UnderResolved(SolverError):
    """
    Raised when the harmonic truncation aliases significant energy.

    Attributes:
        fraction (float): Energy fraction held by the top retained harmonic
        n_harmonics (int): Harmonic truncation that was requested
    """

    def __init__(self, message: str, fraction: float, n_harmonics: int, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.fraction = fraction
        self.n_harmonics = n_harmonics


class FloquetError(PNoiseError):
    """Base class for Floquet decomposition failures."""


class UnstablePSS(FloquetError):
    """
    Raised when a non-trivial Floquet multiplier lies outside the unit circle.

    Attributes:
        multipliers (List[complex]): All characteristic multipliers
    """

    def __init__(self, message: str, multipliers: Sequence[complex], **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.multipliers: List[complex] = list(multipliers)


class NearDegenerate(FloquetError):
    """
    Raised when two retained multipliers coincide and the eigenbasis is unusable.

    Attributes:
        pair (tuple): Mode indices of the coinciding multipliers
        separation (float): Distance between them
    """

    def __init__(self, message: str, pair: tuple, separation: float, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.pair = pair
        self.separation = separation


class BiorthogonalityLoss(FloquetError):
    """
    Raised when direct and dual Floquet vectors fail the biorthogonality check.

    Attributes:
        max_error (float): Largest deviation of v_i^T u_j from the identity
    """

    def __init__(self, message: str, max_error: float, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.max_error = max_error


class SpectrumError(PNoiseError):
    """Base class for spectrum assembly failures."""


class UncoupledSingularity(SpectrumError):
    """
    Raised when the second phase mode has a zero exponent.

    Attributes:
        mu2 (complex): Offending exponent (1/s)
    """

    def __init__(self, message: str, mu2: complex, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.mu2 = mu2


class ZeroCarrier(SpectrumError):
    """
    Raised when the observation node carries no power at the carrier harmonic.

    Attributes:
        node (Optional[str]): Observation node label
    """

    def __init__(self, message: str, node: Optional[str] = None, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.node = node


class PoorFit(SpectrumError):
    """
    Raised when the standard-form fit does not describe the spectrum.

    The fit result is attached so callers can still report it.

    Attributes:
        residual_db (float): RMS fit residual (dB)
        fit (Any): The StandardFormFit that was obtained
    """

    def __init__(self, message: str, residual_db: float, fit: Any = None, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.residual_db = residual_db
        self.fit = fit


class OracleError(PNoiseError):
    """Base class for Monte-Carlo oracle failures."""


class InsufficientRecord(OracleError):
    """
    Raised when requested offsets cannot be resolved by the simulated record.

    Attributes:
        min_offset (float): Lowest requested offset (Hz)
        limit (float): Lowest resolvable offset, 10/T_total (Hz)
    """

    def __init__(self, message: str, min_offset: float, limit: float, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.min_offset = min_offset
        self.limit = limit


class PathDivergence(OracleError):
    """
    Raised when no simulated path survives the divergence guard.

    Attributes:
        diverged (int): Number of diverged paths
    """

    def __init__(self, message: str, diverged: int, **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.diverged = diverged


class ComparisonThresholdError(PNoiseError):
    """
    Raised when a configured spectrum comparison gate fails.

    Attributes:
        failures (List[dict]): One entry per failing gate
    """

    def __init__(self, message: str, failures: Sequence[Dict[str, Any]], **kwargs: Any) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.failures: List[Dict[str, Any]] = list(failures)


class ArtifactWriteError(PNoiseError):
    """
    Raised when an output artifact cannot be written.

    Attributes:
        file_path (str): Target path of the artifact
        system_error (Optional[str]): Underlying OS error message
    """

    def __init__(
        self, message: str, file_path: str, system_error: Optional[str] = None, **kwargs: Any
    ) -> None:
        super().__init__(message, kwargs.pop("context", None), kwargs)
        self.file_path = file_path
        self.system_error = system_error
