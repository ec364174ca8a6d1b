"""
Harmonic Sets

Discrete Fourier coefficients of periodic waveforms sampled on a uniform grid
over one period, normalized so that x(t) = sum_nu X_nu * exp(j nu w0 t).
Used for the steady-state orbit and for the Floquet and lambda vectors.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.exceptions import SolverError, UnderResolved

logger = logging.getLogger(__name__)

DEFAULT_HARMONICS = 32
ALIASING_LIMIT = 1e-4


@dataclass(frozen=True, eq=False)
class HarmonicSet:
    """
    Fourier coefficients indexed by harmonic nu in [-N_h, N_h].

    Attributes:
        coeffs: Complex array of shape (2 N_h + 1, m); row nu + N_h holds X_nu
        n_harmonics: Truncation N_h
        labels: Optional component names
    """

    coeffs: np.ndarray
    n_harmonics: int
    labels: Tuple[str, ...] = ()

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.n_harmonics, self.n_harmonics + 1)

    @property
    def width(self) -> int:
        """Number of components per coefficient."""
        return self.coeffs.shape[1]

    def at(self, nu: int) -> np.ndarray:
        """Coefficient vector for harmonic nu; zero outside the truncation."""
        if abs(nu) > self.n_harmonics:
            return np.zeros(self.width, dtype=complex)
        return self.coeffs[nu + self.n_harmonics]

    def component(self, index: Union[int, str]) -> np.ndarray:
        """All harmonics of one component, ordered by nu."""
        if isinstance(index, str):
            index = self.labels.index(index)
        return self.coeffs[:, index]

    def energy(self) -> float:
        """Sum of squared coefficient norms (Parseval mean square)."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def parseval_error(self, samples: np.ndarray) -> float:
        """Relative mismatch between coefficient energy and time-domain mean square."""
        mean_square = float(np.mean(np.sum(np.abs(samples) ** 2, axis=1)))
        if mean_square == 0.0:
            return abs(self.energy())
        return abs(self.energy() - mean_square) / mean_square

    def reality_error(self) -> float:
        """Largest |X_{-nu} - conj(X_nu)| relative to the largest coefficient."""
        scale = np.abs(self.coeffs).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(self.coeffs[::-1] - np.conj(self.coeffs)).max() / scale)

    def thd(self, index: Union[int, str]) -> float:
        """Total harmonic distortion of a component relative to its fundamental."""
        series = self.component(index)
        h = self.n_harmonics
        fundamental = abs(series[h + 1])
        if fundamental == 0.0:
            raise SolverError(f"Component {index} has no fundamental")
        higher = np.concatenate([series[h + 2 :], series[: h - 1]])
        return float(np.sqrt(np.sum(np.abs(higher) ** 2) / (2.0 * fundamental**2)))

    def truncated(self, n_harmonics: int) -> "HarmonicSet":
        """Copy restricted to |nu| <= n_harmonics."""
        n_harmonics = min(n_harmonics, self.n_harmonics)
        lo = self.n_harmonics - n_harmonics
        return HarmonicSet(
            coeffs=self.coeffs[lo : lo + 2 * n_harmonics + 1].copy(),
            n_harmonics=n_harmonics,
            labels=self.labels,
        )


def top_harmonic_fraction(coeffs: np.ndarray, n_harmonics: int) -> float:
    """
    Largest per-component share of energy held by the |nu| = N_h pair.

    Components whose total energy is negligible next to the strongest one are
    ignored.
    """
    power = np.abs(coeffs) ** 2
    total = power.sum(axis=0)
    if not np.any(total > 0.0):
        return 0.0
    top = power[0] + power[-1] if n_harmonics > 0 else np.zeros_like(total)
    live = total > 1e-24 * total.max()
    return float(np.max(top[live] / total[live]))


def harmonics_from_samples(
    samples: np.ndarray,
    n_harmonics: int = DEFAULT_HARMONICS,
    labels: Sequence[str] = (),
    aliasing_limit: Optional[float] = ALIASING_LIMIT,
) -> HarmonicSet:
    """
    Fourier coefficients of one period of uniformly sampled data.

    Args:
        samples: Array of shape (N_t, m), real or complex, without the wrap sample
        n_harmonics: Truncation N_h
        labels: Component names
        aliasing_limit: Top-harmonic energy fraction that triggers UnderResolved
            (None disables the guard)

    Returns:
        HarmonicSet with 2 N_h + 1 coefficient rows

    Raises:
        SolverError: If N_h exceeds N_t/2 - 1
        UnderResolved: If the top retained harmonic holds too much energy
    """
    samples = np.asarray(samples)
    if samples.ndim == 1:
        samples = samples[:, None]
    n_t = samples.shape[0]
    if n_harmonics < 0 or n_harmonics > n_t // 2 - 1:
        raise SolverError(
            f"Harmonic truncation {n_harmonics} needs at least {2 * (n_harmonics + 1)} "
            f"samples per period, got {n_t}"
        )

    spectrum = np.fft.fft(samples, axis=0) / n_t
    order = np.arange(-n_harmonics, n_harmonics + 1)
    coeffs = spectrum[order % n_t]

    if aliasing_limit is not None and n_harmonics > 0:
        fraction = top_harmonic_fraction(coeffs, n_harmonics)
        if fraction > aliasing_limit:
            raise UnderResolved(
                f"Harmonic {n_harmonics} holds {fraction:.2e} of the waveform energy; "
                "increase the harmonic truncation",
                fraction=fraction,
                n_harmonics=n_harmonics,
            )
    return HarmonicSet(coeffs=coeffs, n_harmonics=n_harmonics, labels=tuple(labels))


def fourier_harmonics(pss, N_h: int = DEFAULT_HARMONICS) -> HarmonicSet:
    """
    Harmonics X_{s,nu} of a periodic steady state.

    Args:
        pss: PeriodicSteadyState
        N_h: Harmonic truncation

    Returns:
        HarmonicSet over the state components
    """
    harmonics = harmonics_from_samples(pss.samples, N_h, pss.state_labels)
    logger.debug(
        f"Harmonics of {pss.model_name}: N_h={N_h}, Parseval error "
        f"{harmonics.parseval_error(pss.samples):.2e}"
    )
    return harmonics
