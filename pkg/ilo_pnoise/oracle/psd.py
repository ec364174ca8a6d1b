"""
Welch Spectrum Estimator

Single-sideband phase-noise density of an ensemble run, estimated from the
per-period complex amplitude of the observation node at the fundamental.

The baseband record is re-centred on the ensemble mean frequency, each
path's Welch periodogram (two-sided, complex input) is averaged over the
ensemble, and the upper sideband is normalized to the mean carrier power.
The one-period averaging of the demodulator is divided out.

Author: ILO PNoise Team
"""

import logging
from typing import Optional

import numpy as np
from scipy import signal

from ..spectrum.result import Method, SpectrumResult
from ..utils.exceptions import InsufficientRecord, OracleError
from .sde import EnsembleRun

logger = logging.getLogger(__name__)

DEFAULT_NPERSEG = 2**16
RECORD_FACTOR = 10.0


def _detrend_complex(segment: np.ndarray) -> np.ndarray:
    """Linear detrend of the real and imaginary parts separately."""
    real = signal.detrend(segment.real, type="linear", axis=-1)
    imag = signal.detrend(segment.imag, type="linear", axis=-1)
    return real + 1j * imag


def recentre(demodulated: np.ndarray) -> np.ndarray:
    """Remove the ensemble mean frequency offset from per-period amplitudes."""
    phase = np.unwrap(np.angle(demodulated), axis=1)
    n = demodulated.shape[1]
    if n < 2:
        return demodulated
    step = float(np.mean((phase[:, -1] - phase[:, 0]) / (n - 1)))
    return demodulated * np.exp(-1j * step * np.arange(n))[None, :]


def estimate_psd(
    run: EnsembleRun,
    omega0: Optional[float] = None,
    offsets: Optional[np.ndarray] = None,
    nperseg: int = DEFAULT_NPERSEG,
    overlap: float = 0.5,
    window: str = "hann",
) -> SpectrumResult:
    """
    Ensemble-averaged single-sideband spectrum of an oracle run.

    Args:
        run: Finished ensemble run
        omega0: Reference fundamental (rad/s); defaults to the run's
        offsets: Offset frequencies (Hz); defaults to the resolved Welch bins
        nperseg: Welch segment length in periods (reduced to the record if longer)
        overlap: Segment overlap fraction
        window: Window name understood by scipy.signal

    Returns:
        SpectrumResult tagged ORACLE

    Raises:
        InsufficientRecord: If an offset lies below 10 / T_total or the first Welch bin
        OracleError: If an offset lies above half the per-period sampling rate
    """
    omega0 = run.omega0 if omega0 is None else omega0
    fs = 1.0 / run.T0
    z = run.demodulated[run.alive]
    n = z.shape[1]

    segment = int(nperseg)
    if segment > n:
        segment = 2 ** int(np.floor(np.log2(n)))
        logger.warning(f"Record of {n} periods is shorter than nperseg={nperseg}; using {segment}")
    noverlap = int(round(overlap * segment))

    limit = max(RECORD_FACTOR / run.T_total, fs / segment)
    if offsets is not None:
        offsets = np.asarray(offsets, dtype=float)
        if offsets.min() < limit * (1.0 - 1e-12):
            raise InsufficientRecord(
                f"Offset {offsets.min():.4e} Hz is below the record limit {limit:.4e} Hz "
                f"(T_total={run.T_total:.4e} s)",
                min_offset=float(offsets.min()),
                limit=float(limit),
            )
        if offsets.max() > 0.5 * fs:
            raise OracleError(
                f"Offset {offsets.max():.4e} Hz exceeds half the sampling rate {0.5 * fs:.4e} Hz"
            )

    z = recentre(z)
    carrier = float(np.mean(np.abs(z) ** 2))
    if carrier <= 0.0:
        raise OracleError(f"Observation node {run.observation_label} has no carrier in the oracle record")

    freqs, pxx = signal.welch(
        z,
        fs=fs,
        window=window,
        nperseg=segment,
        noverlap=noverlap,
        detrend=_detrend_complex,
        return_onesided=False,
        scaling="density",
        axis=-1,
    )
    density = pxx.mean(axis=0) / carrier
    upper = freqs > 0.0
    freqs = freqs[upper]
    density = density[upper] / np.sinc(freqs / fs) ** 2

    if offsets is None:
        keep = freqs >= limit
        offsets = freqs[keep]
        values = density[keep]
    else:
        log_density = np.interp(
            np.log10(offsets), np.log10(freqs), np.log10(np.maximum(density, 1e-300))
        )
        values = 10.0**log_density

    n_segments = max(1, (n - noverlap) // (segment - noverlap))
    averages = n_segments * z.shape[0]
    stderr_db = float(10.0 * np.log10(1.0 + 1.0 / np.sqrt(averages)))
    logger.info(
        f"Oracle PSD: {averages} averaged segments of {segment} periods, "
        f"standard error ~{stderr_db:.2f} dB"
    )
    return SpectrumResult(
        offsets_hz=np.asarray(offsets, dtype=float),
        density=values,
        method=Method.ORACLE,
        carrier_harmonic=1,
        metadata={
            "n_paths": run.n_paths,
            "diverged": run.n_diverged,
            "seed": run.seed,
            "dt": run.dt,
            "T_total": run.T_total,
            "scheme": run.scheme,
            "omega0": omega0,
            "nperseg": segment,
            "segments": n_segments,
            "stderr_db": stderr_db,
            "carrier_power": carrier,
            "observation_node": run.observation_label,
        },
    )
