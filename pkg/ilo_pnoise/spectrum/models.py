"""
Spectral Models

Closed-form phase-noise spectra assembled from Floquet mode harmonics:

- free-running Lorentzian of a single oscillator
- two-mode injection-locked model (ILO-PMM)
- general k-mode coupled-ensemble model (COSC-PMM) around carrier harmonic nu
- reduced-order single-pole model (K-ILO)
- three-Lorentzian near-sinusoidal approximation (Q-SINUS)

Offsets are supplied in Hz; every model is evaluated with angular offsets
w_m = 2 pi f_m and returns a per-Hz single-sideband density.

Author: ILO PNoise Team
"""

import logging
from typing import Optional, Union

import numpy as np

from ..core.floquet import ModeHarmonics
from ..utils.exceptions import SpectrumError
from .result import Method, SpectrumResult
from .tensors import (
    DEFAULT_TRUNCATION,
    check_exponent,
    cosc_blocks,
    ilo_blocks,
    sideband_weights,
)

logger = logging.getLogger(__name__)

TAIL_WARNING = 1e-3


def _lorentzian(drive: float, omega_m: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = drive / ((0.5 * drive) ** 2 + omega_m**2)
    return np.where(np.isfinite(out), out, 0.0)


def free_running_lorentzian(c: float, omega0: float, offsets: np.ndarray) -> SpectrumResult:
    """
    Free-running oscillator spectrum (w0^2 c) / ((0.5 w0^2 c)^2 + w_m^2).

    Args:
        c: Phase-diffusion constant (s)
        omega0: Fundamental angular frequency (rad/s)
        offsets: Offset frequencies (Hz)

    Returns:
        SpectrumResult tagged LORENTZIAN

    Raises:
        SpectrumError: If c is negative
    """
    if c < 0.0:
        raise SpectrumError(f"Phase-diffusion constant must be nonnegative, got {c}")
    offsets = np.asarray(offsets, dtype=float)
    drive = omega0**2 * c
    return SpectrumResult(
        offsets_hz=offsets,
        density=_lorentzian(drive, 2.0 * np.pi * offsets),
        method=Method.LORENTZIAN,
        metadata={"c": c, "omega0": omega0, "linewidth_hz": drive / (4.0 * np.pi)},
    )


def _tail_check(tail: np.ndarray, total: np.ndarray, method: Method) -> float:
    scale = np.maximum(np.abs(total), 1e-300)
    share = float(np.max(np.abs(tail) / scale)) if tail.size else 0.0
    if share > TAIL_WARNING:
        logger.warning(
            f"{method.value}: last truncation shell contributes {share:.2e} of the spectrum; "
            "increase rho_max"
        )
    return share


def ilo_pmm_spectrum(
    h: ModeHarmonics,
    q: Union[int, str],
    offsets: np.ndarray,
    rho_max: int = DEFAULT_TRUNCATION,
    p_max: int = DEFAULT_TRUNCATION,
) -> SpectrumResult:
    """
    Two-mode injection-locked phase-noise spectrum around the fundamental.

    L(w_m) = ((1 - alpha) w0^2 c - 2 beta w_m) / ((0.5 w0^2 c)^2 + w_m^2)
           + sum_rho (Delta_rho (2|mu2| + w0^2 rho^2 c) + 2 Gamma_rho w_m)
                     / ((|mu2| + 0.5 w0^2 rho^2 c)^2 + w_m^2)

    The expression is evaluated as written, odd terms included.

    Args:
        h: Mode harmonics with k >= 2 retained modes
        q: Observation node (index or label)
        offsets: Offset frequencies (Hz)
        rho_max: Truncation of the rho sum
        p_max: Truncation of the inner p sums

    Returns:
        SpectrumResult tagged ILO-PMM

    Raises:
        ZeroCarrier: If the node has no fundamental
        UncoupledSingularity: If mu2 is zero
    """
    q = h.node_index(q)
    offsets = np.asarray(offsets, dtype=float)
    blocks = ilo_blocks(h, q, rho_max, p_max)
    mu2 = abs(h.mu[1].real)
    drive = h.omega0**2 * h.c
    w = 2.0 * np.pi * offsets

    first = ((1.0 - blocks.alpha) * drive - 2.0 * blocks.beta * w) / ((0.5 * drive) ** 2 + w**2)
    rho2 = blocks.rho.astype(float) ** 2
    terms = (
        blocks.delta[:, None] * (2.0 * mu2 + drive * rho2[:, None])
        + 2.0 * blocks.gamma[:, None] * w[None, :]
    ) / ((mu2 + 0.5 * drive * rho2[:, None]) ** 2 + w[None, :] ** 2)
    density = first + terms.sum(axis=0)
    tail = terms[0] + terms[-1] if rho_max > 0 else np.zeros_like(w)
    share = _tail_check(tail, density, Method.ILO_PMM)

    return SpectrumResult(
        offsets_hz=offsets,
        density=density,
        method=Method.ILO_PMM,
        carrier_harmonic=1,
        rho_max=rho_max,
        p_max=p_max,
        metadata={
            "alpha": blocks.alpha,
            "beta": blocks.beta,
            "mu2": float(h.mu[1].real),
            "c": h.c,
            "omega0": h.omega0,
            "observation_node": h.state_labels[q] if h.state_labels else q,
            "tail_share": share,
        },
    )


def cosc_pmm_spectrum(
    h: ModeHarmonics,
    q: Union[int, str],
    offsets: np.ndarray,
    nu: int = 1,
    k: Optional[int] = None,
    rho_max: int = DEFAULT_TRUNCATION,
    p_max: int = DEFAULT_TRUNCATION,
) -> SpectrumResult:
    """
    k-mode coupled-ensemble spectrum around carrier harmonic nu.

    Offsets are measured from nu w0. The same offset w_m^(nu) is used in
    every term, including the odd term of the zero-mode Lorentzian.

    Args:
        h: Mode harmonics with at least k retained modes
        q: Observation node (index or label)
        offsets: Offset frequencies from the nu-th harmonic (Hz)
        nu: Carrier harmonic
        k: Number of phase modes (defaults to all retained)
        rho_max: Truncation of the rho sum
        p_max: Truncation of the inner p sums

    Returns:
        SpectrumResult tagged COSC-PMM
    """
    q = h.node_index(q)
    offsets = np.asarray(offsets, dtype=float)
    k = h.n_modes if k is None else min(k, h.n_modes)
    blocks = cosc_blocks(h, q, nu, k, rho_max, p_max)
    drive = h.omega0**2 * h.c
    w = 2.0 * np.pi * offsets

    first = ((1.0 - blocks.a) * drive - 2.0 * blocks.b * w) / ((0.5 * drive) ** 2 + w**2)
    rho2 = blocks.rho.astype(float) ** 2
    density = first.copy()
    tail = np.zeros_like(w)
    for idx, l in enumerate(range(2, k + 1)):
        mu_l = complex(h.mu[l - 1])
        check_exponent(mu_l, h.omega0, l)
        mu_r = abs(mu_l.real)
        shifted = w[None, :] + mu_l.imag
        terms = (
            blocks.upsilon[idx][:, None] * (2.0 * mu_r + drive * rho2[:, None])
            + 2.0 * blocks.delta_lr[idx][:, None] * shifted
        ) / ((mu_r + 0.5 * drive * rho2[:, None]) ** 2 + shifted**2)
        density += terms.sum(axis=0)
        if rho_max > 0:
            tail += terms[0] + terms[-1]
    share = _tail_check(tail, density, Method.COSC_PMM)

    return SpectrumResult(
        offsets_hz=offsets,
        density=density,
        method=Method.COSC_PMM,
        carrier_harmonic=nu,
        rho_max=rho_max,
        p_max=p_max,
        metadata={
            "a": blocks.a,
            "b": blocks.b,
            "phase_modes": k,
            "c": h.c,
            "omega0": h.omega0,
            "observation_node": h.state_labels[q] if h.state_labels else q,
            "tail_share": share,
        },
    )


def _reference_density(L_P: Union[SpectrumResult, np.ndarray], offsets: np.ndarray) -> np.ndarray:
    if isinstance(L_P, SpectrumResult):
        if L_P.offsets_hz.shape == offsets.shape and np.allclose(L_P.offsets_hz, offsets):
            return L_P.density
        log_density = np.interp(np.log10(offsets), np.log10(L_P.offsets_hz),
                                np.log10(np.maximum(L_P.density, 1e-300)))
        return 10.0**log_density
    values = np.asarray(L_P, dtype=float)
    if values.shape != offsets.shape:
        raise SpectrumError("Primary spectrum must be sampled on the requested offsets")
    return values


def kilo_spectrum(
    h: ModeHarmonics,
    q: Union[int, str],
    offsets: np.ndarray,
    L_P: Union[SpectrumResult, np.ndarray],
) -> SpectrumResult:
    """
    Reduced-order single-pole spectrum (Delta_0^(K) + |mu2|^2 L_P) / (|mu2|^2 + w_m^2).

    Args:
        h: Mode harmonics (k >= 2)
        q: Observation node (index or label)
        offsets: Offset frequencies (Hz)
        L_P: Free-running primary spectrum, as a SpectrumResult or on the same grid

    Returns:
        SpectrumResult tagged K-ILO, with Delta_0^(K) in the metadata
    """
    q = h.node_index(q)
    offsets = np.asarray(offsets, dtype=float)
    check_exponent(h.mu[1], h.omega0)
    mu2 = abs(complex(h.mu[1]).real)
    _, _, delta_k = sideband_weights(h, q)
    lp = _reference_density(L_P, offsets)
    w = 2.0 * np.pi * offsets
    density = (delta_k + mu2**2 * lp) / (mu2**2 + w**2)
    return SpectrumResult(
        offsets_hz=offsets,
        density=density,
        method=Method.K_ILO,
        metadata={"delta0_k": delta_k, "mu2": float(h.mu[1].real), "c": h.c,
                  "omega0": h.omega0},
    )


def qsinus_spectrum(h: ModeHarmonics, q: Union[int, str], offsets: np.ndarray) -> SpectrumResult:
    """
    Three-Lorentzian near-sinusoidal approximation of the two-mode spectrum.

    L = w0^2 c / ((0.5 w0^2 c)^2 + w_m^2) + Z_-1 / (|mu2|^2 + w_m^2)
        + (Z_1 + 4 w0^2 c) / ((|mu2| + 2 w0^2 c)^2 + w_m^2)

    Returns:
        SpectrumResult tagged Q-SINUS
    """
    q = h.node_index(q)
    offsets = np.asarray(offsets, dtype=float)
    check_exponent(h.mu[1], h.omega0)
    mu2 = abs(complex(h.mu[1]).real)
    z_minus, z_plus, _ = sideband_weights(h, q)
    drive = h.omega0**2 * h.c
    w = 2.0 * np.pi * offsets
    density = (
        _lorentzian(drive, w)
        + z_minus / (mu2**2 + w**2)
        + (z_plus + 4.0 * drive) / ((mu2 + 2.0 * drive) ** 2 + w**2)
    )
    return SpectrumResult(
        offsets_hz=offsets,
        density=density,
        method=Method.Q_SINUS,
        metadata={"z_minus": z_minus, "z_plus": z_plus, "mu2": float(h.mu[1].real), "c": h.c},
    )
