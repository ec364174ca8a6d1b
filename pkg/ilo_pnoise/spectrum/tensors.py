"""
Tensor Blocks

Complex n x n tensor operators built from the Floquet mode harmonics, and
the real scalars read off their observation-node diagonal entries.

All products Lambda^T Lambda^* are p-dimensional bilinear sums
sum_a Lambda_a conj(Lambda'_a); U^dagger is the conjugate row vector.
Harmonics outside the truncation count as zero.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.floquet import ModeHarmonics
from ..utils.exceptions import SpectrumError, UncoupledSingularity, ZeroCarrier

logger = logging.getLogger(__name__)

SINGULAR_RATIO = 1e-7
DEFAULT_TRUNCATION = 16


def check_exponent(mu: complex, omega0: float, mode: int = 2) -> None:
    if abs(mu) <= SINGULAR_RATIO * omega0:
        raise UncoupledSingularity(
            f"Floquet exponent of mode {mode} is zero ({complex(mu):.3e} 1/s); the ensemble is "
            "not locked",
            mu2=complex(mu),
        )


def _bilinear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise a^T conj(b) for stacked p-vectors."""
    return np.sum(a * np.conj(b), axis=-1)


def carrier_norm(h: ModeHarmonics, q: int, nu: int = 1) -> float:
    """
    |X^{[q]}_{s,nu}|^2 with a zero-carrier guard.

    Raises:
        ZeroCarrier: If node q carries no power at harmonic nu
    """
    power = h.carrier_power(q, nu)
    node_energy = float(np.sum(np.abs(h.X[:, q]) ** 2))
    if power <= 1e-20 * max(node_energy, 1e-300) or power == 0.0:
        label = h.state_labels[q] if q < len(h.state_labels) else str(q)
        raise ZeroCarrier(f"Observation node {label} has no power at harmonic {nu}", node=label)
    return power


def psi_tensor(h: ModeHarmonics, mu2: Optional[complex] = None, omega0: Optional[float] = None,
               p_max: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """
    Psi = sum_p U_{1,1} Lambda_{1,0}^T Lambda_{2,1-p}^* U_{2,p}^dagger / (j w0 (p-1) - mu2).

    Args:
        h: Mode harmonics (k >= 2)
        mu2: Second phase-mode exponent (defaults to h.mu[1])
        omega0: Fundamental (defaults to h.omega0)
        p_max: Truncation of the p sum

    Returns:
        Complex n x n matrix

    Raises:
        UncoupledSingularity: If mu2 is zero
    """
    mu2 = h.mu[1] if mu2 is None else mu2
    omega0 = h.omega0 if omega0 is None else omega0
    check_exponent(mu2, omega0)
    p = np.arange(-p_max, p_max + 1)
    weights = _bilinear(h.lam(1, 0)[None, :], h.lam_block(2, 1 - p)) / (
        1j * omega0 * (p - 1) - mu2
    )
    right = np.sum(np.conj(h.u_block(2, p)) * weights[:, None], axis=0)
    return np.outer(h.u(1, 1), right)


def phi_tensor(h: ModeHarmonics, rho: int, mu2: Optional[complex] = None,
               omega0: Optional[float] = None, p_max: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """
    Phi_rho of the two-mode model.

    Phi_rho = U_{1,rho} Lambda_{1,0}^T Lambda_{2,rho-1}^* U_{2,1}^dagger / (j w0 (1-rho) - mu2)
            + sum_p U_{2,p} Lambda_{2,rho-p}^T Lambda_{2,rho-1}^* U_{2,1}^dagger / (j w0 (1-p) - 2 mu2)

    Raises:
        UncoupledSingularity: If mu2 is zero
    """
    mu2 = h.mu[1] if mu2 is None else mu2
    omega0 = h.omega0 if omega0 is None else omega0
    check_exponent(mu2, omega0)
    u21_conj = np.conj(h.u(2, 1))
    lam_tail = h.lam(2, rho - 1)

    cross = (h.lam(1, 0) @ np.conj(lam_tail)) / (1j * omega0 * (1 - rho) - mu2)
    p = np.arange(-p_max, p_max + 1)
    weights = _bilinear(h.lam_block(2, rho - p), lam_tail[None, :]) / (
        1j * omega0 * (1 - p) - 2.0 * mu2
    )
    left = h.u(1, rho) * cross + np.sum(h.u_block(2, p) * weights[:, None], axis=0)
    return np.outer(left, u21_conj)


def omega_tensor(h: ModeHarmonics, nu: int = 1, k: Optional[int] = None,
                 p_max: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """
    Omega^(nu) = sum_{m=2}^{k} sum_p U_{1,nu} Lambda_{1,0}^T Lambda_{m,nu-p}^* U_{m,p}^dagger
                 / (j w0 (p - nu) - mu_m^*).

    Raises:
        UncoupledSingularity: If a summed exponent is zero
    """
    k = h.n_modes if k is None else k
    p = np.arange(-p_max, p_max + 1)
    right = np.zeros(h.n, dtype=complex)
    for m in range(2, k + 1):
        mu_m = h.mu[m - 1]
        check_exponent(mu_m, h.omega0, m)
        weights = _bilinear(h.lam(1, 0)[None, :], h.lam_block(m, nu - p)) / (
            1j * h.omega0 * (p - nu) - np.conj(mu_m)
        )
        right += np.sum(np.conj(h.u_block(m, p)) * weights[:, None], axis=0)
    return np.outer(h.u(1, nu), right)


def theta_tensor(h: ModeHarmonics, l: int, rho: int, nu: int = 1, k: Optional[int] = None,
                 p_max: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """
    Theta^(nu)_{l rho} of the k-mode model.

    The first term pairs the zero mode with mode l; the second sums modes
    i = 2..k with denominator j w0 (nu - p) - mu_l^* - mu_i.

    Raises:
        UncoupledSingularity: If mode l has a zero exponent
    """
    k = h.n_modes if k is None else k
    mu_l = h.mu[l - 1]
    mu_1 = h.mu[0]
    check_exponent(mu_l, h.omega0, l)
    ul_conj = np.conj(h.u(l, nu))
    lam_tail = h.lam(l, rho - nu)

    cross = (h.lam(1, 0) @ np.conj(lam_tail)) / (1j * h.omega0 * (nu - rho) - np.conj(mu_l) - mu_1)
    left = h.u(1, rho) * cross
    p = np.arange(-p_max, p_max + 1)
    lam_shift = h.lam_block(l, rho - p)
    inner = _bilinear(lam_shift, lam_tail[None, :])
    for i in range(2, k + 1):
        weights = inner / (1j * h.omega0 * (nu - p) - np.conj(mu_l) - h.mu[i - 1])
        left = left + np.sum(h.u_block(i, p) * weights[:, None], axis=0)
    return np.outer(left, ul_conj)


@dataclass
class TensorBlocks:
    """
    Scalars and diagonal entries of the tensor operators at node q.

    Attributes:
        q: Observation node index
        nu: Carrier harmonic
        carrier: |X^{[q]}_{s,nu}|^2
        rho: Summation indices of the rho sum
        alpha, beta: Real and imaginary parts of [Psi]_qq / carrier (two-mode model)
        delta, gamma: Real and imaginary parts of [Phi_rho]_qq / carrier per rho
        a, b: Real and imaginary parts of [Omega]_qq / carrier (k-mode model)
        upsilon, delta_lr: Real and imaginary parts of [Theta_{l rho}]_qq / carrier,
            shape (k - 1, len(rho))
        psi: Full Psi matrix, when computed
        phi: Full Phi_rho matrices by rho, when computed
    """

    q: int
    nu: int
    carrier: float
    rho: np.ndarray
    alpha: float = 0.0
    beta: float = 0.0
    delta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    gamma: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a: float = 0.0
    b: float = 0.0
    upsilon: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    delta_lr: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    psi: Optional[np.ndarray] = None
    phi: Dict[int, np.ndarray] = field(default_factory=dict)


def ilo_blocks(h: ModeHarmonics, q: int, rho_max: int = DEFAULT_TRUNCATION,
               p_max: int = DEFAULT_TRUNCATION) -> TensorBlocks:
    """Two-mode scalars alpha, beta, Delta_rho and Gamma_rho at node q."""
    if h.n_modes < 2:
        raise SpectrumError("The two-mode model needs two retained Floquet modes")
    carrier = carrier_norm(h, q, 1)
    psi = psi_tensor(h, p_max=p_max)
    rho = np.arange(-rho_max, rho_max + 1)
    phis = {int(r): phi_tensor(h, int(r), p_max=p_max) for r in rho}
    phi_qq = np.array([phis[int(r)][q, q] for r in rho]) / carrier
    return TensorBlocks(
        q=q,
        nu=1,
        carrier=carrier,
        rho=rho,
        alpha=float(psi[q, q].real / carrier),
        beta=float(psi[q, q].imag / carrier),
        delta=phi_qq.real.copy(),
        gamma=phi_qq.imag.copy(),
        psi=psi,
        phi=phis,
    )


def cosc_blocks(h: ModeHarmonics, q: int, nu: int = 1, k: Optional[int] = None,
                rho_max: int = DEFAULT_TRUNCATION, p_max: int = DEFAULT_TRUNCATION) -> TensorBlocks:
    """k-mode scalars a, b, Upsilon_{l rho} and Delta_{l rho} at node q."""
    k = h.n_modes if k is None else min(k, h.n_modes)
    if k < 2:
        raise SpectrumError("The ensemble model needs at least two retained Floquet modes")
    if abs(nu) > h.n_harmonics:
        raise SpectrumError(f"Carrier harmonic {nu} is outside the harmonic truncation")
    carrier = carrier_norm(h, q, nu)
    omega = omega_tensor(h, nu, k, p_max)
    rho = np.arange(-rho_max, rho_max + 1)
    theta = np.array([
        [theta_tensor(h, l, int(r), nu, k, p_max)[q, q] for r in rho] for l in range(2, k + 1)
    ]) / carrier
    return TensorBlocks(
        q=q,
        nu=nu,
        carrier=carrier,
        rho=rho,
        a=float(omega[q, q].real / carrier),
        b=float(omega[q, q].imag / carrier),
        upsilon=theta.real.copy(),
        delta_lr=theta.imag.copy(),
    )


def sideband_weights(h: ModeHarmonics, q: int) -> Tuple[float, float, float]:
    """
    Sideband weights Z_{-1}, Z_1 and the reduced-model constant Delta_0^(K).

    Z_s = [U_{2,1} Lambda_{2,s}^T Lambda_{2,s}^* U_{2,1}^dagger]_qq / |X^{[q]}_{s,1}|^2 and
    Delta_0^(K) = 2 [U_{2,1} Re{Lambda_{2,1}^T Lambda_{2,1}^*} U_{2,1}^dagger]_qq / |X|^2 + 5 w0^2 c.

    Returns:
        (Z_-1, Z_1, Delta_0^(K))
    """
    carrier = carrier_norm(h, q, 1)
    u_q = abs(h.u(2, 1)[q]) ** 2
    z_minus = float(u_q * np.sum(np.abs(h.lam(2, -1)) ** 2) / carrier)
    z_plus = float(u_q * np.sum(np.abs(h.lam(2, 1)) ** 2) / carrier)
    delta_k = 2.0 * u_q * float(np.real(h.lam(2, 1) @ np.conj(h.lam(2, 1)))) / carrier
    delta_k += 5.0 * h.omega0**2 * h.c
    return z_minus, z_plus, float(delta_k)
