"""
Floquet Decomposition

Floquet exponents, direct and dual periodic vectors, lambda vectors and the
phase-diffusion constant of a periodic steady state.

The state-transition matrix Phi(t, 0) is integrated once on the PSS grid.
Direct vectors are u_i(t) = exp(-mu_i t) Phi(t) w_i with w_i the right
eigenvectors of the monodromy matrix; dual vectors follow from the left
eigenvectors propagated with the inverse transpose of the same Phi(t), which
makes v_i^T(t) u_j(t) = delta_ij hold at every sample by construction. The
first mode uses w_1 = f(x0), so u_1(t) = Phi(t) f(x0) is the flow carried by
that integration; its agreement with the resampled dx_s/dt is checked
separately. The linear algebra runs in coordinates scaled by the orbit
amplitude of each state so that the checks do not depend on state units.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..utils.exceptions import (
    BiorthogonalityLoss,
    FloquetError,
    NearDegenerate,
    UnstablePSS,
)
from .circuits import StateSpaceModel
from .harmonics import DEFAULT_HARMONICS, harmonics_from_samples
from .pss import PeriodicSteadyState, integrate_variational

logger = logging.getLogger(__name__)


@dataclass
class FloquetSettings:
    """
    Settings of the Floquet stage.

    Attributes:
        rtol: Relative tolerance of the variational integration
        n_modes: Retained modes k (phase modes entering the spectra)
        phase_mode: Optional override selecting the second phase mode by its
            position (2-based) in descending-multiplier order
        n_harmonics: Harmonic truncation of U and Lambda
        biorthogonality_tol: Accepted normalized |v_i^T u_j - delta_ij|
        flow_tol: Accepted relative deviation of u_1 from dx_s/dt and of
            v_1^T dx_s/dt from 1
        unstable_tol: Multiplier magnitude excess reported as unstable
        degenerate_tol: Multiplier separation reported as near-degenerate
    """

    rtol: float = 1e-10
    n_modes: int = 2
    phase_mode: Optional[int] = None
    n_harmonics: int = DEFAULT_HARMONICS
    biorthogonality_tol: float = 1e-6
    flow_tol: float = 1e-6
    unstable_tol: float = 1e-6
    degenerate_tol: float = 1e-8


@dataclass(frozen=True, eq=False)
class FloquetExponents:
    """
    Ordered Floquet exponents and multipliers.

    Attributes:
        mu: Exponents (1/s); mu[0] is the zero mode, snapped to 0
        iota: Multipliers exp(mu T0)
        right_vectors: Right eigenvectors of the monodromy, columns in mode order
        left_vectors: Rows y_i with y_i^T w_j = delta_ij
        T0: Period (s)
        zero_mode_error: |mu_1| T0 before snapping
        near_degenerate: (i, j, separation) for multiplier pairs closer than the tolerance
        stable: All non-trivial multipliers inside the unit circle
    """

    mu: np.ndarray
    iota: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    T0: float
    zero_mode_error: float
    near_degenerate: Tuple[Tuple[int, int, float], ...] = ()
    stable: bool = True


@dataclass(frozen=True, eq=False)
class FloquetDecomposition:
    """
    Floquet decomposition of a PSS on its sample grid.

    Attributes:
        mu: Exponents of all modes (1/s), mode order
        iota: Multipliers
        u: Direct vectors, shape (modes, N_t, n)
        v: Dual vectors, shape (modes, N_t, n)
        lam: Lambda vectors v_i^T B, shape (modes, N_t, p)
        c: Phase-diffusion constant (s)
        T0: Period (s)
        n_modes: Retained phase modes k
        biorthogonality_error: Largest |v_i^T u_i - 1| and |v_i^T u_j| / (|v_i| |u_j|)
            over the grid, norms taken in orbit-scaled coordinates
        u1_deviation: max_t |u_1(t) - dx_s/dt| / max_t |dx_s/dt| in scaled coordinates
        flow_dual_error: Largest |v_1^T(t) dx_s/dt - 1| over the grid
        zero_mode_error: |mu_1| T0 before snapping
        near_degenerate: Multiplier pairs flagged by floquet_exponents
        warnings: Non-fatal conditions met during the decomposition
    """

    mu: np.ndarray
    iota: np.ndarray
    u: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    c: float
    T0: float
    n_modes: int = 2
    biorthogonality_error: float = 0.0
    u1_deviation: float = 0.0
    flow_dual_error: float = 0.0
    zero_mode_error: float = 0.0
    near_degenerate: Tuple[Tuple[int, int, float], ...] = ()
    warnings: Tuple[str, ...] = ()

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi / self.T0

    @property
    def mu2(self) -> complex:
        return complex(self.mu[1]) if self.mu.size > 1 else 0j


@dataclass(frozen=True, eq=False)
class ModeHarmonics:
    """
    Fourier coefficients of the retained Floquet modes and of the PSS.

    Modes are addressed 1-based (mode 1 is the zero mode). Coefficients
    outside the truncation read as zero.

    Attributes:
        U: Direct-vector harmonics U_{i,nu}, shape (modes, 2 N_h + 1, n)
        Lam: Lambda harmonics Lambda_{i,nu}, shape (modes, 2 N_h + 1, p)
        X: PSS harmonics X_{s,nu}, shape (2 N_h + 1, n)
        mu: Exponents of the retained modes (1/s)
        omega0: Fundamental angular frequency (rad/s)
        c: Phase-diffusion constant (s)
        state_labels: State names for node lookup
    """

    U: np.ndarray
    Lam: np.ndarray
    X: np.ndarray
    mu: np.ndarray
    omega0: float
    c: float
    state_labels: Tuple[str, ...] = ()

    @property
    def n_harmonics(self) -> int:
        return (self.U.shape[1] - 1) // 2

    @property
    def n_modes(self) -> int:
        return self.U.shape[0]

    @property
    def n(self) -> int:
        return self.U.shape[2]

    @property
    def p(self) -> int:
        return self.Lam.shape[2]

    def u(self, mode: int, nu: int) -> np.ndarray:
        """U_{mode,nu} as a length-n complex vector."""
        if abs(nu) > self.n_harmonics or not 1 <= mode <= self.n_modes:
            return np.zeros(self.n, dtype=complex)
        return self.U[mode - 1, nu + self.n_harmonics]

    def lam(self, mode: int, nu: int) -> np.ndarray:
        """Lambda_{mode,nu} as a length-p complex vector."""
        if abs(nu) > self.n_harmonics or not 1 <= mode <= self.n_modes:
            return np.zeros(self.p, dtype=complex)
        return self.Lam[mode - 1, nu + self.n_harmonics]

    def x(self, nu: int) -> np.ndarray:
        if abs(nu) > self.n_harmonics:
            return np.zeros(self.n, dtype=complex)
        return self.X[nu + self.n_harmonics]

    def node_index(self, node) -> int:
        if isinstance(node, str):
            if node not in self.state_labels:
                raise FloquetError(f"Unknown observation node '{node}'")
            return self.state_labels.index(node)
        return int(node)

    def carrier_power(self, q: int, nu: int = 1) -> float:
        """|X^{[q]}_{s,nu}|^2."""
        return float(abs(self.x(nu)[q]) ** 2)

    def lam_block(self, mode: int, nus: np.ndarray) -> np.ndarray:
        """Lambda_{mode,nu} rows for an array of harmonics (zeros outside)."""
        nus = np.asarray(nus, dtype=int)
        out = np.zeros((nus.size, self.p), dtype=complex)
        inside = np.abs(nus) <= self.n_harmonics
        if 1 <= mode <= self.n_modes:
            out[inside] = self.Lam[mode - 1, nus[inside] + self.n_harmonics]
        return out

    def u_block(self, mode: int, nus: np.ndarray) -> np.ndarray:
        """U_{mode,nu} rows for an array of harmonics (zeros outside)."""
        nus = np.asarray(nus, dtype=int)
        out = np.zeros((nus.size, self.n), dtype=complex)
        inside = np.abs(nus) <= self.n_harmonics
        if 1 <= mode <= self.n_modes:
            out[inside] = self.U[mode - 1, nus[inside] + self.n_harmonics]
        return out

    def with_lambda_scale(self, factor: float) -> "ModeHarmonics":
        return replace(self, Lam=self.Lam * factor, c=self.c * factor**2)


def transition_matrices(
    model: StateSpaceModel, pss: PeriodicSteadyState, rtol: float = 1e-10
) -> Tuple[np.ndarray, np.ndarray]:
    """
    State-transition matrices on the PSS grid.

    Returns:
        (orbit states, Phi(t_k, 0)) for t_k = k T0 / N_t, k = 0 .. N_t
    """
    t_eval = np.arange(pss.n_samples + 1) * (pss.T0 / pss.n_samples)
    t_eval[-1] = pss.T0
    return integrate_variational(model, pss.x0, pss.T0, rtol, pss.scale, t_eval=t_eval)


def monodromy(
    model: StateSpaceModel, pss: PeriodicSteadyState, rtol: float = 1e-10
) -> np.ndarray:
    """
    Monodromy matrix Phi(T0, 0) of the PSS.

    Raises:
        IntegrationFailure: If the variational integration fails
    """
    _, phi = integrate_variational(model, pss.x0, pss.T0, rtol, pss.scale)
    return phi


def floquet_exponents(
    monodromy_matrix: np.ndarray,
    T0: float,
    primary_dimension: Optional[int] = None,
    phase_mode: Optional[int] = None,
    unstable_tol: float = 1e-6,
    degenerate_tol: float = 1e-8,
    scale: Optional[np.ndarray] = None,
) -> FloquetExponents:
    """
    Floquet multipliers and exponents in mode order.

    Mode 1 is the multiplier closest to 1 (restricted to modes that excite
    the primary block when ``primary_dimension`` is given). For a unilateral
    assembly the second phase mode is the secondary-only mode with the
    largest multiplier, which is the mode that tends to 1 as the coupling
    vanishes. The remaining modes follow in descending real part.

    Args:
        monodromy_matrix: Phi(T0, 0)
        T0: Period (s)
        primary_dimension: Leading states of the driving unit, if any
        phase_mode: Override for mode 2, as its position in the default order
        unstable_tol: Allowed multiplier magnitude above 1
        degenerate_tol: Separation under which multipliers are flagged
        scale: Per-state scale; the eigensolve and the mode shares use
            diag(scale)^-1 Phi diag(scale)

    Returns:
        FloquetExponents

    Raises:
        FloquetError: If the monodromy has non-finite entries
        UnstablePSS: If a non-trivial multiplier lies outside the unit circle
    """
    phi = np.asarray(monodromy_matrix, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise FloquetError("Monodromy matrix has non-finite entries")
    n = phi.shape[0]
    d = np.ones(n) if scale is None else np.asarray(scale, dtype=float)
    eigvals, right = np.linalg.eig(phi * d[None, :] / d[:, None])
    weights = np.linalg.norm(right, axis=0)

    candidates = np.arange(n)
    if primary_dimension is not None and 0 < primary_dimension < n:
        p_share = np.linalg.norm(right[:primary_dimension], axis=0) / weights
        driven = candidates[p_share > 1e-6]
        if driven.size:
            candidates = driven
    first = int(candidates[np.argmin(np.abs(eigvals[candidates] - 1.0))])

    rest = [i for i in range(n) if i != first]
    rest.sort(key=lambda i: (-eigvals[i].real, -abs(eigvals[i])))
    if primary_dimension is not None and 0 < primary_dimension < n and rest:
        secondary_only = [
            i for i in rest
            if np.linalg.norm(right[:primary_dimension, i]) <= 1e-6 * weights[i]
        ]
        if secondary_only:
            second = max(secondary_only, key=lambda i: abs(eigvals[i]))
            rest.remove(second)
            rest.insert(0, second)
    if phase_mode is not None:
        if not 2 <= phase_mode <= n:
            raise FloquetError(f"Phase-mode override {phase_mode} outside 2..{n}")
        chosen = rest.pop(phase_mode - 2)
        rest.insert(0, chosen)
    order = np.array([first] + rest)

    iota = eigvals[order]
    right = right[:, order] / weights[order] * d[:, None]
    with np.errstate(divide="ignore"):
        mu = np.log(iota.astype(complex)) / T0
    zero_mode_error = float(abs(mu[0]) * T0)
    mu[0] = 0.0
    mu = np.where(np.abs(mu.imag) <= 1e-12 * np.maximum(np.abs(mu.real), 1.0 / T0), mu.real, mu)

    pairs: List[Tuple[int, int, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            gap = float(abs(iota[i] - iota[j]))
            if gap < degenerate_tol:
                pairs.append((i + 1, j + 1, gap))
                logger.warning(f"Floquet multipliers {i + 1} and {j + 1} are within {gap:.2e}")

    stable = bool(np.all(np.abs(iota[1:]) < 1.0)) if n > 1 else True
    if n > 1 and np.any(np.abs(iota[1:]) > 1.0 + unstable_tol):
        raise UnstablePSS(
            f"Non-trivial Floquet multiplier of magnitude {np.abs(iota[1:]).max():.6f} "
            "lies outside the unit circle",
            multipliers=iota.tolist(),
        )

    try:
        left = np.linalg.inv(right)
    except np.linalg.LinAlgError:
        left = np.linalg.pinv(right)

    logger.debug(f"Floquet multipliers: {np.array2string(iota, precision=6)}")
    return FloquetExponents(
        mu=np.asarray(mu, dtype=complex),
        iota=iota.astype(complex),
        right_vectors=right.astype(complex),
        left_vectors=left.astype(complex),
        T0=T0,
        zero_mode_error=zero_mode_error,
        near_degenerate=tuple(pairs),
        stable=stable,
    )


def phase_diffusion_constant(lambda_1: np.ndarray) -> float:
    """
    Phase-diffusion constant c = (1/T0) int lambda_1(t) lambda_1(t)^T dt.

    Args:
        lambda_1: First lambda vector sampled uniformly over one period, shape (N_t, p)

    Returns:
        c (s)

    Raises:
        FloquetError: If the result is not finite
    """
    lambda_1 = np.atleast_2d(np.asarray(lambda_1))
    c = float(np.mean(np.sum(np.abs(lambda_1) ** 2, axis=1)))
    if not np.isfinite(c):
        raise FloquetError("Phase-diffusion constant is not finite")
    return c


def _vectors(
    flow0: np.ndarray,
    times: np.ndarray,
    phis: np.ndarray,
    exps: FloquetExponents,
    scale: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Direct and dual vectors in scaled coordinates, shapes (modes, N_t, n)."""
    w = exps.right_vectors / scale[:, None]
    w[:, 0] = flow0 / scale
    y = np.linalg.inv(w)

    # diag(scale)^-1 Phi(t) diag(scale)
    phi_s = phis * scale[None, None, :] / scale[None, :, None]
    growth = np.exp(-np.outer(times, exps.mu))
    u = np.einsum("tij,jm->mti", phi_s, w) * growth.T[:, :, None]

    # v_i(t) = exp(mu_i t) Phi(t)^-T y_i, with y_i the rows of inv(W)
    phi_t = np.transpose(phi_s, (0, 2, 1)).astype(complex)
    rhs = np.broadcast_to(y.T, (times.size,) + y.T.shape)
    v = np.linalg.solve(phi_t, rhs)
    v = np.transpose(v, (2, 0, 1)) / growth.T[:, :, None]
    return u, v


def _biorthogonality_error(u: np.ndarray, v: np.ndarray) -> float:
    """Largest |v_i^T u_i - 1| and |v_i^T u_j| / (|v_i| |u_j|), i != j, over the grid."""
    gram = np.einsum("atk,btk->tab", v, u)
    norms = np.linalg.norm(v, axis=2).T[:, :, None] * np.linalg.norm(u, axis=2).T[:, None, :]
    eye = np.eye(u.shape[0], dtype=bool)[None, :, :]
    off = np.abs(gram) / np.maximum(norms, np.finfo(float).tiny)
    return float(np.where(eye, np.abs(gram - 1.0), off).max())


def floquet_vectors(
    model: StateSpaceModel,
    pss: PeriodicSteadyState,
    monodromy_matrix: Optional[np.ndarray] = None,
    settings: Optional[FloquetSettings] = None,
) -> FloquetDecomposition:
    """
    Direct, dual and lambda vectors of every Floquet mode on the PSS grid.

    Args:
        model: State-space model the PSS belongs to
        pss: Periodic steady state
        monodromy_matrix: Optional precomputed Phi(T0, 0)
        settings: Floquet settings

    Returns:
        FloquetDecomposition with u, v, lambda and c

    Raises:
        NearDegenerate: If a retained mode has a coinciding multiplier
        BiorthogonalityLoss: If biorthogonality fails after one tightened retry
        UnstablePSS: From the exponent stage
    """
    settings = settings or FloquetSettings()
    scale = pss.scale
    flow0 = model.f(pss.x0)
    rtol = settings.rtol
    for attempt in range(2):
        _, phis = transition_matrices(model, pss, rtol)
        phi_T = phis[-1] if (monodromy_matrix is None or attempt > 0) else monodromy_matrix
        exps = floquet_exponents(
            phi_T,
            pss.T0,
            primary_dimension=model.primary_dimension,
            phase_mode=settings.phase_mode,
            unstable_tol=settings.unstable_tol,
            degenerate_tol=settings.degenerate_tol,
            scale=scale,
        )
        for i, j, gap in exps.near_degenerate:
            if min(i, j) <= settings.n_modes:
                raise NearDegenerate(
                    f"Floquet multipliers {i} and {j} coincide (separation {gap:.2e}); "
                    "the eigenbasis of the retained modes is not usable",
                    pair=(i, j),
                    separation=gap,
                    context=model.name,
                )

        u_s, v_s = _vectors(flow0, pss.times, phis[: pss.n_samples], exps, scale)
        error = _biorthogonality_error(u_s, v_s)
        if error <= settings.biorthogonality_tol:
            break
        logger.warning(
            f"Biorthogonality error {error:.2e} for {model.name}; re-integrating with "
            f"rtol={rtol * 1e-2:.1e}"
        )
        rtol *= 1e-2
    else:
        raise BiorthogonalityLoss(
            f"Floquet vectors of {model.name} lost biorthogonality ({error:.2e})",
            max_error=error,
            context=model.name,
        )

    u = u_s * scale
    v = v_s / scale
    lam = np.einsum("mti,ip->mtp", v, model.B())

    xdot = pss.derivatives / scale
    u1_dev = float(
        np.linalg.norm(u_s[0] - xdot, axis=1).max() / np.linalg.norm(xdot, axis=1).max()
    )
    flow_dual = float(np.abs(np.einsum("ti,ti->t", v_s[0], xdot) - 1.0).max())

    warnings: List[str] = []
    if max(u1_dev, flow_dual) > settings.flow_tol:
        msg = (
            f"u_1 departs from the resampled dx_s/dt by {u1_dev:.2e} "
            f"(|v_1^T dx_s/dt - 1| up to {flow_dual:.2e})"
        )
        logger.warning(msg)
        warnings.append(msg)
    if exps.mu.size > 1 and abs(exps.mu[1].imag) > 0.0:
        msg = f"Second phase mode is complex (mu2 = {exps.mu[1]:.4e} 1/s)"
        logger.warning(msg)
        warnings.append(msg)

    c = phase_diffusion_constant(lam[0].real)
    n_modes = min(settings.n_modes, model.n)
    logger.info(
        f"Floquet {model.name}: mu2={exps.mu[1] if exps.mu.size > 1 else 0:.4e} 1/s, "
        f"c={c:.4e} s, w0^2 c={pss.omega0**2 * c:.4e} rad^2/s"
    )
    return FloquetDecomposition(
        mu=exps.mu,
        iota=exps.iota,
        u=u,
        v=v,
        lam=lam,
        c=c,
        T0=pss.T0,
        n_modes=n_modes,
        biorthogonality_error=error,
        u1_deviation=u1_dev,
        flow_dual_error=flow_dual,
        zero_mode_error=exps.zero_mode_error,
        near_degenerate=exps.near_degenerate,
        warnings=tuple(warnings),
    )


def lambda_vectors(
    decomp: FloquetDecomposition,
    model: StateSpaceModel,
    pss: PeriodicSteadyState,
    n_harmonics: int = DEFAULT_HARMONICS,
    n_modes: Optional[int] = None,
) -> Tuple[np.ndarray, ModeHarmonics]:
    """
    Lambda waveforms and the harmonics U_{i,j}, Lambda_{i,j} of the retained modes.

    Args:
        decomp: Floquet decomposition
        model: State-space model (noise matrix)
        pss: Periodic steady state
        n_harmonics: Harmonic truncation
        n_modes: Retained modes (defaults to decomp.n_modes)

    Returns:
        (lambda samples of shape (modes, N_t, p), ModeHarmonics)

    Raises:
        UnderResolved: From the harmonic aliasing guard
    """
    k = decomp.n_modes if n_modes is None else min(n_modes, decomp.mu.size)
    lam = np.einsum("mti,ip->mtp", decomp.v[:k], model.B())
    U = np.stack([
        harmonics_from_samples(decomp.u[i], n_harmonics, model.state_labels).coeffs
        for i in range(k)
    ])
    Lam = np.stack([
        harmonics_from_samples(lam[i], n_harmonics, model.noise_labels).coeffs
        for i in range(k)
    ])
    X = harmonics_from_samples(pss.samples, n_harmonics, model.state_labels).coeffs
    harmonics = ModeHarmonics(
        U=U,
        Lam=Lam,
        X=X,
        mu=decomp.mu[:k].copy(),
        omega0=pss.omega0,
        c=decomp.c,
        state_labels=model.state_labels,
    )
    return lam, harmonics


def analyze_floquet(
    model: StateSpaceModel,
    pss: PeriodicSteadyState,
    settings: Optional[FloquetSettings] = None,
) -> Tuple[FloquetDecomposition, ModeHarmonics]:
    """Monodromy, exponents, vectors and harmonics in one call."""
    settings = settings or FloquetSettings()
    decomp = floquet_vectors(model, pss, None, settings)
    _, harmonics = lambda_vectors(decomp, model, pss, settings.n_harmonics, settings.n_modes)
    return decomp, harmonics


def synthetic_harmonics(
    U: Sequence[np.ndarray],
    Lam: Sequence[np.ndarray],
    X: np.ndarray,
    mu: Sequence[complex],
    omega0: float,
    c: float,
    state_labels: Tuple[str, ...] = (),
) -> ModeHarmonics:
    """Build ModeHarmonics from explicit coefficient arrays (analysis and tests)."""
    return ModeHarmonics(
        U=np.asarray(U, dtype=complex),
        Lam=np.asarray(Lam, dtype=complex),
        X=np.asarray(X, dtype=complex),
        mu=np.asarray(mu, dtype=complex),
        omega0=float(omega0),
        c=float(c),
        state_labels=state_labels,
    )
