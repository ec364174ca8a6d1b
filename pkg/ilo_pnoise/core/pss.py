"""
Periodic Steady-State Solver

Shooting-Newton computation of the limit cycle x_s(t) = x_s(t + T0) of an
autonomous circuit model. The orbit and its variational equation are
integrated together so that each Newton step uses the exact sensitivity of
the end state to the initial state. A transient ring-up supplies the initial
guess, and the converged orbit is resampled on a uniform grid for the
Fourier and Floquet stages.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..utils.exceptions import (
    DegenerateJacobian,
    IntegrationFailure,
    NoConvergence,
    SolverError,
)
from .circuits import StateSpaceModel

logger = logging.getLogger(__name__)


@dataclass
class SolverSettings:
    """
    Numerical settings of the steady-state solver.

    Attributes:
        rtol: Relative tolerance of shooting and resampling integrations
        ringup_rtol: Relative tolerance of the transient ring-up
        closure_tol: Scaled closure residual accepted as converged
        max_iterations: Newton iteration limit
        n_samples: Uniform samples per period (N_t)
        ringup_periods: Length of the transient ring-up in guessed periods
        anchor_index: State component fixed on the Poincare section
        singular_threshold: Smallest/largest singular value ratio of the
            Newton matrix below which the orbit is reported as not locked
        check_degeneracy: Raise DegenerateJacobian on a singular Newton matrix
    """

    rtol: float = 1e-10
    ringup_rtol: float = 1e-8
    closure_tol: float = 1e-9
    max_iterations: int = 30
    n_samples: int = 1024
    ringup_periods: int = 200
    anchor_index: int = 0
    singular_threshold: float = 1e-7
    check_degeneracy: bool = True


@dataclass(frozen=True, eq=False)
class PeriodicSteadyState:
    """
    Converged limit cycle sampled over one period.

    Attributes:
        T0: Period (s)
        x0: Anchor state at t = 0
        samples: States at t_k = k T0 / N_t, k = 0 .. N_t - 1
        derivatives: Vector field at the samples, dx_s/dt
        state_labels: Names of the state components
        model_name: Name of the model that was solved
        anchor_index: Component fixed on the Poincare section
        closure_residual: Scaled closure residual at convergence
        iterations: Newton iterations used
    """

    T0: float
    x0: np.ndarray
    samples: np.ndarray
    derivatives: np.ndarray
    state_labels: Tuple[str, ...]
    model_name: str = ""
    anchor_index: int = 0
    closure_residual: float = 0.0
    iterations: int = 0

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi / self.T0

    @property
    def f0(self) -> float:
        return 1.0 / self.T0

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * (self.T0 / self.n_samples)

    @property
    def wrapped_samples(self) -> np.ndarray:
        """Samples with the t = T0 point appended (equal to samples[0])."""
        return np.vstack([self.samples, self.samples[:1]])

    @property
    def scale(self) -> np.ndarray:
        """Per-component orbit scale used for residual and tolerance scaling."""
        return orbit_scale(self.samples)

    def shifted(self, k: int) -> "PeriodicSteadyState":
        """Same orbit re-anchored at sample k."""
        k = int(k) % self.n_samples
        samples = np.roll(self.samples, -k, axis=0)
        return replace(
            self,
            x0=samples[0].copy(),
            samples=samples,
            derivatives=np.roll(self.derivatives, -k, axis=0),
        )


def orbit_scale(samples: np.ndarray) -> np.ndarray:
    """Per-component max(half peak-to-peak, |mean|), floored relative to the largest."""
    samples = np.atleast_2d(samples)
    half_ptp = 0.5 * (samples.max(axis=0) - samples.min(axis=0))
    scale = np.maximum(half_ptp, np.abs(samples.mean(axis=0)))
    floor = 1e-12 * max(float(scale.max()), 1e-300)
    return np.maximum(scale, floor)


def _ivp(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: Tuple[float, float],
    y0: np.ndarray,
    rtol: float,
    atol: Any,
    t_eval: Optional[np.ndarray] = None,
    dense_output: bool = False,
    context: str = "",
):
    """solve_ivp with DOP853, raising IntegrationFailure on failure."""
    try:
        sol = solve_ivp(
            fun,
            t_span,
            y0,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            t_eval=t_eval,
            dense_output=dense_output,
        )
    except (ValueError, FloatingPointError, OverflowError) as e:
        raise IntegrationFailure(
            f"Integrator raised: {e}", solver_message=str(e), context=context or None
        ) from e
    if sol.status != 0 or not np.all(np.isfinite(sol.y)):
        t_failed = float(sol.t[-1]) if sol.t.size else float(t_span[0])
        raise IntegrationFailure(
            f"Integration stopped at t={t_failed:.4e} s: {sol.message}",
            t_failed=t_failed,
            solver_message=str(sol.message),
            context=context or None,
        )
    return sol


def _orbit_rhs(model: StateSpaceModel) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        return model.f(x)

    return rhs


def _variational_rhs(model: StateSpaceModel) -> Callable[[float, np.ndarray], np.ndarray]:
    n = model.n

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x = y[:n]
        phi = y[n:].reshape(n, n)
        return np.concatenate([model.f(x), (model.jac(x) @ phi).ravel()])

    return rhs


def integrate_orbit(
    model: StateSpaceModel,
    x0: np.ndarray,
    T: float,
    rtol: float = 1e-10,
    scale: Optional[np.ndarray] = None,
    t_eval: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Integrate x' = f(x) from x0 over [0, T].

    Returns:
        End state, or the states at t_eval (shape (len(t_eval), n)) when given
    """
    scale = orbit_scale(x0) if scale is None else scale
    sol = _ivp(_orbit_rhs(model), (0.0, T), np.asarray(x0, dtype=float), rtol,
               rtol * scale, t_eval=t_eval, context=model.name)
    return sol.y.T if t_eval is not None else sol.y[:, -1]


def integrate_variational(
    model: StateSpaceModel,
    x0: np.ndarray,
    T: float,
    rtol: float = 1e-10,
    scale: Optional[np.ndarray] = None,
    t_eval: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate the orbit together with Y' = J(x) Y, Y(0) = I.

    Args:
        model: State-space model
        x0: Initial state
        T: Interval length (s)
        rtol: Relative tolerance
        scale: Per-component state scale for absolute tolerances
        t_eval: Optional output times within [0, T]

    Returns:
        (states, transition matrices): at T only (shapes (n,), (n, n)), or at
        every t_eval time (shapes (m, n), (m, n, n))
    """
    n = model.n
    scale = orbit_scale(x0) if scale is None else np.asarray(scale)
    atol = rtol * np.concatenate([scale, np.outer(scale, 1.0 / scale).ravel()])
    y0 = np.concatenate([np.asarray(x0, dtype=float), np.eye(n).ravel()])
    sol = _ivp(_variational_rhs(model), (0.0, T), y0, rtol, atol, t_eval=t_eval,
               context=model.name)
    if t_eval is None:
        y = sol.y[:, -1]
        return y[:n], y[n:].reshape(n, n)
    y = sol.y.T
    return y[:, :n], y[:, n:].reshape(-1, n, n)


def rk4_orbit(model: StateSpaceModel, x0: np.ndarray, T: float, n_steps: int) -> np.ndarray:
    """Fixed-step classical Runge-Kutta samples at t_k = k T / n_steps, k < n_steps."""
    h = T / n_steps
    out = np.empty((n_steps, model.n))
    x = np.asarray(x0, dtype=float).copy()
    for k in range(n_steps):
        out[k] = x
        k1 = model.f(x)
        k2 = model.f(x + 0.5 * h * k1)
        k3 = model.f(x + 0.5 * h * k2)
        k4 = model.f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out


def ring_up(
    model: StateSpaceModel,
    settings: Optional[SolverSettings] = None,
    guess_T: Optional[float] = None,
) -> Tuple[float, np.ndarray]:
    """
    Initial guess for shooting from a transient started near equilibrium.

    The model is integrated for ``ringup_periods`` guessed periods from its
    perturbed initial state; the period and anchor state are then read from
    the last two upward crossings of the anchor component through its mean.

    Args:
        model: State-space model
        settings: Solver settings
        guess_T: Period guess (defaults to the model's frequency hint)

    Returns:
        (T guess, x0 guess on the Poincare section)

    Raises:
        SolverError: If the transient does not oscillate
    """
    settings = settings or SolverSettings()
    if guess_T is None:
        if not model.frequency_hint:
            raise SolverError(f"Model {model.name} has no frequency hint for the ring-up")
        guess_T = 1.0 / model.frequency_hint
    k = settings.anchor_index
    x_start = np.asarray(model.initial_state, dtype=float)
    scale = np.maximum(np.abs(x_start), 1e-6 * max(float(np.abs(x_start).max()), 1e-12))

    sol = _ivp(_orbit_rhs(model), (0.0, settings.ringup_periods * guess_T), x_start,
               settings.ringup_rtol, settings.ringup_rtol * scale * 1e-2, context=model.name)
    x_settled = sol.y[:, -1]

    window = 4.0 * guess_T
    tail = _ivp(_orbit_rhs(model), (0.0, window), x_settled, settings.ringup_rtol,
                settings.ringup_rtol * orbit_scale(sol.y.T[-200:]), dense_output=True,
                context=model.name)
    t_grid = np.linspace(0.0, window, 257)
    trace = tail.sol(t_grid)[k]
    level = float(trace.mean())
    above = trace - level
    upward = np.flatnonzero((above[:-1] < 0.0) & (above[1:] >= 0.0))
    if upward.size < 2 or np.ptp(trace) <= 1e-9 * max(abs(level), 1e-12):
        raise SolverError(
            f"Ring-up of {model.name} did not oscillate after {settings.ringup_periods} periods",
            context=model.name,
        )

    def crossing(i: int) -> float:
        return float(brentq(lambda t: tail.sol(t)[k] - level, t_grid[i], t_grid[i + 1],
                            xtol=1e-18 + 1e-14 * window))

    t_a = crossing(int(upward[-2]))
    t_b = crossing(int(upward[-1]))
    T_guess = t_b - t_a
    x_guess = tail.sol(t_b)
    logger.debug(f"Ring-up of {model.name}: T guess {T_guess:.6e} s (hint {guess_T:.6e} s)")
    return T_guess, x_guess


def _newton_matrix(
    phi: np.ndarray,
    f_end: np.ndarray,
    anchor_index: int,
    amplitude_anchor: Optional[Tuple[int, float]],
) -> np.ndarray:
    n = phi.shape[0]
    rows = n + 1 + (1 if amplitude_anchor is not None else 0)
    m = np.zeros((rows, n + 1))
    m[:n, :n] = phi - np.eye(n)
    m[:n, n] = f_end
    m[n, anchor_index] = 1.0
    if amplitude_anchor is not None:
        m[n + 1, amplitude_anchor[0]] = 1.0
    return m


def find_limit_cycle(
    model: StateSpaceModel,
    guess_T: float,
    guess_x: np.ndarray,
    tol: float = 1e-9,
    settings: Optional[SolverSettings] = None,
    amplitude_anchor: Optional[Tuple[int, float]] = None,
) -> PeriodicSteadyState:
    """
    Solve the shooting system for (x0, T0) by Newton iteration.

    Unknowns are the anchor state and the period. The residual stacks the
    closure x(T; x0) - x0 with the phase condition that the anchor component
    keeps its value from the guess (the Poincare section). Systems with a
    continuum of orbits, such as linear oscillators, take an additional
    amplitude anchor row ``(index, value)``.

    Args:
        model: State-space model
        guess_T: Period guess (s)
        guess_x: State guess on the Poincare section
        tol: Scaled closure residual tolerance
        settings: Solver settings (anchor index, tolerances, iteration limit)
        amplitude_anchor: Optional (state index, value) fixing the orbit amplitude

    Returns:
        Converged PeriodicSteadyState resampled at settings.n_samples points

    Raises:
        NoConvergence: If the residual does not drop below tol
        DegenerateJacobian: If the Newton matrix is singular beyond the phase shift
        IntegrationFailure: If an integration fails
    """
    settings = settings or SolverSettings()
    if tol <= 0.0:
        raise SolverError("Shooting tolerance must be positive")
    if guess_T <= 0.0:
        raise SolverError("Period guess must be positive")
    k = settings.anchor_index
    n = model.n
    x = np.asarray(guess_x, dtype=float).copy()
    T = float(guess_T)
    level = float(x[k])
    if amplitude_anchor is not None:
        x[amplitude_anchor[0]] = amplitude_anchor[1]

    probe = integrate_orbit(model, x, T, settings.rtol, orbit_scale(x) + 1e-30,
                            t_eval=np.linspace(0.0, T, 65))
    scale = orbit_scale(probe)
    col_scale = np.concatenate([scale, [T]])

    def closure(xa: np.ndarray, Ta: float) -> float:
        x_end = integrate_orbit(model, xa, Ta, settings.rtol, scale)
        return float(np.max(np.abs(x_end - xa) / scale))

    residual = np.inf
    for iteration in range(1, settings.max_iterations + 1):
        x_end, phi = integrate_variational(model, x, T, settings.rtol, scale)
        r = x_end - x
        residual = float(np.max(np.abs(r) / scale))
        logger.debug(f"Shooting {model.name}: iteration {iteration}, residual {residual:.3e}, "
                     f"T={T:.12e}")
        if residual < tol:
            return _finish(model, x, T, residual, iteration, settings, scale)

        m = _newton_matrix(phi, model.f(x_end), k, amplitude_anchor)
        rhs = np.concatenate([-r, [level - x[k]]])
        if amplitude_anchor is not None:
            rhs = np.concatenate([rhs, [amplitude_anchor[1] - x[amplitude_anchor[0]]]])
        row_scale = np.concatenate([scale, np.ones(m.shape[0] - n)])
        row_scale[n] = scale[k]
        if amplitude_anchor is not None:
            row_scale[n + 1] = scale[amplitude_anchor[0]]
        m_scaled = m * col_scale[None, :] / row_scale[:, None]
        step_scaled, _, _, sv = np.linalg.lstsq(m_scaled, rhs / row_scale, rcond=None)
        ratio = float(sv.min() / sv.max()) if sv.size and sv.max() > 0 else 0.0
        if sv.size < n + 1:
            ratio = 0.0
        if settings.check_degeneracy and ratio < settings.singular_threshold:
            raise DegenerateJacobian(
                f"Shooting matrix of {model.name} is singular (ratio {ratio:.2e}): "
                "lock not detected",
                singular_ratio=ratio,
                context=model.name,
            )
        step = step_scaled * col_scale

        damping = 1.0
        while True:
            x_trial = x + damping * step[:n]
            T_trial = T + damping * step[n]
            if T_trial > 0.0:
                try:
                    trial_residual = closure(x_trial, T_trial)
                except IntegrationFailure:
                    trial_residual = np.inf
                if trial_residual < residual or damping < 1.0 / 64.0:
                    break
            elif damping < 1.0 / 64.0:
                raise NoConvergence(
                    f"Shooting of {model.name} drove the period negative",
                    iterations=iteration,
                    residual=residual,
                    context=model.name,
                )
            damping *= 0.5
        x, T = x_trial, T_trial

    raise NoConvergence(
        f"Shooting of {model.name} did not converge in {settings.max_iterations} iterations "
        f"(residual {residual:.3e})",
        iterations=settings.max_iterations,
        residual=residual,
        context=model.name,
    )


def _finish(
    model: StateSpaceModel,
    x0: np.ndarray,
    T: float,
    residual: float,
    iterations: int,
    settings: SolverSettings,
    scale: np.ndarray,
) -> PeriodicSteadyState:
    n_t = settings.n_samples
    t_eval = np.arange(n_t) * (T / n_t)
    try:
        samples = integrate_orbit(model, x0, T, settings.rtol, scale, t_eval=t_eval)
    except IntegrationFailure as e:
        logger.warning(f"Resampling integration failed ({e}); falling back to fixed-step RK4")
        samples = rk4_orbit(model, x0, T, n_t)
    samples[0] = x0
    logger.info(f"PSS of {model.name}: T0={T:.9e} s, f0={1.0 / T:.6e} Hz after "
                f"{iterations} iterations (residual {residual:.2e})")
    return PeriodicSteadyState(
        T0=T,
        x0=np.asarray(x0, dtype=float).copy(),
        samples=samples,
        derivatives=model.f(samples),
        state_labels=model.state_labels,
        model_name=model.name,
        anchor_index=settings.anchor_index,
        closure_residual=residual,
        iterations=iterations,
    )


def solve_periodic_steady_state(
    model: StateSpaceModel,
    settings: Optional[SolverSettings] = None,
    guess_T: Optional[float] = None,
) -> PeriodicSteadyState:
    """
    Ring up the model and refine the orbit by shooting.

    Args:
        model: State-space model
        settings: Solver settings
        guess_T: Optional period guess overriding the frequency hint

    Returns:
        Converged PeriodicSteadyState
    """
    settings = settings or SolverSettings()
    T_guess, x_guess = ring_up(model, settings, guess_T)
    return find_limit_cycle(model, T_guess, x_guess, settings.closure_tol, settings)


def tune_tank_inductance(
    params: Any,
    builder: Callable[[Any], StateSpaceModel],
    settings: Optional[SolverSettings] = None,
    iterations: int = 3,
    tol: float = 1e-7,
) -> Tuple[Any, PeriodicSteadyState]:
    """
    Adjust a tank inductance until the oscillator runs at its target frequency.

    Large-signal effects shift the oscillation away from the linear tank
    resonance. The inductance is rescaled by (f_actual / f_target)^2 and the
    orbit recomputed until the frequency error drops below tol.

    Args:
        params: Parameter dataclass with ``C``, ``L`` and ``f0`` fields
        builder: Function building the model from params
        settings: Solver settings
        iterations: Maximum retuning passes
        tol: Relative frequency tolerance

    Returns:
        (tuned params with explicit L, PSS of the tuned oscillator)
    """
    target = params.f0
    tuned = replace(params, L=params.inductance)
    pss = solve_periodic_steady_state(builder(tuned), settings)
    for _ in range(iterations):
        ratio = pss.f0 / target
        if abs(ratio - 1.0) < tol:
            break
        tuned = replace(tuned, L=tuned.L * ratio**2)
        pss = solve_periodic_steady_state(builder(tuned), settings)
    logger.info(f"Tuned tank: L={tuned.L:.6e} H, f0={pss.f0:.6e} Hz (target {target:.6e} Hz)")
    return tuned, pss


def closure_error(model: StateSpaceModel, pss: PeriodicSteadyState, rtol: float = 1e-10) -> float:
    """Scaled closure error of a PSS, re-integrated over one period."""
    x_end = integrate_orbit(model, pss.x0, pss.T0, rtol, pss.scale)
    return float(np.max(np.abs(x_end - pss.x0) / pss.scale))


def sample_indices(pss: PeriodicSteadyState, times: Sequence[float]) -> np.ndarray:
    """Nearest sample indices for times within one period."""
    t = np.mod(np.asarray(times, dtype=float), pss.T0)
    return np.rint(t / pss.T0 * pss.n_samples).astype(int) % pss.n_samples
