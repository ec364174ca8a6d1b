"""
Ensemble SDE Simulation

Brute-force integration of the noisy circuit equations

    dx = f(x) dt + B dW

over an ensemble of independent paths. Each path owns a Philox generator
keyed by (seed, path), so statistics do not depend on how paths are split
across worker processes.

Recorded per path, after a settling interval:

- the observation node demodulated at the fundamental once per period
- upward crossings of the node through its orbit mean (linear interpolation)
- running first and second moments of every state
- the final state

Author: ILO PNoise Team
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.circuits import StateSpaceModel
from ..core.pss import PeriodicSteadyState
from ..utils.exceptions import OracleError, PathDivergence

logger = logging.getLogger(__name__)

SCHEMES = ("euler-maruyama", "heun")
MIN_STEPS_PER_PERIOD = 200
DIVERGENCE_FACTOR = 1e3

ProgressCallback = Callable[[int, int], None]


@dataclass
class OracleSettings:
    """
    Settings of an ensemble run.

    Attributes:
        n_paths: Number of independent paths
        duration_periods: Recorded duration in reference periods
        steps_per_period: Integration steps per reference period (dt = T0 / steps)
        dt: Explicit step (s); overrides steps_per_period when set
        settle_periods: Periods integrated and discarded before recording
        seed: Generator seed
        scheme: "euler-maruyama" or "heun"
        workers: Worker processes (1 runs in-process)
        block_periods: Periods integrated per noise block
        divergence_factor: Scaled distance from the orbit centre that aborts a path
    """

    n_paths: int = 64
    duration_periods: int = 10_000
    steps_per_period: int = 500
    dt: Optional[float] = None
    settle_periods: int = 20
    seed: int = 0
    scheme: str = "euler-maruyama"
    workers: int = 1
    block_periods: int = 64
    divergence_factor: float = DIVERGENCE_FACTOR


@dataclass
class EnsembleRun:
    """
    Statistics of a finished ensemble run.

    Attributes:
        n_paths: Number of simulated paths
        dt: Integration step (s)
        T_total: Recorded duration per path (s)
        seed: Generator seed
        T0: Reference period (s)
        steps_per_period: Steps per reference period
        scheme: Integration scheme
        observation_index: Recorded node q
        observation_label: Label of node q
        demodulated: Per-period complex amplitude of node q at the fundamental,
            shape (n_paths, n_periods)
        crossings: Upward crossing times per path (s, from the start of recording)
        crossing_level: Level used for the crossings
        state_sum: Per-path sum of the states over recorded steps, shape (n_paths, n)
        state_sq_sum: Per-path sum of squared states, shape (n_paths, n)
        recorded_steps: Steps accumulated into the sums per path
        final_states: States at the end of the run, shape (n_paths, n)
        diverged: Per-path divergence flags
    """

    n_paths: int
    dt: float
    T_total: float
    seed: int
    T0: float
    steps_per_period: int
    scheme: str
    observation_index: int
    observation_label: str
    demodulated: np.ndarray
    crossings: List[np.ndarray]
    crossing_level: float
    state_sum: np.ndarray
    state_sq_sum: np.ndarray
    recorded_steps: int
    final_states: np.ndarray
    diverged: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi / self.T0

    @property
    def alive(self) -> np.ndarray:
        return ~self.diverged

    @property
    def n_diverged(self) -> int:
        return int(self.diverged.sum())

    @property
    def n_periods(self) -> int:
        return int(self.demodulated.shape[1])

    @property
    def phase_samples(self) -> np.ndarray:
        """Unwrapped phase of node q at the fundamental, one sample per period."""
        return np.unwrap(np.angle(self.demodulated), axis=1)

    def state_mean(self) -> np.ndarray:
        """Ensemble mean of every state over the recorded steps of live paths."""
        count = self.recorded_steps * int(self.alive.sum())
        return self.state_sum[self.alive].sum(axis=0) / count

    def state_variance(self) -> np.ndarray:
        """Ensemble variance of every state over the recorded steps of live paths."""
        count = self.recorded_steps * int(self.alive.sum())
        mean = self.state_sum[self.alive].sum(axis=0) / count
        return self.state_sq_sum[self.alive].sum(axis=0) / count - mean**2


def path_generator(seed: int, path: int) -> np.random.Generator:
    """Counter-based generator of one path; its stream depends only on (seed, path)."""
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def resolve_step(settings: OracleSettings, T0: Optional[float]) -> Tuple[float, float, int]:
    """
    Integration step, reference period and steps per period.

    With a periodic steady state the step is T0 / steps_per_period (or the
    explicit dt, rounded so that a period holds an integer number of steps).
    Without one the reference period is dt * steps_per_period.

    Raises:
        OracleError: If the step resolves fewer than 200 points per period
    """
    if T0 is None:
        if settings.dt is None:
            raise OracleError("An explicit dt is required without a periodic steady state")
        dt = float(settings.dt)
        return dt, dt * settings.steps_per_period, int(settings.steps_per_period)
    if settings.dt is not None:
        steps = int(np.ceil(T0 / settings.dt - 1e-9))
    else:
        steps = int(settings.steps_per_period)
    if steps < MIN_STEPS_PER_PERIOD:
        raise OracleError(
            f"Oracle step resolves only {steps} points per period; at least "
            f"{MIN_STEPS_PER_PERIOD} are required"
        )
    return T0 / steps, T0, steps


def orbit_deviation(pss: PeriodicSteadyState, states: np.ndarray, oversample: int = 8) -> np.ndarray:
    """
    Scaled distance from each state to the closed orbit.

    The orbit is refined by band-limited interpolation of the samples and
    treated as a polyline; distances are measured in orbit-scaled units.

    Args:
        pss: Periodic steady state
        states: States, shape (m, n)
        oversample: Refinement factor of the orbit samples

    Returns:
        Distances, shape (m,)
    """
    scale = pss.scale
    n_t = pss.n_samples
    spectrum = np.fft.rfft(pss.samples, axis=0)
    dense = np.fft.irfft(spectrum, n=n_t * oversample, axis=0) * oversample
    dense = dense / scale
    nxt = np.roll(dense, -1, axis=0)
    seg = nxt - dense
    seg_sq = np.maximum(np.sum(seg**2, axis=1), 1e-300)

    points = np.atleast_2d(states) / scale
    out = np.empty(points.shape[0])
    for i, x in enumerate(points):
        k = int(np.argmin(np.sum((dense - x) ** 2, axis=1)))
        best = np.inf
        for j in ((k - 1) % dense.shape[0], k):
            s = np.clip(np.dot(x - dense[j], seg[j]) / seg_sq[j], 0.0, 1.0)
            best = min(best, float(np.linalg.norm(x - dense[j] - s * seg[j])))
        out[i] = best
    return out


@dataclass
class _ShardResult:
    paths: np.ndarray
    demodulated: np.ndarray
    crossings: List[np.ndarray]
    state_sum: np.ndarray
    state_sq_sum: np.ndarray
    final_states: np.ndarray
    diverged: np.ndarray


def _initial_states(
    model: StateSpaceModel,
    pss: Optional[PeriodicSteadyState],
    generators: Sequence[np.random.Generator],
) -> np.ndarray:
    if pss is None:
        x0 = np.zeros(model.n) if model.initial_state is None else np.asarray(model.initial_state)
        return np.tile(np.asarray(x0, dtype=float), (len(generators), 1))
    picks = [int(g.integers(pss.n_samples)) for g in generators]
    return pss.samples[picks].astype(float)


def _filter_crossings(times: np.ndarray, last: float, min_gap: float) -> Tuple[List[float], float]:
    kept = []
    for t in times:
        if t - last > min_gap:
            kept.append(float(t))
            last = float(t)
    return kept, last


def advance_block(
    drift: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    eta: np.ndarray,
    dt: float,
    heun: bool = False,
) -> np.ndarray:
    """
    Advance a batch of paths through one block of noise increments.

    Every path moves in the same array operation; the loop runs over steps only.

    Args:
        drift: Vector field evaluated on a (paths, n) array
        x: Starting states, shape (paths, n)
        eta: Noise increments B dW per step, shape (steps, paths, n)
        dt: Step (s)
        heun: Use the stochastic Heun predictor-corrector instead of Euler-Maruyama

    Returns:
        States before the first and after every step, shape (steps + 1, paths, n)
    """
    out = np.empty((eta.shape[0] + 1,) + np.shape(x))
    out[0] = x
    x = out[0]
    with np.errstate(all="ignore"):
        for s in range(eta.shape[0]):
            k1 = drift(x)
            if heun:
                k1 = 0.5 * (k1 + drift(x + k1 * dt + eta[s]))
            x = out[s + 1]
            np.add(out[s], k1 * dt + eta[s], out=x)
    return out


def _simulate_shard(
    model: StateSpaceModel,
    pss: Optional[PeriodicSteadyState],
    settings: OracleSettings,
    paths: np.ndarray,
    progress: Optional[ProgressCallback] = None,
) -> _ShardResult:
    """Integrate a subset of paths; the result depends only on the path indices."""
    T0_ref = None if pss is None else pss.T0
    dt, T0, steps = resolve_step(settings, T0_ref)
    n_paths = len(paths)
    n = model.n
    q = model.observation_index
    B = np.asarray(model.B(), dtype=float)
    p = B.shape[1]
    sqrt_dt = np.sqrt(dt)

    generators = [path_generator(settings.seed, int(k)) for k in paths]
    x = _initial_states(model, pss, generators)

    if pss is None:
        centre = np.zeros(n)
        scale = np.ones(n)
        level = 0.0
    else:
        centre = pss.samples.mean(axis=0)
        scale = pss.scale
        level = float(centre[q])
    limit = settings.divergence_factor

    phasor = np.exp(-2j * np.pi * np.arange(steps) / steps)
    block = max(1, int(settings.block_periods))
    settle = int(settings.settle_periods)
    n_record = int(settings.duration_periods)
    total = settle + n_record

    demodulated = np.zeros((n_paths, n_record), dtype=complex)
    state_sum = np.zeros((n_paths, n))
    state_sq_sum = np.zeros((n_paths, n))
    diverged = np.zeros(n_paths, dtype=bool)
    crossing_lists: List[List[float]] = [[] for _ in range(n_paths)]
    last_crossing = np.full(n_paths, -np.inf)
    heun = settings.scheme == "heun"

    period = 0
    while period < total:
        n_block = min(block, total - period)
        n_steps = n_block * steps
        xi = np.stack([g.standard_normal((n_steps, p)) for g in generators], axis=1)
        eta = (xi * sqrt_dt) @ B.T
        states = advance_block(model.f, x, eta, dt, heun)

        ends = states[steps::steps]
        with np.errstate(all="ignore"):
            distance = np.max(np.abs(ends - centre) / scale, axis=2)
        bad = (~np.isfinite(distance) | (distance > limit)).any(axis=0)
        fresh = bad & ~diverged
        if fresh.any():
            logger.debug(f"{int(fresh.sum())} path(s) diverged in periods {period + 1}..{period + n_block}")
            diverged |= fresh
        if diverged.any():
            states[:, diverged] = centre
        trace = states[:, :, q]

        first = max(1, settle * steps - period * steps + 1)
        if first <= n_steps:
            recorded = states[first:]
            state_sum += recorded.sum(axis=0)
            state_sq_sum += np.square(recorded).sum(axis=0)

        x = states[-1].copy()

        # per-period demodulation at the fundamental
        wave = trace[1:].reshape(n_block, steps, n_paths)
        z = np.einsum("kmp,m->pk", wave, phasor) / steps
        start = period - settle
        lo = max(start, 0)
        hi = start + n_block
        if hi > 0:
            demodulated[:, lo:hi] = z[:, lo - start:]

        # upward crossings of the orbit mean
        t_block = (period - settle) * T0 + dt * np.arange(n_steps + 1)
        below = trace[:-1] < level
        above = trace[1:] >= level
        rows, cols = np.nonzero(below & above)
        if rows.size:
            frac = (level - trace[rows, cols]) / (trace[rows + 1, cols] - trace[rows, cols])
            times = t_block[rows] + frac * dt
            for j in range(n_paths):
                mask = (cols == j) & (times >= 0.0)
                if diverged[j] or not mask.any():
                    continue
                kept, last_crossing[j] = _filter_crossings(np.sort(times[mask]),
                                                           last_crossing[j], 0.5 * T0)
                crossing_lists[j].extend(kept)

        period += n_block
        if progress is not None:
            progress(n_paths * period, n_paths * total)

    return _ShardResult(
        paths=np.asarray(paths),
        demodulated=demodulated,
        crossings=[np.asarray(c) for c in crossing_lists],
        state_sum=state_sum,
        state_sq_sum=state_sq_sum,
        final_states=x,
        diverged=diverged,
    )


def _shards(n_paths: int, workers: int) -> List[np.ndarray]:
    return [s for s in np.array_split(np.arange(n_paths), max(1, workers)) if s.size]


def simulate_paths(
    model: StateSpaceModel,
    pss: Optional[PeriodicSteadyState] = None,
    settings: Optional[OracleSettings] = None,
    progress: Optional[ProgressCallback] = None,
) -> EnsembleRun:
    """
    Integrate an ensemble of noisy paths.

    Paths start on the limit cycle at a uniformly random sample (or at the
    model's initial state when no periodic steady state is given) and are
    integrated for settle_periods + duration_periods reference periods.

    Args:
        model: Circuit model with constant noise matrix
        pss: Periodic steady state supplying T0 and the initial orbit
        settings: Oracle settings (defaults if None)
        progress: Callback receiving (completed, total) path-periods

    Returns:
        EnsembleRun

    Raises:
        OracleError: On an invalid scheme or an under-resolved step
        PathDivergence: If every path diverged
    """
    settings = settings or OracleSettings()
    if settings.scheme not in SCHEMES:
        raise OracleError(f"Unknown integration scheme {settings.scheme!r}; expected one of {SCHEMES}")
    if settings.n_paths < 1 or settings.duration_periods < 1:
        raise OracleError("The oracle needs at least one path and one recorded period")
    dt, T0, steps = resolve_step(settings, None if pss is None else pss.T0)
    logger.info(
        f"Oracle: {settings.n_paths} paths x {settings.duration_periods} periods of {model.name}, "
        f"dt={dt:.4e} s ({steps}/period, {settings.scheme}), seed {settings.seed}"
    )

    shards = _shards(settings.n_paths, settings.workers)
    results: List[_ShardResult] = []
    if len(shards) == 1:
        results.append(_simulate_shard(model, pss, settings, shards[0], progress))
    else:
        total = settings.n_paths * (settings.settle_periods + settings.duration_periods)
        done = 0
        with ProcessPoolExecutor(max_workers=len(shards)) as ex:
            futures = {ex.submit(_simulate_shard, model, pss, settings, s): s for s in shards}
            for fut in as_completed(futures):
                shard = futures[fut]
                try:
                    results.append(fut.result())
                except OracleError:
                    raise
                except Exception as e:
                    raise OracleError(
                        f"Oracle worker for paths {shard[0]}..{shard[-1]} failed: {e}"
                    ) from e
                done += len(shard) * (settings.settle_periods + settings.duration_periods)
                if progress is not None:
                    progress(done, total)
    results.sort(key=lambda r: int(r.paths[0]))

    diverged = np.concatenate([r.diverged for r in results])
    if diverged.all():
        raise PathDivergence(
            f"All {settings.n_paths} oracle paths diverged", diverged=int(diverged.sum())
        )
    if diverged.any():
        logger.warning(f"{int(diverged.sum())} of {settings.n_paths} oracle paths diverged and were dropped")

    crossings: List[np.ndarray] = []
    for r in results:
        crossings.extend(r.crossings)
    run = EnsembleRun(
        n_paths=settings.n_paths,
        dt=dt,
        T_total=settings.duration_periods * T0,
        seed=settings.seed,
        T0=T0,
        steps_per_period=steps,
        scheme=settings.scheme,
        observation_index=model.observation_index,
        observation_label=model.state_labels[model.observation_index],
        demodulated=np.concatenate([r.demodulated for r in results]),
        crossings=crossings,
        crossing_level=0.0 if pss is None else float(pss.samples[:, model.observation_index].mean()),
        state_sum=np.concatenate([r.state_sum for r in results]),
        state_sq_sum=np.concatenate([r.state_sq_sum for r in results]),
        recorded_steps=settings.duration_periods * steps,
        final_states=np.concatenate([r.final_states for r in results]),
        diverged=diverged,
        metadata={"model": model.name, "workers": len(shards)},
    )
    logger.info(f"Oracle finished: {run.n_paths - run.n_diverged} live paths, T_total={run.T_total:.4e} s")
    return run


@dataclass(frozen=True)
class DiffusionEstimate:
    """
    Phase-diffusion estimate from crossing times.

    Attributes:
        c: Timing-jitter diffusion constant (s)
        omega0_sq_c: w0^2 c (rad^2/s)
        period: Ensemble mean period (s)
        method: "block" or "regression"
        samples: Number of increments (block) or time points (regression) used
        stderr: Relative standard error of the estimate
    """

    c: float
    omega0_sq_c: float
    period: float
    method: str
    samples: int
    stderr: float


def _timing_deviation(run: EnsembleRun) -> Tuple[np.ndarray, float]:
    live = [run.crossings[i] for i in range(run.n_paths) if run.alive[i] and run.crossings[i].size > 2]
    if not live:
        raise OracleError("No path recorded enough crossings for a diffusion estimate")
    length = min(c.size for c in live)
    times = np.stack([c[:length] for c in live])
    k = np.arange(length)
    # mean period from the ensemble-average crossing slope
    period = float(np.polyfit(k, times.mean(axis=0), 1)[0])
    alpha = times - times[:, :1] - k[None, :] * period
    return alpha, period


def diffusion_slope(run: EnsembleRun, block_periods: Optional[int] = None) -> DiffusionEstimate:
    """
    Estimate w0^2 c from the growth of the crossing-time deviation.

    The deviation alpha_k = t_k - t_0 - k T of every path is cut into
    non-overlapping blocks of block_periods crossings; the variance of the
    block increments divided by the block duration estimates c. With fewer
    than ten increments the slope of the ensemble variance of alpha over
    time is used instead.

    Args:
        run: Finished ensemble run
        block_periods: Crossings per block (defaults to a tenth of the record)

    Returns:
        DiffusionEstimate
    """
    alpha, period = _timing_deviation(run)
    n_live, length = alpha.shape
    block = block_periods or max(1, length // 10)
    n_blocks = (length - 1) // block
    omega0 = 2.0 * np.pi / period

    if n_live * n_blocks >= 10:
        idx = np.arange(n_blocks + 1) * block
        increments = np.diff(alpha[:, idx], axis=1).ravel()
        c = float(np.mean(increments**2) / (block * period))
        stderr = float(np.sqrt(2.0 / increments.size))
        method, samples = "block", int(increments.size)
    else:
        t = np.arange(length) * period
        variance = alpha.var(axis=0)
        c = float(np.polyfit(t, variance, 1)[0])
        stderr = float(np.sqrt(2.0 / max(n_live, 1)))
        method, samples = "regression", int(length)

    estimate = DiffusionEstimate(
        c=c, omega0_sq_c=omega0**2 * c, period=period, method=method, samples=samples, stderr=stderr
    )
    logger.info(
        f"Oracle diffusion ({method}, {samples} samples): w0^2 c = {estimate.omega0_sq_c:.4e} rad^2/s"
    )
    return estimate
