"""
Circuit Models

State-space descriptions of the oscillator circuits analysed by the library:
the LC negative-resistance oscillator (primary unit), the CMOS cross-coupled
LC oscillator with a noisy tail node (secondary unit), and the unilateral
buffer that injection-locks the secondary to the primary.

Every model is an explicit ODE x' = f(x) with a constant noise matrix B whose
columns carry the source rms values already divided by the node capacitance,
so the driving sources are unit-intensity white noise. Vector fields accept
arrays of shape (..., n) so the Monte-Carlo oracle can step many paths at
once.

Author: ILO PNoise Team
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from ..utils.exceptions import ModelError, ModelEvaluationError

logger = logging.getLogger(__name__)

NodeRef = Union[int, str]


class VectorField(ABC):
    """
    Abstract autonomous vector field with an analytic Jacobian.

    Attributes:
        dimension (int): Number of states n
    """

    dimension: int = 0

    @abstractmethod
    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate f on states of shape (..., n)."""

    @abstractmethod
    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Return the n x n Jacobian at a single state."""


class LinearField(VectorField):
    """Constant-coefficient field x' = A x (test systems and OU processes)."""

    def __init__(self, matrix: np.ndarray) -> None:
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ModelError("Linear field matrix must be square", "matrix", self.matrix.shape)
        self.dimension = self.matrix.shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("ij,...j->...i", self.matrix, x)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return self.matrix.copy()


class NegativeResistanceTank(VectorField):
    """
    Parallel L-C-G tank loaded by a cubic voltage-controlled current source.

    States are (v, i_L):

        C dv/dt   = -G v - (a1 v + a3 v^3) - i_L
        L di_L/dt = v
    """

    dimension = 2

    def __init__(self, C: float, L: float, G: float, a1: float, a3: float) -> None:
        self.C = C
        self.L = L
        self.G = G
        self.a1 = a1
        self.a3 = a3

    def __call__(self, x: np.ndarray) -> np.ndarray:
        v = x[..., 0]
        i_l = x[..., 1]
        out = np.empty_like(x, dtype=float)
        out[..., 0] = (-self.G * v - (self.a1 * v + self.a3 * v * v * v) - i_l) / self.C
        out[..., 1] = v / self.L
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        v = float(x[0])
        return np.array(
            [
                [(-self.G - self.a1 - 3.0 * self.a3 * v * v) / self.C, -1.0 / self.C],
                [1.0 / self.L, 0.0],
            ]
        )


def square_law_current(
    vgs: np.ndarray, vds: np.ndarray, beta: float, vth: float, lam: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Square-law NMOS drain current with channel-length modulation.

    Saturation and triode regions join with continuous first derivatives, and
    negative vds is handled by exchanging source and drain.

    Args:
        vgs: Gate-source voltage (V)
        vds: Drain-source voltage (V)
        beta: kp * W/L (A/V^2)
        vth: Threshold voltage (V)
        lam: Channel-length modulation (1/V)

    Returns:
        Tuple of drain current (A), gm = dI/dvgs and gds = dI/dvds (S)
    """
    vgs = np.asarray(vgs, dtype=float)
    vds = np.asarray(vds, dtype=float)
    reverse = vds < 0.0
    vgs_e = np.where(reverse, vgs - vds, vgs)
    vds_e = np.abs(vds)

    vov = vgs_e - vth
    on = vov > 0.0
    sat = vds_e >= vov
    clm = 1.0 + lam * vds_e

    i_sat = 0.5 * beta * vov * vov * clm
    i_tri = beta * (vov * vds_e - 0.5 * vds_e * vds_e) * clm
    i_fwd = np.where(on, np.where(sat, i_sat, i_tri), 0.0)

    gm_fwd = np.where(on, np.where(sat, beta * vov * clm, beta * vds_e * clm), 0.0)
    gds_sat = 0.5 * beta * vov * vov * lam
    gds_tri = beta * (vov - vds_e) * clm + beta * (vov * vds_e - 0.5 * vds_e * vds_e) * lam
    gds_fwd = np.where(on, np.where(sat, gds_sat, gds_tri), 0.0)

    current = np.where(reverse, -i_fwd, i_fwd)
    gm = np.where(reverse, -gm_fwd, gm_fwd)
    gds = np.where(reverse, gm_fwd + gds_fwd, gds_fwd)
    return current, gm, gds


class CrossCoupledPair(VectorField):
    """
    CMOS cross-coupled pair driving a differential LC tank, with a tail node.

    States are (v_d, i_L, v_cg): differential tank voltage, tank inductor
    current and the common-ground (tail) node voltage. The drains sit at
    VDD +/- v_d/2 and each gate is tied to the opposite drain:

        C    dv_d/dt  = -G v_d - i_L - (i_d1 - i_d2)/2
        L    di_L/dt  = v_d
        C_cg dv_cg/dt = i_d1 + i_d2 - I_tail
    """

    dimension = 3

    def __init__(
        self,
        C: float,
        L: float,
        G: float,
        vth0: float,
        lam: float,
        beta: float,
        vdd: float,
        i_tail: float,
        c_cg: float,
    ) -> None:
        self.C = C
        self.L = L
        self.G = G
        self.vth0 = vth0
        self.lam = lam
        self.beta = beta
        self.vdd = vdd
        self.i_tail = i_tail
        self.c_cg = c_cg

    def _devices(self, x: np.ndarray) -> Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]:
        v = x[..., 0]
        vcg = x[..., 2]
        vd1 = self.vdd + 0.5 * v
        vd2 = self.vdd - 0.5 * v
        dev1 = square_law_current(vd2 - vcg, vd1 - vcg, self.beta, self.vth0, self.lam)
        dev2 = square_law_current(vd1 - vcg, vd2 - vcg, self.beta, self.vth0, self.lam)
        return dev1, dev2

    def __call__(self, x: np.ndarray) -> np.ndarray:
        (i1, _, _), (i2, _, _) = self._devices(x)
        v = x[..., 0]
        i_l = x[..., 1]
        out = np.empty_like(x, dtype=float)
        out[..., 0] = (-self.G * v - i_l - 0.5 * (i1 - i2)) / self.C
        out[..., 1] = v / self.L
        out[..., 2] = (i1 + i2 - self.i_tail) / self.c_cg
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        (_, gm1, gds1), (_, gm2, gds2) = self._devices(np.asarray(x, dtype=float))
        gm1, gds1, gm2, gds2 = float(gm1), float(gds1), float(gm2), float(gds2)
        di1_dv = -0.5 * gm1 + 0.5 * gds1
        di2_dv = 0.5 * gm2 - 0.5 * gds2
        di1_dcg = -gm1 - gds1
        di2_dcg = -gm2 - gds2
        return np.array(
            [
                [(-self.G - 0.5 * (di1_dv - di2_dv)) / self.C, -1.0 / self.C,
                 -0.5 * (di1_dcg - di2_dcg) / self.C],
                [1.0 / self.L, 0.0, 0.0],
                [(di1_dv + di2_dv) / self.c_cg, 0.0, (di1_dcg + di2_dcg) / self.c_cg],
            ]
        )

    def bias_point(self) -> float:
        """
        Solve the quiescent tail-node voltage where both devices share I_tail.

        Returns:
            v_cg at v_d = 0 (V)

        Raises:
            ModelError: If the pair cannot conduct the tail current
        """

        def excess(vcg: float) -> float:
            vgs = self.vdd - vcg
            i, _, _ = square_law_current(vgs, vgs, self.beta, self.vth0, self.lam)
            return 2.0 * float(i) - self.i_tail

        upper = self.vdd - self.vth0
        lower = upper - 10.0 * max(self.vdd, 1.0)
        if excess(lower) <= 0.0:
            raise ModelError(
                "Cross-coupled pair cannot conduct the configured tail current",
                "i_tail",
                self.i_tail,
            )
        return float(brentq(excess, lower, upper, xtol=1e-15, rtol=1e-14))


@dataclass(frozen=True)
class BufferCoupling:
    """
    Unilateral buffer between primary and secondary oscillators.

    The buffer injects i_inj = sum_k g_c[k] * v_in^k into the charge balance
    of the secondary output node.

    Attributes:
        g_c: Polynomial coefficients (A, A/V, A/V^2, A/V^3)
        input_node: Primary state (index or label) sensed by the buffer
        output_node: Secondary state (index or label) receiving the current
    """

    g_c: Tuple[float, float, float, float] = (0.0, 35.0e-6, 0.0, 0.0)
    input_node: NodeRef = "v"
    output_node: NodeRef = "v_d"

    def __post_init__(self) -> None:
        coeffs = tuple(float(g) for g in self.g_c)
        if len(coeffs) != 4:
            raise ModelError("Buffer polynomial needs exactly four coefficients", "g_c", coeffs)
        object.__setattr__(self, "g_c", coeffs)

    def current(self, v_in: np.ndarray) -> np.ndarray:
        """Buffer output current for input voltage v_in (A)."""
        g0, g1, g2, g3 = self.g_c
        return g0 + v_in * (g1 + v_in * (g2 + v_in * g3))

    def transconductance(self, v_in: float) -> float:
        """Derivative d i_inj / d v_in (S)."""
        _, g1, g2, g3 = self.g_c
        return g1 + v_in * (2.0 * g2 + 3.0 * g3 * v_in)


class InjectionCoupledField(VectorField):
    """Primary and secondary fields stacked, with buffer injection into the secondary."""

    def __init__(
        self,
        primary: VectorField,
        secondary: VectorField,
        coupling: BufferCoupling,
        input_index: int,
        output_index: int,
        output_capacitance: float,
    ) -> None:
        self.primary = primary
        self.secondary = secondary
        self.coupling = coupling
        self.n_primary = primary.dimension
        self.dimension = primary.dimension + secondary.dimension
        self.input_index = input_index
        self.output_index = output_index
        self.output_capacitance = output_capacitance

    def __call__(self, x: np.ndarray) -> np.ndarray:
        xp = x[..., : self.n_primary]
        xs = x[..., self.n_primary :]
        fs = self.secondary(xs)
        fs[..., self.output_index] += (
            self.coupling.current(xp[..., self.input_index]) / self.output_capacitance
        )
        return np.concatenate([self.primary(xp), fs], axis=-1)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n_p = self.n_primary
        jac = np.zeros((self.dimension, self.dimension))
        jac[:n_p, :n_p] = self.primary.jacobian(x[:n_p])
        jac[n_p:, n_p:] = self.secondary.jacobian(x[n_p:])
        jac[n_p + self.output_index, self.input_index] = (
            self.coupling.transconductance(float(x[self.input_index])) / self.output_capacitance
        )
        return jac


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """
    Autonomous circuit ODE with additive white-noise injection.

    Attributes:
        name: Model name used in logs and artifacts
        field: Vector field f with analytic Jacobian
        noise_matrix: Constant n x p matrix B (unit-intensity sources)
        state_labels: Node / branch names, one per state
        noise_labels: Source names, one per column of B
        node_capacitance: Capacitance (F) of nodes that accept injected current
        initial_state: Small perturbation of the equilibrium used for ring-up
        frequency_hint: Linear-tank oscillation frequency (Hz)
        observation_index: Default observation node q
        primary_dimension: Leading states of the driving unit in a unilateral assembly
    """

    name: str
    field: VectorField
    noise_matrix: np.ndarray
    state_labels: Tuple[str, ...]
    noise_labels: Tuple[str, ...]
    node_capacitance: Mapping[str, float] = field(default_factory=dict)
    initial_state: Optional[np.ndarray] = None
    frequency_hint: Optional[float] = None
    observation_index: int = 0
    primary_dimension: Optional[int] = None

    def __post_init__(self) -> None:
        B = np.atleast_2d(np.asarray(self.noise_matrix, dtype=float))
        if B.shape[0] != self.field.dimension:
            raise ModelError(
                f"Noise matrix has {B.shape[0]} rows for {self.field.dimension} states",
                "noise_matrix",
                B.shape,
            )
        if len(self.state_labels) != self.field.dimension:
            raise ModelError("One state label per state is required", "state_labels")
        if len(self.noise_labels) != B.shape[1]:
            raise ModelError("One noise label per noise column is required", "noise_labels")
        if not 0 <= self.observation_index < self.field.dimension:
            raise ModelError(
                "Observation node index out of range", "observation_index", self.observation_index
            )
        B.setflags(write=False)
        object.__setattr__(self, "noise_matrix", B)
        x0 = self.initial_state
        x0 = np.zeros(self.field.dimension) if x0 is None else np.asarray(x0, dtype=float)
        object.__setattr__(self, "initial_state", x0)

    @property
    def n(self) -> int:
        """State dimension."""
        return self.field.dimension

    @property
    def p(self) -> int:
        """Number of noise sources."""
        return self.noise_matrix.shape[1]

    def f(self, x: np.ndarray) -> np.ndarray:
        """Vector field at x (shape (..., n))."""
        return self.field(x)

    def jac(self, x: np.ndarray) -> np.ndarray:
        """Jacobian at a single state."""
        return self.field.jacobian(x)

    def B(self, x: Optional[np.ndarray] = None) -> np.ndarray:
        """Noise modulation matrix; constant for every bundled circuit."""
        return self.noise_matrix

    def index_of(self, node: NodeRef) -> int:
        """
        Resolve a state label or index.

        Raises:
            ModelError: If the node is unknown or out of range
        """
        if isinstance(node, str):
            try:
                return self.state_labels.index(node)
            except ValueError:
                raise ModelError(
                    f"Unknown state '{node}' in model {self.name}; "
                    f"available: {', '.join(self.state_labels)}",
                    "node",
                    node,
                ) from None
        if not 0 <= int(node) < self.n:
            raise ModelError(f"State index {node} out of range for {self.name}", "node", node)
        return int(node)

    def with_noise_scale(self, factor: float) -> "StateSpaceModel":
        """Return a copy with every noise column multiplied by factor."""
        return replace(self, noise_matrix=self.noise_matrix * factor)

    def with_observation(self, node: NodeRef) -> "StateSpaceModel":
        """Return a copy observing a different node."""
        return replace(self, observation_index=self.index_of(node))


def eval_vector_field(model: StateSpaceModel, x: np.ndarray) -> np.ndarray:
    """
    Evaluate the model vector field with input and output validation.

    Args:
        model: State-space model
        x: State vector of length n

    Returns:
        f(x)

    Raises:
        ModelError: If x has the wrong length or non-finite entries
        ModelEvaluationError: If an equation returns a non-finite value
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise ModelError(f"State must have length {model.n}, got shape {x.shape}", "x", x.shape)
    if not np.all(np.isfinite(x)):
        raise ModelError("State contains non-finite entries", "x")
    with np.errstate(over="ignore", invalid="ignore"):
        dx = model.f(x)
    bad = np.flatnonzero(~np.isfinite(dx))
    if bad.size:
        k = int(bad[0])
        raise ModelEvaluationError(
            f"State equation {k} ({model.state_labels[k]}) of {model.name} overflowed",
            equation=k,
            state_label=model.state_labels[k],
            context=model.name,
        )
    return dx


def finite_difference_jacobian(
    model: StateSpaceModel, x: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central-difference Jacobian with steps step * (1 + |x_i|)."""
    x = np.asarray(x, dtype=float)
    jac = np.empty((model.n, model.n))
    for i in range(model.n):
        h = step * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (model.f(xp) - model.f(xm)) / (2.0 * h)
    return jac


def check_jacobian(model: StateSpaceModel, x: np.ndarray, step: float = 1e-6) -> float:
    """
    Compare the analytic Jacobian with central differences.

    Column j is compared through the directional change it predicts for f,
    (1 + |x_j|) |J_ij - J~_ij|, and divided by a per-row scale
    sum_j |J_ij| (1 + |x_j|) + |f_i(x)| + 1 in the units of equation i.

    This differs from a single ||f(x)|| + 1 denominator shared by every
    entry. ||f|| mixes volts per second with amperes per second and is
    dominated by the capacitor rows (around 1e10 on the bundled tanks): a
    1e-4 relative error in a 1/L entry would then read as 1e-7, and at
    x = 0 entries of order 1/C would be compared against 1.

    Args:
        model: State-space model
        x: State at which to compare
        step: Relative finite-difference step

    Returns:
        Largest scaled discrepancy
    """
    x = np.asarray(x, dtype=float)
    analytic = model.jac(x)
    numeric = finite_difference_jacobian(model, x, step)
    state_scale = 1.0 + np.abs(x)
    row_scale = np.abs(analytic) @ state_scale + np.abs(model.f(x)) + 1.0
    err = np.abs(analytic - numeric) * state_scale[None, :] / row_scale[:, None]
    return float(err.max())


@dataclass
class PrimaryOscillatorParams:
    """
    LC negative-resistance oscillator parameters (SI units).

    ``L`` may be left unset, in which case it is derived from ``f0`` and ``C``.
    """

    C: float = 0.3035e-12
    L: Optional[float] = None
    f0: float = 900.9e6
    G: float = 0.8e-3
    a1: float = -1.0e-3
    a3: float = 100.0e-6
    w_rms: float = 1.0e-12

    @property
    def inductance(self) -> float:
        return self.L if self.L is not None else tank_inductance(self.f0, self.C)


@dataclass
class SecondaryOscillatorParams:
    """CMOS cross-coupled LC oscillator parameters (SI units)."""

    C: float = 0.3e-12
    L: Optional[float] = None
    f0: float = 892.86e6
    G: float = 1.0e-3
    vth0: float = 0.5
    lam: float = 0.05
    kp: float = 120.0e-6
    w_over_l: float = 100.0
    vdd: float = 1.8
    i_tail: float = 1.0e-3
    c_cg: float = 2.0e-12
    n_rms: float = 70.7e-12

    @property
    def inductance(self) -> float:
        return self.L if self.L is not None else tank_inductance(self.f0, self.C)


def tank_inductance(f0: float, C: float) -> float:
    """
    Inductance resonating with C at f0, L = 1/((2 pi f0)^2 C).

    Raises:
        ModelError: If f0 or C is not positive
    """
    if f0 is None or f0 <= 0.0:
        raise ModelError("Oscillation frequency target must be positive", "f0", f0)
    if C <= 0.0:
        raise ModelError("Tank capacitance must be positive", "C", C)
    return 1.0 / ((2.0 * np.pi * f0) ** 2 * C)


def _require_positive(**values: Optional[float]) -> None:
    for name, value in values.items():
        if value is None or not np.isfinite(value) or value <= 0.0:
            raise ModelError(f"Parameter '{name}' must be positive, got {value}", name, value)


def _coerce(params: Any, cls: type) -> Any:
    if params is None:
        return cls()
    if isinstance(params, cls):
        return params
    known = {f.name for f in fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ModelError(
            f"Unknown {cls.__name__} parameters: {', '.join(sorted(unknown))}",
            "params",
            sorted(unknown),
        )
    return cls(**dict(params))


def build_primary_oscillator(
    params: Optional[Union[PrimaryOscillatorParams, Mapping[str, Any]]] = None,
) -> StateSpaceModel:
    """
    Build the LC negative-resistance oscillator (OSC1).

    Args:
        params: Parameter dataclass or mapping of overrides

    Returns:
        Two-state model with one tank noise source ``w``

    Raises:
        ModelError: For nonpositive L, C or frequency target
    """
    prm = _coerce(params, PrimaryOscillatorParams)
    L = prm.inductance
    _require_positive(C=prm.C, L=L)
    if prm.L is None:
        _require_positive(f0=prm.f0)
    if prm.G < 0.0 or prm.w_rms < 0.0:
        raise ModelError("Loss conductance and noise rms must be nonnegative", "G", prm.G)
    if -prm.a1 <= prm.G:
        logger.warning(
            f"Negative conductance |a1|={-prm.a1:.3g} S does not exceed loss G={prm.G:.3g} S; "
            "the tank will not start"
        )

    tank = NegativeResistanceTank(C=prm.C, L=L, G=prm.G, a1=prm.a1, a3=prm.a3)
    f_lin = 1.0 / (2.0 * np.pi * np.sqrt(L * prm.C))
    amplitude = np.sqrt(max(4.0 * (-prm.a1 - prm.G) / (3.0 * prm.a3), 0.0)) if prm.a3 > 0 else 1.0
    kick = np.array([1e-2 * max(amplitude, 1e-3), 0.0])
    B = np.array([[prm.w_rms / prm.C], [0.0]])

    logger.debug(f"OSC1: L={L:.4e} H, linear f0={f_lin:.6e} Hz, amplitude estimate {amplitude:.3f} V")
    return StateSpaceModel(
        name="osc1",
        field=tank,
        noise_matrix=B,
        state_labels=("v", "i_L"),
        noise_labels=("w",),
        node_capacitance={"v": prm.C},
        initial_state=kick,
        frequency_hint=f_lin,
    )


def build_secondary_oscillator(
    params: Optional[Union[SecondaryOscillatorParams, Mapping[str, Any]]] = None,
) -> StateSpaceModel:
    """
    Build the CMOS cross-coupled LC oscillator (OSC2).

    Args:
        params: Parameter dataclass or mapping of overrides

    Returns:
        Three-state model with one tail-node noise source ``n``

    Raises:
        ModelError: For nonpositive L, C, C_cg, tail current or frequency target
    """
    prm = _coerce(params, SecondaryOscillatorParams)
    L = prm.inductance
    _require_positive(C=prm.C, L=L, c_cg=prm.c_cg, i_tail=prm.i_tail, kp=prm.kp,
                      w_over_l=prm.w_over_l, vdd=prm.vdd)
    if prm.L is None:
        _require_positive(f0=prm.f0)
    if prm.G < 0.0 or prm.n_rms < 0.0:
        raise ModelError("Loss conductance and noise rms must be nonnegative", "G", prm.G)

    pair = CrossCoupledPair(
        C=prm.C,
        L=L,
        G=prm.G,
        vth0=prm.vth0,
        lam=prm.lam,
        beta=prm.kp * prm.w_over_l,
        vdd=prm.vdd,
        i_tail=prm.i_tail,
        c_cg=prm.c_cg,
    )
    vcg = pair.bias_point()
    f_lin = 1.0 / (2.0 * np.pi * np.sqrt(L * prm.C))
    B = np.array([[0.0], [0.0], [prm.n_rms / prm.c_cg]])

    logger.debug(f"OSC2: L={L:.4e} H, linear f0={f_lin:.6e} Hz, tail bias {vcg:.4f} V")
    return StateSpaceModel(
        name="osc2",
        field=pair,
        noise_matrix=B,
        state_labels=("v_d", "i_L", "v_cg"),
        noise_labels=("n",),
        node_capacitance={"v_d": prm.C, "v_cg": prm.c_cg},
        initial_state=np.array([1e-2, 0.0, vcg]),
        frequency_hint=f_lin,
    )


def build_reference_circuits(
    params: Optional[Mapping[str, Any]] = None,
) -> Tuple[StateSpaceModel, StateSpaceModel]:
    """
    Build the primary (OSC1) and secondary (OSC2) reference oscillators.

    Args:
        params: Optional mapping with ``primary`` and ``secondary`` override mappings

    Returns:
        Tuple (osc1, osc2)
    """
    params = dict(params or {})
    unknown = set(params) - {"primary", "secondary"}
    if unknown:
        raise ModelError(f"Unknown circuit sections: {', '.join(sorted(unknown))}", "params")
    return (
        build_primary_oscillator(params.get("primary")),
        build_secondary_oscillator(params.get("secondary")),
    )


def assemble_ilo(
    p: StateSpaceModel,
    s: StateSpaceModel,
    c: BufferCoupling,
    q: NodeRef = "s.v_d",
) -> StateSpaceModel:
    """
    Couple a secondary oscillator to a primary through a unilateral buffer.

    The buffer current is added to the charge balance of the secondary output
    node, i.e. divided by that node's capacitance. Primary equations are left
    untouched. Combined labels are prefixed ``p.`` and ``s.``.

    Args:
        p: Primary (driving) oscillator
        s: Secondary (locked) oscillator
        c: Buffer coupling
        q: Observation node of the combined model (index or prefixed label)

    Returns:
        Combined model of dimension n_P + n_S with p_P + p_S noise sources

    Raises:
        ModelError: If a node index is out of range or the output node is not capacitive
    """
    input_index = p.index_of(c.input_node)
    output_index = s.index_of(c.output_node)
    output_label = s.state_labels[output_index]
    if output_label not in s.node_capacitance:
        raise ModelError(
            f"Secondary state '{output_label}' is not a capacitive node and cannot take "
            "injected current",
            "output_node",
            c.output_node,
        )

    field_ = InjectionCoupledField(
        primary=p.field,
        secondary=s.field,
        coupling=c,
        input_index=input_index,
        output_index=output_index,
        output_capacitance=s.node_capacitance[output_label],
    )
    B = np.zeros((p.n + s.n, p.p + s.p))
    B[: p.n, : p.p] = p.noise_matrix
    B[p.n :, p.p :] = s.noise_matrix

    labels = tuple(f"p.{lbl}" for lbl in p.state_labels) + tuple(
        f"s.{lbl}" for lbl in s.state_labels
    )
    if isinstance(q, str):
        if q not in labels:
            raise ModelError(f"Unknown observation node '{q}'", "observation_node", q)
        q_index = labels.index(q)
    else:
        q_index = int(q)
        if not 0 <= q_index < len(labels):
            raise ModelError(f"Observation index {q} out of range", "observation_node", q)

    capacitance: Dict[str, float] = {f"p.{k}": v for k, v in p.node_capacitance.items()}
    capacitance.update({f"s.{k}": v for k, v in s.node_capacitance.items()})

    logger.debug(
        f"Assembled ILO: {p.state_labels[input_index]} -> {output_label}, g_c={c.g_c}, "
        f"observing {labels[q_index]}"
    )
    return StateSpaceModel(
        name=f"ilo({p.name}->{s.name})",
        field=field_,
        noise_matrix=B,
        state_labels=labels,
        noise_labels=tuple(f"p.{lbl}" for lbl in p.noise_labels)
        + tuple(f"s.{lbl}" for lbl in s.noise_labels),
        node_capacitance=capacitance,
        initial_state=np.concatenate([p.initial_state, s.initial_state]),
        frequency_hint=p.frequency_hint,
        observation_index=q_index,
        primary_dimension=p.n,
    )


def linear_model(
    matrix: Sequence[Sequence[float]],
    noise: Optional[Sequence[Sequence[float]]] = None,
    name: str = "linear",
    initial_state: Optional[Sequence[float]] = None,
) -> StateSpaceModel:
    """
    Build a constant-coefficient model x' = A x + B xi.

    Args:
        matrix: n x n system matrix A
        noise: Optional n x p noise matrix (zero column if None)
        name: Model name
        initial_state: Optional starting state

    Returns:
        StateSpaceModel wrapping a LinearField
    """
    field_ = LinearField(np.asarray(matrix, dtype=float))
    n = field_.dimension
    B = np.zeros((n, 1)) if noise is None else np.asarray(noise, dtype=float).reshape(n, -1)
    return StateSpaceModel(
        name=name,
        field=field_,
        noise_matrix=B,
        state_labels=tuple(f"x{i + 1}" for i in range(n)),
        noise_labels=tuple(f"xi{j + 1}" for j in range(B.shape[1])),
        initial_state=None if initial_state is None else np.asarray(initial_state, dtype=float),
    )


def params_as_dict(params: Any) -> Dict[str, Any]:
    """Plain dictionary of a parameter dataclass (for manifests and logs)."""
    return asdict(params)
