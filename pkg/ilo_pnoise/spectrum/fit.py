"""
Standard-Form Fit

Least-squares fit of a spectrum to the single-pole standard form

    L(w_m) = (W^2 L_P(w_m) + N_S) / (w_m^2 + W^2)

with pole W = Omega_3dB (rad/s) and secondary floor N_S, performed on dB
values over log-spaced offsets.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy.optimize import least_squares

from ..utils.exceptions import PoorFit, SpectrumError
from .result import SpectrumResult, to_db

logger = logging.getLogger(__name__)

RESIDUAL_LIMIT_DB = 3.0


@dataclass(frozen=True)
class StandardFormFit:
    """
    Result of the standard-form fit.

    Attributes:
        omega_3db: Fitted pole (rad/s)
        n_s: Fitted secondary floor (1/Hz * (rad/s)^2)
        residual_db: RMS residual over the fitted offsets (dB)
        points: Number of offsets used
        success: Optimizer success flag
    """

    omega_3db: float
    n_s: float
    residual_db: float
    points: int
    success: bool = True

    @property
    def f_3db(self) -> float:
        return self.omega_3db / (2.0 * np.pi)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "omega_3db_rad_s": self.omega_3db,
            "f_3db_hz": self.f_3db,
            "n_s": self.n_s,
            "residual_db": self.residual_db,
            "points": self.points,
            "success": self.success,
        }


def standard_form(omega_m: np.ndarray, lp: np.ndarray, omega_3db: float, n_s: float) -> np.ndarray:
    """Evaluate the standard form on angular offsets."""
    return (omega_3db**2 * lp + n_s) / (omega_m**2 + omega_3db**2)


def standard_form_fit(
    spectrum: SpectrumResult,
    L_P: Union[SpectrumResult, np.ndarray],
    residual_limit_db: Optional[float] = RESIDUAL_LIMIT_DB,
    starts: int = 7,
) -> StandardFormFit:
    """
    Fit Omega_3dB and N_S to a spectrum.

    Several starting poles spread log-uniformly over the offset range are
    tried and the lowest-cost solution is kept.

    Args:
        spectrum: Spectrum to fit, spanning at least two decades
        L_P: Free-running primary spectrum on the same grid (or a SpectrumResult)
        residual_limit_db: RMS residual above which PoorFit is raised (None disables)
        starts: Number of starting poles

    Returns:
        StandardFormFit

    Raises:
        SpectrumError: If the grid spans less than two decades
        PoorFit: If the RMS residual exceeds the limit (the fit is attached)
    """
    f = spectrum.offsets_hz
    positive = spectrum.density > 0.0
    if positive.sum() < 4 or np.log10(f[positive].max() / f[positive].min()) < 2.0 - 1e-9:
        raise SpectrumError("Standard-form fit needs a spectrum spanning at least two decades")
    f = f[positive]
    data_db = to_db(spectrum.density[positive])
    w = 2.0 * np.pi * f
    if isinstance(L_P, SpectrumResult):
        lp = 10.0 ** (L_P.interpolate_db(f) / 10.0)
        lp = np.where(np.isfinite(lp), lp, 0.0)
    else:
        lp = np.asarray(L_P, dtype=float)[positive]

    def residuals(theta: np.ndarray) -> np.ndarray:
        omega_3db, n_s = np.exp(theta)
        return to_db(standard_form(w, lp, omega_3db, n_s)) - data_db

    best = None
    for log_pole in np.linspace(np.log(w.min()), np.log(w.max()), starts):
        pole = np.exp(log_pole)
        floor = max(float(np.median(spectrum.density[positive] * (w**2 + pole**2))), 1e-300)
        try:
            sol = least_squares(residuals, x0=np.array([log_pole, np.log(floor)]), method="lm",
                                xtol=1e-12, ftol=1e-12)
        except (ValueError, FloatingPointError) as e:
            logger.debug(f"Standard-form start at {pole:.3e} rad/s failed: {e}")
            continue
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None:
        raise SpectrumError("Standard-form fit failed from every starting point")

    omega_3db, n_s = np.exp(best.x)
    rms = float(np.sqrt(np.mean(best.fun**2)))
    fit = StandardFormFit(
        omega_3db=float(omega_3db),
        n_s=float(n_s),
        residual_db=rms,
        points=int(f.size),
        success=bool(best.success),
    )
    logger.info(
        f"Standard form of {spectrum.method.value}: Omega_3dB={fit.omega_3db:.4e} rad/s, "
        f"N_S={fit.n_s:.4e}, residual {rms:.2f} dB"
    )
    if residual_limit_db is not None and rms > residual_limit_db:
        raise PoorFit(
            f"Standard form does not describe the {spectrum.method.value} spectrum "
            f"(residual {rms:.2f} dB > {residual_limit_db:.2f} dB)",
            residual_db=rms,
            fit=fit,
        )
    return fit
