"""
Spectrum Results

Container for single-sideband phase-noise spectra, offset grids, dBc
conversion and comparison of two spectra over a band.

Densities are per Hz. The closed-form models are written in angular offset
w_m, and evaluating them with w_m in rad/s yields the per-Hz density because
the w0^2 c and w_m^2 factors scale together.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..utils.exceptions import SpectrumError

logger = logging.getLogger(__name__)

DB_FLOOR = 1e-300


class Method(str, Enum):
    """Spectrum method tags."""

    COSC_PMM = "COSC-PMM"
    ILO_PMM = "ILO-PMM"
    K_ILO = "K-ILO"
    LORENTZIAN = "LORENTZIAN"
    Q_SINUS = "Q-SINUS"
    ORACLE = "ORACLE"

    @classmethod
    def from_name(cls, name: str) -> "Method":
        """Parse CLI/config spellings such as ``ilo-pmm`` or ``K-ILO``."""
        key = name.strip().upper().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise SpectrumError(
            f"Unknown spectrum method '{name}'; expected one of "
            f"{', '.join(m.value.lower() for m in cls)}"
        )

    @property
    def slug(self) -> str:
        """File-name form, e.g. ``ilo_pmm``."""
        return self.value.lower().replace("-", "_")


def to_db(density: Any) -> np.ndarray:
    """10 log10 of a density, floored at 1e-300 to keep the result finite."""
    return 10.0 * np.log10(np.maximum(np.asarray(density, dtype=float), DB_FLOOR))


def from_db(db: Any) -> np.ndarray:
    """Inverse of to_db above the floor."""
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def offset_grid(
    f_min: float = 1.0e3, f_max: float = 1.0e8, points_per_decade: int = 60
) -> np.ndarray:
    """
    Logarithmic offset-frequency grid in Hz, both ends included.

    Raises:
        SpectrumError: If the range is empty or not positive
    """
    if f_min <= 0.0 or f_max <= f_min:
        raise SpectrumError(f"Invalid offset range {f_min}..{f_max} Hz")
    if points_per_decade < 1:
        raise SpectrumError("points_per_decade must be at least 1")
    decades = np.log10(f_max / f_min)
    count = int(round(decades * points_per_decade)) + 1
    return np.logspace(np.log10(f_min), np.log10(f_max), max(count, 2))


def parse_offsets(spec: str) -> np.ndarray:
    """Parse ``min:max:ppd`` (Hz, Hz, points per decade) into a grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise SpectrumError(f"Offsets must be given as min:max:ppd, got '{spec}'")
    try:
        return offset_grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as e:
        raise SpectrumError(f"Cannot parse offsets '{spec}': {e}") from e


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    Single-sideband phase-noise spectrum on an offset grid.

    Attributes:
        offsets_hz: Offset frequencies f_m (Hz)
        density: Linear density (1/Hz), possibly negative for truncated sums
        method: Method tag
        carrier_harmonic: Carrier index nu
        rho_max: Truncation of the rho sum, if any
        p_max: Truncation of the p sums, if any
        metadata: Provenance, warnings and model parameters
    """

    offsets_hz: np.ndarray
    density: np.ndarray
    method: Method
    carrier_harmonic: int = 1
    rho_max: Optional[int] = None
    p_max: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        offsets = np.asarray(self.offsets_hz, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if offsets.shape != density.shape:
            raise SpectrumError(
                f"Offsets {offsets.shape} and density {density.shape} differ in shape"
            )
        if not np.all(np.isfinite(density)):
            raise SpectrumError(f"{self.method.value} spectrum has non-finite values")
        object.__setattr__(self, "offsets_hz", offsets)
        object.__setattr__(self, "density", density)
        negative = int(np.count_nonzero(density < 0.0))
        if negative:
            self.metadata.setdefault("negative_clamped", negative)
            logger.warning(
                f"{self.method.value}: {negative} negative densities clamped for dB conversion"
            )

    @property
    def offsets_rad_s(self) -> np.ndarray:
        return 2.0 * np.pi * self.offsets_hz

    @property
    def negative_mask(self) -> np.ndarray:
        return self.density < 0.0

    @property
    def dbc_per_hz(self) -> np.ndarray:
        return to_db(self.density)

    def to_frame(self) -> pd.DataFrame:
        """Tabular form used by the CSV writer."""
        return pd.DataFrame(
            {
                "offset_hz": self.offsets_hz,
                "offset_rad_s": self.offsets_rad_s,
                "density_per_hz": self.density,
                "dbc_per_hz": self.dbc_per_hz,
                "negative_clamped": self.negative_mask,
            }
        )

    def interpolate_db(self, offsets_hz: np.ndarray) -> np.ndarray:
        """dBc/Hz interpolated linearly in log-frequency; NaN outside the grid."""
        return np.interp(
            np.log10(offsets_hz),
            np.log10(self.offsets_hz),
            self.dbc_per_hz,
            left=np.nan,
            right=np.nan,
        )

    def band(self, f_lo: float, f_hi: float) -> "SpectrumResult":
        """Restriction to offsets within [f_lo, f_hi]."""
        keep = (self.offsets_hz >= f_lo) & (self.offsets_hz <= f_hi)
        return SpectrumResult(
            offsets_hz=self.offsets_hz[keep],
            density=self.density[keep],
            method=self.method,
            carrier_harmonic=self.carrier_harmonic,
            rho_max=self.rho_max,
            p_max=self.p_max,
            metadata=dict(self.metadata),
        )

    def summary(self) -> Dict[str, Any]:
        """Scalar description for JSON diagnostics."""
        return {
            "method": self.method.value,
            "carrier_harmonic": self.carrier_harmonic,
            "rho_max": self.rho_max,
            "p_max": self.p_max,
            "points": int(self.offsets_hz.size),
            "f_min_hz": float(self.offsets_hz.min()) if self.offsets_hz.size else None,
            "f_max_hz": float(self.offsets_hz.max()) if self.offsets_hz.size else None,
            **{k: v for k, v in self.metadata.items() if np.isscalar(v) or v is None},
        }


@dataclass(frozen=True)
class SpectrumComparison:
    """
    Deviation between two spectra over a band.

    Attributes:
        reference: Method of the first spectrum (defines the grid)
        other: Method of the second spectrum
        band_hz: (low, high) band actually compared
        max_abs_db: Largest |dB difference|
        mean_abs_db: Mean |dB difference|
        points: Number of offsets compared
    """

    reference: str
    other: str
    band_hz: Tuple[float, float]
    max_abs_db: float
    mean_abs_db: float
    points: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "reference": self.reference,
            "other": self.other,
            "band_hz": list(self.band_hz),
            "max_abs_db": self.max_abs_db,
            "mean_abs_db": self.mean_abs_db,
            "points": self.points,
        }


def compare_spectra(
    a: SpectrumResult, b: SpectrumResult, band: Optional[Sequence[float]] = None
) -> SpectrumComparison:
    """
    Compare two spectra in dB over the overlap of their grids and a band.

    The second spectrum is interpolated onto the first grid in log-frequency.

    Raises:
        SpectrumError: If no offsets fall inside the band and both grids
    """
    f = a.offsets_hz
    keep = np.ones(f.shape, dtype=bool)
    if band is not None:
        keep &= (f >= band[0]) & (f <= band[1])
    other_db = b.interpolate_db(f)
    keep &= np.isfinite(other_db)
    if not np.any(keep):
        raise SpectrumError(
            f"No common offsets between {a.method.value} and {b.method.value} in band {band}"
        )
    deviation = np.abs(a.dbc_per_hz[keep] - other_db[keep])
    return SpectrumComparison(
        reference=a.method.value,
        other=b.method.value,
        band_hz=(float(f[keep].min()), float(f[keep].max())),
        max_abs_db=float(deviation.max()),
        mean_abs_db=float(deviation.mean()),
        points=int(keep.sum()),
    )
