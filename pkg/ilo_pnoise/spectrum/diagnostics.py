"""
Kurokawa Validity Diagnostics

Checks whether the near-sinusoidal (Kurokawa) reduced model can describe a
locked ensemble. Three conditions break it:

1. the zero mode's lambda vector has a DC component
2. the second mode's lambda vector carries energy outside harmonics +-1
3. the primary noise drive w0^2 c is comparable to |mu2|

A separate margin reports |mu2| / (2 w0^2 c), evaluated from the actual
second multiplier.

Author: ILO PNoise Team
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.floquet import ModeHarmonics

logger = logging.getLogger(__name__)

VALID = "Q-SINUS-VALID"
VIOLATION = "VIOLATION"


@dataclass
class DiagnosticThresholds:
    """
    Thresholds of the validity conditions.

    Attributes:
        dc_ratio: Limit on |Lambda_{1,0}| / |Lambda_{1,1}|
        offband_ratio: Limit on the off-band energy share of Lambda_2
        drive_ratio: Limit on w0^2 c / |mu2|
        margin: Minimum |mu2| / (2 w0^2 c) reported as satisfied
    """

    dc_ratio: float = 0.05
    offband_ratio: float = 0.1
    drive_ratio: float = 1e-2
    margin: float = 100.0


@dataclass
class KurokawaDiagnostics:
    """
    Validity report of the reduced model.

    Attributes:
        dc_ratio_lambda1: |Lambda_{1,0}| / |Lambda_{1,1}|
        offband_ratio_lambda2: Energy of Lambda_{2,i}, i != +-1, over the total
        drive_ratio: w0^2 c / |mu2|
        margin: (-ln(iota_2) / 2 pi) / (4 pi c / T0), equal to |mu2| / (2 w0^2 c)
        margin_satisfied: margin at or above its threshold
        verdict: Q-SINUS-VALID or VIOLATION
        violations: Numbers of the violated conditions
        thresholds: Thresholds used
    """

    dc_ratio_lambda1: float
    offband_ratio_lambda2: float
    drive_ratio: float
    margin: float
    margin_satisfied: bool
    verdict: str
    violations: List[int] = field(default_factory=list)
    thresholds: DiagnosticThresholds = field(default_factory=DiagnosticThresholds)

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("dc_ratio_lambda1", "offband_ratio_lambda2", "drive_ratio", "margin"):
            if not np.isfinite(data[key]):
                data[key] = None if np.isnan(data[key]) else "inf"
        return data


def kurokawa_diagnostics(
    h: ModeHarmonics, thresholds: Optional[DiagnosticThresholds] = None
) -> KurokawaDiagnostics:
    """
    Evaluate the three validity conditions and the multiplier margin.

    Args:
        h: Mode harmonics with two retained modes
        thresholds: Condition thresholds (defaults if None)

    Returns:
        KurokawaDiagnostics; the verdict is VIOLATION iff a ratio exceeds its threshold
    """
    thresholds = thresholds or DiagnosticThresholds()

    dc = float(np.linalg.norm(h.lam(1, 0)))
    fundamental = float(np.linalg.norm(h.lam(1, 1)))
    if fundamental > 0.0:
        dc_ratio = dc / fundamental
    else:
        dc_ratio = 0.0 if dc == 0.0 else float("inf")

    power = np.sum(np.abs(h.Lam[1]) ** 2, axis=1) if h.n_modes > 1 else np.zeros(1)
    total = float(power.sum())
    nh = h.n_harmonics
    inband = float(power[nh - 1] + power[nh + 1]) if nh >= 1 else 0.0
    offband_ratio = (total - inband) / total if total > 0.0 else 0.0

    mu2 = abs(complex(h.mu[1]).real) if h.n_modes > 1 else 0.0
    drive = h.omega0**2 * h.c
    if drive == 0.0:
        drive_ratio = 0.0
    else:
        drive_ratio = drive / mu2 if mu2 > 0.0 else float("inf")

    # (-ln(iota_2) / 2 pi) / (4 pi c / T0) with iota_2 = exp(-|mu2| T0)
    T0 = 2.0 * np.pi / h.omega0
    lhs = mu2 * T0 / (2.0 * np.pi)
    rhs = 4.0 * np.pi * h.c / T0
    margin = lhs / rhs if rhs > 0.0 else float("inf")

    violations = []
    if dc_ratio > thresholds.dc_ratio:
        violations.append(1)
    if offband_ratio > thresholds.offband_ratio:
        violations.append(2)
    if drive_ratio > thresholds.drive_ratio:
        violations.append(3)
    verdict = VIOLATION if violations else VALID

    report = KurokawaDiagnostics(
        dc_ratio_lambda1=dc_ratio,
        offband_ratio_lambda2=offband_ratio,
        drive_ratio=drive_ratio,
        margin=margin,
        margin_satisfied=bool(margin >= thresholds.margin),
        verdict=verdict,
        violations=violations,
        thresholds=thresholds,
    )
    if violations:
        logger.info(f"Kurokawa diagnostics: {verdict} on condition(s) {violations}")
    else:
        logger.info(f"Kurokawa diagnostics: {verdict} (margin {margin:.3e})")
    return report
