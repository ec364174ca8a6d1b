"""Phase-noise spectra: result container, tensor blocks, models, fit and diagnostics."""

from .diagnostics import DiagnosticThresholds, KurokawaDiagnostics, kurokawa_diagnostics
from .fit import StandardFormFit, standard_form, standard_form_fit
from .models import (
    cosc_pmm_spectrum,
    free_running_lorentzian,
    ilo_pmm_spectrum,
    kilo_spectrum,
    qsinus_spectrum,
)
from .result import (
    Method,
    SpectrumComparison,
    SpectrumResult,
    compare_spectra,
    from_db,
    offset_grid,
    parse_offsets,
    to_db,
)
from .tensors import (
    TensorBlocks,
    cosc_blocks,
    ilo_blocks,
    omega_tensor,
    phi_tensor,
    psi_tensor,
    sideband_weights,
    theta_tensor,
)

__all__ = [
    "DiagnosticThresholds",
    "KurokawaDiagnostics",
    "kurokawa_diagnostics",
    "StandardFormFit",
    "standard_form",
    "standard_form_fit",
    "cosc_pmm_spectrum",
    "free_running_lorentzian",
    "ilo_pmm_spectrum",
    "kilo_spectrum",
    "qsinus_spectrum",
    "Method",
    "SpectrumComparison",
    "SpectrumResult",
    "compare_spectra",
    "from_db",
    "offset_grid",
    "parse_offsets",
    "to_db",
    "TensorBlocks",
    "cosc_blocks",
    "ilo_blocks",
    "omega_tensor",
    "phi_tensor",
    "psi_tensor",
    "sideband_weights",
    "theta_tensor",
]
