"""
CSV writer for pipeline artifacts.

Tables are assembled as pandas DataFrames and written with a fixed float
format so that artifacts of identical runs are byte-identical.

Author: ILO PNoise Team
"""

import io
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from ..core.floquet import FloquetDecomposition
from ..core.harmonics import HarmonicSet
from ..core.pss import PeriodicSteadyState
from ..spectrum.result import SpectrumResult
from .base import BaseArtifactWriter

logger = logging.getLogger(__name__)


class CSVArtifactWriter(BaseArtifactWriter):
    """
    Writer for tabular artifacts.

    Attributes:
        float_format (str): printf-style format of floating-point cells
    """

    format_name = "CSV"
    default_extension = ".csv"

    def __init__(self, float_format: str = "%.12e") -> None:
        self.float_format = float_format

    def write(self, payload: Union[pd.DataFrame, SpectrumResult], output_path: Union[str, Path]) -> Path:
        """
        Write a DataFrame (or a spectrum) as CSV.

        Args:
            payload: DataFrame, or SpectrumResult converted with to_frame()
            output_path: Target file path

        Returns:
            Path to the written file
        """
        frame = payload.to_frame() if isinstance(payload, SpectrumResult) else payload
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=self.float_format, lineterminator="\n")
        path = Path(output_path)
        self._write_file_content(buffer.getvalue(), path)
        logger.debug(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_pss(self, pss: PeriodicSteadyState, output_path: Union[str, Path]) -> Path:
        """Sampled orbit: t_s followed by one column per state."""
        frame = pd.DataFrame(pss.samples, columns=list(pss.state_labels))
        frame.insert(0, "t_s", pss.times)
        return self.write(frame, output_path)

    def write_harmonics(self, harmonics: HarmonicSet, output_path: Union[str, Path]) -> Path:
        """Harmonic index followed by real/imaginary parts and magnitude per state."""
        columns = {"harmonic": harmonics.harmonics}
        labels = harmonics.labels or tuple(str(i) for i in range(harmonics.coeffs.shape[1]))
        for i, label in enumerate(labels):
            coeff = harmonics.coeffs[:, i]
            columns[f"{label}_re"] = coeff.real
            columns[f"{label}_im"] = coeff.imag
            columns[f"{label}_abs"] = np.abs(coeff)
        return self.write(pd.DataFrame(columns), output_path)

    def write_lambda(
        self,
        decomp: FloquetDecomposition,
        noise_labels: Sequence[str],
        output_path: Union[str, Path],
    ) -> Path:
        """Lambda vectors over one period: t_s, then lam<i>_<source>_re/_im per mode and source."""
        n_t = decomp.lam.shape[1]
        columns = {"t_s": np.arange(n_t) * (decomp.T0 / n_t)}
        for i in range(decomp.lam.shape[0]):
            for a, label in enumerate(noise_labels):
                values = decomp.lam[i, :, a]
                columns[f"lam{i + 1}_{label}_re"] = np.real(values)
                columns[f"lam{i + 1}_{label}_im"] = np.imag(values)
        return self.write(pd.DataFrame(columns), output_path)
