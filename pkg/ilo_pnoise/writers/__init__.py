"""
Artifact writers for pipeline results.

This module contains writers that save periodic steady states, Floquet
data, spectra and reports to CSV, JSON and YAML files.
"""

from .base import BaseArtifactWriter
from .csv_writer import CSVArtifactWriter
from .json_writer import JSONArtifactWriter, ManifestWriter, to_jsonable

__all__ = [
    "BaseArtifactWriter",
    "CSVArtifactWriter",
    "JSONArtifactWriter",
    "ManifestWriter",
    "to_jsonable",
]
