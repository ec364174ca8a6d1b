"""
Base classes and interfaces for artifact writers.

This module defines the abstract base class that all artifact writers must
implement. Writers serialize pipeline results (periodic steady states,
Floquet data, spectra, comparison reports, run manifests) into files
under a point's output directory.

Author: ILO PNoise Team
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Union

from ..utils.exceptions import ArtifactWriteError


class BaseArtifactWriter(ABC):
    """
    Abstract base class for all artifact writers.

    Attributes:
        format_name (str): Human-readable name of the format this writer handles
        default_extension (str): Default file extension for this format
    """

    format_name: str = "Unknown"
    default_extension: str = ""

    @abstractmethod
    def write(self, payload: Any, output_path: Union[str, Path]) -> Path:
        """
        Write a payload to a file.

        Args:
            payload: Object to serialize
            output_path: Target file path

        Returns:
            Path to the written file

        Raises:
            ArtifactWriteError: If the file cannot be written
        """

    def resolve_path(self, directory: Union[str, Path], name: str) -> Path:
        """
        Build an artifact path inside a directory.

        Args:
            directory: Output directory
            name: File name, with or without this writer's extension

        Returns:
            Path carrying the default extension
        """
        path = Path(directory) / name
        if self.default_extension and path.suffix.lower() != self.default_extension:
            path = path.with_name(path.name + self.default_extension)
        return path

    def _write_file_content(
        self, content: str, file_path: Union[str, Path], encoding: str = "utf-8"
    ) -> None:
        """
        Write content to a file with proper error handling.

        Args:
            content: Content to write
            file_path: Path to write to
            encoding: Character encoding to use

        Raises:
            ArtifactWriteError: If the file cannot be written
        """
        try:
            Path(file_path).parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, "w", encoding=encoding, newline="") as f:
                f.write(content)
        except OSError as e:
            raise ArtifactWriteError(
                f"Cannot write {self.format_name} artifact: {e}",
                file_path=str(file_path),
                system_error=str(e),
            ) from e
