"""
JSON and YAML writers for pipeline reports.

JSONArtifactWriter serializes report dictionaries (Floquet summary,
diagnostics, comparisons) with numpy scalars, arrays and complex numbers
converted to plain JSON types. ManifestWriter stores the resolved run
configuration as a re-runnable YAML file.

Author: ILO PNoise Team
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import yaml

from .base import BaseArtifactWriter

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy and complex values into JSON-compatible structures.

    Complex numbers become {"re": ..., "im": ...}; non-finite floats become
    the strings "inf", "-inf" or "nan".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(value.real)), "im": to_jsonable(float(value.imag))}
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return "nan"
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    return value


class JSONArtifactWriter(BaseArtifactWriter):
    """
    Writer for JSON reports.

    Attributes:
        indent (Optional[int]): Number of spaces for indentation (None for compact)
        sort_keys (bool): Whether to sort keys alphabetically
    """

    format_name = "JSON"
    default_extension = ".json"

    def __init__(self, indent: Optional[int] = 2, sort_keys: bool = False) -> None:
        self.indent = indent
        self.sort_keys = sort_keys

    def write(self, payload: Dict[str, Any], output_path: Union[str, Path]) -> Path:
        """
        Write a report dictionary.

        Args:
            payload: Report dictionary
            output_path: Target file path

        Returns:
            Path to the written file
        """
        content = json.dumps(
            to_jsonable(payload), indent=self.indent, sort_keys=self.sort_keys, ensure_ascii=False
        )
        path = Path(output_path)
        self._write_file_content(content + "\n", path)
        logger.debug(f"Wrote JSON report {path}")
        return path


class ManifestWriter(BaseArtifactWriter):
    """Writer for the YAML run manifest, preceded by a comment header."""

    format_name = "YAML"
    default_extension = ".yaml"

    def write(
        self, payload: Dict[str, Any], output_path: Union[str, Path], header: str = ""
    ) -> Path:
        """
        Write a manifest.

        Args:
            payload: Resolved configuration dictionary
            output_path: Target file path
            header: Comment lines placed before the document

        Returns:
            Path to the written file
        """
        lines = [f"# {line}" if line else "#" for line in header.splitlines()]
        body = yaml.safe_dump(to_jsonable(payload), sort_keys=False, default_flow_style=False)
        content = "\n".join(lines + [body]) if lines else body
        path = Path(output_path)
        self._write_file_content(content, path)
        logger.debug(f"Wrote manifest {path}")
        return path
