"""
Configuration Management Package

Handles YAML run-configuration loading, bundled scenarios, environment and
point overrides, and Pydantic-based validation schemas.

Author: ILO PNoise Team
"""

from .loader import (
    ConfigError,
    ConfigLoader,
    apply_overrides,
    list_scenarios,
    resolve_point,
    set_dotted,
)
from .schemas import PointConfig, RunConfig
from .templates import generate_config_template

__all__ = [
    "ConfigError",
    "ConfigLoader",
    "apply_overrides",
    "list_scenarios",
    "resolve_point",
    "set_dotted",
    "PointConfig",
    "RunConfig",
    "generate_config_template",
]
