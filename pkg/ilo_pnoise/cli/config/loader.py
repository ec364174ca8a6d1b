"""
Configuration Loader

Handles YAML run-configuration discovery, bundled scenarios, environment
variable overrides, dotted-key point overrides and validation against the
Pydantic schemas.

Author: ILO PNoise Team
"""

import copy
import logging
import os
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel

from .schemas import PointConfig, RunConfig

console = Console(stderr=True)
logger = logging.getLogger(__name__)

SCENARIO_PACKAGE = "ilo_pnoise.cli.scenarios"
DEFAULT_ENV_PREFIX = "ILO_PNOISE_"


class ConfigError(Exception):
    """Custom exception for configuration-related errors."""


def format_validation_error(error: ValidationError) -> str:
    """Render pydantic errors as 'loc -> msg' lines."""
    lines = []
    for item in error.errors():
        path = " -> ".join(str(x) for x in item["loc"]) if item["loc"] else "root"
        lines.append(f"  {path}: {item['msg']}")
    return "\n".join(lines)


def set_dotted(data: Dict[str, Any], key: str, value: Any) -> None:
    """
    Set a nested value addressed by a dotted key, creating sections as needed.

    Raises:
        ConfigError: If an intermediate key holds a non-mapping value
    """
    parts = [p for p in key.split(".") if p]
    if not parts:
        raise ConfigError(f"Empty override key '{key}'")
    current = data
    for part in parts[:-1]:
        node = current.get(part)
        if node is None:
            node = current[part] = {}
        elif not isinstance(node, dict):
            raise ConfigError(f"Override '{key}': '{part}' is not a section")
        current = node
    current[parts[-1]] = value


def apply_overrides(data: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Deep copy of data with dotted-key overrides applied in order."""
    result = copy.deepcopy(dict(data))
    for key, value in overrides.items():
        set_dotted(result, key, value)
    return result


def resolve_point(config: RunConfig, point: PointConfig) -> RunConfig:
    """
    Configuration of one scenario point.

    Args:
        config: Base configuration
        point: Point whose overrides are applied

    Returns:
        Validated configuration without points, named after the point

    Raises:
        ConfigError: If the overridden configuration is invalid
    """
    base = config.model_dump(mode="python")
    base["points"] = []
    base["name"] = point.name
    if point.description:
        base["description"] = point.description
    data = apply_overrides(base, point.overrides)
    try:
        return RunConfig(**data)
    except ValidationError as e:
        raise ConfigError(
            f"Point '{point.name}' produces an invalid configuration:\n{format_validation_error(e)}"
        ) from e


def _scenario_files() -> Dict[str, Any]:
    root = resources.files(SCENARIO_PACKAGE)
    return {
        entry.name[: -len(".yaml")]: entry
        for entry in root.iterdir()
        if entry.name.endswith(".yaml")
    }


def list_scenarios() -> List[Dict[str, Any]]:
    """Name, description and point names of every bundled scenario."""
    out = []
    for name, entry in sorted(_scenario_files().items()):
        data = yaml.safe_load(entry.read_text(encoding="utf-8")) or {}
        out.append(
            {
                "name": name,
                "description": str(data.get("description", "")).strip(),
                "topology": (data.get("circuit") or {}).get("topology", "ilo"),
                "points": [p.get("name") for p in data.get("points", [])],
                "oracle": bool((data.get("oracle") or {}).get("enabled", False)),
            }
        )
    return out


class ConfigLoader:
    """
    Run-configuration loader and manager.

    Resolution order: explicit path, bundled scenario, auto-discovered file,
    defaults. Environment variables prefixed with ILO_PNOISE_ override
    values; a double underscore separates nesting levels
    (ILO_PNOISE_ORACLE__N_PATHS=128).
    """

    def __init__(self, custom_paths: Optional[List[Path]] = None):
        """
        Initialize the configuration loader.

        Args:
            custom_paths: Optional list of additional paths to search
        """
        self.config_paths = [
            Path.cwd() / "ilo-pnoise.yaml",
            Path.cwd() / ".ilo-pnoise.yaml",
            Path.home() / ".config" / "ilo-pnoise" / "config.yaml",
        ]
        if custom_paths:
            self.config_paths.extend(custom_paths)

        xdg_config_home = os.environ.get("XDG_CONFIG_HOME")
        if xdg_config_home:
            self.config_paths.append(Path(xdg_config_home) / "ilo-pnoise" / "config.yaml")

        self._cached_config: Optional[RunConfig] = None
        self._cache_key: Optional[tuple] = None
        self.source: Optional[str] = None

    def discover_config_file(self, config_path: Optional[Union[str, Path]] = None) -> Optional[Path]:
        """
        Discover the configuration file.

        Args:
            config_path: Specific config file path, or None for auto-discovery

        Returns:
            Path to the configuration file, or None if not found

        Raises:
            ConfigError: If the specified file does not exist
        """
        if config_path:
            config_file = Path(config_path).expanduser().resolve()
            if not config_file.exists():
                raise ConfigError(f"Specified configuration file not found: {config_file}")
            return config_file

        for path in self.config_paths:
            expanded = path.expanduser().resolve()
            if expanded.exists() and expanded.is_file():
                return expanded
        return None

    def load_yaml_text(self, content: str, origin: str) -> Dict[str, Any]:
        """
        Parse YAML text into a mapping.

        Raises:
            ConfigError: On invalid YAML or a non-mapping document
        """
        if not content.strip():
            return {}
        try:
            data = yaml.safe_load(content)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML syntax in {origin}: {e}") from e
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(
                f"Configuration in {origin} must be a YAML mapping, got {type(data).__name__}"
            )
        return data

    def load_yaml_file(self, config_file: Path) -> Dict[str, Any]:
        """
        Load a YAML configuration file.

        Raises:
            ConfigError: If the file cannot be read or parsed
        """
        try:
            content = Path(config_file).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read configuration file {config_file}: {e}") from e
        return self.load_yaml_text(content, str(config_file))

    def load_scenario_data(self, name: str) -> Dict[str, Any]:
        """
        Raw data of a bundled scenario.

        Raises:
            ConfigError: If no scenario has that name
        """
        files = _scenario_files()
        if name not in files:
            raise ConfigError(
                f"Unknown scenario '{name}'. Available scenarios: {', '.join(sorted(files))}"
            )
        return self.load_yaml_text(files[name].read_text(encoding="utf-8"), f"scenario {name}")

    def apply_env_overrides(
        self, config_data: Dict[str, Any], env_prefix: str = DEFAULT_ENV_PREFIX
    ) -> Dict[str, Any]:
        """
        Apply environment variable overrides to configuration data.

        Values are parsed as YAML scalars, so numbers, booleans and lists keep
        their types.

        Args:
            config_data: Configuration dictionary
            env_prefix: Prefix for environment variables

        Returns:
            Configuration dictionary with overrides applied
        """
        config_data = copy.deepcopy(config_data)
        for key, raw in sorted(os.environ.items()):
            if not key.startswith(env_prefix) or key in (f"{env_prefix}DEBUG", f"{env_prefix}SLOW"):
                continue
            dotted = ".".join(part.lower() for part in key[len(env_prefix):].split("__"))
            try:
                value = yaml.safe_load(raw)
            except yaml.YAMLError:
                value = raw
            try:
                set_dotted(config_data, dotted, value)
            except ConfigError:
                logger.warning(f"Ignoring environment override {key}: '{dotted}' is not a section path")
                continue
            logger.debug(f"Environment override {dotted} = {value!r}")
        return config_data

    def validate_config(self, config_data: Dict[str, Any]) -> RunConfig:
        """
        Validate configuration data.

        Raises:
            ConfigError: If validation fails, listing 'loc -> msg' lines
        """
        try:
            return RunConfig(**config_data)
        except ValidationError as e:
            raise ConfigError(
                "Configuration validation failed:\n" + format_validation_error(e)
                + "\n\nRun 'ilo-pnoise --generate-config' for a documented template."
            ) from e

    def load_config(
        self,
        config_path: Optional[Union[str, Path]] = None,
        scenario: Optional[str] = None,
    ) -> RunConfig:
        """
        Load and validate a run configuration.

        Args:
            config_path: Specific config file path
            scenario: Bundled scenario name, used when no path is given

        Returns:
            Validated configuration

        Raises:
            ConfigError: If the configuration cannot be loaded or is invalid
        """
        key = (str(config_path) if config_path else None, scenario)
        if self._cached_config is not None and key == self._cache_key:
            return self._cached_config

        if config_path:
            config_file = self.discover_config_file(config_path)
            config_data = self.load_yaml_file(config_file)
            self.source = str(config_file)
        elif scenario:
            config_data = self.load_scenario_data(scenario)
            self.source = f"scenario:{scenario}"
        else:
            config_file = self.discover_config_file(None)
            if config_file:
                config_data = self.load_yaml_file(config_file)
                self.source = str(config_file)
            else:
                config_data = {}
                self.source = "defaults"
        console.print(f"[dim]Configuration: {self.source}[/dim]")

        env_prefix = config_data.get("env_prefix", DEFAULT_ENV_PREFIX)
        config_data = self.apply_env_overrides(config_data, env_prefix)
        config = self.validate_config(config_data)

        self._cached_config = config
        self._cache_key = key
        return config

    def validate_config_file(self, config_path: Union[str, Path]) -> bool:
        """
        Validate a configuration file.

        Returns:
            True if valid, False otherwise
        """
        try:
            self.clear_cache()
            config = self.load_config(config_path)
            for point in config.points:
                resolve_point(config, point)
            return True
        except ConfigError as e:
            console.print(f"[red]Configuration validation failed:[/red] {e}")
            return False

    def show_config_locations(self) -> None:
        """Display all possible configuration file locations."""
        console.print(
            Panel(
                "\n".join(
                    [
                        "[bold]Configuration file locations (in order of precedence):[/bold]",
                        "",
                        *[f"  {i + 1}. {path}" for i, path in enumerate(self.config_paths)],
                        "",
                        "[dim]Use --config <path> or --scenario <name> to choose explicitly[/dim]",
                    ]
                ),
                title="Config Discovery",
                border_style="blue",
            )
        )

    def create_example_config(self, output_path: Optional[Path] = None) -> Path:
        """
        Write a documented configuration template.

        Returns:
            Path where the template was written
        """
        if output_path is None:
            output_path = Path.cwd() / "ilo-pnoise-example.yaml"

        from .templates import generate_config_template

        try:
            Path(output_path).write_text(generate_config_template(), encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot write configuration template {output_path}: {e}") from e
        console.print(f"[green]Example configuration written to:[/green] {output_path}")
        return Path(output_path)

    def clear_cache(self) -> None:
        """Clear the cached configuration."""
        self._cached_config = None
        self._cache_key = None
