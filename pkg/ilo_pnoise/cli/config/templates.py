"""
Configuration Templates

Generates a documented YAML run-configuration template. Section and field
comments come from the schema descriptions, so the template always lists
every option with its default value and unit.

Author: ILO PNoise Team
"""

from datetime import datetime
from typing import Any, List, Type

import yaml
from pydantic import BaseModel

from .schemas import RunConfig


def _scalar(value: Any) -> str:
    text = yaml.safe_dump(value, default_flow_style=True, sort_keys=False).strip()
    if text.endswith("\n..."):
        text = text[: -len("\n...")]
    return text.replace("\n...", "")


def _describe(model: Type[BaseModel], instance: BaseModel, indent: int, include_comments: bool) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    for name, info in model.model_fields.items():
        value = getattr(instance, name)
        if include_comments and info.description:
            lines.append(f"{pad}# {info.description}")
        if isinstance(value, BaseModel):
            lines.append(f"{pad}{name}:")
            lines.extend(_describe(type(value), value, indent + 1, include_comments))
        elif isinstance(value, list) and value and isinstance(value[0], BaseModel):
            lines.append(f"{pad}{name}:")
            for item in value:
                dumped = yaml.safe_dump([item.model_dump(mode="json")], sort_keys=False)
                lines.extend(f"{pad}  {line}" for line in dumped.splitlines())
        else:
            if isinstance(value, tuple):
                value = list(value)
            if isinstance(value, list):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            lines.append(f"{pad}{name}: {_scalar(value)}")
    return lines


def generate_config_template(include_comments: bool = True) -> str:
    """
    Generate a YAML configuration template with every option at its default.

    Args:
        include_comments: Whether to include field documentation

    Returns:
        YAML text that validates as a RunConfig
    """
    template: List[str] = []
    if include_comments:
        template.extend(
            [
                "# ILO PNoise Run Configuration",
                "# ============================",
                "#",
                "# Place this file in one of these locations:",
                "#   - Current directory: ilo-pnoise.yaml or .ilo-pnoise.yaml",
                "#   - ~/.config/ilo-pnoise/config.yaml",
                "#   - $XDG_CONFIG_HOME/ilo-pnoise/config.yaml",
                "# or pass it with --config. All physical values are SI units.",
                "# Environment variables override values: ILO_PNOISE_ORACLE__N_PATHS=128",
                "#",
                f"# Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
                "",
            ]
        )

    defaults = RunConfig()
    for name, info in RunConfig.model_fields.items():
        value = getattr(defaults, name)
        if include_comments:
            title = name.replace("_", " ").title()
            template.extend([f"# {title}", "# " + "=" * len(title)])
            if info.description:
                template.append(f"# {info.description}")
            doc = (type(value).__doc__ or "").strip() if isinstance(value, BaseModel) else ""
            if doc:
                template.extend(f"# {line.strip()}" for line in doc.splitlines() if line.strip())
        if isinstance(value, BaseModel):
            template.append(f"{name}:")
            template.extend(_describe(type(value), value, 1, include_comments))
        elif name == "points":
            if include_comments:
                template.extend(
                    [
                        "# Each point applies dotted-key overrides to this file, e.g.",
                        "# points:",
                        "#   - name: detuned",
                        "#     overrides:",
                        "#       circuit.primary.C: 0.295e-12",
                    ]
                )
            template.append("points: []")
        else:
            template.append(f"{name}: {_scalar(value)}")
        template.append("")

    return "\n".join(template)
