"""
Spectrum Command Implementation

Evaluates the closed-form phase-noise spectra, the validity diagnostics
and the standard-form fit.

Author: ILO PNoise Team
"""

import json
from typing import Optional

import click

from ...utils.exceptions import PNoiseError
from ...writers import JSONArtifactWriter, to_jsonable
from ..config.loader import ConfigError
from ..formatting.tables import SpectrumTable
from ..pipeline import PointAnalysis, spectrum_report, write_spectra
from .common import command_config, console, parse_methods, parse_offset_option, report_error


def spectrum_command(
    ctx: click.Context,
    point: Optional[str],
    methods: Optional[str],
    offsets: Optional[str],
    nu: Optional[int],
    rho_max: Optional[int],
    p_max: Optional[int],
    output_format: str,
) -> None:
    """
    Execute the spectrum command.

    Args:
        ctx: Click context
        point: Scenario point, or None for the base configuration
        methods: Comma-separated methods (configured list if None)
        offsets: Offset grid 'min:max:ppd' (configured grid if None)
        nu: Carrier harmonic of the ensemble model
        rho_max: Truncation of the rho sum
        p_max: Truncation of the inner harmonic sums
        output_format: table or json
    """
    try:
        name, config, directory = command_config(
            ctx,
            point,
            **{
                "spectrum.carrier_harmonic": nu,
                "spectrum.rho_max": rho_max,
                "spectrum.p_max": p_max,
            },
        )
        selected = parse_methods(methods) or list(config.spectrum.methods)
        grid = parse_offset_option(offsets)

        analysis = PointAnalysis(config, name)
        analysis.check_methods(selected)
        spectra = analysis.spectra(selected, grid)
        if analysis.topology == "ilo":
            spectra["primary"] = analysis.primary.spectrum(spectra[selected[0]].offsets_hz)
        report = spectrum_report(analysis, spectra)
        paths = write_spectra(spectra, directory)
        paths.append(JSONArtifactWriter().write(report, directory / "diagnostics.json"))

        if output_format == "json":
            click.echo(json.dumps(to_jsonable(report), indent=2))
            return
        if not ctx.obj.get("quiet"):
            tables = SpectrumTable(console)
            console.print(tables.create_spectrum_table(spectra))
            diagnostics = analysis.diagnostics()
            if diagnostics is not None:
                console.print()
                console.print(tables.create_diagnostics_table(diagnostics))
            if report["standard_form"]:
                console.print()
                console.print(tables.create_fit_table(report["standard_form"]))
            for path in paths:
                console.print(f"[dim]Wrote {path}[/dim]")
    except (ConfigError, PNoiseError) as e:
        report_error(ctx, e)
