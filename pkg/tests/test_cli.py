#!/usr/bin/env python3
"""
Tests for the ilo-pnoise command line: exit codes, artifact bundles and
manifests.

The commands run on the free-running primary oscillator so that every
stage finishes in seconds.

Author: ILO PNoise Team
"""

import json
import sys
import tempfile
import unittest
from pathlib import Path

import pandas as pd
import yaml
from click.testing import CliRunner

# Add the parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ilo_pnoise import analyze_oscillator, compute_spectrum, offset_grid
from ilo_pnoise.cli.config import ConfigError, ConfigLoader, RunConfig
from ilo_pnoise.cli.main import cli
from ilo_pnoise.cli.pipeline import run_scenario

PRIMARY_CONFIG = """
name: osc1
circuit:
  topology: primary
observation_node: v
solver:
  n_samples: 512
  n_harmonics: 16
spectrum:
  methods: [lorentzian]
  offsets:
    f_min: 1.0e+3
    f_max: 1.0e+8
    points_per_decade: 5
  fit: []
oracle:
  n_paths: 2
  duration_periods: 256
  steps_per_period: 200
  settle_periods: 2
  nperseg: 64
  seed: 3
compare:
  pairs: []
output:
  directory: unused
"""


class CliTestCase(unittest.TestCase):
    """Temporary configuration and artifact directory."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)
        self.out = self.root / "out"
        self.config_path = self.write_config(PRIMARY_CONFIG)
        self.runner = CliRunner()

    def tearDown(self):
        self.temp_dir.cleanup()

    def write_config(self, text, name="osc1.yaml"):
        path = self.root / name
        path.write_text(text, encoding="utf-8")
        return path

    def invoke(self, *args, config=None):
        config = config or self.config_path
        return self.runner.invoke(
            cli, ["--config", str(config), "--out", str(self.out), "--quiet", *args], obj={}
        )


class TestGlobalOptions(CliTestCase):
    """Options handled by the command group."""

    def test_scenarios_json(self):
        result = self.runner.invoke(cli, ["scenarios", "--format", "json"], obj={})
        self.assertEqual(result.exit_code, 0, result.output)
        listed = json.loads(result.output)
        self.assertEqual([s["name"] for s in listed], ["fig4", "fig5", "fig6"])
        self.assertTrue(listed[0]["oracle"])
        self.assertEqual(len(listed[0]["points"]), 4)

    def test_generate_config(self):
        result = self.runner.invoke(cli, ["--generate-config"], obj={})
        self.assertEqual(result.exit_code, 0)
        RunConfig(**yaml.safe_load(result.output))

    def test_validate_config(self):
        result = self.runner.invoke(cli, ["--config", str(self.config_path), "--validate-config"], obj={})
        self.assertEqual(result.exit_code, 0)
        bad = self.write_config("solver:\n  rtol: 5.0\n", "bad.yaml")
        result = self.runner.invoke(cli, ["--config", str(bad), "--validate-config"], obj={})
        self.assertEqual(result.exit_code, 2)

    def test_configuration_errors_exit_with_two(self):
        bad = self.write_config("spectrum:\n  methods: [spice]\n", "bad.yaml")
        self.assertEqual(self.invoke("pss", config=bad).exit_code, 2)
        result = self.runner.invoke(cli, ["--scenario", "fig9", "pss"], obj={})
        self.assertEqual(result.exit_code, 2)
        self.assertEqual(self.invoke("pss", "--point", "missing").exit_code, 2)
        self.assertEqual(self.invoke("spectrum", "--offsets", "1e3:1e8").exit_code, 2)


class TestStageCommands(CliTestCase):
    """Single-stage subcommands."""

    def test_pss(self):
        result = self.invoke("pss")
        self.assertEqual(result.exit_code, 0, result.output)
        frame = pd.read_csv(self.out / "osc1" / "pss.csv")
        self.assertEqual(list(frame.columns), ["t_s", "v", "i_L"])
        self.assertEqual(len(frame), 512)
        harmonics = pd.read_csv(self.out / "osc1" / "harmonics.csv")
        self.assertEqual(len(harmonics), 33)

    def test_sample_override(self):
        result = self.invoke("pss", "--samples", "256", "--harmonics", "8")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(pd.read_csv(self.out / "osc1" / "pss.csv")), 256)
        self.assertEqual(len(pd.read_csv(self.out / "osc1" / "harmonics.csv")), 17)

    def test_floquet(self):
        result = self.invoke("floquet")
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / "osc1" / "floquet.json").read_text())
        self.assertEqual(report["n_modes"], 2)
        self.assertEqual(report["mu"][0], {"re": 0.0, "im": 0.0})
        self.assertLess(report["mu"][1]["re"], 0.0)
        self.assertGreater(report["c_s"], 0.0)
        lam = pd.read_csv(self.out / "osc1" / "lambda.csv")
        self.assertIn("lam1_w_re", lam.columns)

    def test_spectrum(self):
        result = self.invoke("spectrum")
        self.assertEqual(result.exit_code, 0, result.output)
        frame = pd.read_csv(self.out / "osc1" / "spectrum_lorentzian.csv")
        self.assertEqual(len(frame), 26)
        self.assertTrue((frame["dbc_per_hz"].diff().dropna() < 0).all())
        report = json.loads((self.out / "osc1" / "diagnostics.json").read_text())
        self.assertIsNone(report["kurokawa"])
        self.assertEqual(report["standard_form"], {})

    def test_coupled_methods_need_the_assembly(self):
        """ILO methods on a free-running oscillator are a configuration error."""
        result = self.invoke("spectrum", "--methods", "ilo-pmm")
        self.assertEqual(result.exit_code, 2)
        self.assertFalse((self.out / "osc1" / "spectrum_ilo_pmm.csv").exists())

    def test_oracle(self):
        result = self.invoke("oracle", "--seed", "5")
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads((self.out / "osc1" / "oracle.json").read_text())
        self.assertEqual(summary["seed"], 5)
        self.assertEqual(summary["n_paths"], 2)
        self.assertEqual(summary["divergent_paths"], 0)
        frame = pd.read_csv(self.out / "osc1" / "spectrum_oracle.csv")
        self.assertGreater(len(frame), 0)
        self.assertGreaterEqual(frame["offset_hz"].min(), 10.0 / summary["T_total"])

    def test_oracle_offsets_beyond_the_record(self):
        """Explicit offsets below the record limit fail the analysis."""
        result = self.invoke("oracle", "--periods", "16", "--offsets", "1e3:1e8:5")
        self.assertEqual(result.exit_code, 3)


class TestRunCommand(CliTestCase):
    """Full pipeline."""

    def test_bundle_and_manifest(self):
        result = self.invoke("run")
        self.assertEqual(result.exit_code, 0, result.output)
        directory = self.out / "osc1"
        for name in ("pss.csv", "harmonics.csv", "floquet.json", "lambda.csv",
                     "spectrum_lorentzian.csv", "diagnostics.json", "compare.json", "manifest.yaml"):
            self.assertTrue((directory / name).exists(), name)

        # the manifest reproduces the resolved configuration
        loader = ConfigLoader()
        original = loader.load_config(self.config_path)
        loader.clear_cache()
        manifest = loader.load_config(directory / "manifest.yaml")
        self.assertEqual(manifest.output.directory, str(self.out))
        expected = original.model_dump()
        expected["output"]["directory"] = str(self.out)
        self.assertEqual(manifest.model_dump(), expected)

    def test_json_summary(self):
        result = self.invoke("run", "--format", "json")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((self.out / "osc1" / "manifest.yaml").exists())

    def test_failed_gate_exits_after_writing(self):
        """A failed gate exits with 4 once every artifact is on disk."""
        gated = PRIMARY_CONFIG.replace(
            "compare:\n  pairs: []\n",
            "compare:\n  pairs: []\n  gates:\n    - pair: [lorentzian, lorentzian]\n      min_db: 1.0\n",
        )
        result = self.invoke("run", config=self.write_config(gated, "gated.yaml"))
        self.assertEqual(result.exit_code, 4)
        compare = json.loads((self.out / "osc1" / "compare.json").read_text())
        self.assertFalse(compare["gates"][0]["passed"])
        self.assertAlmostEqual(compare["gates"][0]["max_abs_db"], 0.0, places=9)
        self.assertTrue((self.out / "osc1" / "manifest.yaml").exists())

    def test_oracle_gate_skipped_without_oracle(self):
        gated = PRIMARY_CONFIG.replace(
            "compare:\n  pairs: []\n",
            "compare:\n  pairs: []\n  gates:\n    - pair: [lorentzian, oracle]\n      max_db: 2.0\n",
        )
        result = self.invoke("run", "--no-oracle", config=self.write_config(gated, "gated.yaml"))
        self.assertEqual(result.exit_code, 0, result.output)
        compare = json.loads((self.out / "osc1" / "compare.json").read_text())
        self.assertIsNone(compare["gates"][0]["passed"])


class TestLibraryFunctions(unittest.TestCase):
    """Dictionary-returning convenience functions."""

    CONFIG = {"circuit": {"topology": "primary"}, "observation_node": "v",
              "solver": {"n_samples": 512, "n_harmonics": 16}}

    def test_analyze_oscillator(self):
        report = analyze_oscillator(self.CONFIG)
        self.assertEqual(report["state_labels"], ["v", "i_L"])
        self.assertAlmostEqual(report["f0_hz"] / 900.9e6, 1.0, delta=1e-3)
        self.assertGreater(report["c_s"], 0.0)
        self.assertLess(report["closure_residual"], 1e-9)

    def test_compute_spectrum(self):
        offsets = offset_grid(1e4, 1e6, 2)
        result = compute_spectrum(["LORENTZIAN"], self.CONFIG, offsets)
        self.assertEqual(len(result["offsets_hz"]), 5)
        self.assertEqual(len(result["spectra"]["lorentzian"]), 5)
        self.assertIsNone(result["diagnostics"]["kurokawa"])

    def test_run_scenario(self):
        config = ConfigLoader().validate_config(
            {**self.CONFIG, "name": "osc1", "spectrum": {"methods": ["lorentzian"], "fit": []},
             "compare": {"pairs": []}}
        )
        with tempfile.TemporaryDirectory() as temp_dir:
            results = run_scenario(config, Path(temp_dir), source="test")
            self.assertEqual([r.name for r in results], ["osc1"])
            self.assertTrue(results[0].summary["gates_passed"])
            self.assertTrue((Path(temp_dir) / "osc1" / "manifest.yaml").exists())

    def test_invalid_mapping(self):
        with self.assertRaises(ConfigError):
            analyze_oscillator({"circuit": {"topology": "ring"}})


if __name__ == "__main__":
    unittest.main()
