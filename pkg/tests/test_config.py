#!/usr/bin/env python3
"""
Tests for run-configuration loading, validation, overrides and the bundled
scenarios.

Author: ILO PNoise Team
"""

import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import yaml

# Add the parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ilo_pnoise.cli.config import (
    ConfigError,
    ConfigLoader,
    PointConfig,
    RunConfig,
    apply_overrides,
    generate_config_template,
    list_scenarios,
    resolve_point,
    set_dotted,
)
from ilo_pnoise.cli.pipeline import select_point


class TestDottedOverrides(unittest.TestCase):
    """Dotted-key helpers."""

    def test_set_dotted_creates_sections(self):
        data = {}
        set_dotted(data, "oracle.n_paths", 8)
        set_dotted(data, "circuit.primary.C", 1e-12)
        self.assertEqual(data, {"oracle": {"n_paths": 8}, "circuit": {"primary": {"C": 1e-12}}})

    def test_set_dotted_rejects_scalar_sections(self):
        with self.assertRaises(ConfigError):
            set_dotted({"name": "x"}, "name.first", 1)
        with self.assertRaises(ConfigError):
            set_dotted({}, "", 1)

    def test_apply_overrides_copies(self):
        """The input mapping is left untouched."""
        base = {"noise": {"w_rms": 1.0}}
        result = apply_overrides(base, {"noise.w_rms": 2.0})
        self.assertEqual(result["noise"]["w_rms"], 2.0)
        self.assertEqual(base["noise"]["w_rms"], 1.0)


class TestValidation(unittest.TestCase):
    """Schema validation through the loader."""

    def setUp(self):
        self.loader = ConfigLoader()

    def test_defaults(self):
        config = self.loader.validate_config({})
        self.assertEqual(config.circuit.topology, "ilo")
        self.assertEqual(config.noise.n_rms, 70.7e-12)
        self.assertEqual(config.coupling.g_c, [0.0, 35e-6, 0.0, 0.0])
        self.assertEqual(config.spectrum.methods, ["ilo-pmm", "k-ilo", "lorentzian"])
        self.assertFalse(config.oracle.enabled)

    def test_error_lists_field_location(self):
        with self.assertRaises(ConfigError) as cm:
            self.loader.validate_config({"solver": {"rtol": 1.0}})
        self.assertIn("solver -> rtol", str(cm.exception))

    def test_unknown_keys_are_rejected(self):
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"spectrum": {"method": ["ilo-pmm"]}})

    def test_method_names_are_normalized(self):
        config = self.loader.validate_config({"spectrum": {"methods": "ILO_PMM, k-ilo"}})
        self.assertEqual(config.spectrum.methods, ["ilo-pmm", "k-ilo"])
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"spectrum": {"methods": ["pmm"]}})

    def test_offset_grid_must_be_ordered(self):
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"spectrum": {"offsets": {"f_min": 1e6, "f_max": 1e3}}})

    def test_buffer_needs_four_coefficients(self):
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"coupling": {"g_c": [0.0, 35e-6]}})

    def test_gates(self):
        """A gate needs a bound; pair names are normalized."""
        config = self.loader.validate_config(
            {"compare": {"gates": [{"pair": ["K_ILO", "ilo-pmm"], "max_db": 1.0}]}}
        )
        self.assertEqual(config.compare.gates[0].pair, ("k-ilo", "ilo-pmm"))
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"compare": {"gates": [{"pair": ["k-ilo", "ilo-pmm"]}]}})
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"compare": {"pairs": [["k-ilo", "spice"]]}})

    def test_point_names(self):
        """Point names are unique directory names."""
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"points": [{"name": "a"}, {"name": "a"}]})
        with self.assertRaises(ConfigError):
            self.loader.validate_config({"points": [{"name": "a/b"}]})


class TestFileLoading(unittest.TestCase):
    """YAML files and environment overrides."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)
        self.loader = ConfigLoader()

    def tearDown(self):
        self.temp_dir.cleanup()

    def write(self, name, text):
        path = self.root / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_load_file(self):
        path = self.write("run.yaml", "name: sweep\noracle:\n  n_paths: 4\n")
        config = self.loader.load_config(path)
        self.assertEqual(config.name, "sweep")
        self.assertEqual(config.oracle.n_paths, 4)
        self.assertEqual(self.loader.source, str(path.resolve()))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            self.loader.load_config(self.root / "absent.yaml")

    def test_invalid_documents(self):
        with self.assertRaises(ConfigError):
            self.loader.load_config(self.write("list.yaml", "- 1\n- 2\n"))
        self.loader.clear_cache()
        with self.assertRaises(ConfigError):
            self.loader.load_config(self.write("bad.yaml", "name: [unclosed\n"))

    def test_empty_file_gives_defaults(self):
        config = self.loader.load_config(self.write("empty.yaml", ""))
        self.assertEqual(config.name, "custom")

    def test_environment_overrides(self):
        """Nested keys use a double underscore; values keep YAML types."""
        path = self.write("run.yaml", "oracle:\n  n_paths: 4\n")
        env = {
            "ILO_PNOISE_ORACLE__N_PATHS": "128",
            "ILO_PNOISE_ORACLE__ENABLED": "true",
            "ILO_PNOISE_DEBUG": "1",
        }
        with patch.dict(os.environ, env):
            config = self.loader.load_config(path)
        self.assertEqual(config.oracle.n_paths, 128)
        self.assertTrue(config.oracle.enabled)

    def test_validate_config_file(self):
        self.assertTrue(self.loader.validate_config_file(self.write("ok.yaml", "name: ok\n")))
        bad = self.write("bad.yaml", "points:\n  - name: p\n    overrides:\n      solver.rtol: 5.0\n")
        self.assertFalse(self.loader.validate_config_file(bad))

    def test_example_config(self):
        path = self.loader.create_example_config(self.root / "example.yaml")
        RunConfig(**yaml.safe_load(path.read_text(encoding="utf-8")))


class TestTemplate(unittest.TestCase):
    """Generated configuration template."""

    def test_template_validates(self):
        data = yaml.safe_load(generate_config_template())
        config = RunConfig(**data)
        self.assertEqual(config.model_dump(), RunConfig().model_dump())

    def test_template_is_documented(self):
        text = generate_config_template()
        self.assertIn("# Tank capacitance (F).", text)
        self.assertIn("ILO_PNOISE_ORACLE__N_PATHS", text)
        self.assertNotIn("#", generate_config_template(include_comments=False))


class TestScenarios(unittest.TestCase):
    """Bundled scenario configurations."""

    def setUp(self):
        self.loader = ConfigLoader()

    def test_bundled_names(self):
        names = [s["name"] for s in list_scenarios()]
        self.assertEqual(names, ["fig4", "fig5", "fig6"])

    def test_every_scenario_and_point_validates(self):
        for entry in list_scenarios():
            with self.subTest(scenario=entry["name"]):
                config = self.loader.validate_config(self.loader.load_scenario_data(entry["name"]))
                for point in config.points:
                    resolved = resolve_point(config, point)
                    self.assertEqual(resolved.name, point.name)
                    self.assertEqual(resolved.points, [])

    def test_detuned_point(self):
        config = self.loader.validate_config(self.loader.load_scenario_data("fig4"))
        self.assertEqual([p.name for p in config.points], ["pset1-a", "pset1-b", "pset2-a", "pset2-b"])
        detuned = resolve_point(config, config.points[1])
        self.assertEqual(detuned.circuit.primary.C, 0.295e-12)
        self.assertEqual(detuned.circuit.primary.L, config.circuit.primary.L)
        strong = resolve_point(config, config.points[3])
        self.assertEqual(strong.coupling.g_c[1], 60e-6)

    def test_noise_levels(self):
        strong = self.loader.validate_config(self.loader.load_scenario_data("fig5"))
        weak = self.loader.validate_config(self.loader.load_scenario_data("fig6"))
        self.assertAlmostEqual(strong.noise.n_rms / weak.noise.n_rms, 1000.0)
        self.assertEqual(weak.compare.gates[0].max_db, 1.0)
        self.assertEqual(strong.compare.gates[0].min_db, 3.0)

    def test_unknown_scenario(self):
        with self.assertRaises(ConfigError) as cm:
            self.loader.load_scenario_data("fig9")
        self.assertIn("fig6", str(cm.exception))

    def test_invalid_point_override(self):
        config = RunConfig()
        with self.assertRaises(ConfigError):
            resolve_point(config, PointConfig(name="p", overrides={"solver.n_samples": 2}))


class TestSelectPoint(unittest.TestCase):
    """Configuration of the single-stage commands."""

    def setUp(self):
        loader = ConfigLoader()
        self.config = loader.validate_config(loader.load_scenario_data("fig4"))

    def test_base_configuration(self):
        name, config = select_point(self.config)
        self.assertEqual(name, "fig4")
        self.assertEqual(config.points, [])

    def test_named_point_with_overrides(self):
        """None-valued overrides are ignored."""
        name, config = select_point(self.config, "pset2-b", {"oracle.seed": 9, "oracle.n_paths": None})
        self.assertEqual(name, "pset2-b")
        self.assertEqual(config.oracle.seed, 9)
        self.assertEqual(config.oracle.n_paths, 64)
        self.assertEqual(config.coupling.g_c[1], 60e-6)

    def test_unknown_point(self):
        with self.assertRaises(ConfigError) as cm:
            select_point(self.config, "pset3")
        self.assertIn("pset1-a", str(cm.exception))


if __name__ == "__main__":
    unittest.main()
