#!/usr/bin/env python3
"""
Tests for the standard-form fit and the reduced-model validity diagnostics.

Author: ILO PNoise Team
"""

import sys
import unittest
from pathlib import Path

import numpy as np

# Add the parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ilo_pnoise.core.floquet import synthetic_harmonics
from ilo_pnoise.spectrum.diagnostics import DiagnosticThresholds, kurokawa_diagnostics
from ilo_pnoise.spectrum.fit import standard_form, standard_form_fit
from ilo_pnoise.spectrum.models import free_running_lorentzian, kilo_spectrum
from ilo_pnoise.spectrum.result import Method, SpectrumResult, offset_grid
from ilo_pnoise.utils.exceptions import PoorFit, SpectrumError

OMEGA0 = 2.0 * np.pi * 1.0e9
N_H = 4


def two_mode_harmonics(offband=0.0, dc=0.0, c=4e-6 / OMEGA0**2, mu2=-1e-6 * OMEGA0):
    """Single-node harmonics with unit mode-2 fundamentals."""
    U = np.zeros((2, 2 * N_H + 1, 1), dtype=complex)
    Lam = np.zeros((2, 2 * N_H + 1, 1), dtype=complex)
    X = np.zeros((2 * N_H + 1, 1), dtype=complex)
    X[N_H + 1] = X[N_H - 1] = 0.5
    U[0, N_H + 1], U[0, N_H - 1] = 0.5j * OMEGA0, -0.5j * OMEGA0
    U[1, N_H + 1] = U[1, N_H - 1] = 1.0
    Lam[0, N_H + 1] = Lam[0, N_H - 1] = 1e-3
    Lam[0, N_H] = dc
    Lam[1, N_H + 1] = Lam[1, N_H - 1] = 1.0
    Lam[1, N_H + 2] = Lam[1, N_H - 2] = offband
    return synthetic_harmonics(U, Lam, X, [0.0, mu2], OMEGA0, c, ("v",))


class TestStandardFormFit(unittest.TestCase):
    """Two-parameter fit of the single-pole standard form."""

    def setUp(self):
        self.offsets = offset_grid(1e3, 1e8, 20)
        self.lp = free_running_lorentzian(2.0 / OMEGA0**2, OMEGA0, self.offsets)

    def test_recovers_known_parameters(self):
        """A curve generated by the standard form is fitted back within 1%."""
        pole, floor = 2.0 * np.pi * 1e5, 4.0e3
        density = standard_form(2.0 * np.pi * self.offsets, self.lp.density, pole, floor)
        fit = standard_form_fit(SpectrumResult(self.offsets, density, Method.ILO_PMM), self.lp)
        self.assertAlmostEqual(fit.omega_3db / pole, 1.0, delta=0.01)
        self.assertAlmostEqual(fit.n_s / floor, 1.0, delta=0.01)
        self.assertLess(fit.residual_db, 0.01)
        self.assertAlmostEqual(fit.f_3db, 1e5, delta=1e3)
        self.assertEqual(fit.as_dict()["points"], self.offsets.size)

    def test_reduced_model_pole(self):
        """Fitting K-ILO returns |mu2| as the pole and Delta_0^(K) as the floor."""
        h = two_mode_harmonics()
        offsets = offset_grid(10.0, 1e6, 20)
        lp = free_running_lorentzian(h.c, OMEGA0, offsets)
        kilo = kilo_spectrum(h, 0, offsets, lp)
        fit = standard_form_fit(kilo, lp)
        self.assertAlmostEqual(fit.omega_3db / abs(h.mu[1].real), 1.0, delta=0.05)
        self.assertAlmostEqual(fit.n_s / kilo.metadata["delta0_k"], 1.0, delta=0.05)

    def test_two_pole_spectrum_is_a_poor_fit(self):
        """A 1/f^4 roll-off cannot be described by one pole."""
        density = 1e-8 / (1.0 + (self.offsets / 1e4) ** 2) ** 2
        spectrum = SpectrumResult(self.offsets, density, Method.ILO_PMM)
        quiet_primary = free_running_lorentzian(1e-30, OMEGA0, self.offsets)
        with self.assertRaises(PoorFit) as cm:
            standard_form_fit(spectrum, quiet_primary)
        self.assertGreater(cm.exception.residual_db, 3.0)
        self.assertIsNotNone(cm.exception.fit)
        fit = standard_form_fit(spectrum, quiet_primary, residual_limit_db=None)
        self.assertAlmostEqual(fit.residual_db, cm.exception.residual_db, places=6)

    def test_needs_two_decades(self):
        offsets = offset_grid(1e4, 5e5, 20)
        spectrum = SpectrumResult(offsets, 1.0 / offsets**2, Method.ILO_PMM)
        with self.assertRaises(SpectrumError):
            standard_form_fit(spectrum, free_running_lorentzian(1e-20, OMEGA0, offsets))


class TestKurokawaDiagnostics(unittest.TestCase):
    """Validity conditions of the reduced single-pole model."""

    def test_near_sinusoidal_input_is_valid(self):
        report = kurokawa_diagnostics(two_mode_harmonics())
        self.assertEqual(report.verdict, "Q-SINUS-VALID")
        self.assertTrue(report.valid)
        self.assertEqual(report.violations, [])
        self.assertEqual(report.dc_ratio_lambda1, 0.0)
        self.assertEqual(report.offband_ratio_lambda2, 0.0)
        self.assertTrue(report.margin_satisfied)

    def test_off_band_energy_violates_condition_two(self):
        """Second-harmonic content in Lambda_2 above the threshold."""
        report = kurokawa_diagnostics(two_mode_harmonics(offband=0.5))
        self.assertAlmostEqual(report.offband_ratio_lambda2, 0.5 / 2.5)
        self.assertEqual(report.verdict, "VIOLATION")
        self.assertEqual(report.violations, [2])

    def test_dc_component_violates_condition_one(self):
        report = kurokawa_diagnostics(two_mode_harmonics(dc=1e-3))
        self.assertAlmostEqual(report.dc_ratio_lambda1, 1.0)
        self.assertIn(1, report.violations)

    def test_strong_drive_violates_condition_three(self):
        """w0^2 c comparable to |mu2|."""
        mu2 = -1e-6 * OMEGA0
        report = kurokawa_diagnostics(two_mode_harmonics(c=0.5 * abs(mu2) / OMEGA0**2, mu2=mu2))
        self.assertAlmostEqual(report.drive_ratio, 0.5)
        self.assertIn(3, report.violations)
        self.assertAlmostEqual(report.margin, 1.0)
        self.assertFalse(report.margin_satisfied)

    def test_noiseless_primary(self):
        """c = 0 passes the drive condition and has an unbounded margin."""
        report = kurokawa_diagnostics(two_mode_harmonics(c=0.0))
        self.assertEqual(report.drive_ratio, 0.0)
        self.assertNotIn(3, report.violations)
        self.assertEqual(report.as_dict()["margin"], "inf")

    def test_thresholds_are_configurable(self):
        relaxed = DiagnosticThresholds(offband_ratio=0.5)
        report = kurokawa_diagnostics(two_mode_harmonics(offband=0.5), relaxed)
        self.assertTrue(report.valid)
        self.assertEqual(report.as_dict()["thresholds"]["offband_ratio"], 0.5)


if __name__ == "__main__":
    unittest.main()
