#!/usr/bin/env python3
"""
Tests for the Floquet stage: exponent ordering, direct and dual vectors,
lambda harmonics and the phase-diffusion constant.

Author: ILO PNoise Team
"""

import sys
import unittest
from pathlib import Path

import numpy as np
from scipy.linalg import expm

# Add the parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ilo_pnoise.core.circuits import (
    BufferCoupling,
    assemble_ilo,
    build_primary_oscillator,
    build_reference_circuits,
    linear_model,
)
from ilo_pnoise.core.floquet import (
    FloquetSettings,
    analyze_floquet,
    floquet_exponents,
    floquet_vectors,
    monodromy,
    phase_diffusion_constant,
)
from ilo_pnoise.core.harmonics import harmonics_from_samples
from ilo_pnoise.core.pss import (
    SolverSettings,
    find_limit_cycle,
    integrate_variational,
    solve_periodic_steady_state,
)
from ilo_pnoise.utils.exceptions import FloquetError, UnstablePSS


class TestFloquetExponents(unittest.TestCase):
    """Ordering and classification of monodromy eigenvalues."""

    def test_diagonal_monodromy(self):
        """Exponents are log(multiplier) / T0 with the zero mode first."""
        exps = floquet_exponents(np.diag([0.5, 1.0, 0.1]), 2.0)
        np.testing.assert_allclose(exps.iota, [1.0, 0.5, 0.1])
        np.testing.assert_allclose(exps.mu, [0.0, np.log(0.5) / 2.0, np.log(0.1) / 2.0])
        self.assertTrue(exps.stable)
        np.testing.assert_allclose(exps.left_vectors @ exps.right_vectors, np.eye(3), atol=1e-14)

    def test_zero_mode_is_snapped(self):
        """A multiplier slightly off 1 is recorded as an error and snapped to 0."""
        exps = floquet_exponents(np.diag([1.0 + 1e-9, 0.3]), 1.0)
        self.assertEqual(exps.mu[0], 0.0)
        self.assertAlmostEqual(exps.zero_mode_error, 1e-9, delta=1e-12)

    def test_unstable_multiplier(self):
        """A multiplier outside the unit circle is fatal."""
        with self.assertRaises(UnstablePSS):
            floquet_exponents(np.diag([1.0, 1.1]), 1.0)

    def test_non_finite_monodromy(self):
        """NaN entries are rejected before the eigensolve."""
        with self.assertRaises(FloquetError):
            floquet_exponents(np.array([[1.0, np.nan], [0.0, 0.5]]), 1.0)

    def test_near_degenerate_pairs_are_flagged(self):
        """Coinciding multipliers are listed 1-based."""
        exps = floquet_exponents(np.diag([1.0, 0.5, 0.5]), 1.0)
        self.assertEqual([pair[:2] for pair in exps.near_degenerate], [(2, 3)])

    def test_secondary_mode_comes_second(self):
        """With a driving block the secondary-only mode is mode 2."""
        phi = np.array([[1.0, 0.0, 0.0], [0.0, 0.99, 0.0], [0.1, 0.2, 0.9]])
        default = floquet_exponents(phi, 1.0)
        self.assertAlmostEqual(abs(default.iota[1]), 0.99)
        unilateral = floquet_exponents(phi, 1.0, primary_dimension=2)
        self.assertAlmostEqual(abs(unilateral.iota[1]), 0.9)

    def test_phase_mode_override(self):
        """The override picks mode 2 by position in the default order."""
        exps = floquet_exponents(np.diag([1.0, 0.5, 0.1]), 1.0, phase_mode=3)
        self.assertAlmostEqual(abs(exps.iota[1]), 0.1)
        with self.assertRaises(FloquetError):
            floquet_exponents(np.diag([1.0, 0.5, 0.1]), 1.0, phase_mode=4)


class TestLinearMonodromy(unittest.TestCase):
    """Constant-coefficient systems have Phi(T) = expm(A T)."""

    def test_matrix_exponential(self):
        w = 2.0 * np.pi * 1e6
        A = np.array([[-1e4, -w], [w, -1e4]])
        oscillator = linear_model([[0.0, -w], [w, 0.0]])
        pss = find_limit_cycle(oscillator, 1e-6, np.array([0.0, 1.0]), 1e-9,
                               SolverSettings(n_samples=64, check_degeneracy=False),
                               amplitude_anchor=(1, 1.0))
        damped = linear_model(A)
        phi = monodromy(damped, pss, rtol=1e-12)
        np.testing.assert_allclose(phi, expm(A * pss.T0), rtol=1e-8, atol=1e-9)


class TestPrimaryDecomposition(unittest.TestCase):
    """Floquet decomposition of the cubic LC oscillator."""

    @classmethod
    def setUpClass(cls):
        cls.model = build_primary_oscillator()
        cls.pss = solve_periodic_steady_state(cls.model)
        cls.settings = FloquetSettings(n_harmonics=16)
        cls.decomp, cls.harmonics = analyze_floquet(cls.model, cls.pss, cls.settings)

    def test_zero_mode(self):
        """The trivial multiplier sits at 1 to integration accuracy."""
        self.assertLess(self.decomp.zero_mode_error, 1e-6)
        self.assertEqual(self.decomp.mu[0], 0.0)

    def test_amplitude_mode_is_real_and_stable(self):
        """The second exponent of a 2-state oscillator is real and negative."""
        mu2 = self.decomp.mu2
        self.assertEqual(mu2.imag, 0.0)
        self.assertLess(mu2.real, 0.0)

    def test_biorthogonality(self):
        """v_i^T u_j = delta_ij at every sample."""
        self.assertLess(self.decomp.biorthogonality_error, 1e-6)
        gram = np.einsum("ti,ti->t", self.decomp.v[0], self.decomp.u[0])
        np.testing.assert_allclose(gram, 1.0, atol=1e-6)

    def test_amplitude_dual_is_orthogonal_to_the_flow(self):
        """v_2^T u_1 vanishes relative to |v_2| |u_1| in orbit-scaled units."""
        scale = self.pss.scale
        v2 = self.decomp.v[1] * scale
        u1 = self.decomp.u[0] / scale
        cross = np.abs(np.einsum("ti,ti->t", v2, u1))
        norms = np.linalg.norm(v2, axis=1) * np.linalg.norm(u1, axis=1)
        self.assertLess(float((cross / norms).max()), 1e-6)

    def test_first_direct_vector_is_the_flow(self):
        """u_1(t) equals dx_s/dt and v_1^T dx_s/dt = 1."""
        self.assertLess(self.decomp.u1_deviation, 1e-6)
        self.assertLess(self.decomp.flow_dual_error, 1e-6)
        scale = self.pss.scale
        deviation = np.abs(self.decomp.u[0].real - self.pss.derivatives) / scale
        self.assertLess(deviation.max(), 1e-6 * (np.abs(self.pss.derivatives) / scale).max())
        self.assertEqual(self.decomp.warnings, ())

    def test_second_mode_has_zero_dc(self):
        """u_2 and v_2 of the odd-symmetric tank carry no DC component."""
        U = self.harmonics.U[1]
        V = harmonics_from_samples(self.decomp.v[1], 16, self.model.state_labels).coeffs
        for coeffs in (U, V):
            first = np.abs(coeffs[17])
            self.assertTrue(np.all(np.abs(coeffs[16]) < 0.05 * first.max()))

    def test_zero_mode_lambda_has_zero_dc(self):
        """Lambda_{1,0} of the tank source vanishes."""
        lam = self.harmonics.Lam[0]
        self.assertLess(abs(lam[16, 0]), 0.05 * abs(lam[17, 0]))

    def test_diffusion_constant_is_invariant_under_a_time_shift(self):
        """Re-anchoring the orbit leaves c and the exponents unchanged."""
        shifted = self.pss.shifted(300)
        decomp = floquet_vectors(self.model, shifted, None, self.settings)
        self.assertAlmostEqual(decomp.c / self.decomp.c, 1.0, delta=1e-8)
        self.assertAlmostEqual(decomp.mu2.real / self.decomp.mu2.real, 1.0, delta=1e-6)

    def test_exponents_do_not_depend_on_the_sample_count(self):
        """Doubling N_t leaves mu and c unchanged."""
        fine = solve_periodic_steady_state(self.model, SolverSettings(n_samples=2048))
        decomp = floquet_vectors(self.model, fine, None, self.settings)
        self.assertAlmostEqual(decomp.mu2.real / self.decomp.mu2.real, 1.0, delta=1e-6)
        self.assertAlmostEqual(decomp.c / self.decomp.c, 1.0, delta=1e-6)

    def test_diffusion_constant_of_tank_noise(self):
        """w0^2 c follows B^2 / (2 A^2) for a near-sinusoidal tank."""
        amplitude_sq = 4.0 * (1.0e-3 - 0.8e-3) / (3.0 * 100.0e-6)
        B = 1e-12 / 0.3035e-12
        expected = B**2 / (2.0 * amplitude_sq)
        self.assertAlmostEqual(self.pss.omega0**2 * self.decomp.c / expected, 1.0, delta=0.05)

    def test_diffusion_constant_scales_with_noise_power(self):
        """Doubling the noise matrix quadruples c."""
        doubled = floquet_vectors(self.model.with_noise_scale(2.0), self.pss, None, self.settings)
        self.assertAlmostEqual(doubled.c / self.decomp.c, 4.0, delta=4e-12)

    def test_harmonics_match_decomposition(self):
        """Lambda_1 harmonics reproduce c by Parseval."""
        energy = float(np.sum(np.abs(self.harmonics.Lam[0]) ** 2))
        self.assertAlmostEqual(energy / self.decomp.c, 1.0, delta=1e-6)
        self.assertEqual(self.harmonics.n_harmonics, 16)
        self.assertEqual(self.harmonics.n_modes, 2)

    def test_mode_harmonics_lookup(self):
        """Out-of-range modes and harmonics read as zero; unknown nodes raise."""
        self.assertFalse(np.any(self.harmonics.lam(3, 1)))
        self.assertFalse(np.any(self.harmonics.u(1, 40)))
        self.assertEqual(self.harmonics.node_index("i_L"), 1)
        with self.assertRaises(FloquetError):
            self.harmonics.node_index("v_x")


class TestReferenceDecompositions(unittest.TestCase):
    """Floquet decompositions of the secondary oscillator and of the locked assembly."""

    @classmethod
    def setUpClass(cls):
        cls.primary, cls.secondary = build_reference_circuits()
        cls.primary_pss = solve_periodic_steady_state(cls.primary)
        cls.secondary_pss = solve_periodic_steady_state(cls.secondary)
        cls.ilo = assemble_ilo(cls.primary, cls.secondary, BufferCoupling(g_c=(0.0, 35e-6, 0.0, 0.0)))
        cls.ilo_pss = solve_periodic_steady_state(cls.ilo, guess_T=cls.primary_pss.T0)
        cls.settings = FloquetSettings(n_harmonics=16)
        cls.secondary_decomp, _ = analyze_floquet(cls.secondary, cls.secondary_pss, cls.settings)
        cls.ilo_decomp, cls.ilo_harmonics = analyze_floquet(cls.ilo, cls.ilo_pss, cls.settings)

    def assert_invariants(self, decomp):
        self.assertLess(decomp.zero_mode_error, 1e-6)
        self.assertLess(decomp.biorthogonality_error, 1e-6)
        self.assertLess(decomp.u1_deviation, 1e-6)
        self.assertLess(decomp.flow_dual_error, 1e-6)
        self.assertGreater(decomp.c, 0.0)

    def test_secondary_decomposition(self):
        self.assert_invariants(self.secondary_decomp)
        self.assertTrue(np.all(self.secondary_decomp.mu[1:].real < 0.0))

    def test_locked_decomposition(self):
        self.assert_invariants(self.ilo_decomp)
        mu2 = self.ilo_decomp.mu2
        self.assertEqual(mu2.imag, 0.0)
        self.assertLess(mu2.real, 0.0)
        self.assertEqual(self.ilo_decomp.warnings, ())

    def test_secondary_mode_does_not_move_the_primary(self):
        """u_2 of the unilateral assembly lives on the secondary states only."""
        scaled = np.abs(self.ilo_decomp.u[1]) / self.ilo_pss.scale
        self.assertLess(scaled[:, :2].max(), 1e-6 * scaled.max())

    def test_primary_phase_lambda_has_zero_dc(self):
        """Lambda_{1,0} of the primary tank source vanishes."""
        lam = self.ilo_harmonics.Lam[0]
        self.assertLess(abs(lam[16, 0]), 0.05 * np.linalg.norm(lam[17]))

    def test_tail_noise_does_not_reach_the_primary_phase(self):
        """The secondary tail source drives lambda_2 but not lambda_1."""
        lam = self.ilo_harmonics.Lam
        self.assertLess(np.linalg.norm(lam[0, :, 1]), 1e-6 * np.linalg.norm(lam[1, :, 1]))

    def test_tail_noise_enters_the_secondary_phase_at_even_harmonics(self):
        """lambda_2 of the tail source carries DC and even harmonics."""
        column = self.ilo_harmonics.Lam[1, :, 1]
        nus = np.arange(-16, 17)
        even = np.linalg.norm(column[nus % 2 == 0])
        self.assertGreaterEqual(even / np.linalg.norm(column), 0.1)

    def test_uncoupled_monodromy_is_block_diagonal(self):
        """Without coupling Phi(T) splits into the monodromies of the two units."""
        uncoupled = assemble_ilo(self.primary, self.secondary, BufferCoupling(g_c=(0.0, 0.0, 0.0, 0.0)))
        T = self.primary_pss.T0
        x0 = np.concatenate([self.primary_pss.x0, self.secondary_pss.x0])
        scale = np.concatenate([self.primary_pss.scale, self.secondary_pss.scale])
        _, phi = integrate_variational(uncoupled, x0, T, 1e-10, scale)
        phi = phi * scale[None, :] / scale[:, None]

        self.assertLess(np.abs(phi[:2, 2:]).max(), 1e-12)
        self.assertLess(np.abs(phi[2:, :2]).max(), 1e-12)

        p_scale = self.primary_pss.scale
        own = monodromy(self.primary, self.primary_pss) * p_scale[None, :] / p_scale[:, None]
        np.testing.assert_allclose(phi[:2, :2], own, atol=1e-7)

        s_scale = self.secondary_pss.scale
        _, own = integrate_variational(self.secondary, self.secondary_pss.x0, T, 1e-10, s_scale)
        own = own * s_scale[None, :] / s_scale[:, None]
        np.testing.assert_allclose(phi[2:, 2:], own, atol=1e-7)


class TestPhaseDiffusionConstant(unittest.TestCase):
    """Direct evaluation of c from sampled lambda_1."""

    def test_mean_square(self):
        """c is the period average of |lambda_1|^2."""
        t = np.arange(256) / 256.0
        lam = np.sqrt(2.0) * np.cos(2.0 * np.pi * t)
        self.assertAlmostEqual(phase_diffusion_constant(lam[:, None]), 1.0, places=12)

    def test_non_finite(self):
        with self.assertRaises(FloquetError):
            phase_diffusion_constant(np.array([[np.inf]]))


if __name__ == "__main__":
    unittest.main()
