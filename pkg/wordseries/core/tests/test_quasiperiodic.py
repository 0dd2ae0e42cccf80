from unittest import TestCase

import numpy as np
from parameterized import parameterized

from wordseries.core.autonomous import beta_bar_auto, build_gamma_u
from wordseries.core.models import EMPTY, EigenvalueModel
from wordseries.core.quasiperiodic import (
    alpha_bar_group_check,
    alpha_bar_period_check,
    beta_bar,
    beta_bar_derivative_check,
    build_gamma,
    eval_alpha,
    eval_alpha_bar,
    factorization_check,
    gamma_shift_identity,
    group_law_check,
    kappa,
    kappa_periodicity_check,
    transport_check,
    transport_residual,
)
from wordseries.core.utils.constants import ALGEBRA, GROUP
from wordseries.core.utils.exceptions import DimensionMismatch, ResonanceError
from wordseries.core.words import shuffle_membership

OMEGA_1D = [1.0]
SUPPORT_1D = [(-1,), (0,), (1,)]

OMEGA_2D = [1.0, np.sqrt(2)]
SUPPORT_2D = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]

ZERO, PLUS, MINUS = (0,), (1,), (-1,)


class TestBuildGamma(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.g1 = build_gamma(OMEGA_1D, SUPPORT_1D, 3)
        cls.g2 = build_gamma(OMEGA_2D, SUPPORT_2D, 3)

    def test_table_covers_every_word(self):
        assert len(self.g1.entries) == 1 + 3 + 9 + 27
        assert len(self.g2.entries) == 1 + 5 + 25 + 125

    @parameterized.expand([
        ("forward", 0.7, 0.0),
        ("backward", -0.4, 0.3),
        ("long", 2.5, -1.0),
    ])
    def test_zero_words_are_powers_of_time(self, _, t, t0):
        alpha = eval_alpha(self.g1, t, t0)

        assert alpha[EMPTY] == 1
        np.testing.assert_allclose(alpha[(ZERO,)], t - t0, atol=1e-14)
        np.testing.assert_allclose(alpha[(ZERO, ZERO)], (t - t0) ** 2 / 2, atol=1e-14)
        np.testing.assert_allclose(alpha[(ZERO, ZERO, ZERO)], (t - t0) ** 3 / 6, atol=1e-14)

    @parameterized.expand([
        ("t_0.5", 0.5, 0.0),
        ("t_1", 1.0, 0.0),
        ("shifted", 0.8, -0.6),
    ])
    def test_one_letter_word(self, _, t, t0):
        alpha = eval_alpha(self.g1, t, t0)
        np.testing.assert_allclose(alpha[(PLUS,)], 1j * (np.exp(1j * t0) - np.exp(1j * t)), atol=1e-14)

    def test_two_letter_closed_forms(self):
        alpha = eval_alpha(self.g1, 1.0, 0.0)

        np.testing.assert_allclose(alpha[(MINUS, PLUS)], 1j + (1 - np.exp(1j)), atol=1e-14)
        np.testing.assert_allclose(alpha[(PLUS, MINUS)], -1j + (1 - np.exp(-1j)), atol=1e-14)

    def test_alpha_at_initial_time_is_unit(self):
        assert eval_alpha(self.g2, 0.4, 0.4).entries == {EMPTY: 1}
        assert eval_alpha_bar(self.g2, 0.4, 0.4).entries == {EMPTY: 1}

    def test_kappa_at_initial_angle_is_unit(self):
        t0 = 0.3
        table = kappa(self.g2, t0 * np.asarray(OMEGA_2D), t0)

        assert table.entries == {EMPTY: 1}

    def test_alpha_bar_has_no_oscillation(self):
        alpha_bar = eval_alpha_bar(self.g1, 0.9, 0.0)

        np.testing.assert_allclose(alpha_bar[(ZERO,)], 0.9)
        np.testing.assert_allclose(alpha_bar[(PLUS,)], 0, atol=1e-15)

    def test_resonant_frequencies(self):
        with self.assertRaises(ResonanceError):
            build_gamma([1.0, 1.0], [(1, -1), (1, 0)], 2)

    def test_resonant_letter_sum(self):
        with self.assertRaises(ResonanceError):
            build_gamma([1.0, 1.0], [(1, 0), (0, -1)], 2)


class TestCharacters(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.g = build_gamma(OMEGA_2D, SUPPORT_2D, 4)

    @parameterized.expand([
        ("alpha", lambda g: eval_alpha(g, 0.7, -0.2)),
        ("alpha_bar", lambda g: eval_alpha_bar(g, -0.5, 0.4)),
        ("kappa", lambda g: kappa(g, [1.3, -2.0], 0.1)),
    ])
    def test_group_membership(self, _, evaluate):
        report = shuffle_membership(evaluate(self.g), GROUP, 1e-10)
        assert report.passed, report.first_violation

    @parameterized.expand([
        ("t0_zero", 0.0),
        ("t0_shifted", 0.75),
    ])
    def test_beta_bar_in_algebra(self, _, t0):
        report = shuffle_membership(beta_bar(OMEGA_2D, SUPPORT_2D, 4, t0), ALGEBRA, 1e-12)
        assert report.passed, report.first_violation


class TestBetaBar(TestCase):
    def test_low_order_entries(self):
        table = beta_bar(OMEGA_1D, SUPPORT_1D, 3)

        assert table[EMPTY] == 0
        assert table[(ZERO,)] == 1
        assert table[(ZERO, ZERO)] == 0
        assert table[(PLUS,)] == 0
        np.testing.assert_allclose(table[(ZERO, PLUS)], -1j)
        np.testing.assert_allclose(table[(PLUS, ZERO)], 1j)
        np.testing.assert_allclose(table[(PLUS, MINUS)], -1j)
        np.testing.assert_allclose(table[(MINUS, PLUS)], 1j)

    def test_agrees_with_autonomous_recursion(self):
        quasiperiodic = beta_bar(OMEGA_2D, SUPPORT_2D, 4)
        autonomous = beta_bar_auto(build_gamma_u(EigenvalueModel.quasiperiodic(OMEGA_2D), SUPPORT_2D, 4))

        assert quasiperiodic.max_difference(autonomous) < 1e-12

    def test_derivative_of_alpha_bar(self):
        report = beta_bar_derivative_check(build_gamma(OMEGA_2D, SUPPORT_2D, 3), t0=0.4)
        assert report.passed, report.max_deviation


class TestIdentities(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.g = build_gamma(OMEGA_2D, SUPPORT_2D, 3)

    @parameterized.expand([
        ("group_law", group_law_check),
        ("transport", transport_check),
        ("alpha_bar_group", alpha_bar_group_check),
        ("factorization", factorization_check),
        ("kappa_periodicity", kappa_periodicity_check),
    ])
    def test_identity_holds(self, _, check):
        report = check(self.g, samples=5, seed=3)

        assert report.passed, (report.first_violation, report.max_deviation)
        assert report.checked >= 5

    def test_theta0_shift(self):
        report = gamma_shift_identity(self.g, [0.4, -1.1], samples=5, seed=1)
        assert report.passed, (report.first_violation, report.max_deviation)

    def test_transport_residual_is_small(self):
        assert transport_residual(self.g, 0.3, [0.2, 1.0], [-0.5, 0.1]) < 1e-11

    def test_alpha_bar_meets_alpha_after_a_period(self):
        report = alpha_bar_period_check(build_gamma(OMEGA_1D, SUPPORT_1D, 3), t0=0.2, tol=1e-9)
        assert report.passed, report.max_deviation

    def test_period_check_needs_one_frequency(self):
        with self.assertRaises(DimensionMismatch):
            alpha_bar_period_check(self.g)
