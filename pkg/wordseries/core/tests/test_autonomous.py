from unittest import TestCase

import numpy as np
from parameterized import parameterized

from wordseries.core.autonomous import (
    beta_bar_auto,
    build_gamma_u,
    eval_gamma_u,
    group_law_check,
    rho,
    solve_general_beta,
    transport_check_u,
    transport_residual_u,
)
from wordseries.core.models import EMPTY, EigenvalueModel
from wordseries.core.utils.constants import ALGEBRA, GROUP, ORACLE_TOL
from wordseries.core.utils.exceptions import DimensionMismatch, NotInLieAlgebra, OrderMismatch, ResonanceError
from wordseries.core.words import letters_only, shuffle_membership, unit

PROJECTOR_MODEL = EigenvalueModel(v=np.array([1j, -1j]), nu=np.eye(2))
PROJECTOR_SUPPORT = [(1, 0), (2, -1)]

ANGLE_MODEL = EigenvalueModel.quasiperiodic([1.0])
ANGLE_SUPPORT = [(-1,), (0,), (1,)]


class TestBuildGammaU(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gu = build_gamma_u(PROJECTOR_MODEL, PROJECTOR_SUPPORT, 3)

    def test_table_covers_every_word(self):
        assert len(self.gu.entries) == 1 + 2 + 4 + 8

    def test_origin_is_unit(self):
        table = eval_gamma_u(self.gu, 0.0, [0.0, 0.0])
        assert table.entries == {EMPTY: 1}

    @parameterized.expand([
        ("first", (1, 0), [0.3, 0.1], np.exp(0.3)),
        ("second", (2, -1), [0.3, 0.1], np.exp(0.5)),
    ])
    def test_one_letter_word(self, _, letter, u, growth):
        nu_v = PROJECTOR_MODEL.velocity_eigenvalue(letter)
        table = eval_gamma_u(self.gu, 0.7, u)

        np.testing.assert_allclose(table[(letter,)], (growth - 1) / nu_v, atol=1e-14)

    def test_zero_letter_words_are_powers_of_time(self):
        gu = build_gamma_u(ANGLE_MODEL, ANGLE_SUPPORT, 3)
        table = eval_gamma_u(gu, 0.6, [0.2])

        np.testing.assert_allclose(table[((0,),)], 0.6, atol=1e-15)
        np.testing.assert_allclose(table[((0,), (0,))], 0.18, atol=1e-15)

    def test_resonance(self):
        model = EigenvalueModel(v=np.array([1.0, 1.0]), nu=np.eye(2))
        with self.assertRaises(ResonanceError):
            build_gamma_u(model, [(1, -1)], 2)

    def test_resonant_sum(self):
        with self.assertRaises(ResonanceError):
            build_gamma_u(EigenvalueModel(v=np.array([1.0, 1.0]), nu=np.eye(2)), [(1, 0), (0, -1)], 2)


class TestCharacters(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gu = build_gamma_u(PROJECTOR_MODEL, PROJECTOR_SUPPORT, 4)

    @parameterized.expand([
        ("real", 0.4, [0.2, -0.5]),
        ("along_v", 1.0, [1j, -1j]),
        ("negative_time", -0.8, [0.0, 0.3]),
    ])
    def test_gamma_u_is_a_character(self, _, tau, u):
        report = shuffle_membership(eval_gamma_u(self.gu, tau, u), GROUP, 1e-10)
        assert report.passed, report.first_violation

    def test_beta_bar_is_infinitesimal(self):
        report = shuffle_membership(beta_bar_auto(self.gu), ALGEBRA, 1e-12)
        assert report.passed, report.first_violation

    @parameterized.expand([
        ("velocity", [1j, -1j]),
        ("real", [0.4, 0.9]),
    ])
    def test_rho_is_infinitesimal(self, _, u):
        report = shuffle_membership(rho(self.gu, u), ALGEBRA, 1e-12)
        assert report.passed, report.first_violation

    def test_rho_wrong_length(self):
        with self.assertRaises(DimensionMismatch):
            rho(self.gu, [1.0])


class TestDecomposition(TestCase):
    @parameterized.expand([
        ("linear_projector", PROJECTOR_MODEL, PROJECTOR_SUPPORT),
        ("angle_shift", ANGLE_MODEL, ANGLE_SUPPORT),
    ])
    def test_beta_bar_plus_rho_is_letters_only(self, _, model, support):
        gu = build_gamma_u(model, support, 3)
        total = beta_bar_auto(gu)
        shift = rho(gu, model.v)
        expected = letters_only(3, model.d, gu.support, 1.0)

        for word in gu.entries:
            np.testing.assert_allclose(total[word] + shift[word], expected[word], atol=1e-12)

    def test_beta_bar_of_angle_shift_has_unit_zero_letter(self):
        table = beta_bar_auto(build_gamma_u(ANGLE_MODEL, ANGLE_SUPPORT, 2))

        assert table[EMPTY] == 0
        np.testing.assert_allclose(table[((0,),)], 1)
        np.testing.assert_allclose(table[((1,),)], 0, atol=1e-15)


class TestIdentities(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.gu = build_gamma_u(PROJECTOR_MODEL, PROJECTOR_SUPPORT, 4)

    def test_transport(self):
        report = transport_check_u(self.gu, samples=5, seed=2)
        assert report.passed, (report.first_violation, report.max_deviation)

    def test_group_law(self):
        report = group_law_check(self.gu, samples=5, seed=2)
        assert report.passed, (report.first_violation, report.max_deviation)

    def test_transport_residual_is_small(self):
        assert transport_residual_u(self.gu, -0.3, [0.5, -0.2]) < 1e-11


class TestSolveGeneralBeta(TestCase):
    def test_letters_only_beta_reproduces_gamma_u(self):
        gu = build_gamma_u(PROJECTOR_MODEL, PROJECTOR_SUPPORT, 3)
        beta = letters_only(3, 2, gu.support, 1.0)

        solved = solve_general_beta(PROJECTOR_MODEL, beta, t_end=1.0, steps=2000)
        expected = eval_gamma_u(gu, 1.0, PROJECTOR_MODEL.v)

        assert solved.max_difference(expected) < ORACLE_TOL

    def test_zero_beta_gives_unit(self):
        solved = solve_general_beta(PROJECTOR_MODEL, letters_only(2, 2, PROJECTOR_SUPPORT, 0.0), steps=10)
        assert solved.max_difference(unit(2, 2)) == 0

    def test_rejects_group_element(self):
        with self.assertRaises(NotInLieAlgebra):
            solve_general_beta(PROJECTOR_MODEL, unit(2, 2, PROJECTOR_SUPPORT), steps=10)

    def test_order_above_beta(self):
        with self.assertRaises(OrderMismatch):
            solve_general_beta(PROJECTOR_MODEL, letters_only(2, 2, PROJECTOR_SUPPORT), N=3, steps=10)
