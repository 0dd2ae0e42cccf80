from unittest import TestCase

import numpy as np
from parameterized import parameterized

from wordseries.core.autonomous import build_gamma_u, eval_gamma_u
from wordseries.core.models import EMPTY, EigenvalueModel
from wordseries.core.oracle import (
    LambdaSpec,
    alpha_by_ode,
    alpha_by_quadrature,
    averaged_solve,
    default_x0,
    direct_solve,
    integrate_halving,
    richardson_ratio,
    rk4_integrate,
    scaling_harness,
)
from wordseries.core.polyfield import example_angle_shift, example_linear_projector, example_quasiperiodic
from wordseries.core.quasiperiodic import build_gamma, eval_alpha
from wordseries.core.utils.constants import AUTONOMOUS, ORACLE_TOL
from wordseries.core.utils.exceptions import WordTooLong

QUASI = LambdaSpec(EigenvalueModel.quasiperiodic([1.0]))
SUPPORT_1D = [(-1,), (0,), (1,)]
ZERO, PLUS, MINUS = (0,), (1,), (-1,)


def growth(t, x):
    return x


def rotation(t, x):
    return 1j * x


class TestRk4(TestCase):
    @parameterized.expand([
        ("forward", growth, 0.0, 1.0, np.e),
        ("backward", growth, 1.0, 0.0, np.exp(-1.0)),
        ("complex", rotation, 0.0, np.pi, -1.0),
    ])
    def test_integrate(self, _, rhs, t0, t_end, expected):
        np.testing.assert_allclose(rk4_integrate(rhs, np.array([1.0]), t0, t_end, 1000), [expected], rtol=1e-10)

    def test_needs_a_step(self):
        with self.assertRaises(ValueError):
            rk4_integrate(growth, np.array([1.0]), 0.0, 1.0, 0)

    def test_halving_converges(self):
        result = integrate_halving(growth, np.array([1.0]), [0.0, 0.5, 1.0], substeps=4)

        assert result.converged
        assert result.states.shape == (3, 1)
        np.testing.assert_allclose(result.final, [np.e], rtol=1e-9)
        np.testing.assert_allclose(result.states[1], [np.exp(0.5)], rtol=1e-9)

    def test_halving_gives_up(self):
        with self.assertLogs('wordseries.core.integrators', level='WARNING'):
            result = integrate_halving(growth, np.array([1.0]), [0.0, 1.0], substeps=2, tol=1e-30, max_halvings=2)

        assert not result.converged
        assert result.substeps == 8


class TestAlphaByOde(TestCase):
    @parameterized.expand([
        ("forward", 1.0, 0.0),
        ("shifted", 0.5, -0.7),
    ])
    def test_matches_recursion(self, _, t, t0):
        expected = eval_alpha(build_gamma([1.0], SUPPORT_1D, 3), t, t0)
        assert alpha_by_ode(QUASI, SUPPORT_1D, 3, t, t0, steps=2000).max_difference(expected) < ORACLE_TOL

    def test_autonomous_rates(self):
        spec = example_linear_projector()
        ls = LambdaSpec(spec.model, AUTONOMOUS)
        gu = build_gamma_u(spec.model, spec.support, 3)

        solved = alpha_by_ode(ls, spec.support, 3, 0.8, 0.0, steps=2000)

        assert solved.max_difference(eval_gamma_u(gu, 0.8, 0.8 * spec.model.v)) < ORACLE_TOL

    def test_initial_time(self):
        table = alpha_by_ode(QUASI, SUPPORT_1D, 2, 0.3, 0.3)
        assert table.entries == {EMPTY: 1}


class TestAlphaByQuadrature(TestCase):
    def test_empty_word(self):
        assert alpha_by_quadrature(QUASI, EMPTY, 1.0, 0.0) == 1

    def test_zero_letters(self):
        np.testing.assert_allclose(alpha_by_quadrature(QUASI, (ZERO, ZERO), 1.3, 0.2), 1.1 ** 2 / 2, rtol=1e-13)

    def test_one_letter(self):
        np.testing.assert_allclose(alpha_by_quadrature(QUASI, (PLUS,), 1.0, 0.0), 1j * (1 - np.exp(1j)), rtol=1e-13)

    @parameterized.expand([
        ("two_letters", (MINUS, PLUS)),
        ("three_letters", (PLUS, ZERO, MINUS)),
    ])
    def test_matches_recursion(self, _, word):
        expected = eval_alpha(build_gamma([1.0], SUPPORT_1D, 3), 0.9, -0.4)[word]
        np.testing.assert_allclose(alpha_by_quadrature(QUASI, word, 0.9, -0.4, nodes=32), expected, atol=1e-12)

    def test_too_long(self):
        with self.assertRaises(WordTooLong):
            alpha_by_quadrature(QUASI, (PLUS,) * 5, 1.0, 0.0)


class TestDirectSolve(TestCase):
    def test_unperturbed_quasiperiodic_is_constant(self):
        trajectory = direct_solve(example_quasiperiodic(), 0.0, [0.3], 2.0, samples=3)

        np.testing.assert_allclose(trajectory.states, [[0.3], [0.3], [0.3]])
        assert trajectory.converged

    def test_unperturbed_angle_advances(self):
        trajectory = direct_solve(example_angle_shift(), 0.0, [0.2, 0.5], 2.0, samples=3)

        np.testing.assert_allclose(trajectory.times, [0.0, 1.0, 2.0])
        np.testing.assert_allclose(trajectory.states[:, 1], [0.5, 1.5, 2.5], atol=1e-13)
        np.testing.assert_allclose(trajectory.states[:, 0], 0.2)

    def test_unperturbed_projector_rotates(self):
        spec = example_linear_projector()
        final = direct_solve(spec, 0.0, [0.1, 0.1], 1.0).final

        np.testing.assert_allclose(final, [0.1 * np.exp(1j), 0.1 * np.exp(-1j)], atol=1e-10)

    def test_fourth_order(self):
        ratio = richardson_ratio(example_linear_projector(), 0.1, [0.5, 0.5], 1.0, 8)
        assert 12 < ratio < 20


class TestAveragedSolve(TestCase):
    def test_tracks_direct_solution(self):
        result = averaged_solve(example_quasiperiodic(), 0.05, [0.1], 1.0, N=3, samples=3)

        assert result.errors[0] < 1e-12
        assert result.errors[-1] < 1e-6
        assert result.averaged.shape == (3, 1)

    def test_needs_quasiperiodic_problem(self):
        with self.assertRaises(ValueError):
            averaged_solve(example_angle_shift(), 0.05, [0.1, 0.0], 1.0)


class TestScalingHarness(TestCase):
    def test_default_point(self):
        np.testing.assert_allclose(default_x0(example_angle_shift()), [0.1, 0.0])
        np.testing.assert_allclose(default_x0(example_linear_projector()), [0.1, 0.1])

    @parameterized.expand([
        ("too_few", [0.1, 0.05]),
        ("repeated", [0.1, 0.1, 0.05]),
        ("negative", [0.1, 0.05, -0.01]),
    ])
    def test_rejects_sweep(self, _, eps_list):
        with self.assertRaises(ValueError):
            scaling_harness(example_angle_shift(), eps_list)

    @parameterized.expand([
        ("order_2", 2),
        ("order_3", 3),
    ])
    def test_quasiperiodic_orders(self, _, N):
        report = scaling_harness(example_quasiperiodic(), [0.04, 0.02, 0.01], N=N)
        fits = {fit.identity: fit for fit in report.fits}

        assert report.passed, [(fit.identity, fit.slope) for fit in report.fits]
        assert fits['solution representation'].slope >= N + 0.5
        assert fits['averaged representation'].slope >= N - 0.5

    def test_autonomous_orders(self):
        report = scaling_harness(example_angle_shift(), [0.2, 0.1, 0.05], N=2, x0=[0.5, 0.3])
        fits = {fit.identity: fit for fit in report.fits}

        assert report.passed, [(fit.identity, fit.slope) for fit in report.fits]
        assert fits['solution representation'].slope > 2.5
        assert fits['normal-form decomposition'].below_noise_floor
        assert fits['solution representation'].eps == [0.2, 0.1, 0.05]
