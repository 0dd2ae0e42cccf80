'''
Brute-force references for the recursions: the coefficient ODE integrated with
RK4, iterated integrals by nested Gauss–Legendre quadrature, fine-step solves
of the full problems and ε-sweeps fitting the order of each identity.
'''
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from wordseries import settings
from wordseries.core.autonomous import build_gamma_u, eval_gamma_u
from wordseries.core.integrators import HalvingResult, integrate_halving, rk4_integrate
from wordseries.core.models import CoefficientTable, EigenvalueModel, Letter, Word, as_letter
from wordseries.core.polyfield import (
    ProblemSpec,
    decomposition_residual,
    eval_series,
    g_field,
    series_field,
    solution_representation,
)
from wordseries.core.polynomials import StackedFields
from wordseries.core.quasiperiodic import beta_bar, build_gamma, eval_alpha, kappa
from wordseries.core.utils.constants import AUTONOMOUS, QUASIPERIODIC, SLOPE_MARGIN
from wordseries.core.utils.exceptions import WordTooLong
from wordseries.core.utils.serializers import ScalingReport, SlopeFit
from wordseries.core.words import all_words, normalize_support

__all__ = [
    'AveragingResult',
    'LambdaSpec',
    'Trajectory',
    'alpha_by_ode',
    'alpha_by_quadrature',
    'averaged_solve',
    'default_x0',
    'direct_solve',
    'integrate_halving',
    'richardson_ratio',
    'rk4_integrate',
    'scaling_harness',
]

logger = logging.getLogger(__name__)

Trajectory = HalvingResult

MAX_QUADRATURE_LETTERS = 4

QUADRATURE_CHUNK = 2 ** 20

STEPS_PER_UNIT_TIME = 16


####################################### iterated integrals #######################################
@dataclass(frozen=True, eq=False)
class LambdaSpec:
    '''
    Scalar factors λ_ℓ(t) of a linear word-series problem: e^{ik·ωt} for
    quasiperiodic forcing, exp(tν_ℓ^v) for autonomous problems. Both are
    exp(t·ν_ℓ^v) of the model.
    '''

    model: EigenvalueModel
    kind: str = QUASIPERIODIC

    def rate(self, letter: Letter) -> complex:
        return self.model.velocity_eigenvalue(as_letter(letter))

    def value(self, letter: Letter, t: float) -> complex:
        return complex(np.exp(t * self.rate(letter)))


def alpha_by_ode(ls: LambdaSpec, support: Sequence[Sequence[int]], N: int, t: float, t0: float,
                 steps: int = settings.RK_STEPS) -> CoefficientTable:
    '''
    Integrates α′_{ℓ₁⋯ℓₙ} = λ_{ℓₙ}(t)·α_{ℓ₁⋯ℓₙ₋₁}, α(t₀) = 1 1, for every word of
    length ≤ N at once, with fixed-step RK4.

    Args:
        ls (LambdaSpec): Scalar factors λ_ℓ.
        support (Sequence[Sequence[int]]): Letters of the words.
        N (int): Truncation order.
        t (float): Final time.
        t0 (float): Initial time.
        steps (int): Number of RK4 steps.

    Returns:
        CoefficientTable: α(t; t₀).
    '''
    support = normalize_support(support, ls.model.d)
    words = all_words(support, N)
    position = {word: index for index, word in enumerate(words)}

    parents = np.array([position[word[:-1]] for word in words[1:]], dtype=int)
    rates = np.array([ls.rate(word[-1]) for word in words[1:]], dtype=complex)

    def rhs(s: float, alpha: np.ndarray) -> np.ndarray:
        derivative = np.zeros_like(alpha)
        derivative[1:] = np.exp(s * rates) * alpha[parents]
        return derivative

    initial = np.zeros(len(words), dtype=complex)
    initial[0] = 1.0
    alpha = initial if t == t0 else rk4_integrate(rhs, initial, t0, t, steps)

    return CoefficientTable(N, ls.model.d, dict(zip(words, alpha)), support)


def _iterated(rates: np.ndarray, upper: np.ndarray, t0: float, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    if rates.size == 0:
        return np.ones(upper.shape, dtype=complex)

    cost = upper.size * nodes.size ** rates.size
    if cost > QUADRATURE_CHUNK and upper.size > 1:
        pieces = np.array_split(upper, min(upper.size, -(-cost // QUADRATURE_CHUNK)))
        return np.concatenate([_iterated(rates, piece, t0, nodes, weights) for piece in pieces])

    half = (upper - t0) / 2
    points = t0 + half[:, None] * (nodes[None, :] + 1)
    inner = _iterated(rates[:-1], points.ravel(), t0, nodes, weights).reshape(points.shape)

    return half * ((np.exp(rates[-1] * points) * inner) @ weights)


def alpha_by_quadrature(ls: LambdaSpec, w: Word, t: float, t0: float,
                        nodes: int = settings.QUADRATURE_NODES) -> complex:
    '''
    α_w(t; t₀) = ∫_{t₀}^{t} λ_{ℓₙ}(tₙ) ∫_{t₀}^{tₙ} ⋯ ∫_{t₀}^{t₂} λ_{ℓ₁}(t₁) dt₁ ⋯ dtₙ by
    nested Gauss–Legendre quadrature. The innermost integral is evaluated first,
    at every node of the level above it.

    Raises:
        WordTooLong: If the word has more than four letters.
    '''
    if len(w) > MAX_QUADRATURE_LETTERS:
        raise WordTooLong(f'Quadrature is limited to {MAX_QUADRATURE_LETTERS} letters, got {len(w)}.')
    if not w:
        return 1.0 + 0j

    x, weights = leggauss(nodes)
    rates = np.array([ls.rate(letter) for letter in w], dtype=complex)

    return complex(_iterated(rates, np.array([float(t)]), float(t0), x, weights)[0])


####################################### direct solves #######################################
def _direct_rhs(spec: ProblemSpec, eps: float):
    '''Right-hand side of the full problem as one stacked evaluation.'''
    support = spec.support

    if spec.kind == QUASIPERIODIC:
        stacked = StackedFields([spec.modes[letter] for letter in support])
        frequencies = np.array([float(np.dot(letter, spec.model.omega)) for letter in support])

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            return stacked.evaluate(y, eps * np.exp(1j * frequencies * t))

        return rhs

    stacked = StackedFields([g_field(spec, spec.model.v)] + [spec.modes[letter] for letter in support])
    weights = np.array([1.0] + [eps] * len(support), dtype=complex)

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        return stacked.evaluate(x, weights)

    return rhs


def _initial_substeps(span: float, samples: int) -> int:
    return max(64, int(np.ceil(STEPS_PER_UNIT_TIME * abs(span) / max(samples - 1, 1))))


def direct_solve(spec: ProblemSpec, eps: float, x0: Sequence[complex], t_end: float, t0: float = 0.0,
                 samples: int = 2, steps: Optional[int] = None, tol: float = settings.SOLVE_TOL) -> Trajectory:
    '''
    Solves y′ = ε Σ_k e^{ik·ωt} f̂_k(y) or x′ = g^v(x) + ε Σ_ℓ f_ℓ(x) from t₀ to
    t₀ + t_end with fixed-step RK4, halving the step until two runs agree to tol.

    Args:
        spec (ProblemSpec): Problem to solve.
        eps (float): Perturbation size.
        x0 (Sequence[complex]): Initial point.
        t_end (float): Length of the time window.
        t0 (float): Initial time.
        samples (int): Number of equally spaced sample times, ends included.
        steps (int): Initial RK4 steps per sample interval.
        tol (float): Step-halving stop criterion.

    Returns:
        Trajectory: States at the sample times.
    '''
    times = np.linspace(t0, t0 + t_end, samples)
    steps = steps or _initial_substeps(t_end, samples)
    x0 = np.asarray(x0, dtype=complex)

    return integrate_halving(_direct_rhs(spec, eps), x0, times, steps, tol)


def richardson_ratio(spec: ProblemSpec, eps: float, x0: Sequence[complex], t_end: float, steps: int) -> float:
    '''
    |x_h − x_{h/2}| / |x_{h/2} − x_{h/4}| at t_end for h = t_end/steps; about 16
    for a fourth-order method in its asymptotic regime.
    '''
    rhs = _direct_rhs(spec, eps)
    x0 = np.asarray(x0, dtype=complex)
    finals = [rk4_integrate(rhs, x0, 0.0, t_end, steps * 2 ** level) for level in range(3)]

    return float(np.linalg.norm(finals[0] - finals[1]) / np.linalg.norm(finals[1] - finals[2]))


@dataclass(frozen=True)
class AveragingResult:
    '''
    Attributes:
        times (np.ndarray): Sample times.
        averaged (np.ndarray): y(t) = W_{κ(tω;t₀)}(Y(t)) at each sample.
        reference (np.ndarray): Direct solution at each sample.
        errors (np.ndarray): Pointwise ‖averaged − reference‖.
    '''

    times: np.ndarray
    averaged: np.ndarray
    reference: np.ndarray
    errors: np.ndarray


def averaged_solve(spec: ProblemSpec, eps: float, x0: Sequence[complex], t_end: float, N: int = settings.ORDER,
                   t0: float = 0.0, samples: int = 2, tol: float = settings.SOLVE_TOL) -> AveragingResult:
    '''
    Integrates the averaged problem Y′ = W_β̄(t₀)(Y), Y(t₀) = y₀, and maps it back
    with the periodic change of variables y = W_{κ(tω;t₀)}(Y).

    Raises:
        ValueError: For autonomous problems.
        ResonanceError: If some letter sum is resonant.
    '''
    if spec.kind != QUASIPERIODIC:
        raise ValueError('Averaging applies to quasiperiodic problems.')

    omega = spec.model.omega
    support = spec.support
    tol_resonance = spec.model.resonance_tol
    gamma = build_gamma(omega, support, N, tol_resonance)
    averaged_field = StackedFields([series_field(spec, beta_bar(omega, support, N, t0, tol_resonance), eps)])

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return averaged_field.evaluate(y, np.ones(1))

    times = np.linspace(t0, t0 + t_end, samples)
    x0 = np.asarray(x0, dtype=complex)
    slow = integrate_halving(rhs, x0, times, _initial_substeps(t_end, samples), tol)

    averaged = np.array([
        eval_series(spec, kappa(gamma, t * omega, t0), eps, state)
        for t, state in zip(times, slow.states)
    ])
    reference = direct_solve(spec, eps, x0, t_end, t0, samples, tol=tol).states
    errors = np.linalg.norm(averaged - reference, axis=1)

    logger.debug('averaged solve: eps=%g, N=%d, final error %.3e', eps, N, errors[-1])

    return AveragingResult(times, averaged, reference, errors)


####################################### scaling #######################################
def _fit(identity: str, eps_list: list[float], errors: list[float], expected: float) -> SlopeFit:
    if max(errors) < settings.NOISE_FLOOR:
        return SlopeFit(identity=identity, eps=eps_list, errors=errors, expected=expected,
                        below_noise_floor=True, passed=True)

    clipped = np.maximum(np.asarray(errors), np.finfo(float).tiny)
    slope = float(np.polyfit(np.log(eps_list), np.log(clipped), 1)[0])

    return SlopeFit(identity=identity, eps=eps_list, errors=errors, slope=slope, expected=expected,
                    passed=slope >= expected - SLOPE_MARGIN)


def default_x0(spec: ProblemSpec) -> np.ndarray:
    x0 = np.full(spec.dim, 0.1, dtype=complex)
    if spec.nangles:
        x0[spec.dim - spec.nangles:] = 0.0

    return x0


def scaling_harness(spec: ProblemSpec, eps_list: Sequence[float], N: int = settings.ORDER,
                    t_end: Optional[float] = None, x0: Optional[Sequence[complex]] = None,
                    t0: float = 0.0) -> ScalingReport:
    '''
    Sweeps ε and fits log(error) against log(ε) for each identity of the problem.

    Quasiperiodic problems check the solution representation y(t₀ + 1) = W_α(y₀)
    (expected order N + 1) and the averaged representation at t₀ + t_end, with
    t_end = 1/ε unless given (expected order N, one power lost to the window).
    Autonomous problems check x(1) = φ_v(W_{γ(1,v)}(x₀)) (order N + 1) and the
    normal-form decomposition, which holds to rounding.

    Args:
        spec (ProblemSpec): Problem to sweep.
        eps_list (Sequence[float]): At least three distinct positive values.
        N (int): Truncation order.
        t_end (float): Averaging window; 1/ε when omitted.
        x0 (Sequence[complex]): Initial point; 0.1 in every polynomial coordinate by default.
        t0 (float): Initial time of quasiperiodic problems.

    Returns:
        ScalingReport: One slope fit per identity.
    '''
    eps_list = sorted({float(eps) for eps in eps_list}, reverse=True)
    if len(eps_list) < 3 or eps_list[-1] <= 0:
        raise ValueError('The sweep needs at least three distinct positive eps values.')

    x0 = default_x0(spec) if x0 is None else np.asarray(x0, dtype=complex)
    errors = {}

    def record(identity: str, expected: float, error: float):
        errors.setdefault((identity, expected), []).append(float(error))

    if spec.kind == QUASIPERIODIC:
        gamma = build_gamma(spec.model.omega, spec.support, N, spec.model.resonance_tol)
        alpha = eval_alpha(gamma, t0 + 1.0, t0)

        for eps in eps_list:
            represented = solution_representation(spec, alpha, eps, x0)
            reference = direct_solve(spec, eps, x0, 1.0, t0).final
            record('solution representation', N + 1, np.linalg.norm(represented - reference))

            window = 1.0 / eps if t_end is None else t_end
            record('averaged representation', N, averaged_solve(spec, eps, x0, window, N, t0).errors[-1])

    if spec.kind == AUTONOMOUS:
        gu = build_gamma_u(spec.model, spec.support, N)
        v = spec.model.v
        gamma = eval_gamma_u(gu, 1.0, v)

        for eps in eps_list:
            represented = solution_representation(spec, gamma, eps, x0, v)
            reference = direct_solve(spec, eps, x0, 1.0).final
            record('solution representation', N + 1, np.linalg.norm(represented - reference))
            record('normal-form decomposition', N + 1, decomposition_residual(spec, gu, eps, x0))

    fits = [_fit(identity, eps_list, values, expected) for (identity, expected), values in errors.items()]
    for fit in fits:
        logger.info('%s: slope %s (expected %g)', fit.identity, fit.slope, fit.expected)

    return ScalingReport(order=N, fits=fits, passed=all(fit.passed for fit in fits))
