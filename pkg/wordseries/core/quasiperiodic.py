'''
Universal coefficients of quasiperiodically forced problems y′ = ε Σ_k e^{ik·ωt} f̂_k(y).

Γ_w(τ, θ; θ₀) is built once per (ω, support, N) by recursion on the word; α, ᾱ
and κ are evaluations of Γ at particular arguments and β̄(t₀) has its own
recursion.
'''
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from wordseries import settings
from wordseries.core.models import (
    CoefficientTable,
    EigenvalueModel,
    GammaTable,
    TrigTauPoly,
    Word,
    add_letters,
    factorial_inverse,
    zero_letter,
)
from wordseries.core.utils.constants import FACTORIZATION_TOL, FINITE_DIFFERENCE_TOL, GROUP_LAW_TOL, TRANSPORT_TOL
from wordseries.core.utils.exceptions import DimensionMismatch
from wordseries.core.utils.serializers import IdentityReport
from wordseries.core.utils.writers import format_word
from wordseries.core.words import all_words, convolve, leading_zeros, memoized_recursion, normalize_support, xi_shift

logger = logging.getLogger(__name__)


####################################### Γ #######################################
def build_gamma(omega: Sequence[float], support: Iterable[Sequence[int]], N: int = settings.ORDER,
                resonance_tol: float = settings.RESONANCE_TOL) -> GammaTable:
    '''
    Builds Γ_w(τ, θ; θ₀) for every word of length ≤ N over the support.

    Words are dispatched on their leading zero block 0^r, the next letter k and
    the remainder. With c = i/(k·ω):
        Γ_{0^r} = τ^r/r!
        Γ_k = c(e^{ik·θ₀} − e^{ik·θ})
        Γ_{0^r k} = c(Γ_{0^{r−1}k} − Γ_{0^r}e^{ik·θ})
        Γ_{k ℓ₁⋯} = c(e^{ik·θ₀}Γ_{ℓ₁⋯} − Γ_{(k+ℓ₁)⋯})
        Γ_{0^r k ℓ₁⋯} = c(Γ_{0^{r−1}k ℓ₁⋯} − Γ_{0^r (k+ℓ₁)⋯})

    Args:
        omega (Sequence[float]): Frequency vector ω of length d.
        support (Iterable[Sequence[int]]): Letters carrying a Fourier mode.
        N (int): Truncation order.
        resonance_tol (float): Relative resonance threshold.

    Returns:
        GammaTable: Γ on the words over the support. Letter sums created along the
            way are solved but not stored.

    Raises:
        ResonanceError: If some letter sum k ≠ 0 has k·ω too close to 0.
    '''
    model = EigenvalueModel.quasiperiodic(omega, resonance_tol)
    support = normalize_support(support, model.d)
    zero = zero_letter(model.d)
    one = TrigTauPoly.monomial(0, zero, zero)

    def clause(word: Word, gamma: Callable[[Word], TrigTauPoly]) -> TrigTauPoly:
        r = leading_zeros(word)
        if r == len(word):
            return TrigTauPoly.monomial(r, zero, zero, factorial_inverse(r))

        k, rest = word[r], word[r + 1:]
        scale = -1 / model.divisor(k)  # i/(k·ω), since ν_k^ω = ik·ω

        if not rest:
            if r == 0:
                return scale * (one.shift_theta0(k) - one.shift_theta(k))
            return scale * (gamma(word[:r - 1] + (k,)) - gamma(word[:r]).shift_theta(k))

        merged = word[:r] + (add_letters(k, rest[0]),) + rest[1:]
        if r == 0:
            return scale * (gamma(rest).shift_theta0(k) - gamma(merged))
        return scale * (gamma(word[:r - 1] + (k,) + rest) - gamma(merged))

    gamma = memoized_recursion(clause)
    entries = {word: gamma(word) for word in all_words(support, N)}

    logger.debug('built gamma: N=%d, %d words, %d solved', N, len(entries), len(gamma.memo))

    return GammaTable(N, model.omega, support, entries, resonance_tol)


def eval_alpha(g: GammaTable, t: float, t0: float) -> CoefficientTable:
    '''α(t; t₀) = Γ(t − t₀, tω; t₀ω).'''
    return g.evaluate(t - t0, t * g.omega, t0 * g.omega)


def eval_alpha_bar(g: GammaTable, t: float, t0: float) -> CoefficientTable:
    '''ᾱ(t; t₀) = Γ(t − t₀, t₀ω; t₀ω), the coefficients of the averaged problem.'''
    return g.evaluate(t - t0, t0 * g.omega, t0 * g.omega)


def kappa(g: GammaTable, theta: Sequence[float], t0: float) -> CoefficientTable:
    '''κ(θ; t₀) = Γ(0, θ; t₀ω), the periodic change of variables.'''
    return g.evaluate(0.0, theta, t0 * g.omega)


####################################### β̄ #######################################
def beta_bar(omega: Sequence[float], support: Iterable[Sequence[int]], N: int = settings.ORDER, t0: float = 0.0,
             resonance_tol: float = settings.RESONANCE_TOL) -> CoefficientTable:
    '''
    Coefficients β̄(t₀) of the averaged field W_β̄.

    β̄_∅ = 0, β̄_0 = 1, β̄_{0^{r+1}} = 0, β̄_k = 0 for k ≠ 0, and with c = i/(k·ω)
    and e_k = e^{ik·ωt₀}:
        β̄_{0k} = −c·e_k
        β̄_{0^r k} = c·β̄_{0^{r−1}k}                   (r ≥ 2)
        β̄_{k ℓ₁⋯} = c(e_k·β̄_{ℓ₁⋯} − β̄_{(k+ℓ₁)⋯})
        β̄_{0^r k ℓ₁⋯} = c(β̄_{0^{r−1}k ℓ₁⋯} − β̄_{0^r (k+ℓ₁)⋯})

    Raises:
        ResonanceError: If some letter sum k ≠ 0 has k·ω too close to 0.
    '''
    model = EigenvalueModel.quasiperiodic(omega, resonance_tol)
    support = normalize_support(support, model.d)
    theta0 = t0 * model.omega

    def clause(word: Word, beta: Callable[[Word], complex]) -> complex:
        r = leading_zeros(word)
        if r == len(word):
            return 1.0 if r == 1 else 0.0

        k, rest = word[r], word[r + 1:]
        scale = -1 / model.divisor(k)
        phase = np.exp(1j * float(np.dot(k, theta0)))

        if not rest:
            if r == 0:
                return 0.0
            if r == 1:
                return -scale * phase
            return scale * beta(word[:r - 1] + (k,))

        merged = word[:r] + (add_letters(k, rest[0]),) + rest[1:]
        if r == 0:
            return scale * (phase * beta(rest) - beta(merged))
        return scale * (beta(word[:r - 1] + (k,) + rest) - beta(merged))

    beta = memoized_recursion(clause)
    entries = {word: beta(word) for word in all_words(support, N)}

    return CoefficientTable(N, model.d, entries, support)


####################################### identities #######################################
@lru_cache(maxsize=16)
def _transport_lhs(g: GammaTable) -> GammaTable:
    entries = {word: poly.d_tau() + poly.d_theta(g.omega) for word, poly in g.entries.items()}

    return GammaTable(g.order, g.omega, g.support, entries, g.resonance_tol)


def transport_residual(g: GammaTable, tau: float, theta: Sequence[float], theta0: Sequence[float]) -> float:
    '''
    Largest word-wise residual of ∂Γ/∂τ + ω·∇_θΓ = Γ⋆B(θ), where B(θ) carries
    e^{ik·θ} on the one-letter word k. Both sides are differentiated exactly.
    '''
    lhs = _transport_lhs(g).evaluate(tau, theta, theta0)
    values = g.evaluate(tau, theta, theta0)
    theta = np.asarray(theta, dtype=float)

    residual = 0.0
    for word in g.entries:
        rhs = 0j
        if word:
            rhs = values[word[:-1]] * np.exp(1j * float(np.dot(word[-1], theta)))
        residual = max(residual, abs(lhs[word] - rhs))

    return residual


def _rng_angles(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=d)


def gamma_shift_identity(g: GammaTable, theta0: Sequence[float], samples: int = settings.SAMPLES,
                         seed: int = settings.SEED, tol: float = GROUP_LAW_TOL) -> IdentityReport:
    '''
    Checks Γ(τ, θ; θ₀) = Ξ_{θ₀}Γ(τ, θ − θ₀; 0) and the shifted group law
    Γ(τ₁, θ₁; 0)⋆Ξ_{θ₁}Γ(τ₂, θ₂; 0) = Γ(τ₁ + τ₂, θ₁ + θ₂; 0) at sampled arguments.
    '''
    rng = np.random.default_rng(seed)
    theta0 = np.asarray(theta0, dtype=float)
    origin = np.zeros(g.d)

    def deviations():
        for sample in range(samples):
            tau1, tau2 = rng.uniform(-1, 1, size=2)
            theta1, theta2 = _rng_angles(rng, g.d), _rng_angles(rng, g.d)

            shifted = xi_shift(g.model, theta0, g.evaluate(tau1, theta1 - theta0, origin))
            word, deviation = g.evaluate(tau1, theta1, theta0).largest_difference(shifted)
            yield f'shift, sample {sample}, word {format_word(word)}', deviation

            product = convolve(g.evaluate(tau1, theta1, origin), xi_shift(g.model, theta1, g.evaluate(tau2, theta2, origin)))
            word, deviation = g.evaluate(tau1 + tau2, theta1 + theta2, origin).largest_difference(product)
            yield f'shifted group law, sample {sample}, word {format_word(word)}', deviation

    return IdentityReport.from_deviations('theta0 shift of gamma', deviations(), tol)


def group_law_check(g: GammaTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                    tol: float = GROUP_LAW_TOL) -> IdentityReport:
    '''Two-parameter group law Γ(τ₁, θ₁; θ₀)⋆Γ(τ₂, θ₂; θ₁) = Γ(τ₁ + τ₂, θ₂; θ₀).'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            tau1, tau2 = rng.uniform(-1, 1, size=2)
            theta0, theta1, theta2 = (_rng_angles(rng, g.d) for _ in range(3))

            product = convolve(g.evaluate(tau1, theta1, theta0), g.evaluate(tau2, theta2, theta1))
            word, deviation = g.evaluate(tau1 + tau2, theta2, theta0).largest_difference(product)
            yield f'sample {sample}, word {format_word(word)}', deviation

    return IdentityReport.from_deviations('two-parameter group law of gamma', deviations(), tol)


def transport_check(g: GammaTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                    tol: float = TRANSPORT_TOL) -> IdentityReport:
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            tau = rng.uniform(-1, 1)
            theta, theta0 = _rng_angles(rng, g.d), _rng_angles(rng, g.d)
            yield f'sample {sample}', transport_residual(g, tau, theta, theta0)

    return IdentityReport.from_deviations('transport equation of gamma', deviations(), tol)


def alpha_bar_group_check(g: GammaTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                          tol: float = FACTORIZATION_TOL) -> IdentityReport:
    '''One-parameter group ᾱ(t₀ + τ₁ + τ₂; t₀) = ᾱ(t₀ + τ₁; t₀)⋆ᾱ(t₀ + τ₂; t₀).'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            t0, tau1, tau2 = rng.uniform(-1, 1, size=3)
            product = convolve(eval_alpha_bar(g, t0 + tau1, t0), eval_alpha_bar(g, t0 + tau2, t0))
            word, deviation = eval_alpha_bar(g, t0 + tau1 + tau2, t0).largest_difference(product)
            yield f'sample {sample}, word {format_word(word)}', deviation

    return IdentityReport.from_deviations('one-parameter group of alpha bar', deviations(), tol)


def factorization_check(g: GammaTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                        tol: float = FACTORIZATION_TOL) -> IdentityReport:
    '''α(t; t₀) = ᾱ(t; t₀)⋆κ(tω; t₀).'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            t, t0 = rng.uniform(-1, 1, size=2)
            product = convolve(eval_alpha_bar(g, t, t0), kappa(g, t * g.omega, t0))
            word, deviation = eval_alpha(g, t, t0).largest_difference(product)
            yield f'sample {sample}, word {format_word(word)}', deviation

    return IdentityReport.from_deviations('factorization alpha = alpha bar * kappa', deviations(), tol)


def kappa_periodicity_check(g: GammaTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                            tol: float = FACTORIZATION_TOL) -> IdentityReport:
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            theta, t0 = _rng_angles(rng, g.d), rng.uniform(-1, 1)
            reference = kappa(g, theta, t0)
            for j in range(g.d):
                shifted = theta.copy()
                shifted[j] += 2 * np.pi
                yield f'sample {sample}, angle {j}', kappa(g, shifted, t0).max_difference(reference)

    return IdentityReport.from_deviations('2pi periodicity of kappa', deviations(), tol)


def beta_bar_derivative_check(g: GammaTable, t0: float = 0.0, step: float = 1e-4,
                              tol: float = FINITE_DIFFERENCE_TOL) -> IdentityReport:
    '''β̄(t₀) against the central difference of ᾱ(t; t₀) at t = t₀.'''
    reference = beta_bar(g.omega, g.support, g.order, t0, g.resonance_tol)
    forward = eval_alpha_bar(g, t0 + step, t0)
    backward = eval_alpha_bar(g, t0 - step, t0)

    def deviations():
        for word in g.entries:
            derivative = (forward[word] - backward[word]) / (2 * step)
            yield format_word(word), abs(derivative - reference[word])

    return IdentityReport.from_deviations('beta bar as derivative of alpha bar', deviations(), tol)


def alpha_bar_period_check(g: GammaTable, t0: float = 0.0, periods: int = 1,
                           tol: float = FACTORIZATION_TOL) -> IdentityReport:
    '''For d = 1, ᾱ and α coincide at t = t₀ + 2πn/ω.'''
    if g.d != 1:
        raise DimensionMismatch('Periodic coincidence of alpha bar and alpha needs d = 1.')

    t = t0 + 2 * np.pi * periods / float(g.omega[0])
    word, deviation = eval_alpha_bar(g, t, t0).largest_difference(eval_alpha(g, t, t0))

    return IdentityReport.from_deviations('alpha bar meets alpha after a period', [(format_word(word), deviation)], tol)


