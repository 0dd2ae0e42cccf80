from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from wordseries import settings
from wordseries.core.integrators import rk4_integrate
from wordseries.core.models import (
    CoefficientTable,
    EigenvalueModel,
    GammaUTable,
    PolySmoothFn,
    Word,
    add_letters,
    factorial_inverse,
    letter_sum,
    sum_by_index,
    zero_letter,
)
from wordseries.core.utils.constants import ALGEBRA, ALGEBRA_TOL, GROUP_LAW_TOL, TRANSPORT_TOL
from wordseries.core.utils.exceptions import DimensionMismatch, NotInLieAlgebra, OrderMismatch
from wordseries.core.utils.serializers import IdentityReport
from wordseries.core.utils.writers import format_word
from wordseries.core.words import (
    all_words,
    convolve,
    leading_zeros,
    memoized_recursion,
    normalize_support,
    shuffle_membership,
    xi_shift,
)

logger = logging.getLogger(__name__)


####################################### γ #######################################
def build_gamma_u(model: EigenvalueModel, support: Iterable[Sequence[int]], N: int = settings.ORDER) -> GammaUTable:
    '''
    Builds γ_w(τ, u) for every word of length ≤ N over the support, with
    e_ℓ = exp(ν_ℓ^u) and ν = ν_{ℓ₀}^v:
        γ_{0^r} = τ^r/r!
        γ_{ℓ₀} = (e_{ℓ₀} − 1)/ν
        γ_{0^r ℓ₀} = (γ_{0^r}e_{ℓ₀} − γ_{0^{r−1}ℓ₀})/ν
        γ_{ℓ₀ℓ₁⋯} = (γ_{(ℓ₀+ℓ₁)⋯} − γ_{ℓ₁⋯})/ν
        γ_{0^r ℓ₀ℓ₁⋯} = (γ_{0^r (ℓ₀+ℓ₁)⋯} − γ_{0^{r−1}ℓ₀ℓ₁⋯})/ν

    Args:
        model (EigenvalueModel): Eigenvalue structure with velocity v.
        support (Iterable[Sequence[int]]): Letters carrying a mode.
        N (int): Truncation order.

    Returns:
        GammaUTable: γ on the words over the support.

    Raises:
        ResonanceError: If some letter sum ℓ ≠ 0 has ν_ℓ^v too close to 0.
    '''
    support = normalize_support(support, model.d)
    zero = zero_letter(model.d)
    one = PolySmoothFn.monomial(0, zero)

    def clause(word: Word, gamma: Callable[[Word], PolySmoothFn]) -> PolySmoothFn:
        r = leading_zeros(word)
        if r == len(word):
            return PolySmoothFn.monomial(r, zero, factorial_inverse(r))

        head, rest = word[r], word[r + 1:]
        divisor = model.divisor(head)

        if not rest:
            if r == 0:
                return (one.shift(head) - one) / divisor
            return (gamma(word[:r]).shift(head) - gamma(word[:r - 1] + (head,))) / divisor

        merged = word[:r] + (add_letters(head, rest[0]),) + rest[1:]
        if r == 0:
            return (gamma(merged) - gamma(rest)) / divisor
        return (gamma(merged) - gamma(word[:r - 1] + (head,) + rest)) / divisor

    gamma = memoized_recursion(clause)
    entries = {word: gamma(word) for word in all_words(support, N)}

    logger.debug('built gamma_u: N=%d, %d words, %d solved', N, len(entries), len(gamma.memo))

    return GammaUTable(N, model, support, entries)


def eval_gamma_u(g: GammaUTable, tau: float, u: Sequence[complex]) -> CoefficientTable:
    '''γ(τ, u); at (t, tv) these are the coefficients of the solution.'''
    return g.evaluate(tau, u)


def beta_bar_auto(g: GammaUTable) -> CoefficientTable:
    '''β̄_w = ∂γ_w(t, 0)/∂t at t = 0: the sum of the coefficients of the τ¹ terms.'''
    entries = {
        word: sum(c for (p, _), c in poly.terms.items() if p == 1)
        for word, poly in g.entries.items()
    }

    return CoefficientTable(g.order, g.d, entries, g.support)


def rho(g: GammaUTable, u: Sequence[complex]) -> CoefficientTable:
    '''ρ(u)_w = ∂γ_w(0, tu)/∂t at t = 0: Σ c·ν_ℓ^u over the τ⁰ terms.'''
    u = np.asarray(u, dtype=complex)
    if u.shape != (g.d,):
        raise DimensionMismatch(f'Expected a vector of length {g.d}.')

    entries = {
        word: sum(c * g.model.eigenvalue(ell, u) for (p, ell), c in poly.terms.items() if p == 0)
        for word, poly in g.entries.items()
    }

    return CoefficientTable(g.order, g.d, entries, g.support)


####################################### general β #######################################
def solve_general_beta(model: EigenvalueModel, beta: CoefficientTable, N: Optional[int] = None, t_end: float = 1.0,
                       steps: int = settings.RK_STEPS, tol: float = ALGEBRA_TOL) -> CoefficientTable:
    '''
    Integrates α′(t) = α(t)⋆Ξ_{tv}β, α(0) = 1 1, with fixed-step RK4.

    The system is triangular: the equation of a word only reads its proper
    prefixes, (α′)_w = Σ α_a·exp(t ν^v_{ℓ(b)})·β_b over the splittings w = ab
    with b nonempty, where ℓ(b) is the letter sum of b.

    Args:
        model (EigenvalueModel): Eigenvalue structure with velocity v.
        beta (CoefficientTable): Infinitesimal character β.
        N (int): Truncation order of the result; defaults to beta.order.
        t_end (float): Final time.
        steps (int): Number of RK4 steps.
        tol (float): Tolerance of the algebra-membership test on β.

    Returns:
        CoefficientTable: α(t_end) over the letters of β.

    Raises:
        NotInLieAlgebra: If β fails the algebra shuffle relations.
        OrderMismatch: If beta is truncated below N.
    '''
    N = beta.order if N is None else N
    if beta.order < N:
        raise OrderMismatch(f'beta is truncated at {beta.order} < {N}.')
    if beta.dim != model.d:
        raise DimensionMismatch(f'beta letters have {beta.dim} components, model has {model.d}.')

    report = shuffle_membership(beta, ALGEBRA, tol)
    if not report.passed:
        raise NotInLieAlgebra(f'beta violates the shuffle relations at {report.first_violation}.')

    words = all_words(beta.letters, N)
    position = {word: index for index, word in enumerate(words)}
    targets, prefixes, weights, rates = [], [], [], []

    for word in words:
        for cut in range(len(word)):
            suffix = word[cut:]
            if beta[suffix] == 0:
                continue
            targets.append(position[word])
            prefixes.append(position[word[:cut]])
            weights.append(beta[suffix])
            rates.append(model.velocity_eigenvalue(letter_sum(suffix, model.d)))

    targets = np.asarray(targets, dtype=int)
    prefixes = np.asarray(prefixes, dtype=int)
    weights = np.asarray(weights, dtype=complex)
    rates = np.asarray(rates, dtype=complex)

    def rhs(t: float, alpha: np.ndarray) -> np.ndarray:
        return sum_by_index(alpha[prefixes] * weights * np.exp(t * rates), targets, len(words))

    initial = np.zeros(len(words), dtype=complex)
    initial[0] = 1.0
    alpha = rk4_integrate(rhs, initial, 0.0, t_end, steps)

    return CoefficientTable(N, model.d, dict(zip(words, alpha)), beta.letters)


####################################### identities #######################################
@lru_cache(maxsize=16)
def _transport_lhs(g: GammaUTable) -> GammaUTable:
    entries = {word: poly.d_tau() + poly.d_u(g.model) for word, poly in g.entries.items()}

    return GammaUTable(g.order, g.model, g.support, entries)


def transport_residual_u(g: GammaUTable, tau: float, u: Sequence[complex]) -> float:
    '''
    Largest word-wise residual of ∂γ/∂τ + v·∇_uγ = γ⋆B(u), where B(u) carries
    exp(ν_ℓ^u) on the one-letter word ℓ.
    '''
    lhs = _transport_lhs(g).evaluate(tau, u)
    values = g.evaluate(tau, u)

    residual = 0.0
    for word in g.entries:
        rhs = 0j
        if word:
            rhs = values[word[:-1]] * np.exp(g.model.eigenvalue(word[-1], u))
        residual = max(residual, abs(lhs[word] - rhs))

    return residual


def transport_check_u(g: GammaUTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                      tol: float = TRANSPORT_TOL) -> IdentityReport:
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            tau = rng.uniform(-1, 1)
            u = rng.uniform(-1, 1, size=g.d)
            yield f'sample {sample}', transport_residual_u(g, tau, u)

    return IdentityReport.from_deviations('transport equation of gamma_u', deviations(), tol)


def group_law_check(g: GammaUTable, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                    tol: float = GROUP_LAW_TOL) -> IdentityReport:
    '''γ(τ, u)⋆Ξ_uγ(τ′, u′) = γ(τ + τ′, u + u′) at sampled real arguments.'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            tau1, tau2 = rng.uniform(-1, 1, size=2)
            u1, u2 = rng.uniform(-1, 1, size=g.d), rng.uniform(-1, 1, size=g.d)

            product = convolve(g.evaluate(tau1, u1), xi_shift(g.model, u1, g.evaluate(tau2, u2)))
            word, deviation = g.evaluate(tau1 + tau2, u1 + u2).largest_difference(product)
            yield f'sample {sample}, word {format_word(word)}', deviation

    return IdentityReport.from_deviations('group law of gamma_u', deviations(), tol)
