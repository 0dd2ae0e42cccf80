'''
Polynomial problems: word basis functions, brackets, truncated word series and
the flows of the unperturbed field.

Modes are stored unscaled; ε^{|w|} is applied only when a series is evaluated.
'''
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from wordseries import settings
from wordseries.core.autonomous import beta_bar_auto, rho
from wordseries.core.models import (
    EMPTY,
    CoefficientTable,
    EigenvalueModel,
    GammaUTable,
    Letter,
    Word,
    as_letter,
    is_zero_letter,
    letter_key,
    negate_letter,
    zero_letter,
)
from wordseries.core.polynomials import MultiPoly, PolyMap
from wordseries.core.quasiperiodic import beta_bar
from wordseries.core.utils.constants import (
    ALGEBRA,
    ALGEBRA_TOL,
    ANGLE_SHIFT,
    AUTONOMOUS,
    BRACKET_TOL,
    COMPOSITION_TOL,
    EIGEN_TOL,
    EQUIVARIANCE_TOL,
    FLOW_TOL,
    LINEAR_PROJECTOR,
    PROJECTOR_TOL,
    PULLBACK_TOL,
    QUASIPERIODIC,
    REFERENCE_FIELD_TOL,
)
from wordseries.core.utils.exceptions import (
    DimensionMismatch,
    NotInLieAlgebra,
    SingularTransformation,
    UnknownLetter,
    UnsupportedGenerator,
)
from wordseries.core.utils.serializers import IdentityReport, SuiteReport
from wordseries.core.utils.writers import format_word
from wordseries.core.words import ExtendedPair, convolve, ext_product, letter_sums, shuffle_membership, xi_shift

logger = logging.getLogger(__name__)


####################################### problem #######################################
@dataclass(frozen=True, eq=False)
class ProblemSpec:
    '''
    A polynomial problem: x′ = g(x) + ε Σ_ℓ f_ℓ(x) (autonomous) or
    y′ = ε Σ_k e^{ik·ωt} f̂_k(y) (quasiperiodic).

    Attributes:
        dim (int): Number of variables D.
        model (EigenvalueModel): Eigenvalue structure of the letters.
        modes (Mapping[Letter, PolyMap]): f_ℓ for every letter of the support.
        kind (str): 'quasiperiodic' or 'autonomous'.
        gkind (str): 'linear-projector' or 'angle-shift' for autonomous problems.
        projectors (tuple[np.ndarray, ...]): L_1, …, L_d of a linear-projector problem.
        nangles (int): Trailing variables that are angles (d for angle-shift, else 0).
    '''

    dim: int
    model: EigenvalueModel
    modes: Mapping[Letter, PolyMap]
    kind: str = QUASIPERIODIC
    gkind: Optional[str] = None
    projectors: tuple[np.ndarray, ...] = ()
    nangles: int = 0
    _basis_cache: dict = field(default_factory=dict, init=False, repr=False)
    _bracket_cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        modes = {as_letter(letter): mode for letter, mode in self.modes.items()}
        for letter, mode in modes.items():
            if len(letter) != self.model.d:
                raise DimensionMismatch(f'Letter {letter} does not have {self.model.d} components.')
            if len(mode.components) != self.dim or mode.nvars != self.dim or mode.nangles != self.nangles:
                raise DimensionMismatch(f'Mode {letter} is not a field over {self.dim} variables.')

        object.__setattr__(self, 'modes', modes)
        object.__setattr__(self, 'projectors', tuple(np.asarray(L, dtype=complex) for L in self.projectors))

    @property
    def d(self) -> int:
        return self.model.d

    @property
    def support(self) -> tuple[Letter, ...]:
        return tuple(sorted(self.modes, key=letter_key))

    def mode(self, letter: Letter) -> PolyMap:
        try:
            return self.modes[as_letter(letter)]
        except KeyError:
            raise UnknownLetter(f'Letter {tuple(letter)} has no mode in this problem.')

    def zero_field(self) -> PolyMap:
        return PolyMap.zero(self.dim, self.nangles)

    def perturbation(self) -> PolyMap:
        '''Σ_ℓ f_ℓ, the unscaled perturbing field.'''
        return sum((self.modes[letter] for letter in self.support), self.zero_field())


def generators(spec: ProblemSpec) -> tuple[PolyMap, ...]:
    '''
    The commuting fields g_1, …, g_d: x ↦ L_j x for linear-projector problems,
    the unit vector of angle j for angle-shift problems.

    Raises:
        UnsupportedGenerator: For quasiperiodic problems.
    '''
    if spec.gkind == LINEAR_PROJECTOR:
        return tuple(PolyMap.linear(L) for L in spec.projectors)

    if spec.gkind == ANGLE_SHIFT:
        fields = []
        for j in range(spec.d):
            unit_vector = np.zeros(spec.dim, dtype=complex)
            unit_vector[spec.dim - spec.nangles + j] = 1
            fields.append(PolyMap.constant(unit_vector, spec.nangles))
        return tuple(fields)

    raise UnsupportedGenerator(f'No generators for a {spec.kind} problem.')


def g_field(spec: ProblemSpec, u: Sequence[complex]) -> PolyMap:
    '''g^u = Σ_j u_j g_j.'''
    u = _vector(u, spec.d)
    return sum((u[j] * g for j, g in enumerate(generators(spec))), spec.zero_field())


def _vector(values: Sequence[complex], size: int) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if values.shape != (size,):
        raise DimensionMismatch(f'Expected a vector of length {size}, got shape {values.shape}.')

    return values


def sample_point(spec: ProblemSpec, rng: np.random.Generator, scale: float = 0.1) -> np.ndarray:
    '''Random point with polynomial coordinates in [−scale, scale] and angles in [0, 2π).'''
    point = np.empty(spec.dim, dtype=complex)
    npowers = spec.dim - spec.nangles
    point[:npowers] = rng.uniform(-scale, scale, size=npowers)
    point[npowers:] = rng.uniform(0, 2 * np.pi, size=spec.nangles)

    return point


####################################### word basis #######################################
def word_basis(spec: ProblemSpec, word: Word) -> PolyMap:
    '''
    Word basis function f_{ℓ₁⋯ℓₙ} = f′_{ℓ₂⋯ℓₙ}·f_{ℓ₁}, built exactly and cached on the problem.

    Args:
        spec (ProblemSpec): Problem supplying the modes.
        word (Word): Word over the support.

    Returns:
        PolyMap: f_w. The empty word gives the identity map.

    Raises:
        UnknownLetter: If a letter of the word has no mode.
        UnsupportedGenerator: For ∅ when the problem has angle coordinates.
    '''
    word = tuple(as_letter(letter) for letter in word)
    if word in spec._basis_cache:
        return spec._basis_cache[word]

    if not word:
        if spec.nangles:
            raise UnsupportedGenerator('The identity map has no polynomial form in angle coordinates.')
        basis = PolyMap.identity(spec.dim)
    elif len(word) == 1:
        basis = spec.mode(word[0])
    else:
        basis = word_basis(spec, word[1:]).directional(spec.mode(word[0]))

    spec._basis_cache[word] = basis
    return basis


def lie_bracket(f: PolyMap, g: PolyMap) -> PolyMap:
    '''[f, g] = g′f − f′g.'''
    return g.directional(f) - f.directional(g)


def _series_words(spec: ProblemSpec, table: CoefficientTable) -> list[Word]:
    return [
        word for word in table.words()
        if word and all(letter in spec.modes for letter in word)
    ]


def graded_fields(spec: ProblemSpec, table: CoefficientTable) -> dict[int, PolyMap]:
    '''Σ_{|w| = n} t_w f_w for each length n ≥ 1, unscaled. Words with a letter lacking a mode are skipped.'''
    grades = {}
    for word in _series_words(spec, table):
        term = table[word] * word_basis(spec, word)
        grades[len(word)] = grades[len(word)] + term if len(word) in grades else term

    return grades


def series_field(spec: ProblemSpec, table: CoefficientTable, eps: float) -> PolyMap:
    '''Σ_{1 ≤ |w| ≤ N} ε^{|w|} t_w f_w as one polynomial map.'''
    grades = graded_fields(spec, table)
    return sum((eps ** n * grades[n] for n in sorted(grades)), spec.zero_field())


def eval_series(spec: ProblemSpec, table: CoefficientTable, eps: float, y: Sequence[complex]) -> np.ndarray:
    '''
    W_t(y) = t_∅·y + Σ_{1 ≤ |w| ≤ N} ε^{|w|} t_w f_w(y).

    Args:
        spec (ProblemSpec): Problem supplying the modes.
        table (CoefficientTable): Coefficients t.
        eps (float): Perturbation size.
        y (Sequence[complex]): Point of dimension D.

    Returns:
        np.ndarray: The truncated series at y.
    '''
    y = _vector(y, spec.dim)
    value = table[EMPTY] * y
    for word in _series_words(spec, table):
        value = value + eps ** len(word) * table[word] * word_basis(spec, word).evaluate(y)

    return value


def composition_check(spec: ProblemSpec, gamma: CoefficientTable, delta: CoefficientTable, eps: float,
                      y: Sequence[complex], tol: float = COMPOSITION_TOL) -> IdentityReport:
    '''W_δ(W_γ(y)) = W_{γ⋆δ}(y) up to the truncation error.'''
    lhs = eval_series(spec, delta, eps, eval_series(spec, gamma, eps, y))
    rhs = eval_series(spec, convolve(gamma, delta), eps, y)

    return IdentityReport.from_deviations('composition of word series', [('y', np.max(np.abs(lhs - rhs)))], tol)


####################################### flows #######################################
def flow_jacobian(spec: ProblemSpec, u: Sequence[complex]) -> np.ndarray:
    '''φ′_u, which is constant in x for both generator kinds.'''
    u = _vector(u, spec.d)

    if spec.gkind == LINEAR_PROJECTOR:
        return np.eye(spec.dim, dtype=complex) + sum((np.exp(u[j]) - 1) * L for j, L in enumerate(spec.projectors))
    if spec.gkind == ANGLE_SHIFT:
        return np.eye(spec.dim, dtype=complex)

    raise UnsupportedGenerator(f'No flow for a {spec.kind} problem.')


def flow_phi(spec: ProblemSpec, u: Sequence[complex], x: Sequence[complex]) -> np.ndarray:
    '''
    Time-one flow φ_u of g^u: (I + Σ_j (e^{u_j} − 1)L_j)x for linear-projector
    problems, a shift of the angles by u for angle-shift problems.

    Raises:
        UnsupportedGenerator: For quasiperiodic problems.
    '''
    u = _vector(u, spec.d)
    x = _vector(x, spec.dim)

    if spec.gkind == ANGLE_SHIFT:
        shifted = x.copy()
        shifted[spec.dim - spec.nangles:] += u
        return shifted

    return flow_jacobian(spec, u) @ x


def flow_equivariance_check(spec: ProblemSpec, samples: int = settings.SAMPLES, seed: int = settings.SEED,
                            tol: float = FLOW_TOL) -> IdentityReport:
    '''φ′_u(x)⁻¹ f_ℓ(φ_u(x)) = exp(ν_ℓ^u) f_ℓ(x) at sampled (u, x) for every mode.'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            u = rng.uniform(-1, 1, size=spec.d)
            x = sample_point(spec, rng)
            jacobian = flow_jacobian(spec, u)
            moved = flow_phi(spec, u, x)

            for letter in spec.support:
                mode = spec.modes[letter]
                lhs = np.linalg.solve(jacobian, mode.evaluate(moved))
                rhs = np.exp(spec.model.eigenvalue(letter, u)) * mode.evaluate(x)
                yield f'sample {sample}, letter {format_word((letter,))}', float(np.max(np.abs(lhs - rhs)))

    return IdentityReport.from_deviations('flow equivariance of the modes', deviations(), tol)


def flow_series(spec: ProblemSpec, gu: GammaUTable, tau: float, u: Sequence[complex], eps: float,
                x: Sequence[complex]) -> np.ndarray:
    '''Φ_{τ,u}(x) = φ_u(W_{γ(τ,u)}(x)).'''
    return flow_phi(spec, u, eval_series(spec, gu.evaluate(tau, u), eps, x))


def flow_composition_check(spec: ProblemSpec, gu: GammaUTable, eps: float, samples: int = settings.SAMPLES,
                           seed: int = settings.SEED, tol: float = FLOW_TOL) -> IdentityReport:
    '''Φ_{τ,u}∘Φ_{τ′,u′} = Φ_{τ+τ′,u+u′} at sampled real arguments.'''
    rng = np.random.default_rng(seed)

    def deviations():
        for sample in range(samples):
            tau1, tau2 = rng.uniform(-0.5, 0.5, size=2)
            u1, u2 = rng.uniform(-0.5, 0.5, size=spec.d), rng.uniform(-0.5, 0.5, size=spec.d)
            x = sample_point(spec, rng)

            composed = flow_series(spec, gu, tau1, u1, eps, flow_series(spec, gu, tau2, u2, eps, x))
            direct = flow_series(spec, gu, tau1 + tau2, u1 + u2, eps, x)
            yield f'sample {sample}', float(np.max(np.abs(composed - direct)))

    return IdentityReport.from_deviations('flow composition', deviations(), tol)


def solution_representation(spec: ProblemSpec, table: CoefficientTable, eps: float, x0: Sequence[complex],
                            u: Optional[Sequence[complex]] = None) -> np.ndarray:
    '''
    W_α(y₀) for quasiperiodic problems; φ_u(W_γ(x₀)) with u = tv for
    autonomous ones, where table holds γ(t, tv).
    '''
    value = eval_series(spec, table, eps, x0)
    if spec.kind == QUASIPERIODIC:
        return value

    if u is None:
        raise ValueError('Autonomous solutions need the flow argument u = tv.')

    return flow_phi(spec, u, value)


def pullback_check(spec: ProblemSpec, u: Sequence[complex], delta: CoefficientTable, eps: float,
                   x: Sequence[complex], tol: float = PULLBACK_TOL) -> IdentityReport:
    '''W_δ(φ_u(x)) = φ_u(W_{Ξ_uδ}(x)) for a character δ.'''
    lhs = eval_series(spec, delta, eps, flow_phi(spec, u, x))
    rhs = flow_phi(spec, u, eval_series(spec, xi_shift(spec.model, u, delta), eps, x))

    return IdentityReport.from_deviations('pullback by the flow', [('x', np.max(np.abs(lhs - rhs)))], tol)


def ext_apply(spec: ProblemSpec, pair: ExtendedPair, eps: float, x: Sequence[complex]) -> np.ndarray:
    '''Action φ_u∘W_δ of the extended word series (u, δ).'''
    u, delta = pair
    return flow_phi(spec, u, eval_series(spec, delta, eps, x))


def ext_composition_check(spec: ProblemSpec, first: ExtendedPair, second: ExtendedPair, eps: float,
                          x: Sequence[complex], tol: float = FLOW_TOL) -> IdentityReport:
    '''Acting with p then q matches acting with p★q.'''
    composed = ext_apply(spec, second, eps, ext_apply(spec, first, eps, x))
    product = ext_apply(spec, ext_product(spec.model, first, second), eps, x)

    return IdentityReport.from_deviations(
        'extended series composition', [('x', np.max(np.abs(composed - product)))], tol
    )


####################################### hypotheses #######################################
def eigen_check(spec: ProblemSpec, N: int = settings.ORDER) -> SuiteReport:
    '''
    Hypotheses of a problem: [g_j, f_ℓ] = ν_{j,ℓ} f_ℓ as polynomial identities,
    L_jL_k = δ_{jk}L_j for linear-projector problems, and nonresonance of v on
    every letter sum of up to N support letters.

    Returns:
        SuiteReport: One report per hypothesis. Nonresonance deviations are the
            ratio of the threshold to |ν_ℓ^v| and fail once they reach 1.
    '''
    reports = []

    if spec.kind == AUTONOMOUS:
        fields = generators(spec)

        def eigen_deviations():
            for j, g in enumerate(fields):
                for letter in spec.support:
                    mode = spec.modes[letter]
                    difference = lie_bracket(g, mode) - spec.model.nu_of(letter)[j] * mode
                    yield f'g_{j + 1}, letter {format_word((letter,))}', difference.max_coefficient()

        reports.append(IdentityReport.from_deviations('eigen relations', eigen_deviations(), EIGEN_TOL))

    if spec.gkind == LINEAR_PROJECTOR:
        def projector_deviations():
            for j, first in enumerate(spec.projectors):
                for k, second in enumerate(spec.projectors):
                    expected = first if j == k else np.zeros_like(first)
                    yield f'L_{j + 1} L_{k + 1}', float(np.max(np.abs(first @ second - expected)))

        reports.append(IdentityReport.from_deviations('projector algebra', projector_deviations(), PROJECTOR_TOL))

    def resonance_deviations():
        for total in letter_sums(spec.support, N):
            yield f'letter sum {format_word((total,))}', spec.model.resonance_ratio(total)

    reports.append(IdentityReport.from_deviations('nonresonance', resonance_deviations(), 1.0))

    return SuiteReport.from_reports('hypotheses', reports)


####################################### bracket form #######################################
def nested_bracket(spec: ProblemSpec, word: Word) -> PolyMap:
    '''Left-normed bracket [[⋯[f_{ℓ₁}, f_{ℓ₂}], ⋯], f_{ℓₙ}].'''
    word = tuple(as_letter(letter) for letter in word)
    if word in spec._bracket_cache:
        return spec._bracket_cache[word]

    if len(word) == 1:
        bracket = spec.mode(word[0])
    else:
        bracket = lie_bracket(nested_bracket(spec, word[:-1]), spec.mode(word[-1]))

    spec._bracket_cache[word] = bracket
    return bracket


def dsw_bracket_grades(spec: ProblemSpec, b: CoefficientTable) -> dict[int, PolyMap]:
    '''(1/r) Σ_{|w| = r} b_w [[⋯[f_{ℓ₁}, f_{ℓ₂}], ⋯], f_{ℓᵣ}] for each r ≥ 1.'''
    grades = {}
    for word in _series_words(spec, b):
        term = (b[word] / len(word)) * nested_bracket(spec, word)
        grades[len(word)] = grades[len(word)] + term if len(word) in grades else term

    return grades


def dsw_bracket_series(spec: ProblemSpec, b: CoefficientTable, eps: float, y: Sequence[complex],
                       tol: float = ALGEBRA_TOL) -> np.ndarray:
    '''
    Iterated-bracket form Σ_r (ε^r/r) Σ_{|w|=r} b_w [[⋯[f_{ℓ₁}, f_{ℓ₂}], ⋯], f_{ℓᵣ}](y)
    of W_b for an infinitesimal character b.

    Raises:
        NotInLieAlgebra: If b fails the infinitesimal shuffle relations.
    '''
    report = shuffle_membership(b, ALGEBRA, tol)
    if not report.passed:
        raise NotInLieAlgebra(f'Coefficients violate the shuffle relations at {report.first_violation}.')

    y = _vector(y, spec.dim)
    grades = dsw_bracket_grades(spec, b)

    return sum((eps ** r * grades[r].evaluate(y) for r in sorted(grades)), np.zeros(spec.dim, dtype=complex))


def bracket_form_check(spec: ProblemSpec, b: CoefficientTable, tol: float = BRACKET_TOL) -> IdentityReport:
    '''Grade-by-grade agreement of the word series of b with its bracket form.'''
    series = graded_fields(spec, b)
    brackets = dsw_bracket_grades(spec, b)

    def deviations():
        for r in sorted(set(series) | set(brackets)):
            difference = series.get(r, spec.zero_field()) - brackets.get(r, spec.zero_field())
            yield f'grade {r}', difference.max_coefficient()

    return IdentityReport.from_deviations('bracket form of the series', deviations(), tol)


def f2_f3_reference(spec: ProblemSpec) -> tuple[PolyMap, PolyMap]:
    '''
    Closed forms of the ε² and ε³ terms of the averaged field at t₀ = 0,
    summed over the support under the (ℓ1-norm, lexicographic) order of letters.

    Raises:
        UnsupportedGenerator: For autonomous problems.
        ResonanceError: If some needed k·ω vanishes.
    '''
    if spec.kind != QUASIPERIODIC:
        raise UnsupportedGenerator('Closed-form averaged fields exist for quasiperiodic problems only.')

    zero = spec.zero_field()
    f0 = spec.modes.get(zero_letter(spec.d), zero)
    nonzero = [k for k in spec.support if not is_zero_letter(k)]

    def f(letter: Letter) -> PolyMap:
        return spec.modes.get(letter, zero)

    def freq(letter: Letter) -> float:
        return (spec.model.divisor(letter) / 1j).real

    def less(first: Letter, second: Letter) -> bool:
        return letter_key(first) < letter_key(second)

    def neg(letter: Letter) -> Letter:
        return negate_letter(letter)

    def add(first: Letter, second: Letter) -> Letter:
        return tuple(a + b for a, b in zip(first, second))

    def bracket3(a: PolyMap, b: PolyMap, c: PolyMap) -> PolyMap:
        return lie_bracket(a, lie_bracket(b, c))

    F2 = zero
    for k in sorted({max(k, neg(k), key=letter_key) for k in nonzero}, key=letter_key):
        F2 = F2 + (1j / freq(k)) * (lie_bracket(f(k) - f(neg(k)), f0) + lie_bracket(f(neg(k)), f(k)))

    F3 = zero
    for k in nonzero:
        double = tuple(-2 * a for a in k)
        F3 = F3 + (1 / freq(k) ** 2) * (
            bracket3(f0, f0, f(k))
            + bracket3(f(k), f(k), f(neg(k)))
            - 0.5 * bracket3(f(k), f(k), f(double))
            + bracket3(f(neg(k)), f(k), f0)
        )

    for m in nonzero:
        for l in nonzero:
            if m == neg(l):
                continue
            F3 = F3 - (1 / (freq(l) * freq(add(m, l)))) * bracket3(f(m), f(l), f0)

    for l in nonzero:
        if neg(l) not in spec.modes:
            continue
        for k in nonzero:
            if less(k, l) and less(k, neg(l)):
                F3 = F3 + (1 / (freq(k) * freq(l))) * bracket3(f(neg(l)), f(l), f(k))

    for k in nonzero:
        if neg(k) not in spec.modes or not less(k, neg(k)):
            continue
        for m in nonzero:
            if less(k, m) and add(m, k) != zero_letter(spec.d):
                F3 = F3 - (1 / (freq(k) * freq(m))) * bracket3(f(m), f(neg(k)), f(k))

    for m in nonzero:
        for l in nonzero:
            n = neg(add(m, l))
            if m in (l, neg(l)) or n not in spec.modes:
                continue
            if less(n, m) and less(n, l):
                F3 = F3 - (1 / (freq(m) * freq(add(m, l)))) * bracket3(f(m), f(l), f(n))

    return F2, F3


def f2_f3_check(spec: ProblemSpec, tol: float = REFERENCE_FIELD_TOL) -> IdentityReport:
    '''The closed forms f_0, F₂, F₃ against the bracket form of β̄(0) through ε³.'''
    coefficients = beta_bar(spec.model.omega, spec.support, 3, 0.0, spec.model.resonance_tol)
    grades = dsw_bracket_grades(spec, coefficients)
    F2, F3 = f2_f3_reference(spec)
    references = {1: spec.modes.get(zero_letter(spec.d), spec.zero_field()), 2: F2, 3: F3}

    def deviations():
        for r, reference in references.items():
            yield f'grade {r}', (grades.get(r, spec.zero_field()) - reference).max_coefficient()

    return IdentityReport.from_deviations('closed-form averaged field', deviations(), tol)


####################################### normal form #######################################
@dataclass(frozen=True, eq=False)
class NormalForm:
    '''
    g + εf = g̃^v + W_β̄ split by powers of ε.

    Attributes:
        generator (PolyMap): g^v.
        rho_grades (dict[int, PolyMap]): Grades of W_{ρ(v)}, unscaled.
        beta_grades (dict[int, PolyMap]): Grades of W_β̄, unscaled.
        eps (float): Perturbation size.
        order (int): Truncation order N.
    '''

    generator: PolyMap
    rho_grades: dict
    beta_grades: dict
    eps: float
    order: int

    def _scaled(self, grades: dict) -> PolyMap:
        return sum((self.eps ** r * grades[r] for r in sorted(grades)), PolyMap.zero(self.generator.nvars,
                                                                                      self.generator.nangles))

    @property
    def gtilde(self) -> PolyMap:
        '''g̃^v = g^v + W_{ρ(v)}.'''
        return self.generator + self._scaled(self.rho_grades)

    @property
    def wbar(self) -> PolyMap:
        return self._scaled(self.beta_grades)


def normal_form(spec: ProblemSpec, gu: GammaUTable, eps: float) -> NormalForm:
    '''
    Args:
        spec (ProblemSpec): Autonomous problem.
        gu (GammaUTable): γ over the support of the problem.
        eps (float): Perturbation size.

    Returns:
        NormalForm: g̃^v and W_β̄ with their grades.
    '''
    if spec.kind != AUTONOMOUS:
        raise UnsupportedGenerator('Normal forms are defined for autonomous problems.')

    nf = NormalForm(
        generator=g_field(spec, spec.model.v),
        rho_grades=graded_fields(spec, rho(gu, spec.model.v)),
        beta_grades=graded_fields(spec, beta_bar_auto(gu)),
        eps=eps,
        order=gu.order,
    )
    logger.debug('normal form: N=%d, %d basis functions cached', gu.order, len(spec._basis_cache))

    return nf


def graded_bracket(nf: NormalForm) -> dict[int, float]:
    '''Largest coefficient of the ε^m term of [g̃^v, W_β̄] for m = 1, …, N.'''
    gtilde_grades = {0: nf.generator, **nf.rho_grades}
    zero = PolyMap.zero(nf.generator.nvars, nf.generator.nangles)

    sizes = {}
    for m in range(1, nf.order + 1):
        total = zero
        for r, field_r in gtilde_grades.items():
            if m - r in nf.beta_grades:
                total = total + lie_bracket(field_r, nf.beta_grades[m - r])
        sizes[m] = total.max_coefficient()

    return sizes


def commutation_check(nf: NormalForm, tol: float = BRACKET_TOL) -> IdentityReport:
    return IdentityReport.from_deviations(
        'commutation of the normal form',
        ((f'grade {m}', size) for m, size in graded_bracket(nf).items()),
        tol,
    )


def _decomposition_residual(spec: ProblemSpec, nf: NormalForm, x: np.ndarray) -> float:
    lhs = nf.gtilde.evaluate(x) + nf.wbar.evaluate(x)
    rhs = nf.generator.evaluate(x) + nf.eps * spec.perturbation().evaluate(x)

    return float(np.linalg.norm(lhs - rhs))


def decomposition_residual(spec: ProblemSpec, gu: GammaUTable, eps: float, x: Sequence[complex]) -> float:
    '''‖(g̃^v + W_β̄)(x) − (g + εf)(x)‖.'''
    return _decomposition_residual(spec, normal_form(spec, gu, eps), _vector(x, spec.dim))


def decomposition_check(spec: ProblemSpec, gu: GammaUTable, eps: float, samples: int = settings.SAMPLES,
                        seed: int = settings.SEED, tol: float = REFERENCE_FIELD_TOL) -> IdentityReport:
    rng = np.random.default_rng(seed)
    nf = normal_form(spec, gu, eps)

    return IdentityReport.from_deviations(
        'normal-form decomposition',
        ((f'sample {sample}', _decomposition_residual(spec, nf, sample_point(spec, rng))) for sample in range(samples)),
        tol,
    )


####################################### equivariance #######################################
def pulled_back(spec: ProblemSpec, C: np.ndarray) -> ProblemSpec:
    '''The problem in variables ȳ with y = Cȳ: modes C⁻¹f_ℓ(Cȳ).'''
    if spec.nangles:
        raise UnsupportedGenerator('Linear changes of variables need a problem without angles.')

    C = np.asarray(C, dtype=complex)
    if C.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f'C must be {spec.dim}x{spec.dim}.')

    try:
        inverse = np.linalg.inv(C)
    except np.linalg.LinAlgError:
        raise SingularTransformation('C is not invertible.')
    if not np.isfinite(np.linalg.cond(C)) or np.linalg.cond(C) * np.finfo(float).eps >= 1:
        raise SingularTransformation('C is numerically singular.')

    modes = {letter: mode.substitute_linear(C).apply_matrix(inverse) for letter, mode in spec.modes.items()}
    projectors = tuple(inverse @ L @ C for L in spec.projectors)

    return replace(spec, modes=modes, projectors=projectors)


def equivariance_check(spec: ProblemSpec, C: np.ndarray, t: CoefficientTable, eps: float,
                       ybar: Sequence[complex], tol: float = EQUIVARIANCE_TOL) -> IdentityReport:
    '''
    C(W̄_t(ȳ)) = W_t(Cȳ), where W̄ is the series of the pulled-back problem.

    Raises:
        SingularTransformation: If C is not invertible.
    '''
    C = np.asarray(C, dtype=complex)
    pulled = pulled_back(spec, C)
    ybar = _vector(ybar, spec.dim)

    lhs = C @ eval_series(pulled, t, eps, ybar)
    rhs = eval_series(spec, t, eps, C @ ybar)

    return IdentityReport.from_deviations('equivariance', [('ybar', np.max(np.abs(lhs - rhs)))], tol)


####################################### examples #######################################
def example_linear_projector(a: complex = 1.0, b: complex = 1.0, c: complex = 1.0,
                             resonance_tol: float = settings.RESONANCE_TOL) -> ProblemSpec:
    '''
    x′ = Lx + ε f(x) in the plane with L = diag(i, −i), projectors L_1 = diag(1, 0),
    L_2 = diag(0, 1), and modes f_{(1,0)} = (a x₁², b x₁x₂), f_{(2,−1)} = (0, c x₁²).
    '''
    model = EigenvalueModel(v=np.array([1j, -1j]), nu=np.eye(2), resonance_tol=resonance_tol)
    modes = {
        (1, 0): PolyMap((MultiPoly(2, {(2, 0): a}), MultiPoly(2, {(1, 1): b}))),
        (2, -1): PolyMap((MultiPoly(2), MultiPoly(2, {(2, 0): c}))),
    }
    projectors = (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))

    return ProblemSpec(2, model, modes, AUTONOMOUS, LINEAR_PROJECTOR, projectors)


def _sine_forced_modes(nvars: int, nangles: int) -> dict[Letter, PolyMap]:
    def component(exponents: tuple[int, ...], coefficient: complex) -> tuple[MultiPoly, ...]:
        return (MultiPoly(nvars, {exponents: coefficient}, nangles),) + tuple(
            MultiPoly(nvars, {}, nangles) for _ in range(nvars - 1)
        )

    angle = (1,) if nangles else ()
    minus = (-1,) if nangles else ()
    still = (0,) if nangles else ()

    return {
        (1,): PolyMap(component((2,) + angle, 1 / 2j)),
        (-1,): PolyMap(component((2,) + minus, -1 / 2j)),
        (0,): PolyMap(component((1,) + still, 0.25)),
    }


def example_angle_shift(resonance_tol: float = settings.RESONANCE_TOL) -> ProblemSpec:
    '''y′ = ε(y² sin θ + y/4), θ′ = 1, with θ the single angle.'''
    model = EigenvalueModel.quasiperiodic([1.0], resonance_tol)
    return ProblemSpec(2, model, _sine_forced_modes(2, 1), AUTONOMOUS, ANGLE_SHIFT, nangles=1)


def example_quasiperiodic(resonance_tol: float = settings.RESONANCE_TOL) -> ProblemSpec:
    '''y′ = ε(y² sin t + y/4), as modes f̂_{±1}(y) = ±y²/(2i) and f̂_0(y) = y/4.'''
    model = EigenvalueModel.quasiperiodic([1.0], resonance_tol)
    return ProblemSpec(1, model, _sine_forced_modes(1, 0), QUASIPERIODIC)
