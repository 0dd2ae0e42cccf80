from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from wordseries import settings
from wordseries.core.utils.exceptions import DimensionMismatch, ResonanceError

Letter = tuple[int, ...]
Word = tuple[Letter, ...]

EMPTY: Word = ()


####################################### letters and words #######################################
def as_letter(values: Iterable[int]) -> Letter:
    return tuple(int(value) for value in values)


def zero_letter(d: int) -> Letter:
    return (0,) * d


def add_letters(first: Letter, second: Letter) -> Letter:
    return tuple(a + b for a, b in zip(first, second))


def negate_letter(letter: Letter) -> Letter:
    return tuple(-a for a in letter)


def letter_sum(word: Word, d: int) -> Letter:
    '''Sum ℓ₁ + ⋯ + ℓₙ of the letters of a word (the zero letter for ∅).'''
    total = zero_letter(d)
    for letter in word:
        total = add_letters(total, letter)
    return total


def letter_norm(letter: Letter) -> int:
    return sum(abs(a) for a in letter)


def letter_key(letter: Letter) -> tuple:
    '''Total order on letters: ℓ1 norm first, then lexicographic. The zero letter is the minimum.'''
    return letter_norm(letter), letter


def word_key(word: Word) -> tuple:
    '''Graded order on words: length first, then lexicographic by letters.'''
    return len(word), word


def is_zero_letter(letter: Letter) -> bool:
    return not any(letter)


def _drop_zeros(terms: Mapping) -> MappingProxyType:
    return MappingProxyType({key: complex(value) for key, value in terms.items() if value != 0})


####################################### coefficient tables #######################################
@dataclass(frozen=True)
class CoefficientTable:
    '''
    Truncated family of complex coefficients indexed by words, the numeric
    carrier of α, ᾱ, β̄, κ, γ, ρ and the unit 1 1.

    Attributes:
        order (int): Truncation order N. No stored word is longer than N.
        dim (int): Number of components d of every letter.
        entries (Mapping[Word, complex]): Nonzero coefficients; absent words read as 0.
        alphabet (tuple[Letter, ...]): Letters the table ranges over. When empty,
            the letters appearing in the stored words are used.
    '''

    order: int
    dim: int
    entries: Mapping[Word, complex] = field(default_factory=dict)
    alphabet: tuple[Letter, ...] = ()

    def __post_init__(self):
        for word in self.entries:
            if len(word) > self.order:
                raise ValueError(f'Word of length {len(word)} exceeds truncation order {self.order}.')
            for letter in word:
                if len(letter) != self.dim:
                    raise DimensionMismatch(f'Letter {letter} does not have {self.dim} components.')

        object.__setattr__(self, 'entries', _drop_zeros(self.entries))
        object.__setattr__(self, 'alphabet', tuple(sorted(set(self.alphabet), key=letter_key)))

    def __getitem__(self, word: Word) -> complex:
        return self.entries.get(tuple(word), 0j)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def letters(self) -> tuple[Letter, ...]:
        if self.alphabet:
            return self.alphabet

        seen = {letter for word in self.entries for letter in word}
        return tuple(sorted(seen, key=letter_key))

    def words(self) -> list[Word]:
        '''Stored words in graded lexicographic order.'''
        return sorted(self.entries, key=word_key)

    def largest_difference(self, other: CoefficientTable) -> tuple[Word, float]:
        '''Word with the largest entrywise difference, and that difference.'''
        words = sorted(set(self.entries) | set(other.entries), key=word_key)
        differences = [(word, abs(self[word] - other[word])) for word in words]

        return max(differences, key=lambda item: item[1], default=(EMPTY, 0.0))

    def max_difference(self, other: CoefficientTable) -> float:
        return self.largest_difference(other)[1]

    def with_entries(self, entries: Mapping[Word, complex]) -> CoefficientTable:
        return CoefficientTable(self.order, self.dim, entries, self.alphabet)


####################################### eigenvalue model #######################################
@dataclass(frozen=True, eq=False)
class EigenvalueModel:
    '''
    Additive eigenvalue structure of the alphabet: ν_{j,ℓ} = (nu·ℓ)_j and
    ν_ℓ^u = Σ_j u_j ν_{j,ℓ}. The quasiperiodic case is nu = i·I with v = ω.

    Attributes:
        v (np.ndarray): Velocity vector of length d along which nonresonance is required.
        nu (np.ndarray): d×d complex matrix mapping letters to eigenvalue vectors.
        resonance_tol (float): Relative threshold; ℓ ≠ 0 is resonant when |ν_ℓ^v| ≤ tol·‖v‖·‖ℓ‖₁.
    '''

    v: np.ndarray
    nu: np.ndarray
    resonance_tol: float = settings.RESONANCE_TOL

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=complex))
        nu = np.atleast_2d(np.asarray(self.nu, dtype=complex))

        if v.ndim != 1 or nu.shape != (v.size, v.size):
            raise DimensionMismatch(f'nu must be {v.size}x{v.size}, got shape {nu.shape}.')
        if self.resonance_tol <= 0:
            raise ValueError('resonance_tol must be positive.')

        object.__setattr__(self, 'v', v)
        object.__setattr__(self, 'nu', nu)

    @classmethod
    def quasiperiodic(cls, omega: Sequence[float], resonance_tol: float = settings.RESONANCE_TOL) -> EigenvalueModel:
        omega = np.atleast_1d(np.asarray(omega, dtype=float))

        return cls(v=omega, nu=1j * np.eye(omega.size), resonance_tol=resonance_tol)

    @property
    def d(self) -> int:
        return self.v.size

    @property
    def omega(self) -> np.ndarray:
        return self.v.real

    def nu_of(self, letter: Letter) -> np.ndarray:
        if len(letter) != self.d:
            raise DimensionMismatch(f'Letter {letter} does not have {self.d} components.')

        return self.nu @ np.asarray(letter, dtype=float)

    def eigenvalue(self, letter: Letter, u: Sequence[complex]) -> complex:
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.d,):
            raise DimensionMismatch(f'Expected a vector of length {self.d}, got shape {u.shape}.')

        return complex(u @ self.nu_of(letter))

    def velocity_eigenvalue(self, letter: Letter) -> complex:
        return complex(self.v @ self.nu_of(letter))

    def resonance_threshold(self, letter: Letter) -> float:
        return self.resonance_tol * float(np.linalg.norm(self.v)) * letter_norm(letter)

    def resonance_ratio(self, letter: Letter) -> float:
        '''Threshold over |ν_ℓ^v|; the letter is resonant once the ratio reaches 1.'''
        value = abs(self.velocity_eigenvalue(letter))

        return self.resonance_threshold(letter) / value if value else float('inf')

    def divisor(self, letter: Letter) -> complex:
        '''
        Returns ν_ℓ^v for a nonzero letter after screening it for resonance.

        Raises:
            ResonanceError: If |ν_ℓ^v| is not above the resonance threshold.
        '''
        value = self.velocity_eigenvalue(letter)
        threshold = self.resonance_threshold(letter)

        if abs(value) <= threshold:
            raise ResonanceError(f'Letter sum {letter} is resonant: nu^v = {value:.3e} (threshold {threshold:.1e}).')

        return value


####################################### term sums #######################################
class TermSum:
    '''Sparse linear combination of keyed basis functions with complex coefficients.'''

    terms: Mapping

    # numpy scalars on the left defer to __rmul__
    __array_ufunc__ = None

    def _new(self, terms: Mapping):
        return type(self)(_drop_zeros(terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other):
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms.get(key, 0) + value

        return self._new(terms)

    def __neg__(self):
        return self._new({key: -value for key, value in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar: complex):
        return self._new({key: scalar * value for key, value in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex):
        return self * (1 / scalar)


@dataclass(frozen=True)
class TrigTauPoly(TermSum):
    '''
    Σ c·τ^p·e^{i m·θ}·e^{i n·θ₀}, keyed by (p, m, n). Houses Γ_w.
    '''

    terms: Mapping[tuple[int, Letter, Letter], complex] = field(default_factory=dict)

    @classmethod
    def monomial(cls, p: int, m: Letter, n: Letter, coefficient: complex = 1) -> TrigTauPoly:
        return cls(_drop_zeros({(p, m, n): coefficient}))

    def shift_theta(self, k: Letter) -> TrigTauPoly:
        '''Multiplies by e^{ik·θ}.'''
        return self._new({(p, add_letters(m, k), n): c for (p, m, n), c in self.terms.items()})

    def shift_theta0(self, k: Letter) -> TrigTauPoly:
        '''Multiplies by e^{ik·θ₀}.'''
        return self._new({(p, m, add_letters(n, k)): c for (p, m, n), c in self.terms.items()})

    def d_tau(self) -> TrigTauPoly:
        return self._new({(p - 1, m, n): p * c for (p, m, n), c in self.terms.items() if p > 0})

    def d_theta(self, omega: np.ndarray) -> TrigTauPoly:
        '''ω·∇_θ, exact: multiplies each term by i m·ω.'''
        return self._new({
            (p, m, n): 1j * float(np.dot(m, omega)) * c
            for (p, m, n), c in self.terms.items()
        })

    def evaluate(self, tau: float, theta: Sequence[float], theta0: Sequence[float]) -> complex:
        theta = np.asarray(theta, dtype=float)
        theta0 = np.asarray(theta0, dtype=float)

        return complex(sum(
            c * tau ** p * np.exp(1j * (np.dot(m, theta) + np.dot(n, theta0)))
            for (p, m, n), c in self.terms.items()
        ))


@dataclass(frozen=True)
class PolySmoothFn(TermSum):
    '''
    Σ c·τ^p·exp(ν_ℓ^u), keyed by (p, ℓ). Houses γ_w. Terms are keyed by the
    letter, not by the numeric eigenvalue, so distinct letters never merge.
    '''

    terms: Mapping[tuple[int, Letter], complex] = field(default_factory=dict)

    @classmethod
    def monomial(cls, p: int, letter: Letter, coefficient: complex = 1) -> PolySmoothFn:
        return cls(_drop_zeros({(p, letter): coefficient}))

    def shift(self, letter: Letter) -> PolySmoothFn:
        '''Multiplies by exp(ν_ℓ^u).'''
        return self._new({(p, add_letters(ell, letter)): c for (p, ell), c in self.terms.items()})

    def d_tau(self) -> PolySmoothFn:
        return self._new({(p - 1, ell): p * c for (p, ell), c in self.terms.items() if p > 0})

    def d_u(self, model: EigenvalueModel) -> PolySmoothFn:
        '''v·∇_u, exact: multiplies each term by ν_ℓ^v.'''
        return self._new({(p, ell): model.velocity_eigenvalue(ell) * c for (p, ell), c in self.terms.items()})

    def evaluate(self, tau: float, u: Sequence[complex], model: EigenvalueModel) -> complex:
        return complex(sum(
            c * tau ** p * np.exp(model.eigenvalue(ell, u))
            for (p, ell), c in self.terms.items()
        ))


####################################### coefficient functions #######################################
@dataclass(frozen=True, eq=False)
class GammaTable:
    '''
    Universal coefficient functions Γ_w(τ, θ; θ₀) of a quasiperiodic problem.

    Attributes:
        order (int): Truncation order N.
        omega (np.ndarray): Frequency vector ω.
        support (tuple[Letter, ...]): Letters the table ranges over.
        entries (Mapping[Word, TrigTauPoly]): Γ_w for every word over the support, |w| ≤ N.
        resonance_tol (float): Threshold the construction was screened with.
    '''

    order: int
    omega: np.ndarray
    support: tuple[Letter, ...]
    entries: Mapping[Word, TrigTauPoly]
    resonance_tol: float = settings.RESONANCE_TOL

    @property
    def d(self) -> int:
        return len(self.omega)

    @cached_property
    def model(self) -> EigenvalueModel:
        return EigenvalueModel.quasiperiodic(self.omega, self.resonance_tol)

    @cached_property
    def _flat(self) -> tuple[list[Word], np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        words = sorted(self.entries, key=word_key)
        index, powers, ms, ns, coefficients = [], [], [], [], []
        for position, word in enumerate(words):
            for (p, m, n), c in self.entries[word].terms.items():
                index.append(position)
                powers.append(p)
                ms.append(m)
                ns.append(n)
                coefficients.append(c)

        return (
            words,
            np.asarray(index, dtype=int),
            np.asarray(powers, dtype=float),
            np.asarray(ms, dtype=float).reshape(-1, self.d),
            np.asarray(ns, dtype=float).reshape(-1, self.d),
            np.asarray(coefficients, dtype=complex),
        )

    def _unit(self) -> CoefficientTable:
        # Γ(0, θ₀; θ₀) = 1 1 exactly
        return CoefficientTable(self.order, self.d, {EMPTY: 1}, self.support)

    def evaluate(self, tau: float, theta: Sequence[float], theta0: Sequence[float]) -> CoefficientTable:
        '''Entrywise value of Γ at (τ, θ; θ₀).'''
        theta = np.asarray(theta, dtype=float).reshape(self.d)
        theta0 = np.asarray(theta0, dtype=float).reshape(self.d)
        if tau == 0 and np.array_equal(theta, theta0):
            return self._unit()

        words, index, powers, ms, ns, coefficients = self._flat

        values = coefficients * np.power(float(tau), powers) * np.exp(1j * (ms @ theta + ns @ theta0))
        totals = sum_by_index(values, index, len(words))

        return CoefficientTable(self.order, self.d, dict(zip(words, totals)), self.support)


@dataclass(frozen=True, eq=False)
class GammaUTable:
    '''
    Universal coefficient functions γ_w(τ, u) of a perturbed autonomous problem.

    Attributes:
        order (int): Truncation order N.
        model (EigenvalueModel): Eigenvalue structure the recursions divided by.
        support (tuple[Letter, ...]): Letters the table ranges over.
        entries (Mapping[Word, PolySmoothFn]): γ_w for every word over the support, |w| ≤ N.
    '''

    order: int
    model: EigenvalueModel
    support: tuple[Letter, ...]
    entries: Mapping[Word, PolySmoothFn]

    @property
    def d(self) -> int:
        return self.model.d

    @cached_property
    def _flat(self) -> tuple[list[Word], np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        words = sorted(self.entries, key=word_key)
        index, powers, rates, coefficients = [], [], [], []
        for position, word in enumerate(words):
            for (p, ell), c in self.entries[word].terms.items():
                index.append(position)
                powers.append(p)
                rates.append(self.model.nu_of(ell))
                coefficients.append(c)

        return (
            words,
            np.asarray(index, dtype=int),
            np.asarray(powers, dtype=float),
            np.asarray(rates, dtype=complex).reshape(-1, self.d),
            np.asarray(coefficients, dtype=complex),
        )

    def _unit(self) -> CoefficientTable:
        return CoefficientTable(self.order, self.d, {EMPTY: 1}, self.support)

    def evaluate(self, tau: float, u: Sequence[complex]) -> CoefficientTable:
        '''Entrywise value of γ at (τ, u).'''
        u = np.asarray(u, dtype=complex).reshape(self.d)
        if tau == 0 and not u.any():
            return self._unit()

        words, index, powers, rates, coefficients = self._flat

        values = coefficients * np.power(float(tau), powers) * np.exp(rates @ u)
        totals = sum_by_index(values, index, len(words))

        return CoefficientTable(self.order, self.d, dict(zip(words, totals)), self.support)


def sum_by_index(values: np.ndarray, index: np.ndarray, count: int) -> np.ndarray:
    real = np.bincount(index, weights=values.real, minlength=count)
    imag = np.bincount(index, weights=values.imag, minlength=count)

    return real + 1j * imag


def factorial_inverse(r: int) -> float:
    return 1.0 / math.factorial(r)
