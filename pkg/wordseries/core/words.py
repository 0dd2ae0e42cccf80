from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Literal, Sequence

import numpy as np

from wordseries import settings
from wordseries.core.models import (
    EMPTY,
    CoefficientTable,
    EigenvalueModel,
    Letter,
    Word,
    add_letters,
    as_letter,
    is_zero_letter,
    letter_key,
    letter_sum,
    zero_letter,
)
from wordseries.core.utils.constants import ALGEBRA, EMPTY_WORD, GROUP, GROUP_TOL
from wordseries.core.utils.exceptions import DimensionMismatch, NotACharacter, OrderMismatch
from wordseries.core.utils.serializers import IdentityReport
from wordseries.core.utils.writers import format_word

FormalWordSum = Counter
ExtendedPair = tuple[np.ndarray, CoefficientTable]


####################################### shuffle #######################################
@lru_cache(maxsize=None)
def _shuffle_terms(first: Word, second: Word) -> tuple[tuple[Word, int], ...]:
    if not first:
        return ((second, 1),)
    if not second:
        return ((first, 1),)

    terms = Counter()
    for word, multiplicity in _shuffle_terms(first[1:], second):
        terms[(first[0],) + word] += multiplicity
    for word, multiplicity in _shuffle_terms(first, second[1:]):
        terms[(second[0],) + word] += multiplicity

    return tuple(terms.items())


def shuffle(word: Word, other: Word) -> FormalWordSum:
    '''
    Shuffle product of two words: every interleaving that keeps the internal
    order of both, counted with multiplicity.

    Args:
        word (Word): First word.
        other (Word): Second word.

    Returns:
        FormalWordSum: Counter mapping each interleaving to its multiplicity. The
            multiplicities add up to binomial(|word| + |other|, |word|).
    '''
    return Counter(dict(_shuffle_terms(tuple(word), tuple(other))))


def words_over(alphabet: Sequence[Letter], length: int) -> Iterator[Word]:
    '''Words of exactly the given length over the alphabet, in lexicographic order.'''
    return itertools.product(sorted(alphabet, key=letter_key), repeat=length)


def all_words(alphabet: Sequence[Letter], order: int) -> list[Word]:
    '''Every word of length ≤ order over the alphabet, the empty word first.'''
    return [word for length in range(order + 1) for word in words_over(alphabet, length)]


def normalize_support(support: Iterable[Sequence[int]], d: int) -> tuple[Letter, ...]:
    letters = {as_letter(letter) for letter in support}
    for letter in letters:
        if len(letter) != d:
            raise DimensionMismatch(f'Letter {letter} does not have {d} components.')

    return tuple(sorted(letters, key=letter_key))


def letter_sums(alphabet: Sequence[Letter], order: int) -> tuple[Letter, ...]:
    '''Nonzero sums of one to `order` letters of the alphabet, repetitions allowed.'''
    if not alphabet:
        return ()

    level = {zero_letter(len(alphabet[0]))}
    sums = set()
    for _ in range(order):
        level = {add_letters(total, letter) for total in level for letter in alphabet}
        sums |= level

    return tuple(sorted((total for total in sums if not is_zero_letter(total)), key=letter_key))


def screen_resonances(model: EigenvalueModel, alphabet: Sequence[Letter], order: int):
    '''
    Raises:
        ResonanceError: For the first letter sum whose ν_ℓ^v is under the threshold.
    '''
    for total in letter_sums(alphabet, order):
        model.divisor(total)


def memoized_recursion(clause: Callable[[Word, Callable], object]) -> Callable[[Word], object]:
    '''Wraps a one-step recursion on words so every word, support or intermediate, is solved once.'''
    memo = {}

    def solve(word: Word):
        if word not in memo:
            memo[word] = clause(word, solve)
        return memo[word]

    solve.memo = memo
    return solve


def leading_zeros(word: Word) -> int:
    '''Length r of the block 0^r the word starts with.'''
    r = 0
    while r < len(word) and is_zero_letter(word[r]):
        r += 1

    return r


####################################### tables #######################################
def unit(order: int = settings.ORDER, dim: int = 1, alphabet: Sequence[Letter] = ()) -> CoefficientTable:
    '''The unit 1 1 of the convolution product: 1 at ∅ and 0 elsewhere.'''
    return CoefficientTable(order, dim, {EMPTY: 1}, tuple(alphabet))


def letters_only(order: int, dim: int, alphabet: Sequence[Letter], value: complex = 1) -> CoefficientTable:
    '''Table with the same value on every one-letter word and 0 elsewhere.'''
    return CoefficientTable(order, dim, {(letter,): value for letter in alphabet}, tuple(alphabet))


def _check_compatible(first: CoefficientTable, second: CoefficientTable):
    if first.order != second.order:
        raise OrderMismatch(f'Tables truncated at different orders: {first.order} and {second.order}.')
    if first.dim != second.dim:
        raise DimensionMismatch(f'Tables over letters of different lengths: {first.dim} and {second.dim}.')


def convolve(first: CoefficientTable, second: CoefficientTable) -> CoefficientTable:
    '''
    Convolution product (a⋆b)_w = Σ a_prefix·b_suffix over every splitting of w.

    Args:
        first (CoefficientTable): Left factor a.
        second (CoefficientTable): Right factor b.

    Returns:
        CoefficientTable: a⋆b truncated at the common order.

    Raises:
        OrderMismatch: If the tables have different truncation orders.
        DimensionMismatch: If the tables use letters of different lengths.
    '''
    _check_compatible(first, second)

    entries = defaultdict(complex)
    for prefix, prefix_value in first.entries.items():
        room = first.order - len(prefix)
        for suffix, suffix_value in second.entries.items():
            if len(suffix) <= room:
                entries[prefix + suffix] += prefix_value * suffix_value

    alphabet = tuple(set(first.alphabet) | set(second.alphabet))
    return CoefficientTable(first.order, first.dim, entries, alphabet)


def shuffle_membership(table: CoefficientTable, mode: Literal['group', 'algebra'], tol: float) -> IdentityReport:
    '''
    Checks the shuffle relations over every pair of nonempty words whose
    lengths add up to at most the truncation order.

    group: t_∅ = 1 and t_w·t_w′ = Σ t_{w ⧢ w′}.
    algebra: t_∅ = 0 and Σ t_{w ⧢ w′} = 0.

    Args:
        table (CoefficientTable): Coefficients to test, over their alphabet.
        mode (str): 'group' for characters, 'algebra' for infinitesimal characters.
        tol (float): Largest accepted violation.

    Returns:
        IdentityReport: Max violation and the first pair exceeding tol, if any.
    '''
    if mode not in (GROUP, ALGEBRA):
        raise ValueError(f'Unknown membership mode {mode!r}.')

    empty_target = 1 if mode == GROUP else 0
    max_deviation = abs(table[EMPTY] - empty_target)
    first_violation = EMPTY_WORD if not max_deviation <= tol else None
    checked = 1

    words_by_length = {
        length: list(words_over(table.letters, length))
        for length in range(1, table.order)
    }

    for short_length in range(1, table.order // 2 + 1):
        for long_length in range(short_length, table.order - short_length + 1):
            for word in words_by_length[short_length]:
                for other in words_by_length[long_length]:
                    if short_length == long_length and other < word:
                        continue

                    shuffled = sum(
                        multiplicity * table[term]
                        for term, multiplicity in _shuffle_terms(word, other)
                    )
                    product = table[word] * table[other] if mode == GROUP else 0
                    deviation = abs(product - shuffled)
                    checked += 1

                    if deviation > max_deviation:
                        max_deviation = deviation
                    if not deviation <= tol and first_violation is None:
                        first_violation = f'{format_word(word)} | {format_word(other)}'

    return IdentityReport(
        name=f'shuffle relations ({mode})',
        passed=first_violation is None,
        max_deviation=float(max_deviation),
        tolerance=tol,
        first_violation=first_violation,
        checked=checked,
    )


####################################### shift automorphism #######################################
def xi_shift(model: EigenvalueModel, u: Sequence[complex], table: CoefficientTable) -> CoefficientTable:
    '''
    Shift automorphism Ξ_u: multiplies t_{ℓ₁⋯ℓₙ} by exp(ν^u_{ℓ₁+⋯+ℓₙ}).

    Args:
        model (EigenvalueModel): Eigenvalue structure ν.
        u (Sequence[complex]): Shift vector of length d.
        table (CoefficientTable): Coefficients to shift.

    Returns:
        CoefficientTable: Ξ_u table; the empty word is left unchanged.
    '''
    u = np.asarray(u, dtype=complex)
    if u.shape != (model.d,) or table.dim != model.d:
        raise DimensionMismatch(f'Shift vector and table must both have dimension {model.d}.')

    entries = {
        word: np.exp(model.eigenvalue(letter_sum(word, model.d), u)) * value
        for word, value in table.entries.items()
    }

    return table.with_entries(entries)


def ext_product(model: EigenvalueModel, first: ExtendedPair, second: ExtendedPair,
                tol: float = GROUP_TOL) -> ExtendedPair:
    '''
    Product of extended word series (u, γ)★(v, δ) = (v + δ_∅u, γ⋆Ξ_uδ).

    Args:
        model (EigenvalueModel): Eigenvalue structure used by Ξ.
        first (ExtendedPair): (u, γ) with γ a character.
        second (ExtendedPair): (v, δ).
        tol (float): Tolerance of the character test on γ.

    Returns:
        ExtendedPair: The product pair.

    Raises:
        NotACharacter: If γ fails the group shuffle relations.
        DimensionMismatch: If a vector does not have length d.
    '''
    u, gamma = first
    v, delta = second
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)

    if u.shape != (model.d,) or v.shape != (model.d,):
        raise DimensionMismatch(f'Extended pairs need vectors of length {model.d}.')

    report = shuffle_membership(gamma, GROUP, tol)
    if not report.passed:
        raise NotACharacter(f'Left factor is not a character: {report.first_violation}')

    return v + delta[EMPTY] * u, convolve(gamma, xi_shift(model, u, delta))
