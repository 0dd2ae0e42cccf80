'''
Exact sparse polynomial vector fields.

A MultiPoly over D variables keys its terms by exponent vectors. When the
problem has angle coordinates, the last `nangles` slots of an exponent vector
are Fourier frequencies: the slot m stands for e^{imθ} rather than θ^m, so
those entries may be negative and differentiate to i·m.
'''
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from wordseries.core.models import TermSum, _drop_zeros, sum_by_index
from wordseries.core.utils.exceptions import DimensionMismatch

Exponents = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class MultiPoly(TermSum):
    '''
    Attributes:
        nvars (int): Number of variables D.
        terms (Mapping[Exponents, complex]): Nonzero coefficients.
        nangles (int): Trailing variables that are angles.
    '''

    nvars: int
    terms: Mapping[Exponents, complex] = field(default_factory=dict)
    nangles: int = 0

    def __post_init__(self):
        for exponents in self.terms:
            if len(exponents) != self.nvars:
                raise DimensionMismatch(f'Exponent vector {exponents} does not have {self.nvars} entries.')
            if any(power < 0 for power in exponents[:self.npowers]):
                raise ValueError(f'Negative power in {exponents}.')

        object.__setattr__(self, 'terms', _drop_zeros(self.terms))

    def _new(self, terms: Mapping) -> MultiPoly:
        return MultiPoly(self.nvars, terms, self.nangles)

    @property
    def npowers(self) -> int:
        return self.nvars - self.nangles

    @classmethod
    def constant(cls, nvars: int, value: complex, nangles: int = 0) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: value}, nangles)

    @classmethod
    def variable(cls, nvars: int, index: int, nangles: int = 0) -> MultiPoly:
        if not 0 <= index < nvars - nangles:
            raise ValueError(f'Variable {index} is not a polynomial variable.')

        exponents = [0] * nvars
        exponents[index] = 1
        return cls(nvars, {tuple(exponents): 1}, nangles)

    def _check(self, other: MultiPoly):
        if (self.nvars, self.nangles) != (other.nvars, other.nangles):
            raise DimensionMismatch('Polynomials over different variables.')

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        return super().__add__(other)

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            return super().__mul__(other)

        self._check(other)
        product = defaultdict(complex)
        for first, a in self.terms.items():
            for second, b in other.terms.items():
                product[tuple(p + q for p, q in zip(first, second))] += a * b

        return self._new(product)

    def __rmul__(self, scalar) -> MultiPoly:
        return super().__mul__(scalar)

    def __pow__(self, power: int) -> MultiPoly:
        result = MultiPoly.constant(self.nvars, 1, self.nangles)
        for _ in range(power):
            result = result * self

        return result

    def diff(self, index: int) -> MultiPoly:
        '''Exact partial derivative; an angle slot m contributes the factor i·m.'''
        derivative = {}
        for exponents, c in self.terms.items():
            power = exponents[index]
            if power == 0:
                continue
            if index >= self.npowers:
                derivative[exponents] = 1j * power * c
            else:
                lowered = list(exponents)
                lowered[index] -= 1
                derivative[tuple(lowered)] = power * c

        return self._new(derivative)

    def degree(self) -> int:
        return max((sum(exponents[:self.npowers]) for exponents in self.terms), default=0)

    def max_coefficient(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        exponents = np.asarray(list(self.terms), dtype=float).reshape(-1, self.nvars)
        coefficients = np.asarray(list(self.terms.values()), dtype=complex)
        return exponents, coefficients

    def evaluate(self, x: Sequence[complex]) -> complex:
        exponents, coefficients = self._arrays
        return complex(np.sum(coefficients * _monomials(exponents, np.asarray(x, dtype=complex), self.nangles)))

    def substitute_linear(self, matrix: np.ndarray) -> MultiPoly:
        '''p(Cx) as an exact polynomial in x; angle variables are not supported.'''
        if self.nangles:
            raise ValueError('Linear substitution is only defined without angle variables.')

        images = [
            sum((matrix[j, k] * MultiPoly.variable(self.nvars, k) for k in range(self.nvars)),
                MultiPoly(self.nvars))
            for j in range(self.nvars)
        ]

        result = MultiPoly(self.nvars)
        for exponents, c in self.terms.items():
            term = MultiPoly.constant(self.nvars, c)
            for j, power in enumerate(exponents):
                term = term * images[j] ** power
            result = result + term

        return result


def _monomials(exponents: np.ndarray, x: np.ndarray, nangles: int) -> np.ndarray:
    npowers = x.size - nangles
    values = np.prod(np.power(x[:npowers], exponents[:, :npowers]), axis=1)
    if nangles:
        values = values * np.exp(1j * (exponents[:, npowers:] @ x[npowers:]))

    return values


@dataclass(frozen=True, eq=False)
class PolyMap:
    '''A vector field x ↦ (p_1(x), …, p_D(x)) with exact polynomial components.'''

    components: tuple[MultiPoly, ...]

    __array_ufunc__ = None

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        shapes = {(p.nvars, p.nangles) for p in self.components}
        if len(shapes) > 1:
            raise DimensionMismatch('PolyMap components over different variables.')

    @classmethod
    def zero(cls, nvars: int, nangles: int = 0) -> PolyMap:
        return cls(tuple(MultiPoly(nvars, {}, nangles) for _ in range(nvars)))

    @classmethod
    def identity(cls, nvars: int) -> PolyMap:
        return cls(tuple(MultiPoly.variable(nvars, index) for index in range(nvars)))

    @classmethod
    def linear(cls, matrix: np.ndarray, nangles: int = 0) -> PolyMap:
        '''x ↦ Mx over the polynomial variables.'''
        matrix = np.asarray(matrix, dtype=complex)
        nvars = matrix.shape[0]
        unit_vectors = [MultiPoly.variable(nvars, k, nangles) for k in range(nvars - nangles)]

        return cls(tuple(
            sum((matrix[i, k] * unit_vectors[k] for k in range(nvars - nangles)), MultiPoly(nvars, {}, nangles))
            for i in range(nvars)
        ))

    @classmethod
    def constant(cls, vector: Sequence[complex], nangles: int = 0) -> PolyMap:
        nvars = len(vector)
        return cls(tuple(MultiPoly.constant(nvars, value, nangles) for value in vector))

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def nangles(self) -> int:
        return self.components[0].nangles

    def _check(self, other: PolyMap):
        if len(self.components) != len(other.components) or self.nvars != other.nvars:
            raise DimensionMismatch('Vector fields of different dimensions.')

    def __add__(self, other: PolyMap) -> PolyMap:
        self._check(other)
        return PolyMap(tuple(p + q for p, q in zip(self.components, other.components)))

    def __sub__(self, other: PolyMap) -> PolyMap:
        self._check(other)
        return PolyMap(tuple(p - q for p, q in zip(self.components, other.components)))

    def __neg__(self) -> PolyMap:
        return PolyMap(tuple(-p for p in self.components))

    def __mul__(self, scalar: complex) -> PolyMap:
        return PolyMap(tuple(scalar * p for p in self.components))

    __rmul__ = __mul__

    def directional(self, other: PolyMap) -> PolyMap:
        '''Jacobian–vector product x ↦ self′(x)·other(x).'''
        self._check(other)
        return PolyMap(tuple(
            sum((p.diff(j) * q for j, q in enumerate(other.components)), MultiPoly(p.nvars, {}, p.nangles))
            for p in self.components
        ))

    def jacobian(self, x: Sequence[complex]) -> np.ndarray:
        return np.array([[p.diff(j).evaluate(x) for j in range(self.nvars)] for p in self.components])

    def apply_matrix(self, matrix: np.ndarray) -> PolyMap:
        '''x ↦ M·self(x).'''
        matrix = np.asarray(matrix, dtype=complex)
        return PolyMap(tuple(
            sum((matrix[i, k] * q for k, q in enumerate(self.components)), MultiPoly(self.nvars, {}, self.nangles))
            for i in range(matrix.shape[0])
        ))

    def substitute_linear(self, matrix: np.ndarray) -> PolyMap:
        return PolyMap(tuple(p.substitute_linear(matrix) for p in self.components))

    def max_coefficient(self) -> float:
        return max((p.max_coefficient() for p in self.components), default=0.0)

    def degree(self) -> int:
        return max((p.degree() for p in self.components), default=0)

    def evaluate(self, x: Sequence[complex]) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.array([p.evaluate(x) for p in self.components], dtype=complex)

    __call__ = evaluate


class StackedFields:
    '''
    Several PolyMaps flattened into one term array, so that Σ_m weight_m·F_m(x)
    costs a single vectorized pass. Used by the integrators.
    '''

    def __init__(self, fields: Sequence[PolyMap]):
        if not fields:
            raise ValueError('StackedFields needs at least one field.')

        self.count = len(fields)
        self.dim = len(fields[0].components)
        self.nangles = fields[0].nangles
        exponents, coefficients, owners, targets = [], [], [], []

        for owner, vector_field in enumerate(fields):
            for target, component in enumerate(vector_field.components):
                for powers, c in component.terms.items():
                    exponents.append(powers)
                    coefficients.append(c)
                    owners.append(owner)
                    targets.append(target)

        self.exponents = np.asarray(exponents, dtype=float).reshape(-1, fields[0].nvars)
        self.coefficients = np.asarray(coefficients, dtype=complex)
        self.owners = np.asarray(owners, dtype=int)
        self.targets = np.asarray(targets, dtype=int)

    def evaluate(self, x: np.ndarray, weights: np.ndarray) -> np.ndarray:
        monomials = _monomials(self.exponents, np.asarray(x, dtype=complex), self.nangles)
        values = self.coefficients * monomials * np.asarray(weights)[self.owners]

        return sum_by_index(values, self.targets, self.dim)
