from typing import Annotated, Iterable, Literal, Optional

from pydantic import BaseModel, BeforeValidator, Field, field_validator, model_validator

from wordseries import settings
from wordseries.core.utils.constants import (
    ANGLE_SHIFT,
    AUTONOMOUS,
    COEFFICIENT_KINDS,
    LINEAR_PROJECTOR,
    QUASIPERIODIC,
    SUITES,
)


def _parse_complex(value):
    if isinstance(value, dict):
        return complex(value.get('re', 0.0), value.get('im', 0.0))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)

    raise ValueError('complex values are numbers, [re, im] pairs or {"re": .., "im": ..} objects')


def _parse_float_list(value):
    if isinstance(value, str):
        return [float(item) for item in value.split(',') if item.strip()]

    return value


ComplexNumber = Annotated[complex, BeforeValidator(_parse_complex)]
FloatList = Annotated[list[float], BeforeValidator(_parse_float_list)]
ComplexList = Annotated[list[ComplexNumber], BeforeValidator(_parse_float_list)]


####################################### reports #######################################
class IdentityReport(BaseModel):
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    first_violation: Optional[str] = None
    checked: Annotated[int, Field(ge=0)] = 0

    model_config = {
        'extra': 'forbid'
    }

    @classmethod
    def from_deviations(cls, name: str, deviations: Iterable[tuple[str, float]], tolerance: float) -> 'IdentityReport':
        '''
        Folds labelled deviations into a report. A NaN deviation counts as a violation.

        Args:
            name (str): Identity being checked.
            deviations (Iterable[tuple[str, float]]): (label, deviation) per checked item.
            tolerance (float): Largest accepted deviation.
        '''
        max_deviation, first_violation, checked = 0.0, None, 0

        for label, deviation in deviations:
            checked += 1
            if not deviation <= tolerance and first_violation is None:
                first_violation = label
            if deviation > max_deviation:
                max_deviation = float(deviation)

        return cls(
            name=name,
            passed=first_violation is None,
            max_deviation=max_deviation,
            tolerance=tolerance,
            first_violation=first_violation,
            checked=checked,
        )


class SuiteReport(BaseModel):
    suite: str
    passed: bool
    reports: list[IdentityReport]

    model_config = {
        'extra': 'forbid'
    }

    @classmethod
    def from_reports(cls, suite: str, reports: list[IdentityReport]) -> 'SuiteReport':
        return cls(suite=suite, passed=all(report.passed for report in reports), reports=reports)

    @property
    def failures(self) -> list[IdentityReport]:
        return [report for report in self.reports if not report.passed]


class SlopeFit(BaseModel):
    identity: str
    eps: list[float]
    errors: list[float]
    slope: Optional[float] = None
    expected: float
    below_noise_floor: bool = False
    passed: bool

    model_config = {
        'extra': 'forbid'
    }


class ScalingReport(BaseModel):
    order: int
    fits: list[SlopeFit]
    passed: bool

    model_config = {
        'extra': 'forbid'
    }


####################################### problem_file #######################################
class PolyTermModel(BaseModel):
    exponents: list[int]
    re: float = 0.0
    im: float = 0.0

    model_config = {
        'extra': 'forbid'
    }

    @property
    def coefficient(self) -> complex:
        return complex(self.re, self.im)


class ModeModel(BaseModel):
    letter: Annotated[list[int], Field(min_length=1)]
    components: list[list[PolyTermModel]]

    model_config = {
        'extra': 'forbid'
    }


class DefaultsModel(BaseModel):
    N: Annotated[int, Field(ge=0, le=8, description='Truncation order')] = settings.ORDER
    eps: Annotated[float, Field(ge=0, description='Perturbation size')] = 0.01
    t0: float = 0.0
    resonance_tol: Annotated[float, Field(gt=0)] = settings.RESONANCE_TOL
    x0: Optional[ComplexList] = None

    model_config = {
        'extra': 'forbid'
    }


class ProblemFileModel(BaseModel):
    '''
    Problem file document. Quasiperiodic problems give omega and modes f̂_k(y);
    autonomous problems give gkind and either omega (angle-shift, whose angle
    coordinates are the last d of the D variables) or v and nu with the projectors
    L_j (linear-projector).
    '''

    kind: Literal['quasiperiodic', 'autonomous']
    D: Annotated[int, Field(ge=1)]
    d: Annotated[int, Field(ge=1)]
    omega: Optional[list[float]] = None
    v: Optional[list[ComplexNumber]] = None
    nu: Optional[list[list[ComplexNumber]]] = None
    gkind: Optional[Literal['linear-projector', 'angle-shift']] = None
    projectors: Optional[list[list[list[ComplexNumber]]]] = None
    modes: list[ModeModel]
    defaults: DefaultsModel = DefaultsModel()

    model_config = {
        'extra': 'forbid'
    }

    @property
    def nangles(self) -> int:
        return self.d if self.gkind == ANGLE_SHIFT else 0

    @model_validator(mode='after')
    def validate_structure(self) -> 'ProblemFileModel':
        if self.kind == QUASIPERIODIC:
            if self.omega is None:
                raise ValueError('quasiperiodic problems need omega')
            if self.gkind is not None:
                raise ValueError('gkind only applies to autonomous problems')

        if self.kind == AUTONOMOUS:
            if self.gkind is None:
                raise ValueError('autonomous problems need gkind')
            if self.gkind == ANGLE_SHIFT and self.omega is None:
                raise ValueError('angle-shift problems need omega')
            if self.gkind == ANGLE_SHIFT and self.D <= self.d:
                raise ValueError('angle-shift problems need D > d')
            if self.gkind == LINEAR_PROJECTOR:
                if self.v is None or self.nu is None or self.projectors is None:
                    raise ValueError('linear-projector problems need v, nu and projectors')
                if len(self.v) != self.d or len(self.nu) != self.d or any(len(row) != self.d for row in self.nu):
                    raise ValueError('v must have length d and nu must be d x d')
                if len(self.projectors) != self.d:
                    raise ValueError('linear-projector problems need d projectors')
                for matrix in self.projectors:
                    if len(matrix) != self.D or any(len(row) != self.D for row in matrix):
                        raise ValueError('projectors must be D x D')

        if self.omega is not None and len(self.omega) != self.d:
            raise ValueError('omega must have length d')
        if self.defaults.x0 is not None and len(self.defaults.x0) != self.D:
            raise ValueError('defaults.x0 must have length D')

        seen = set()
        for mode in self.modes:
            letter = tuple(mode.letter)
            if len(letter) != self.d:
                raise ValueError(f'letter {mode.letter} must have length d')
            if letter in seen:
                raise ValueError(f'letter {mode.letter} appears twice')
            seen.add(letter)

            if len(mode.components) != self.D:
                raise ValueError(f'mode {mode.letter} must have D components')
            for component in mode.components:
                for term in component:
                    self._validate_exponents(term.exponents)

        return self

    def _validate_exponents(self, exponents: list[int]):
        if len(exponents) != self.D:
            raise ValueError('every exponent vector must have length D')

        powers = exponents[:self.D - self.nangles]
        if any(power < 0 for power in powers):
            raise ValueError('polynomial exponents must be nonnegative')


####################################### command_params #######################################
class CoeffsParams(BaseModel):
    what: Literal[COEFFICIENT_KINDS]
    t: float = 1.0
    t0: Optional[float] = None
    theta: Optional[FloatList] = None
    u: Optional[ComplexList] = None
    order: Optional[Annotated[int, Field(ge=0, le=8)]] = None
    out: Optional[str] = None
    format: Literal['csv', 'json'] = 'csv'

    model_config = {
        'str_strip_whitespace': True,
        'extra': 'forbid'
    }


class VerifyParams(BaseModel):
    suite: Literal[SUITES]
    order: Optional[Annotated[int, Field(ge=1, le=6)]] = None
    seed: int = settings.SEED
    samples: Annotated[int, Field(ge=1)] = settings.SAMPLES
    eps: FloatList = list(settings.EPS_SWEEP)

    model_config = {
        'str_strip_whitespace': True,
        'extra': 'forbid'
    }

    @field_validator('eps', mode='after')
    @classmethod
    def validate_eps_sweep(cls, eps: list[float]) -> list[float]:
        if any(value <= 0 for value in eps):
            raise ValueError('eps values must be positive')

        return eps


class AverageParams(BaseModel):
    eps: Optional[Annotated[float, Field(ge=0)]] = None
    t_end: Optional[Annotated[float, Field(gt=0)]] = None
    order: Optional[Annotated[int, Field(ge=1, le=6)]] = None
    x0: Optional[FloatList] = None
    samples: Annotated[int, Field(ge=2)] = 101
    out: Optional[str] = None
    format: Literal['csv', 'json'] = 'csv'

    model_config = {
        'str_strip_whitespace': True,
        'extra': 'forbid'
    }
