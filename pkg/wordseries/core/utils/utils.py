import json
import logging
from collections import defaultdict
from pathlib import Path
from typing import Union

import numpy as np

from wordseries.core.autonomous import (
    beta_bar_auto,
    build_gamma_u,
    eval_gamma_u,
    rho,
    transport_check_u,
)
from wordseries.core.autonomous import group_law_check as group_law_check_u
from wordseries.core.models import CoefficientTable, EigenvalueModel
from wordseries.core.oracle import AveragingResult, averaged_solve, default_x0, scaling_harness
from wordseries.core.polyfield import (
    ProblemSpec,
    bracket_form_check,
    commutation_check,
    decomposition_check,
    eigen_check,
    equivariance_check,
    ext_composition_check,
    f2_f3_check,
    flow_composition_check,
    flow_equivariance_check,
    normal_form,
    pullback_check,
    sample_point,
)
from wordseries.core.polynomials import MultiPoly, PolyMap
from wordseries.core.quasiperiodic import (
    alpha_bar_group_check,
    alpha_bar_period_check,
    beta_bar,
    beta_bar_derivative_check,
    build_gamma,
    eval_alpha,
    eval_alpha_bar,
    factorization_check,
    gamma_shift_identity,
    group_law_check,
    kappa,
    kappa_periodicity_check,
    transport_check,
)
from wordseries.core.utils.constants import (
    ALGEBRA,
    ALGEBRA_TOL,
    AUTONOMOUS,
    COMPOSITION_TOL,
    EQUIVARIANCE_TOL,
    FACTORIZATION_TOL,
    FLOW_TOL,
    GROUP,
    GROUP_TOL,
    LINEAR_PROJECTOR,
    PULLBACK_TOL,
    QUASIPERIODIC,
)
from wordseries.core.utils.exceptions import HypothesisViolation, ProblemFileError
from wordseries.core.utils.serializers import (
    AverageParams,
    CoeffsParams,
    DefaultsModel,
    IdentityReport,
    ProblemFileModel,
    ScalingReport,
    SuiteReport,
    VerifyParams,
)
from wordseries.core.utils.writers import format_word
from wordseries.core.words import screen_resonances, shuffle_membership

logger = logging.getLogger(__name__)


####################################### problem files #######################################
def read_problem_file(path: Union[str, Path]) -> ProblemFileModel:
    '''
    Reads and validates a problem document.

    Args:
        path (str | Path): Location of the JSON document.

    Returns:
        ProblemFileModel: Validated document.

    Raises:
        ProblemFileError: If the file cannot be read or is not a JSON object.
        ValidationError: If the document does not match the problem schema.
    '''
    try:
        document = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as read_error:
        raise ProblemFileError(f'Cannot read {path}: {read_error}')
    except json.JSONDecodeError as decode_error:
        raise ProblemFileError(f'{path} is not a JSON document: {decode_error}')

    if not isinstance(document, dict):
        raise ProblemFileError(f'{path} must hold a JSON object.')

    return ProblemFileModel(**document)


def build_problem(problem: ProblemFileModel) -> ProblemSpec:
    '''Turns a validated document into the polynomial problem it describes.'''
    nangles = problem.nangles
    tol = problem.defaults.resonance_tol

    if problem.gkind == LINEAR_PROJECTOR:
        model = EigenvalueModel(v=np.asarray(problem.v), nu=np.asarray(problem.nu), resonance_tol=tol)
    else:
        model = EigenvalueModel.quasiperiodic(problem.omega, tol)

    modes = {}
    for mode in problem.modes:
        components = []
        for terms in mode.components:
            coefficients = defaultdict(complex)
            for term in terms:
                coefficients[tuple(term.exponents)] += term.coefficient
            components.append(MultiPoly(problem.D, coefficients, nangles))
        modes[tuple(mode.letter)] = PolyMap(tuple(components))

    projectors = tuple(np.asarray(L, dtype=complex) for L in problem.projectors or ())

    return ProblemSpec(problem.D, model, modes, problem.kind, problem.gkind, projectors, nangles)


def check_problem(spec: ProblemSpec, N: int) -> SuiteReport:
    '''
    Runs the hypotheses of a problem and the resonance screen on every letter
    sum of up to N support letters.

    Raises:
        HypothesisViolation: If the eigen relations or the projector algebra fail.
        ResonanceError: If some letter sum is resonant.
    '''
    report = eigen_check(spec, N)

    for failure in report.failures:
        if failure.name != 'nonresonance':
            raise HypothesisViolation(
                f'{failure.name} violated at {failure.first_violation} (deviation {failure.max_deviation:.3e})'
            )

    screen_resonances(spec.model, spec.support, N)

    return report


def load_problem(path: Union[str, Path]) -> tuple[ProblemSpec, DefaultsModel, SuiteReport]:
    '''
    Reads, builds and checks a problem file.

    Returns:
        tuple[ProblemSpec, DefaultsModel, SuiteReport]: The problem, the defaults of
            the file and the hypotheses report.
    '''
    problem = read_problem_file(path)
    spec = build_problem(problem)
    report = check_problem(spec, problem.defaults.N)

    logger.info('loaded %s: %s problem, D=%d, d=%d, %d modes', path, spec.kind, spec.dim, spec.d, len(spec.modes))

    return spec, problem.defaults, report


####################################### coefficients #######################################
def compute_coefficients(spec: ProblemSpec, defaults: DefaultsModel, params: CoeffsParams) -> CoefficientTable:
    '''
    Evaluates the requested coefficient table of a problem.

    Quasiperiodic problems provide alpha, alphabar, betabar and kappa; autonomous
    problems provide alpha (γ(t − t₀, (t − t₀)v)), betabar, gamma-u and rho.

    Args:
        spec (ProblemSpec): Loaded problem.
        defaults (DefaultsModel): Defaults of the problem file.
        params (CoeffsParams): Command options.

    Returns:
        CoefficientTable: Requested coefficients over the support.

    Raises:
        ValueError: If the table does not exist for the problem kind or a vector has the wrong length.
        ResonanceError: If some letter sum is resonant.
    '''
    N = params.order if params.order is not None else defaults.N
    t0 = params.t0 if params.t0 is not None else defaults.t0
    t = params.t
    model = spec.model

    if spec.kind == QUASIPERIODIC:
        if params.what == 'betabar':
            return beta_bar(model.omega, spec.support, N, t0, model.resonance_tol)

        g = build_gamma(model.omega, spec.support, N, model.resonance_tol)
        if params.what == 'alpha':
            return eval_alpha(g, t, t0)
        if params.what == 'alphabar':
            return eval_alpha_bar(g, t, t0)
        if params.what == 'kappa':
            theta = t * model.omega if params.theta is None else np.asarray(params.theta, dtype=float)
            if theta.shape != (spec.d,):
                raise ValueError(f'theta must have {spec.d} components.')
            return kappa(g, theta, t0)

        raise ValueError(f'{params.what} is only available for autonomous problems.')

    gu = build_gamma_u(model, spec.support, N)
    if params.what == 'alpha':
        return eval_gamma_u(gu, t - t0, (t - t0) * model.v)
    if params.what == 'betabar':
        return beta_bar_auto(gu)

    if params.what in ('gamma-u', 'rho'):
        default = t * model.v if params.what == 'gamma-u' else model.v
        u = default if params.u is None else np.asarray(params.u, dtype=complex)
        if u.shape != (spec.d,):
            raise ValueError(f'u must have {spec.d} components.')
        return eval_gamma_u(gu, t, u) if params.what == 'gamma-u' else rho(gu, u)

    raise ValueError(f'{params.what} is only available for quasiperiodic problems.')


####################################### verification #######################################
def identity_eps(N: int) -> float:
    '''ε small enough that truncation at order N stays under the composition tolerance.'''
    return 0.1 * COMPOSITION_TOL ** (1 / (N + 1))


def _membership_report(name: str, tables, mode: str, tol: float) -> IdentityReport:
    def deviations():
        for label, table in tables:
            report = shuffle_membership(table, mode, tol)
            where = f', {report.first_violation}' if report.first_violation else ''
            yield f'{label}{where}', report.max_deviation

    return IdentityReport.from_deviations(name, deviations(), tol)


def _equivariance_report(spec: ProblemSpec, table: CoefficientTable, eps: float, rng: np.random.Generator,
                         samples: int) -> IdentityReport:
    def deviations():
        for sample in range(samples):
            C = np.eye(spec.dim) + 0.3 * rng.uniform(-1, 1, size=(spec.dim, spec.dim))
            report = equivariance_check(spec, C, table, eps, sample_point(spec, rng))
            yield f'sample {sample}', report.max_deviation

    return IdentityReport.from_deviations('equivariance under linear changes of variables', deviations(),
                                          EQUIVARIANCE_TOL)


def _algebra_suite(spec: ProblemSpec, defaults: DefaultsModel, N: int, samples: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    model = spec.model

    if spec.kind == QUASIPERIODIC:
        g = build_gamma(model.omega, spec.support, N, model.resonance_tol)
        arguments = [(f'sample {sample}', *rng.uniform(-1, 1, size=2)) for sample in range(samples)]
        angles = [(label, rng.uniform(-np.pi, np.pi, size=spec.d), t0) for label, _, t0 in arguments]
        reports = [
            _membership_report('alpha is a character',
                               [(label, eval_alpha(g, t, t0)) for label, t, t0 in arguments], GROUP, GROUP_TOL),
            _membership_report('alpha bar is a character',
                               [(label, eval_alpha_bar(g, t, t0)) for label, t, t0 in arguments], GROUP, GROUP_TOL),
            _membership_report('kappa is a character',
                               [(label, kappa(g, theta, t0)) for label, theta, t0 in angles], GROUP, GROUP_TOL),
            _membership_report('beta bar is an infinitesimal character',
                               [(f't0 = {t0:.3f}', beta_bar(model.omega, spec.support, N, t0, model.resonance_tol))
                                for _, _, t0 in arguments[:3]], ALGEBRA, ALGEBRA_TOL),
        ]
        table = eval_alpha(g, *arguments[0][1:])
    else:
        gu = build_gamma_u(model, spec.support, N)
        arguments = [(f'sample {sample}', rng.uniform(-1, 1), rng.uniform(-1, 1, size=spec.d))
                     for sample in range(samples)]
        reports = [
            _membership_report('gamma_u is a character',
                               [(label, eval_gamma_u(gu, tau, u)) for label, tau, u in arguments], GROUP, GROUP_TOL),
            _membership_report('beta bar is an infinitesimal character',
                               [('beta bar', beta_bar_auto(gu))], ALGEBRA, ALGEBRA_TOL),
            _membership_report('rho is an infinitesimal character',
                               [(label, rho(gu, u)) for label, _, u in arguments], ALGEBRA, ALGEBRA_TOL),
        ]
        table = eval_gamma_u(gu, *arguments[0][1:])

    if not spec.nangles:
        reports.append(_equivariance_report(spec, table, defaults.eps, rng, min(samples, 5)))

    return reports


def _transport_suite(spec: ProblemSpec, defaults: DefaultsModel, N: int, samples: int, seed: int) -> list:
    model = spec.model

    if spec.kind == QUASIPERIODIC:
        g = build_gamma(model.omega, spec.support, N, model.resonance_tol)
        return [
            transport_check(g, samples, seed),
            kappa_periodicity_check(g, samples, seed),
            beta_bar_derivative_check(g, defaults.t0),
        ]

    gu = build_gamma_u(model, spec.support, N)
    rng = np.random.default_rng(seed)

    def pullback_deviations():
        for sample in range(samples):
            u = rng.uniform(-1, 1, size=spec.d)
            delta = eval_gamma_u(gu, rng.uniform(-1, 1), rng.uniform(-1, 1, size=spec.d))
            report = pullback_check(spec, u, delta, defaults.eps, sample_point(spec, rng))
            yield f'sample {sample}', report.max_deviation

    return [
        transport_check_u(gu, samples, seed),
        flow_equivariance_check(spec, samples, seed),
        IdentityReport.from_deviations('pullback by the flow', pullback_deviations(), PULLBACK_TOL),
    ]


def _grouplaw_suite(spec: ProblemSpec, defaults: DefaultsModel, N: int, samples: int, seed: int) -> list:
    model = spec.model

    if spec.kind == QUASIPERIODIC:
        g = build_gamma(model.omega, spec.support, N, model.resonance_tol)
        reports = [
            group_law_check(g, samples, seed),
            gamma_shift_identity(g, defaults.t0 * model.omega, samples, seed),
            alpha_bar_group_check(g, samples, seed),
        ]
        if spec.d == 1:
            reports.append(alpha_bar_period_check(g, defaults.t0))
        return reports

    gu = build_gamma_u(model, spec.support, N)
    eps = identity_eps(N)
    rng = np.random.default_rng(seed)

    def ext_deviations():
        for sample in range(samples):
            pairs = []
            for _ in range(2):
                u = rng.uniform(-0.5, 0.5, size=spec.d)
                pairs.append((u, eval_gamma_u(gu, rng.uniform(-0.5, 0.5), u)))
            report = ext_composition_check(spec, pairs[0], pairs[1], eps, sample_point(spec, rng))
            yield f'sample {sample}', report.max_deviation

    return [
        group_law_check_u(gu, samples, seed),
        flow_composition_check(spec, gu, eps, samples, seed),
        IdentityReport.from_deviations('extended series composition', ext_deviations(),
                                       FLOW_TOL),
    ]


def _normalform_suite(spec: ProblemSpec, defaults: DefaultsModel, N: int, samples: int, seed: int) -> list:
    model = spec.model

    if spec.kind == QUASIPERIODIC:
        g = build_gamma(model.omega, spec.support, N, model.resonance_tol)
        averaged = beta_bar(model.omega, spec.support, N, 0.0, model.resonance_tol)
        crossed = beta_bar_auto(build_gamma_u(EigenvalueModel.quasiperiodic(model.omega, model.resonance_tol),
                                              spec.support, N))
        word, deviation = averaged.largest_difference(crossed)

        return [
            factorization_check(g, samples, seed),
            bracket_form_check(spec, averaged),
            IdentityReport.from_deviations('beta bar from both recursions', [(format_word(word), deviation)],
                                           FACTORIZATION_TOL),
            f2_f3_check(spec),
        ]

    gu = build_gamma_u(model, spec.support, N)

    return [
        commutation_check(normal_form(spec, gu, defaults.eps)),
        decomposition_check(spec, gu, defaults.eps, samples, seed),
        bracket_form_check(spec, beta_bar_auto(gu)),
        bracket_form_check(spec, rho(gu, model.v)),
    ]


SUITE_RUNNERS = {
    'algebra': _algebra_suite,
    'transport': _transport_suite,
    'grouplaw': _grouplaw_suite,
    'normalform': _normalform_suite,
}


def run_suite(spec: ProblemSpec, defaults: DefaultsModel, params: VerifyParams) -> Union[SuiteReport, ScalingReport]:
    '''
    Runs one verification suite with a seeded sampler.

    Args:
        spec (ProblemSpec): Loaded problem.
        defaults (DefaultsModel): Defaults of the problem file.
        params (VerifyParams): Suite, order, seed, sample count and ε sweep.

    Returns:
        SuiteReport | ScalingReport: Max deviation per identity, or the fitted slopes
            of the scaling suite.
    '''
    N = params.order if params.order is not None else defaults.N

    if params.suite == 'scaling':
        return scaling_harness(spec, params.eps, N, x0=defaults.x0, t0=defaults.t0)

    reports = SUITE_RUNNERS[params.suite](spec, defaults, N, params.samples, params.seed)
    logger.info('suite %s: %d identities checked', params.suite, len(reports))

    return SuiteReport.from_reports(params.suite, reports)


####################################### averaging #######################################
def average(spec: ProblemSpec, defaults: DefaultsModel, params: AverageParams) -> AveragingResult:
    '''
    Averaged trajectory y(t) = W_κ(tω;t₀)(Y(t)) next to the direct solution.

    The window defaults to 1/ε, or to 1 when ε = 0.

    Raises:
        ValueError: For autonomous problems or an initial point of the wrong length.
        ResonanceError: If some letter sum is resonant.
    '''
    if spec.kind == AUTONOMOUS:
        raise ValueError('average needs a quasiperiodic problem.')

    eps = params.eps if params.eps is not None else defaults.eps
    N = params.order if params.order is not None else defaults.N
    t_end = params.t_end if params.t_end is not None else (1.0 / eps if eps else 1.0)

    x0 = params.x0 if params.x0 is not None else defaults.x0
    x0 = default_x0(spec) if x0 is None else np.asarray(x0, dtype=complex)
    if x0.shape != (spec.dim,):
        raise ValueError(f'x0 must have {spec.dim} components.')

    return averaged_solve(spec, eps, x0, t_end, N, defaults.t0, params.samples)
