import json
from copy import deepcopy
from unittest import TestCase

from parameterized import parameterized
from pydantic import ValidationError

from wordseries import settings
from wordseries.core.utils.serializers import (
    AverageParams,
    CoeffsParams,
    IdentityReport,
    ProblemFileModel,
    SuiteReport,
    VerifyParams,
)

with open(settings.FIXTURES_DIR / 'example2.json') as handle:
    ANGLE_SHIFT_DOCUMENT = json.load(handle)

with open(settings.FIXTURES_DIR / 'example1.json') as handle:
    PROJECTOR_DOCUMENT = json.load(handle)

with open(settings.FIXTURES_DIR / 'acceptance_quasi.json') as handle:
    QUASI_DOCUMENT = json.load(handle)


def changed(document: dict, **updates) -> dict:
    copy = deepcopy(document)
    for key, value in updates.items():
        if value is None:
            copy.pop(key, None)
        else:
            copy[key] = value
    return copy


def mode(letter: list, *components: list) -> dict:
    return {"letter": letter, "components": list(components)}


class TestProblemFileModel(TestCase):
    @parameterized.expand([
        ("angle_shift", ANGLE_SHIFT_DOCUMENT),
        ("linear_projector", PROJECTOR_DOCUMENT),
        ("quasiperiodic", QUASI_DOCUMENT),
        ("no_defaults", changed(QUASI_DOCUMENT, defaults=None)),
        ("negative_frequency", changed(ANGLE_SHIFT_DOCUMENT, modes=[
            mode([1], [{"exponents": [0, -3], "re": 1.0}], []),
        ])),
    ])
    def test_valid(self, _, document):
        problem = ProblemFileModel(**document)
        assert problem.D == document["D"]

    @parameterized.expand([
        ("quasiperiodic_without_omega", changed(QUASI_DOCUMENT, omega=None)),
        ("quasiperiodic_with_gkind", changed(QUASI_DOCUMENT, gkind="angle-shift")),
        ("autonomous_without_gkind", changed(ANGLE_SHIFT_DOCUMENT, gkind=None)),
        ("angle_shift_without_omega", changed(ANGLE_SHIFT_DOCUMENT, omega=None)),
        ("angle_shift_without_polynomial_variable", changed(ANGLE_SHIFT_DOCUMENT, D=1)),
        ("projector_without_projectors", changed(PROJECTOR_DOCUMENT, projectors=None)),
        ("projector_with_short_v", changed(PROJECTOR_DOCUMENT, v=[[0.0, 1.0]])),
        ("projector_of_wrong_size", changed(PROJECTOR_DOCUMENT, projectors=[[[1.0]], [[0.0]]])),
        ("omega_of_wrong_length", changed(QUASI_DOCUMENT, omega=[1.0, 2.0])),
        ("unknown_kind", changed(QUASI_DOCUMENT, kind="periodic")),
        ("extra_field", changed(QUASI_DOCUMENT, comment="x")),
        ("letter_of_wrong_length", changed(QUASI_DOCUMENT, modes=[mode([1, 0], [])])),
        ("repeated_letter", changed(QUASI_DOCUMENT, modes=[mode([1], []), mode([1], [])])),
        ("missing_component", changed(PROJECTOR_DOCUMENT, modes=[mode([1, 0], [])])),
        ("exponents_of_wrong_length", changed(QUASI_DOCUMENT, modes=[
            mode([1], [{"exponents": [1, 1], "re": 1.0}]),
        ])),
        ("negative_power", changed(QUASI_DOCUMENT, modes=[mode([1], [{"exponents": [-1], "re": 1.0}])])),
        ("x0_of_wrong_length", changed(QUASI_DOCUMENT, defaults={"x0": [0.1, 0.2]})),
        ("order_too_high", changed(QUASI_DOCUMENT, defaults={"N": 9})),
        ("negative_eps", changed(QUASI_DOCUMENT, defaults={"eps": -0.1})),
        ("bad_complex", changed(PROJECTOR_DOCUMENT, v=["i", "-i"])),
    ])
    def test_invalid(self, _, document):
        with self.assertRaises(ValidationError):
            ProblemFileModel(**document)

    @parameterized.expand([
        ("pair", [0.0, 1.0], 1j),
        ("object", {"re": 0.5, "im": -2.0}, 0.5 - 2j),
        ("number", 3, 3 + 0j),
    ])
    def test_complex_values(self, _, value, expected):
        problem = ProblemFileModel(**changed(PROJECTOR_DOCUMENT, v=[value, value]))
        assert problem.v == [expected, expected]

    def test_nangles(self):
        assert ProblemFileModel(**ANGLE_SHIFT_DOCUMENT).nangles == 1
        assert ProblemFileModel(**PROJECTOR_DOCUMENT).nangles == 0

    def test_term_coefficient(self):
        problem = ProblemFileModel(**ANGLE_SHIFT_DOCUMENT)
        assert problem.modes[0].components[0][0].coefficient == -0.5j


class TestCommandParams(TestCase):
    @parameterized.expand([
        ("betabar", {"what": "betabar"}, True),
        ("kappa_with_theta", {"what": "kappa", "theta": "0.1,0.2"}, True),
        ("unknown_kind", {"what": "beta"}, False),
        ("order_too_high", {"what": "alpha", "order": 9}, False),
        ("unknown_format", {"what": "alpha", "format": "xml"}, False),
        ("unknown_option", {"what": "alpha", "seed": 1}, False),
    ])
    def test_coeffs_params(self, _, options, is_valid):
        try:
            CoeffsParams(**options)
        except ValidationError:
            assert not is_valid
        else:
            assert is_valid

    def test_theta_from_text(self):
        assert CoeffsParams(what="kappa", theta="0.1, 0.2").theta == [0.1, 0.2]

    def test_u_from_text(self):
        assert CoeffsParams(what="rho", u="1,0").u == [1 + 0j, 0j]

    def test_verify_defaults(self):
        params = VerifyParams(suite="algebra")

        assert params.seed == settings.SEED
        assert params.samples == settings.SAMPLES
        assert params.eps == list(settings.EPS_SWEEP)

    @parameterized.expand([
        ("unknown_suite", {"suite": "everything"}),
        ("order_too_high", {"suite": "scaling", "order": 7}),
        ("no_samples", {"suite": "algebra", "samples": 0}),
        ("zero_eps", {"suite": "scaling", "eps": "0.02,0"}),
    ])
    def test_invalid_verify_params(self, _, options):
        with self.assertRaises(ValidationError):
            VerifyParams(**options)

    def test_eps_sweep_from_text(self):
        assert VerifyParams(suite="scaling", eps="0.04,0.02,0.01").eps == [0.04, 0.02, 0.01]

    @parameterized.expand([
        ("one_sample", {"samples": 1}),
        ("negative_window", {"t_end": -1.0}),
        ("negative_eps", {"eps": -0.01}),
    ])
    def test_invalid_average_params(self, _, options):
        with self.assertRaises(ValidationError):
            AverageParams(**options)


class TestReports(TestCase):
    def test_all_within_tolerance(self):
        report = IdentityReport.from_deviations("identity", [("a", 1e-13), ("b", 2e-13)], 1e-12)

        assert report.passed
        assert report.checked == 2
        assert report.max_deviation == 2e-13
        assert report.first_violation is None

    def test_first_violation(self):
        report = IdentityReport.from_deviations("identity", [("a", 1e-13), ("b", 1.0), ("c", 2.0)], 1e-12)

        assert not report.passed
        assert report.first_violation == "b"
        assert report.max_deviation == 2.0

    def test_nan_is_a_violation(self):
        report = IdentityReport.from_deviations("identity", [("a", float("nan"))], 1e-12)

        assert not report.passed
        assert report.first_violation == "a"

    def test_suite_failures(self):
        good = IdentityReport.from_deviations("good", [("a", 0.0)], 1e-12)
        bad = IdentityReport.from_deviations("bad", [("a", 1.0)], 1e-12)

        suite = SuiteReport.from_reports("algebra", [good, bad])

        assert not suite.passed
        assert [report.name for report in suite.failures] == ["bad"]
