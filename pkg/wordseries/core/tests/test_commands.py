import csv
import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import TestCase
from unittest.mock import MagicMock, patch

from parameterized import parameterized

from wordseries import settings
from wordseries.cli import main
from wordseries.core.commands import cmd_average, cmd_coeffs, cmd_validate, cmd_verify
from wordseries.core.utils.constants import (
    EXIT_HYPOTHESIS,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_RESONANCE,
    EXIT_VERIFY_FAILED,
)
from wordseries.core.utils.exceptions import ResonanceError, UnsupportedGenerator
from wordseries.core.utils.serializers import IdentityReport, SuiteReport

ANGLE_SHIFT_FILE = str(settings.FIXTURES_DIR / 'example2.json')
PROJECTOR_FILE = settings.FIXTURES_DIR / 'example1.json'
QUASI_FILE = str(settings.FIXTURES_DIR / 'acceptance_quasi.json')
RESONANT_FILE = str(settings.FIXTURES_DIR / 'resonant.json')


def suite_report(passed: bool) -> SuiteReport:
    deviation = 0.0 if passed else 1.0
    return SuiteReport.from_reports('algebra', [IdentityReport.from_deviations('identity', [('a', deviation)], 1e-12)])


class CommandTestCase(TestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.directory = Path(directory.name)

        stdout = patch('sys.stdout', new_callable=StringIO)
        stderr = patch('sys.stderr', new_callable=StringIO)
        self.stdout = stdout.start()
        self.stderr = stderr.start()
        self.addCleanup(stdout.stop)
        self.addCleanup(stderr.stop)

    def write(self, name: str, content: str) -> str:
        path = self.directory / name
        path.write_text(content, encoding='utf-8')
        return str(path)


class TestValidate(CommandTestCase):
    def test_valid_problem(self):
        assert cmd_validate(ANGLE_SHIFT_FILE) == EXIT_OK

        report = json.loads(self.stdout.getvalue())
        assert report['suite'] == 'hypotheses'
        assert report['passed'] is True

    def test_resonant_problem(self):
        assert cmd_validate(RESONANT_FILE) == EXIT_RESONANCE
        assert 'resonant' in self.stderr.getvalue()

    @parameterized.expand([
        ("not_json", '{"kind": '),
        ("schema", '{"kind": "quasiperiodic", "D": 1, "d": 1, "modes": []}'),
        ("not_an_object", '[]'),
    ])
    def test_unparseable_problem(self, _, content):
        assert cmd_validate(self.write('problem.json', content)) == EXIT_PARSE_ERROR
        assert self.stderr.getvalue().startswith('error:')

    def test_missing_file(self):
        assert cmd_validate(str(self.directory / 'missing.json')) == EXIT_PARSE_ERROR

    def test_broken_hypothesis(self):
        document = json.loads(PROJECTOR_FILE.read_text())
        document['modes'][0]['components'] = [[{"exponents": [0, 2], "re": 1.0}], []]

        assert cmd_validate(self.write('broken.json', json.dumps(document))) == EXIT_HYPOTHESIS
        assert 'eigen relations' in self.stderr.getvalue()

    @patch('wordseries.core.commands.load_problem', side_effect=RuntimeError('boom'))
    def test_unexpected_error(self, _):
        with self.assertLogs('wordseries.core.commands', level='ERROR'):
            assert cmd_validate(QUASI_FILE) == EXIT_VERIFY_FAILED


class TestCoeffs(CommandTestCase):
    def test_beta_bar_csv(self):
        assert cmd_coeffs(QUASI_FILE, {'what': 'betabar', 'order': 2}) == EXIT_OK

        lines = self.stdout.getvalue().splitlines()
        assert lines[0] == 'word,re,im'
        assert lines[1] == '0,1,0'

    def test_beta_bar_json(self):
        assert cmd_coeffs(QUASI_FILE, {'what': 'betabar', 'order': 2, 'format': 'json'}) == EXIT_OK

        document = json.loads(self.stdout.getvalue())
        assert document['order'] == 2
        assert document['d'] == 1
        assert document['entries'][0] == {'word': '0', 're': 1.0, 'im': 0.0}

    @parameterized.expand([
        ("alpha", QUASI_FILE, {'what': 'alpha', 't': 0.3, 't0': 0.3}),
        ("alphabar", QUASI_FILE, {'what': 'alphabar', 't': 0.3, 't0': 0.3}),
        ("kappa", QUASI_FILE, {'what': 'kappa', 't0': 0.3, 'theta': '0.3'}),
        ("autonomous_alpha", ANGLE_SHIFT_FILE, {'what': 'alpha', 't': 0.7, 't0': 0.7}),
        ("gamma_u_at_origin", PROJECTOR_FILE, {'what': 'gamma-u', 't': 0.0}),
    ])
    def test_unit_has_a_single_row(self, _, path, options):
        assert cmd_coeffs(str(path), options) == EXIT_OK
        assert self.stdout.getvalue().splitlines() == ['word,re,im', 'e,1,0']

    def test_output_file(self):
        out = str(self.directory / 'alpha.csv')

        assert cmd_coeffs(QUASI_FILE, {'what': 'alpha', 't': 0.5, 'out': out}) == EXIT_OK

        assert self.stdout.getvalue() == ''
        assert Path(out).read_text().splitlines()[1] == 'e,1,0'

    @parameterized.expand([
        ("unknown_kind", QUASI_FILE, {'what': 'omega'}),
        ("missing_kind", QUASI_FILE, {}),
        ("not_for_problem", QUASI_FILE, {'what': 'rho'}),
        ("wrong_theta", QUASI_FILE, {'what': 'kappa', 'theta': '0.1,0.2'}),
        ("wrong_u", ANGLE_SHIFT_FILE, {'what': 'gamma-u', 'u': '1,2'}),
    ])
    def test_invalid_request(self, _, path, options):
        assert cmd_coeffs(path, options) == EXIT_PARSE_ERROR

    def test_resonant_problem(self):
        assert cmd_coeffs(RESONANT_FILE, {'what': 'alpha'}) == EXIT_RESONANCE


class TestVerify(CommandTestCase):
    @parameterized.expand([
        ("passed", True, EXIT_OK),
        ("failed", False, EXIT_VERIFY_FAILED),
    ])
    def test_exit_code_follows_report(self, _, passed, expected):
        with patch('wordseries.core.commands.run_suite', return_value=suite_report(passed)):
            assert cmd_verify(QUASI_FILE, {'suite': 'algebra'}) == expected

        assert json.loads(self.stdout.getvalue())['passed'] is passed

    @parameterized.expand([
        ("unsupported", UnsupportedGenerator('no generators'), EXIT_PARSE_ERROR),
        ("resonance", ResonanceError('resonant'), EXIT_RESONANCE),
        ("unexpected", ZeroDivisionError(), EXIT_VERIFY_FAILED),
    ])
    def test_errors(self, _, error, expected):
        with patch('wordseries.core.commands.run_suite', side_effect=error):
            assert cmd_verify(QUASI_FILE, {'suite': 'transport'}) == expected

    @parameterized.expand([
        ("unknown_suite", {'suite': 'all'}),
        ("bad_sweep", {'suite': 'scaling', 'eps': '0.1,-0.1,0.01'}),
        ("order_too_high", {'suite': 'algebra', 'order': 7}),
    ])
    def test_invalid_options(self, _, options):
        assert cmd_verify(QUASI_FILE, options) == EXIT_PARSE_ERROR

    def test_runs_suite(self):
        assert cmd_verify(ANGLE_SHIFT_FILE, {'suite': 'transport', 'samples': 2, 'order': 2}) == EXIT_OK

        report = json.loads(self.stdout.getvalue())
        assert [item['name'] for item in report['reports']] == [
            'transport equation of gamma_u', 'flow equivariance of the modes', 'pullback by the flow',
        ]


class TestAverage(CommandTestCase):
    def test_csv(self):
        options = {'eps': 0.05, 't_end': 1.0, 'samples': 3, 'order': 2}
        assert cmd_average(QUASI_FILE, options) == EXIT_OK

        rows = list(csv.reader(StringIO(self.stdout.getvalue())))
        assert rows[0] == ['t', 'avg_0_re', 'avg_0_im', 'ref_0_re', 'ref_0_im', 'error']
        assert len(rows) == 4
        assert rows[1][0] == '0'
        assert rows[1][3:5] == ['0.10000000000000001', '0']
        self.assertAlmostEqual(float(rows[1][1]), 0.1, places=12)
        assert float(rows[-1][0]) == 1.0

    def test_json(self):
        options = {'eps': 0.05, 't_end': 1.0, 'samples': 2, 'format': 'json'}
        assert cmd_average(QUASI_FILE, options) == EXIT_OK

        document = json.loads(self.stdout.getvalue())
        assert [row['t'] for row in document] == [0.0, 1.0]
        assert document[-1]['error'] < 1e-6

    @parameterized.expand([
        ("autonomous", ANGLE_SHIFT_FILE, {}),
        ("wrong_point", QUASI_FILE, {'x0': '0.1,0.2'}),
        ("one_sample", QUASI_FILE, {'samples': 1}),
    ])
    def test_invalid_request(self, _, path, options):
        assert cmd_average(path, options) == EXIT_PARSE_ERROR


class TestMain(CommandTestCase):
    def test_dispatches_options(self):
        command = MagicMock(return_value=EXIT_OK)

        with patch.dict('wordseries.cli.commands', {'verify': command}):
            assert main(['verify', QUASI_FILE, '--suite', 'algebra', '--samples', '3']) == EXIT_OK

        command.assert_called_once_with(QUASI_FILE, {'suite': 'algebra', 'samples': 3})

    def test_validate(self):
        assert main(['--log-level', 'error', 'validate', ANGLE_SHIFT_FILE]) == EXIT_OK

    def test_resonant(self):
        assert main(['validate', RESONANT_FILE]) == EXIT_RESONANCE

    def test_coeffs(self):
        assert main(['coeffs', QUASI_FILE, '--what', 'betabar', '--order', '2']) == EXIT_OK
        assert self.stdout.getvalue().splitlines()[1] == '0,1,0'

    def test_missing_required_option(self):
        with self.assertRaises(SystemExit) as context:
            main(['coeffs', QUASI_FILE])

        assert context.exception.code == EXIT_PARSE_ERROR
