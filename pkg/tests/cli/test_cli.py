"""Tests for cli: argument handling, exit codes, rendering and export.

Logging setup is patched out so the tests leave the root logger alone.
"""
import json
from unittest.mock import patch

import pytest

from algebra import builtin, from_json
from chain_complex import VerificationReport
from cli import (EXIT_FAILED, EXIT_OK, EXIT_USAGE, RunConfig, ainfty_suite, algebra_suite, build_parser,
                 dual_table_report, export_text, hochschild_square_report, main, parse_diagram, render)
from errors import AssemblyError, UsageError
from graph_core import OrientedBWGraph


@pytest.fixture(autouse=True)
def quiet_logging():
    """Skip root logger configuration."""
    with patch('cli.setup_logging'):
        yield


def run_json(capsys, *argv):
    """Run the tool with JSON output and return (status, parsed output)."""
    status = main(list(argv) + ['--format', 'json'])
    return status, json.loads(capsys.readouterr().out)


# ============================================================================
# Test Group 1: Configuration
# ============================================================================

class TestRunConfig:
    """Flags, environment defaults and validation."""

    def test_flags(self):
        """Parsed flags land in the config; the rest go to options."""
        args = build_parser().parse_args(['hochschild', '--nmax', '5', '--reduced'])
        config = RunConfig.from_args(args)
        assert config.n_max == 5
        assert config.options == {'reduced': True}

    def test_environment_defaults(self):
        """HOMALG_* variables fill unset flags."""
        args = build_parser().parse_args(['natcheck'])
        with patch.dict('os.environ', {'HOMALG_JMAX': '4', 'HOMALG_SEED': '9'}):
            config = RunConfig.from_args(args)
        assert config.j_max == 4
        assert config.seed == 9

    def test_flags_beat_environment(self):
        """A flag overrides its variable."""
        args = build_parser().parse_args(['natcheck', '--J', '3'])
        with patch.dict('os.environ', {'HOMALG_JMAX': '4'}):
            assert RunConfig.from_args(args).j_max == 3

    @pytest.mark.parametrize('field, value', [('n_max', 0), ('q_max', 9), ('j_max', 11), ('g_max', 0),
                                              ('cosimplicial_q_max', 7), ('coefficients', 'R')])
    def test_validate(self, field, value):
        """Out-of-range bounds are rejected."""
        config = RunConfig('hochschild')
        setattr(config, field, value)
        with pytest.raises(ValueError):
            config.validate()

    def test_bounds(self):
        """Reports list the numeric bounds."""
        assert RunConfig('act').bounds() == {'n_max': 8, 'q_max': 3, 'cosimplicial_q_max': 5, 'J': 6, 'K': 6,
                                             'g_max': 4}

    def test_cosimplicial_bound(self):
        """--qmax sets the cosimplicial bound only for the cosimplicial command."""
        with patch.dict('os.environ', {'HOMALG_COSIMPLICIAL_QMAX': '4'}):
            cos = RunConfig.from_args(build_parser().parse_args(['cosimplicial', '--qmax', '2']))
            nat = RunConfig.from_args(build_parser().parse_args(['natcheck', '--qmax', '2']))
            flag = RunConfig.from_args(build_parser().parse_args(['verify-all', '--cosimplicial-qmax', '3']))
        assert (cos.q_max, cos.cosimplicial_q_max) == (2, 2)
        assert (nat.q_max, nat.cosimplicial_q_max) == (2, 4)
        assert flag.cosimplicial_q_max == 3
        assert 'cosimplicial_qmax' not in flag.options


# ============================================================================
# Test Group 2: Exit codes
# ============================================================================

class TestExitCodes:
    """0 for success, 1 for a failed verification, 2 for usage errors."""

    def test_help(self):
        """--help exits cleanly."""
        assert main(['--help']) == EXIT_OK

    @pytest.mark.parametrize('argv', [
        [],
        ['frobnicate'],
        ['hochschild', '--nmax', 'eight'],
        ['hochschild', '--coefficients', 'R'],
        ['hochschild', '--nmax', '0'],
        ['hochschild', '--algebra', 'torus'],
        ['hochschild', '--algebra', 'missing.json'],
        ['cosimplicial', '--manifold', 'c=x'],
        ['act', '--diagram', 'q:1'],
        ['act', '--diagram', 'l:3', '--input', '1,x'],
        ['act', '--input', 'y'],
        ['export', 'foo:1'],
        ['export', 'tg:0'],
        ['export', 'm_3', '--to', 'classical'],
        ['export', 'algebra:torus'],
        ['cosimplicial', '--inj', '5', '--qmax', '4'],
        ['cosimplicial', '--manifold', 'c'],
        ['verify-all', '--cosimplicial-qmax', '7'],
    ])
    def test_usage_errors(self, argv):
        """Bad flags, objects and bounds exit with 2."""
        assert main(argv) == EXIT_USAGE

    def test_environment_out_of_range(self):
        """A bad HOMALG_* value is a configuration error."""
        with patch.dict('os.environ', {'HOMALG_NMAX': '99'}):
            assert main(['hochschild']) == EXIT_USAGE

    def test_failed_verification(self, capsys):
        """A failing report gives exit status 1."""
        failing = VerificationReport('concentration:c=1,i=0', False, 1, 3)
        with patch('cli.verify_concentration', return_value=failing):
            status, data = run_json(capsys, 'cosimplicial')
        assert status == EXIT_FAILED
        assert data['passed'] is False
        assert data['reports'][0]['witness'] == '3'

    def test_library_error_is_a_failed_run(self, capsys):
        """An assembly error mid-run becomes a failing report with its witness, not a usage error."""
        error = AssemblyError('K(c=1,i=0): d^2 is nonzero', witness=(1, 2))
        with patch('cli.verify_concentration', side_effect=error):
            status, data = run_json(capsys, 'cosimplicial')
        assert status == EXIT_FAILED
        report = data['reports'][0]
        assert report['name'] == 'cosimplicial:aborted'
        assert report['witness'] == '(1, 2)'
        assert report['details']['error'] == 'AssemblyError'

    def test_usage_error_from_a_command(self, capsys):
        """A UsageError raised by a command still exits with 2."""
        with patch('cli.verify_concentration', side_effect=UsageError('bad manifold')):
            assert main(['cosimplicial']) == EXIT_USAGE
        assert 'bad manifold' in capsys.readouterr().err

    def test_verify_all_keeps_going_after_an_error(self, capsys):
        """A suite that raises is reported as aborted and the other suites still run."""
        def broken(config):
            raise AssemblyError('d^2 is nonzero', witness='w')

        suites = (('broken', broken), ('algebra', algebra_suite))
        with patch('cli.SUITES', suites), patch('cli.chain_map_report', return_value=VerificationReport('i', True)):
            status, data = run_json(capsys, 'verify-all')
        assert status == EXIT_FAILED
        names = [r['name'] for r in data['reports']]
        assert names[0] == 'broken:aborted'
        assert len(names) == 4
        assert all(r['passed'] for r in data['reports'][1:])

    def test_verify_all_passes(self, capsys):
        """verify-all runs every suite; informational reports do not count."""
        informational = VerificationReport('tqft_action:chain_map:dual', False, 4, 'l_2')
        with patch('cli.SUITES', (('algebra', algebra_suite),)), \
                patch('cli.chain_map_report', return_value=informational):
            status, data = run_json(capsys, 'verify-all')
        assert status == EXIT_OK
        assert len(data['reports']) == 3
        assert data['informational'][0]['passed'] is False

    def test_verify_all_fails(self, capsys):
        """One failing suite fails the run."""
        suites = (('algebra', algebra_suite), ('broken', lambda config: [VerificationReport('broken', False)]))
        with patch('cli.SUITES', suites), patch('cli.chain_map_report', return_value=VerificationReport('i', True)):
            status, _ = run_json(capsys, 'verify-all')
        assert status == EXIT_FAILED


# ============================================================================
# Test Group 3: Commands
# ============================================================================

class TestCommands:
    """hochschild, cosimplicial, act and natcheck."""

    def test_hochschild_table(self, capsys):
        """Stable degrees of the reduced dual numbers."""
        status, data = run_json(capsys, 'hochschild', '--nmax', '5', '--reduced')
        assert status == EXIT_OK
        assert data['homology'] == {'0': 'Z^2', '1': 'Z + Z/2', '2': 'Z', '3': 'Z + Z/2'}
        assert data['bounds']['n_max'] == 5
        assert 'cap_sign' in data['conventions']

    def test_hochschild_text(self, capsys):
        """Text output lists the table."""
        assert main(['hochschild', '--nmax', '4', '--reduced']) == EXIT_OK
        out = capsys.readouterr().out
        assert 'homology:' in out
        assert '0: Z^2' in out

    def test_json_is_deterministic(self, capsys):
        """Two runs with the same flags print the same bytes."""
        argv = ['cosimplicial', '--manifold', 'c=1,i=1', '--qmax', '2', '--format', 'json']
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_cosimplicial_inj(self, capsys):
        """--inj checks the contraction instead."""
        status, data = run_json(capsys, 'cosimplicial', '--inj', '1', '--qmax', '4')
        assert status == EXIT_OK
        assert len(data['reports']) == 1

    def test_act(self, capsys):
        """t_1 on x gives a class of infinite order."""
        status, data = run_json(capsys, 'act', '--diagram', 'tg:1', '--input', 'x')
        assert status == EXIT_OK
        assert data['homology_class']['order'] == 0
        assert data['homology_class']['nonzero_Q'] is True

    def test_act_unreduced(self, capsys):
        """Unreduced evaluation skips the class computation."""
        status, data = run_json(capsys, 'act', '--diagram', 'l:2', '--input', '1,x', '--unreduced')
        assert status == EXIT_OK
        assert data['homology_class'] == {}

    def test_natcheck(self, capsys):
        """Small truncations pass."""
        status, data = run_json(capsys, 'natcheck', '--qmax', '1', '--J', '3', '--K', '3')
        assert status == EXIT_OK
        assert [r['passed'] for r in data['reports']] == [True, True]


# ============================================================================
# Test Group 4: Suites
# ============================================================================

class TestSuites:
    """Reports built by the verify-all suites."""

    def test_dual_table_is_stable(self):
        """The reduced dual-number table does not move when n_max grows by one."""
        report = dual_table_report(6)
        assert report.passed
        assert report.details['stable'] is True
        assert report.details['homology'] == {0: 'Z^2', 1: 'Z + Z/2', 2: 'Z', 3: 'Z + Z/2'}

    @pytest.mark.parametrize('name', ['dual', 'sphere3'])
    def test_hochschild_square(self, name):
        """The unreduced complexes assemble at n_max = 8."""
        report = hochschild_square_report(name, 8)
        assert report.name == f'hochschild_square:{name}'
        assert report.passed
        assert report.details['n_max'] == 8

    def test_hochschild_square_failure(self):
        """An assembly failure turns into a failing report carrying the witness."""
        with patch('cli.build_hochschild', side_effect=AssemblyError('d^2 is nonzero', witness=(0, 1))):
            report = hochschild_square_report('dual', 4)
        assert not report.passed
        assert report.witness == (0, 1)
        assert report.details['error'] == 'AssemblyError'

    def test_ainfty_suite_covers_forests(self):
        """d^2 = 0 is checked on trees and two-component forests up to six inputs."""
        reports = ainfty_suite(RunConfig('verify-all'))
        square = next(r for r in reports if r.name == 'ainfty_square')
        assert square.passed
        assert square.checked > 197


# ============================================================================
# Test Group 5: Export and rendering
# ============================================================================

class TestExport:
    """parse_diagram, export_text and run_export."""

    @pytest.mark.parametrize('text', ['mu:1', 'tg:1', 't_1', 'l:3', 'm_3'])
    def test_parse_diagram(self, text):
        """Known identifiers build oriented graphs."""
        assert isinstance(parse_diagram(text), OrientedBWGraph)

    @pytest.mark.parametrize('text', ['q:1', 'mu', 'l:x'])
    def test_parse_diagram_rejects(self, text):
        """Unknown identifiers are rejected."""
        with pytest.raises(ValueError):
            parse_diagram(text)

    def test_export_algebra(self):
        """Algebras export to their JSON form."""
        assert from_json(export_text('algebra:dual', 'json')) == builtin('dual')

    def test_export_classical(self):
        """Sullivan diagrams export their chord picture."""
        data = json.loads(export_text('tg:1', 'classical'))
        assert data['degree'] == 3

    def test_export_unknown_target(self):
        """Unknown targets are rejected."""
        with pytest.raises(ValueError):
            export_text('l:2', 'svg')

    def test_export_dot_prints(self, capsys):
        """Text format prints the export itself."""
        assert main(['export', 'l:3', '--to', 'dot']) == EXIT_OK
        assert 'l_3' in capsys.readouterr().out

    def test_export_to_file(self, capsys, tmp_path):
        """--output writes the file and leaves content out of the report."""
        target = tmp_path / 'm3.json'
        status, data = run_json(capsys, 'export', 'm_3', '--output', str(target))
        assert status == EXIT_OK
        assert data['content'] is None
        assert json.loads(target.read_text(encoding='utf-8'))

    def test_render_text(self):
        """Text rendering shows status, witness and informational lines."""
        data = {'command': 'verify-all', 'seed': 0, 'bounds': {'n_max': 8},
                'reports': [{'name': 'a', 'passed': True, 'checked': 2, 'witness': None},
                            {'name': 'b', 'passed': False, 'checked': 1, 'witness': '(2, 1)'}],
                'informational': [{'name': 'c', 'passed': True}]}
        text = render(data, 'text')
        assert '  PASS a (checked 2)' in text
        assert '  FAIL b (checked 1) witness=(2, 1)' in text
        assert '  INFO c: matched' in text

    def test_render_json_sorted(self):
        """JSON rendering sorts keys."""
        assert render({'b': 1, 'a': 2}, 'json') == '{\n  "a": 2,\n  "b": 1\n}'
