# tests/test_cli.py
"""
Test suite for the command-line interface.
Runs main() in-process and checks output documents, artifacts and exit codes.
"""

import io
import json
import os

import pytest

from cli.app import EXIT_OK, EXIT_REGION, EXIT_SIZE, EXIT_USAGE, main
from storage.artifact_store import ArtifactStore


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, '--format', 'json')
    assert code == EXIT_OK, text
    return json.loads(text)


class TestBoundsCommand:
    """Test the bounds subcommand"""

    def test_scalar_multilinear_exact(self, config_path):
        """Test bounds prints the exact scalar index as JSON"""
        document = run_json('bounds', '--config', config_path, '--variant', 'mult', '--m', '2', '--p', '2',
                            '--q', '2', '--domain', 'lq-star', '--codomain', 'scalar')
        assert document['exact']['value'] == pytest.approx(0.5)
        assert document['exact']['region'] == 'scalar-exact(a)'

    def test_polynomial_with_cotype(self, config_path):
        """Test bounds for a polynomial with a cotype codomain"""
        document = run_json('bounds', '--config', config_path, '--variant', 'pol', '--m', '2', '--p', '1',
                            '--q', '1', '--cotype', '2')
        assert document['exact']['value'] == pytest.approx(0.5)

    def test_single_formula(self, config_path):
        """Test bounds evaluates a single named formula"""
        document = run_json('bounds', '--config', config_path, '--formula', 'scalar_coincidence_s',
                            '--m', '2', '--t', '4')
        assert document['value'] == pytest.approx(1.6)

    def test_region_map(self, config_path):
        """Test bounds prints the region map"""
        document = run_json('bounds', '--config', config_path, '--formula', 'region_map', '--m', '2',
                            '--cotype', '2', '--p-grid', '0.3,1,3', '--q-grid', '1,3')
        assert document['regions'] == [['a', 'strip', 'none'], ['c', 'd', 'none']]

    def test_table_output(self, config_path):
        """Test bounds table output has a header row"""
        code, text = run('bounds', '--config', config_path, '--format', 'table', '--m', '2', '--p', '4', '--q', '2')
        assert code == EXIT_OK
        assert text.splitlines()[0].split() == ['role', 'value', 'direction', 'region', 'citation']
        assert 'scalar-exact(b)' in text

    def test_degree_zero(self, config_path, capsys):
        """Test a zero degree exits with a usage error"""
        code, _ = run('bounds', '--config', config_path, '--m', '0', '--p', '2', '--q', '2')
        assert code == EXIT_USAGE
        assert 'PARAMETER_DOMAIN_ERROR' in capsys.readouterr().err

    def test_missing_flag(self, config_path):
        """Test a missing required flag exits with a usage error"""
        code, _ = run('bounds', '--config', config_path, '--m', '2', '--p', '2')
        assert code == EXIT_USAGE

    def test_region_error(self, config_path, capsys):
        """Test a formula outside its region exits with the region code"""
        code, _ = run('bounds', '--config', config_path, '--formula', 'exact_index_c0',
                      '--m', '2', '--p', '2', '--q', '3')
        assert code == EXIT_REGION
        assert 'q not in [1,2]' in capsys.readouterr().err

    def test_unknown_subcommand(self):
        """Test an unknown subcommand exits with a usage error"""
        code, _ = run('frobnicate')
        assert code == EXIT_USAGE


class TestFormCommands:
    """Test construct and norm"""

    def test_construct_then_norm(self, config_path, tmp_path):
        """Test a constructed form file can be read back by norm"""
        path = str(tmp_path / 'forms' / 'diag.form')
        document = run_json('construct', '--config', config_path, '--kind', 'diagonal', '--m', '2',
                            '--n', '4', '--domain-exponent', '4', '--output', path)
        assert os.path.exists(path)
        assert len(document['form']['sha256']) == 64

        document = run_json('norm', '--config', config_path, '--input', path, '--method', 'analytic')
        assert document['norm']['value'] == pytest.approx(2.0)
        assert document['norm']['kind'] == 'exact_analytic'

    def test_ksz_ascent_is_seeded(self, config_path, tmp_path):
        """Test norm ascent is reproducible under the same seed"""
        path = str(tmp_path / 'ksz.form')
        run_json('construct', '--config', config_path, '--kind', 'ksz', '--m', '2', '--n', '5',
                 '--seed', '7', '--output', path)
        first = run_json('norm', '--config', config_path, '--input', path, '--seed', '1', '--restarts', '3')
        second = run_json('norm', '--config', config_path, '--input', path, '--seed', '1', '--restarts', '3')
        assert first['norm'] == second['norm']
        assert first['norm']['restarts_used'] == 3

    def test_size_budget(self, config_path, tmp_path, monkeypatch, capsys):
        """Test construct exits with the size code over budget"""
        monkeypatch.setenv('SUMMABILITY_MAX_COEFFICIENTS', '1000')
        code, _ = run('construct', '--config', config_path, '--kind', 'ksz', '--m', '3', '--n', '20',
                      '--output', str(tmp_path / 'big.form'))
        assert code == EXIT_SIZE
        assert 'budget=1000' in capsys.readouterr().err

    def test_missing_input(self, config_path, tmp_path):
        """Test norm exits with a usage error for a missing file"""
        code, _ = run('norm', '--config', config_path, '--input', str(tmp_path / 'absent.form'))
        assert code == EXIT_USAGE


class TestExperimentCommands:
    """Test estimate, verify, presets and report"""

    def test_presets(self, config_path):
        """Test presets lists every preset inside its region"""
        rows = run_json('presets', '--config', config_path)
        assert [row['name'] for row in rows] == ['ksz-m2', 'diagonal-m2', 'coordinate-c0-m2', 'coordinate-c0-m3']
        assert all(row['region_ok'] for row in rows)

    def test_estimate_writes_artifacts(self, config_path, output_dir):
        """Test estimate writes records and CSV files"""
        document = run_json('estimate', '--config', config_path, '--preset', 'coordinate-c0-m2', '--verify')
        assert document['summary']['slope'] == pytest.approx(1.0, abs=1e-9)
        assert document['summary']['verdict'] == 'consistent'

        records = ArtifactStore.read_records(str(output_dir / 'coordinate-c0-m2.jsonl'))
        assert [r.record_type for r in records] == ['series', 'fit_summary']
        assert all(r.timestamp == '2023-11-14T22:13:20+00:00' for r in records)
        series_rows = ArtifactStore.read_csv(str(output_dir / 'coordinate-c0-m2_series.csv'))
        assert len(series_rows) == 6
        fit_rows = ArtifactStore.read_csv(str(output_dir / 'coordinate-c0-m2_fits.csv'))
        assert fit_rows[-1]['seed'] == 'median'

    def test_estimate_uses_config_section(self, config_path, output_dir):
        """Test estimate applies the scenario config section"""
        document = run_json('estimate', '--config', config_path, '--preset', 'diagonal-m2')
        assert len(document['fits']) == 1
        assert document['fits'][0]['n_used'] == 4
        assert document['summary']['slope'] == pytest.approx(0.25, abs=1e-9)

    def test_estimate_is_reproducible(self, config_path, output_dir):
        """Test repeated estimates produce identical artifacts"""
        run_json('estimate', '--config', config_path, '--preset', 'coordinate-c0-m3', '--name', 'first')
        run_json('estimate', '--config', config_path, '--preset', 'coordinate-c0-m3', '--name', 'second')
        first = (output_dir / 'first.jsonl').read_text()
        second = (output_dir / 'second.jsonl').read_text()
        assert first.replace('first', 'second') == second

    def test_estimate_seed_offsets(self, config_path, tmp_path):
        """Test seeds count up from the base seed"""
        document = run_json('estimate', '--config', config_path, '--preset', 'ksz-m2', '--n-grid', '2,4,8',
                            '--seeds', '2', '--seed', '10', '--output-dir', str(tmp_path / 'ksz'))
        assert [fit['seed'] for fit in document['fits']] == [10, 11]

    def test_estimate_bad_grid(self, config_path):
        """Test a one-point grid exits with a usage error"""
        code, _ = run('estimate', '--config', config_path, '--preset', 'diagonal-m2', '--n-grid', '4')
        assert code == EXIT_USAGE

    def test_verify_artifact(self, config_path, output_dir):
        """Test verify re-checks a written artifact"""
        run_json('estimate', '--config', config_path, '--preset', 'diagonal-m2')
        rows = run_json('verify', '--config', config_path, '--artifact', str(output_dir / 'diagonal-m2.jsonl'))
        assert rows[0]['verdict'] == 'consistent'

    def test_report_deduplicates(self, config_path, output_dir):
        """Test report collapses repeated artifacts"""
        run_json('estimate', '--config', config_path, '--preset', 'coordinate-c0-m2', '--verify')
        path = str(output_dir / 'coordinate-c0-m2.jsonl')
        single = run_json('report', '--config', config_path, path)
        double = run_json('report', '--config', config_path, path, path)
        assert single['rows'] == double['rows']
        assert double['flagged'] == 0

    def test_report_flags_inconsistent(self, config_path, output_dir):
        """Test report flags a violated verdict"""
        run_json('estimate', '--config', config_path, '--preset', 'coordinate-c0-m2', '--verify',
                 '--tolerance', '1e-9')
        path = output_dir / 'coordinate-c0-m2.jsonl'
        lines = path.read_text().splitlines()
        summary = json.loads(lines[-1])
        summary['payload']['verdict'] = 'upper_violated'
        lines[-1] = json.dumps(summary)
        path.write_text('\n'.join(lines) + '\n')
        document = run_json('report', '--config', config_path, str(path))
        assert document['flagged'] == 1
        assert document['rows'][-1]['flag'] == '!'

    def test_report_without_paths(self, config_path):
        """Test report needs at least one artifact"""
        code, _ = run('report', '--config', config_path)
        assert code == EXIT_USAGE

    def test_report_malformed_artifact(self, config_path, tmp_path, capsys):
        """Test report exits with a usage error on a malformed artifact"""
        path = tmp_path / 'broken.jsonl'
        path.write_text('{"record_type": "fit_summary"}\n')
        code, _ = run('report', '--config', config_path, str(path))
        assert code == EXIT_USAGE
        assert 'SCHEMA_ERROR' in capsys.readouterr().err
