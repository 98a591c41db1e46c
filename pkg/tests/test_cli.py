import json

import pytest

from main import main


def _write_config(tmp_path, **extra):
    config = {
        'problem': 'branin-mf',
        'strategies': ['random', 'ibo'],
        'seeds': [0],
        'output_dir': str(tmp_path / 'out'),
        'run': {
            'n_init': 3,
            'n_bo': 1,
            'mcmc': {'n_samples': 2, 'burn_in': 2, 'thin': 1, 'warm_burn_in': 1},
            'acquisition': {'n_representers': 5, 'n_mc': 20, 'n_fantasy': 2, 'n_candidates': 10},
        },
    }
    config.update(extra)
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(config), encoding='utf-8')
    return path


def test_list_problems(capsys):
    assert main(['list-problems']) == 0
    out = capsys.readouterr().out
    assert 'branin-mf' in out
    assert 'hartmann3-mf' in out


def test_missing_config_reports_json_error(tmp_path, capsys):
    code = main(['run', '--config', str(tmp_path / 'missing.json')])
    assert code == 1
    first = capsys.readouterr().err.splitlines()[0]
    assert json.loads(first)['error'] == 'config_invalid'


def test_invalid_strategy_is_rejected_by_parser():
    with pytest.raises(SystemExit):
        main(['run', '--strategy', 'hyperband'])


def test_run_then_summarize(tmp_path, capsys):
    config = _write_config(tmp_path)
    out = tmp_path / 'out'
    assert main(['run', '--config', str(config)]) == 0
    assert (out / 'run_meta.json').is_file()
    assert (out / 'random' / 'seed_0.jsonl').is_file()
    assert (out / 'ibo' / 'seed_0.jsonl').is_file()

    assert main(['summarize', '--in', str(out)]) == 0
    assert (out / 'summary.csv').is_file()
    printed = capsys.readouterr().out
    assert 'random' in printed and 'ibo' in printed


def test_run_single_strategy_and_seed(tmp_path):
    config = _write_config(tmp_path)
    out = tmp_path / 'single'
    assert main(['run', '-c', str(config), '--strategy', 'random', '--seed', '7', '-o', str(out)]) == 0
    lines = (out / 'random' / 'seed_7.jsonl').read_text(encoding='utf-8').splitlines()
    assert len(lines) == 4
    assert not (out / 'ibo').exists()


def test_summarize_missing_dir(tmp_path, capsys):
    assert main(['summarize', '--in', str(tmp_path / 'nothing')]) == 1
    assert json.loads(capsys.readouterr().err.splitlines()[0])['error'] == 'trace_io_failed'
