import json
from pathlib import Path

import pytest

from src.ibo.config_parser import (VALID_STRATEGIES, build_strategy, load_config, parse_config,
                                   serialize_config, strategy_run_config)
from src.ibo.errors import ConfigError
from src.ibo.models import BudgetMode, InitScheme, StrategyKind


def test_minimal_config_gets_defaults():
    cfg = parse_config('{"problem": "branin-mf", "strategy": "ibo", "seed": 3}')
    assert cfg.strategies == ['ibo']
    assert cfg.seeds == [3]
    assert cfg.run.n_init == 5
    assert cfg.run.presample_factors == [2, 3, 4, 5, 6]
    assert cfg.run.mcmc.n_samples == 10
    assert cfg.run.init_scheme == InitScheme.MAX_TASK
    assert cfg.budget_mode == BudgetMode.ITERATIONS


def test_unknown_strategy_lists_valid_kinds():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"problem": "branin-mf", "strategies": ["hyperband"]}')
    assert exc.value.field == 'strategies'
    assert sorted(exc.value.valid) == sorted(['ibo', 'es', 'es_is', 'fabolas', 'fabolas_is', 'random'])
    assert len(VALID_STRATEGIES) == 6


@pytest.mark.parametrize('text, field', [
    ('{"strategies": ["ibo"]}', 'problem'),
    ('{"problem": "branin-mf"}', 'strategies'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "seeds": []}', 'seeds'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "run": {"n_init": 1}}', 'n_init'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "run": {"presample_factors": [1, 2]}}', 'presample_factors'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "run": {"init_scheme": "sobol"}}', 'init_scheme'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "budget_mode": "wallclock"}', 'budget_mode'),
    ('{"problem": "branin-mf", "strategies": ["ibo"], "run": {"mcmc": {"thin": 0}}}', 'mcmc.thin'),
])
def test_invalid_fields_are_named(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"problem": "branin-mf", "strategies": ["ibo"], "n_bo": 3}')
    with pytest.raises(ConfigError):
        parse_config('{"problem": "branin-mf", "strategies": ["ibo"], "run": {"acquisition": {"n_rep": 3}}}')


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config('{"problem": ')


def test_comment_keys_are_ignored():
    cfg = parse_config(json.dumps({
        '_comment': 'top',
        'problem': 'branin-mf',
        'strategies': ['es'],
        'run': {'_note': 'nested', 'n_bo': 4, 'mcmc': {'_x': 1, 'burn_in': 7}},
    }))
    assert cfg.run.n_bo == 4
    assert cfg.run.mcmc.burn_in == 7


def test_round_trip():
    cfg = parse_config(json.dumps({
        'problem': 'digits-small',
        'strategies': ['ibo', 'fabolas'],
        'seeds': [0, 4],
        'output_dir': 'out',
        'budget_mode': 'cost',
        'run': {
            'n_init': 4, 'n_bo': 12, 'init_scheme': 'random_task', 'final_retrain': True,
            'presample_factors': [2, 4, 6],
            'mcmc': {'n_samples': 4, 'priors': {'noise': {'mean': -5.0, 'std': 1.0, 'lower': -12.0}}},
            'acquisition': {'n_mc': 50, 'task_grid': [0.0, 1.0]},
            'trainer': {'epochs': 3, 'lr_decay': 0.5, 'decay_epoch': 2},
        },
        'overrides': {'fabolas': {'n_bo': 20, 'init_scheme': 'ladder'}},
        'problem_options': {'split_seed': 2},
    }))
    assert parse_config(serialize_config(cfg)) == cfg


def test_overrides_and_seed_applied_per_strategy():
    cfg = parse_config(json.dumps({
        'problem': 'branin-mf',
        'strategies': ['ibo', 'fabolas'],
        'run': {'n_bo': 5},
        'overrides': {'fabolas': {'n_bo': 9}},
    }))
    assert strategy_run_config(cfg, 'ibo', 2).n_bo == 5
    fabolas = strategy_run_config(cfg, 'fabolas', 2)
    assert (fabolas.n_bo, fabolas.seed) == (9, 2)

    with pytest.raises(ConfigError):
        parse_config('{"problem": "branin-mf", "strategies": ["ibo"], "overrides": {"hyperband": {}}}')


def test_build_strategy():
    cfg = parse_config('{"problem": "branin-mf", "strategies": ["es_is"], "run": {"presample_factors": [2, 6]}}')
    strategy = build_strategy('es_is', cfg.run)
    assert strategy.kind == StrategyKind.ES_IS
    assert strategy.presample_grid() == [0.0, 1.0]


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'missing.json'))


def test_example_config_is_valid():
    cfg = load_config(str(Path(__file__).resolve().parents[1] / 'config.json'))
    assert cfg.problem == 'branin-mf'
    assert set(cfg.strategies) <= set(VALID_STRATEGIES)
