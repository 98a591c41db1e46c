from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from src.ibo import engine
from src.ibo.engine import (BOState, Proposal, evaluate_proposal, incumbent, initial_proposals,
                            initialize, observed_incumbent, propose, run_bo)
from src.ibo.errors import ConfigError, GPFitError, RunAbortedError
from src.ibo.models import (AcquisitionConfig, ConfigPoint, InitScheme, Strategy, StrategyKind,
                            TaskSemantics, TrainerDefaults)
from src.ibo.problems import build_problem
from src.ibo.problems.synthetic import make_branin

from .conftest import make_ensemble, make_observations


def _strategy(kind):
    return Strategy(kind)


def _non_timing(record):
    return record.non_timing_dict()


def test_max_task_initialization(tiny_run, rng):
    cfg = replace(tiny_run, n_init=5)
    obs = initialize(_strategy(StrategyKind.IBO), make_branin(), cfg, rng)
    assert len(obs) == 5
    assert all(o.t == 1.0 for o in obs)


def test_ladder_initialization(tiny_run, rng):
    cfg = replace(tiny_run, n_init=5, init_scheme=InitScheme.LADDER)
    proposals = initial_proposals(_strategy(StrategyKind.FABOLAS), make_branin(), cfg, rng)
    assert len(proposals) == 20
    assert sorted({p.task for p in proposals}) == pytest.approx([0.0, 1 / 7, 2 / 7, 3 / 7])

    with pytest.raises(ConfigError):
        initial_proposals(_strategy(StrategyKind.IBO), make_branin(), cfg, rng)


def test_random_task_initialization_uses_task_grid(tiny_run, rng):
    cfg = replace(tiny_run, n_init=8, init_scheme=InitScheme.RANDOM_TASK)
    strategy = _strategy(StrategyKind.IBO)
    proposals = initial_proposals(strategy, make_branin(), cfg, rng)
    assert {p.task for p in proposals} <= set(strategy.presample_grid())


def test_fabolas_is_initialization_draws_presample_factor(tiny_run, rng):
    proposals = initial_proposals(_strategy(StrategyKind.FABOLAS_IS), make_branin(), tiny_run, rng)
    assert all(p.presample_factor == 6.0 for p in proposals)


def test_random_proposals_are_reproducible(tiny_run):
    problem = make_branin()
    state = BOState([])
    a = propose(_strategy(StrategyKind.RANDOM), state, problem, tiny_run, np.random.default_rng(4))
    b = propose(_strategy(StrategyKind.RANDOM), state, problem, tiny_run, np.random.default_rng(4))
    assert a == b
    assert a.task == 1.0


@pytest.fixture
def fitted_state():
    xs = [(0.1, 0.2), (0.5, 0.9), (0.8, 0.4)]
    ens = make_ensemble(xs, [1.0, 0.2, 0.5], lengthscale=0.3, noise=1e-4)
    return BOState([], ensemble_f=ens)


def test_es_always_proposes_target_task(tiny_run, fitted_state):
    rng = np.random.default_rng(0)
    for _ in range(5):
        assert propose(_strategy(StrategyKind.ES), fitted_state, make_branin(), tiny_run, rng).task == 1.0


def test_es_is_presample_factor_is_uniform_over_grid(tiny_run, fitted_state):
    cfg = replace(tiny_run, acquisition=AcquisitionConfig(n_representers=2, n_mc=5, n_fantasy=1, n_candidates=1))
    strategy = _strategy(StrategyKind.ES_IS)
    rng = np.random.default_rng(21)
    n = 1000
    counts = Counter(propose(strategy, fitted_state, make_branin(), cfg, rng).task for _ in range(n))
    grid = strategy.presample_grid()
    assert set(counts) <= set(grid)
    se = np.sqrt(n * 0.2 * 0.8)
    for t in grid:
        assert abs(counts[t] - n / 5) <= 3 * se


def test_es_is_evaluates_at_target_fidelity(rng):
    proposal = Proposal(ConfigPoint((0.4, 0.4)), 0.25)
    ev = evaluate_proposal(_strategy(StrategyKind.ES_IS), make_branin(), proposal, rng)
    assert ev.presample_factor == 3.0
    assert ev.observation.t == 1.0
    assert ev.result.cost == pytest.approx(5.0)


def test_ibo_evaluation_maps_task_to_presample_factor(rng):
    proposal = Proposal(ConfigPoint((0.4, 0.4)), 0.5)
    ev = evaluate_proposal(_strategy(StrategyKind.IBO), make_branin(), proposal, rng)
    assert ev.presample_factor == 4.0
    assert ev.task_value == 4.0
    assert ev.observation.t == 0.5


def test_incumbent_single_observation():
    data = make_observations([(0.3, 0.3)], [1.0])
    ens = make_ensemble([(0.3, 0.3)], [1.0])
    x, _ = incumbent(ens, data)
    assert x == data[0].x


def test_incumbent_picks_clearly_better_config():
    xs = [(0.1, 0.1), (0.9, 0.9)]
    data = make_observations(xs, [5.0, -5.0])
    ens = make_ensemble(xs, [5.0, -5.0], lengthscale=0.1, noise=1e-4)
    x, value = incumbent(ens, data)
    assert x == data[1].x
    assert value == pytest.approx(-5.0, abs=1e-2)


def test_incumbent_uses_target_task_prediction():
    xs = [(0.2, 0.2), (0.8, 0.8)]
    # the lowest raw y was seen at t=0, where the target-task prediction is only half of it
    data = make_observations(xs, [-2.0, -3.0], ts=[1.0, 0.0])
    ens = make_ensemble(xs, [-2.0, -3.0], ts=[1.0, 0.0], lengthscale=0.1, noise=1e-4)
    means = ens.mean(np.array(xs), np.ones(2))
    assert means[1] == pytest.approx(-1.5, abs=1e-2)

    x, value = incumbent(ens, data)
    assert x == data[0].x
    assert value == pytest.approx(min(means))
    assert min(data, key=lambda o: o.y).x != x


def test_incumbent_requires_history():
    with pytest.raises(GPFitError):
        incumbent(make_ensemble([0.5], [0.0]), [])


def test_observed_incumbent_prefers_highest_task():
    data = make_observations([0.1, 0.5, 0.9], [-10.0, 2.0, 1.0], ts=[0.0, 1.0, 1.0])
    x, y = observed_incumbent(data)
    assert (x, y) == (data[2].x, 1.0)


def test_no_bo_rounds_records_initialization_only(tiny_run, rng):
    cfg = replace(tiny_run, n_bo=0)
    trace = run_bo(_strategy(StrategyKind.IBO), make_branin(), cfg, rng)
    assert len(trace) == cfg.n_init
    assert all(r.phase == 'init' for r in trace)


@pytest.mark.parametrize('kind', [StrategyKind.IBO, StrategyKind.ES, StrategyKind.RANDOM])
def test_run_bo_trace_invariants(kind, tiny_run):
    problem = make_branin()
    seen = []
    trace = run_bo(_strategy(kind), problem, tiny_run, np.random.default_rng(3), on_record=seen.append)
    assert seen == trace
    assert len(trace) == tiny_run.n_init + tiny_run.n_bo
    assert [r.iter for r in trace] == list(range(len(trace)))

    assert np.allclose([r.cum_cost for r in trace], np.cumsum([r.cost for r in trace]), rtol=0, atol=1e-9)
    assert all(b.cum_cost >= a.cum_cost for a, b in zip(trace, trace[1:]))

    evaluated = [r.x for r in trace]
    for i, r in enumerate(trace):
        assert r.incumbent_x in evaluated[:i + 1]
        assert r.incumbent_true is not None

    if kind in (StrategyKind.ES, StrategyKind.RANDOM):
        assert all(r.task_normalized == 1.0 for r in trace)


def test_run_bo_is_deterministic(tiny_run):
    strategy = _strategy(StrategyKind.IBO)
    a = run_bo(strategy, make_branin(), tiny_run, np.random.default_rng(17))
    b = run_bo(strategy, make_branin(), tiny_run, np.random.default_rng(17))
    assert [_non_timing(r) for r in a] == [_non_timing(r) for r in b]


def test_fabolas_run_uses_fraction_semantics(tiny_run):
    trace = run_bo(_strategy(StrategyKind.FABOLAS), make_branin(), tiny_run, np.random.default_rng(5))
    for r in trace:
        assert r.task == pytest.approx(2.0 ** (7 * (r.task_normalized - 1)))
    assert _strategy(StrategyKind.FABOLAS).task_semantics == TaskSemantics.DATASET_FRACTION


def test_model_failure_aborts_with_partial_trace(tiny_run, monkeypatch):
    def broken(*args, **kwargs):
        raise GPFitError("forced failure")

    monkeypatch.setattr(engine, 'fit_state_ensembles', broken)
    with pytest.raises(RunAbortedError) as exc:
        run_bo(_strategy(StrategyKind.IBO), make_branin(), tiny_run, np.random.default_rng(0))
    assert len(exc.value.trace) == tiny_run.n_init
    assert exc.value.details['cause'] == GPFitError.code


def test_dataset_run_repeats_from_seed(tiny_run):
    problem = build_problem('synthetic-2class', trainer=TrainerDefaults(epochs=1))
    cfg = replace(tiny_run, n_bo=3)
    a = run_bo(_strategy(StrategyKind.IBO), problem, cfg, np.random.default_rng(11))
    b = run_bo(_strategy(StrategyKind.IBO), problem, cfg, np.random.default_rng(11))
    assert [_non_timing(r) for r in a] == [_non_timing(r) for r in b]
    assert all(r.model_cost > 0 for r in a)
    assert [r.task for r in a] == [r.task for r in b]


def test_cost_model_sees_work_units_not_seconds(rng):
    problem = build_problem('synthetic-2class', trainer=TrainerDefaults(epochs=1))
    ev = evaluate_proposal(_strategy(StrategyKind.IBO), problem, Proposal(ConfigPoint((0.5, 0.3, 0.4, 0.2)), 1.0), rng)
    assert ev.observation.cost == ev.result.model_cost
    assert ev.result.gp_cost == ev.result.model_cost
