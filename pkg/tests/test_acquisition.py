import math

import numpy as np
import pytest

from src.ibo import acquisition
from src.ibo.acquisition import (PminEstimate, RepresenterSet, acquisition_ibo, candidate_grid, entropy,
                                 estimate_pmin, expected_entropy_reduction, expected_improvement,
                                 fantasy_quantiles, maximize_acquisition, normalize_by_cost,
                                 predicted_log_cost, select_representers)
from src.ibo.errors import AcquisitionError
from src.ibo.kernels import KernelKind
from src.ibo.models import AcquisitionConfig, ConfigPoint, Dimension, SearchSpace

from .conftest import make_ensemble


def _reps(*xs):
    return RepresenterSet(tuple(ConfigPoint((x,)) for x in xs))


def _space(dim=1):
    return SearchSpace([Dimension(f'x{i}', 0.0, 1.0) for i in range(dim)])


def test_entropy_values():
    assert entropy([0.25] * 4) == pytest.approx(math.log(4))
    assert entropy([1.0, 0.0]) == 0.0
    assert entropy([0.75, 0.25]) == pytest.approx(0.56234, abs=1e-5)
    assert entropy(PminEstimate(np.array([0.5, 0.5]))) == pytest.approx(math.log(2))


def test_pmin_single_representer(rng):
    ens = make_ensemble([0.2, 0.8], [0.0, 1.0])
    p = estimate_pmin(ens, _reps(0.5), 100, rng)
    assert p.probs.tolist() == [1.0]


def test_pmin_symmetric_representers(rng):
    ens = make_ensemble([0.5], [0.0], lengthscale=0.3)
    p = estimate_pmin(ens, _reps(0.3, 0.7), 10000, rng)
    assert p.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert p.probs == pytest.approx([0.5, 0.5], abs=0.05)


def test_pmin_dominated_representer(rng):
    ens = make_ensemble([0.2, 0.8], [0.0, 10.0], lengthscale=0.1, noise=1e-4)
    p = estimate_pmin(ens, _reps(0.2, 0.8), 10000, rng)
    assert p.probs[1] < 0.01
    assert p.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_pmin_rejects_bad_sample_count(rng):
    ens = make_ensemble([0.5], [0.0])
    with pytest.raises(AcquisitionError):
        estimate_pmin(ens, _reps(0.5), 0, rng)


def test_select_representers(rng):
    ens = make_ensemble([0.1, 0.9], [1.0, -1.0])
    cfg = AcquisitionConfig(n_representers=1, n_candidates=50)
    reps = select_representers(ens, _space(), cfg, rng)
    assert reps.count == 1
    assert 0.0 <= reps.points[0].coords[0] <= 1.0

    cfg = AcquisitionConfig(n_representers=20, n_candidates=50)
    a = select_representers(ens, _space(), cfg, np.random.default_rng(3))
    b = select_representers(ens, _space(), cfg, np.random.default_rng(3))
    assert a == b


def test_select_representers_empty_space(rng):
    ens = make_ensemble([0.5], [0.0])
    with pytest.raises(AcquisitionError):
        select_representers(ens, SearchSpace([]), AcquisitionConfig(), rng)


def test_fantasy_quantiles():
    q = fantasy_quantiles(3)
    assert q[1] == pytest.approx(0.0)
    assert q[0] == pytest.approx(-q[2])
    with pytest.raises(AcquisitionError):
        fantasy_quantiles(0)


def test_reduction_at_noiseless_observation_is_zero(rng):
    ens = make_ensemble([0.2, 0.5, 0.8], [0.3, -0.4, 0.1], lengthscale=0.2, noise=1e-8)
    reps = _reps(0.3, 0.45, 0.6, 0.7)
    cfg = AcquisitionConfig(n_mc=500, n_fantasy=5)
    value = expected_entropy_reduction(ens, (ConfigPoint((0.5,)), 1.0), reps, cfg, rng)
    assert abs(value) <= 1e-2


def test_reduction_rejects_out_of_range_candidate(rng):
    ens = make_ensemble([0.5], [0.0])
    with pytest.raises(AcquisitionError):
        expected_entropy_reduction(ens, (np.array([0.5]), 1.5), _reps(0.5), AcquisitionConfig(), rng)


def test_informative_candidate_beats_remote_candidate():
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        ens = make_ensemble([0.35, 0.65], [0.0, 0.1], lengthscale=0.05, noise=1e-4)
        reps = _reps(0.45, 0.5, 0.55)
        cfg = AcquisitionConfig(n_mc=300, n_fantasy=5)
        z = rng.standard_normal((cfg.n_mc, reps.count))
        near = expected_entropy_reduction(ens, (ConfigPoint((0.5,)), 1.0), reps, cfg, rng, z=z)
        far = expected_entropy_reduction(ens, (ConfigPoint((0.0,)), 1.0), reps, cfg, rng, z=z)
        wins += near > far
    assert wins >= 18


def test_remote_candidate_scores_zero_with_shared_draws(rng):
    ens = make_ensemble([0.5], [0.0], lengthscale=0.02)
    reps = _reps(0.45, 0.5, 0.55)
    cfg = AcquisitionConfig(n_mc=200, n_fantasy=3)
    value = expected_entropy_reduction(ens, (ConfigPoint((1.0,)), 1.0), reps, cfg, rng)
    assert value == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize('reduction, log_cost, expected', [
    (0.5, 0.0, 0.5),
    (0.5, math.log(2.0), 0.25),
    (0.0, 3.0, 0.0),
])
def test_normalize_by_cost(reduction, log_cost, expected):
    assert normalize_by_cost(reduction, log_cost) == pytest.approx(expected)


def test_acquisition_without_cost_model_equals_reduction(rng):
    ens = make_ensemble([0.2, 0.8], [0.0, 1.0])
    reps = _reps(0.3, 0.6)
    cfg = AcquisitionConfig(n_mc=100, n_fantasy=3)
    z = rng.standard_normal((cfg.n_mc, reps.count))
    cand = (ConfigPoint((0.4,)), 1.0)
    plain = expected_entropy_reduction(ens, cand, reps, cfg, rng, z=z)
    assert acquisition_ibo(cand, ens, None, reps, cfg, rng, z=z) == pytest.approx(plain)

    cost = make_ensemble([0.2, 0.8], [0.0, 0.0], kind=KernelKind.COST)
    # cost GP fitted to ln(1) = 0 everywhere predicts unit cost
    assert acquisition_ibo(cand, ens, cost, reps, cfg, rng, z=z) == pytest.approx(plain)


def test_maximize_scores_random_and_representer_configs():
    ens = make_ensemble([0.2, 0.8], [0.0, 1.0])
    reps = _reps(0.3, 0.6)
    cfg = AcquisitionConfig(n_mc=20, n_fantasy=2, n_candidates=1, task_grid=[0.25])
    x, t = maximize_acquisition(ens, None, _space(), cfg, np.random.default_rng(9), reps=reps)

    replay = np.random.default_rng(9)
    replay.standard_normal((cfg.n_mc, reps.count))
    expected = replay.uniform(0.0, 1.0, size=(1, 1))[0, 0]
    assert t == 0.25
    assert min(abs(x.coords[0] - c) for c in (expected, 0.3, 0.6)) < 1e-12


def test_maximize_is_deterministic_and_in_bounds():
    ens = make_ensemble([(0.2, 0.2), (0.8, 0.5)], [0.0, 1.0])
    cfg = AcquisitionConfig(n_representers=5, n_mc=30, n_fantasy=2, n_candidates=15, task_grid=[0.0, 0.5, 1.0])
    a = maximize_acquisition(ens, None, _space(2), cfg, np.random.default_rng(1))
    b = maximize_acquisition(ens, None, _space(2), cfg, np.random.default_rng(1))
    assert a == b
    assert a[1] in (0.0, 0.5, 1.0)
    assert all(0.0 <= c <= 1.0 for c in a[0].coords)


def test_representer_set_must_be_nonempty():
    with pytest.raises(AcquisitionError):
        RepresenterSet(())


def test_expected_improvement_prefers_low_mean():
    ens = make_ensemble([0.1, 0.9], [1.0, -1.0], lengthscale=0.3, noise=1e-6)
    ei = expected_improvement(ens, [[0.1], [0.9], [0.5]], best=-1.0)
    assert np.all(ei >= 0.0)
    # observed noiselessly at the incumbent value: nothing left to gain
    assert ei[1] == pytest.approx(0.0, abs=1e-3)
    assert ei[2] > ei[0]


def test_predicted_log_cost_matches_observed_costs():
    xs = [0.2, 0.8]
    cost = make_ensemble(xs, [0.0, 0.0], ts=[0.5, 0.5], kind=KernelKind.COST, noise=1e-8,
                         costs=[math.e, math.e ** 3])
    pred = predicted_log_cost(cost, [[0.2], [0.8]], [0.5, 0.5])
    assert pred == pytest.approx([1.0, 3.0], abs=1e-4)


def test_flat_improvement_selects_uniformly(rng, monkeypatch):
    monkeypatch.setattr(acquisition, 'expected_improvement', lambda ens, X, best: np.zeros(len(X)))
    ens = make_ensemble([0.5], [0.0])
    cfg = AcquisitionConfig(n_representers=2000, n_candidates=2000)
    reps = select_representers(ens, _space(), cfg, rng)
    counts, _ = np.histogram([p.coords[0] for p in reps.points], bins=5, range=(0.0, 1.0))
    assert np.all(np.abs(counts - 400) < 100)


def test_representers_concentrate_near_minimum(rng):
    xs = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    ens = make_ensemble(xs, [10 * (x - 0.7) ** 2 for x in xs], noise=1e-6)
    cfg = AcquisitionConfig(n_representers=400, n_candidates=400)
    reps = select_representers(ens, _space(), cfg, rng)
    distances = [abs(p.coords[0] - 0.7) for p in reps.points]
    # uniform draws would give a median distance of 0.25
    assert np.median(distances) < 0.1


def test_candidate_grid_appends_extra_rows(rng):
    X, T = candidate_grid(2, [0.0, 1.0], 1, rng, extra=np.array([[0.3], [0.6]]))
    assert X.shape == (8, 1)
    assert T.tolist() == [0.0, 1.0] * 4
    assert X[4:, 0].tolist() == [0.3, 0.3, 0.6, 0.6]


def _two_task_problem(y_scale=1.0, cost_scale=1.0):
    xs = [0.2, 0.5, 0.8]
    ens_f = make_ensemble(xs, [y_scale * v for v in (0.3, -0.4, 0.9)], ts=[1.0, 0.5, 1.0],
                          lengthscale=0.3, noise=1e-4, standardize=True)
    ens_c = make_ensemble(xs * 2, [0.0] * 6, ts=[0.0] * 3 + [1.0] * 3, kind=KernelKind.COST,
                          costs=[cost_scale] * 3 + [cost_scale * 5.0] * 3, standardize=True)
    return ens_f, ens_c


def test_maximize_ignores_positive_rescaling():
    cfg = AcquisitionConfig(n_representers=8, n_mc=50, n_fantasy=3, n_candidates=20, task_grid=[0.0, 0.5, 1.0])
    base = maximize_acquisition(*_two_task_problem(), _space(), cfg, np.random.default_rng(4))
    scaled = maximize_acquisition(*_two_task_problem(y_scale=7.5, cost_scale=30.0), _space(), cfg,
                                  np.random.default_rng(4))
    assert scaled[1] == base[1]
    assert scaled[0].coords == pytest.approx(base[0].coords)


def test_maximize_leaves_ensembles_untouched():
    ens_f, ens_c = _two_task_problem()
    before = [(m.X.copy(), m.T.copy(), m.targets.copy(), m.chol.copy(), m.alpha.copy())
              for m in ens_f.members + ens_c.members]
    cfg = AcquisitionConfig(n_representers=6, n_mc=30, n_fantasy=2, n_candidates=10, task_grid=[0.0, 1.0])
    maximize_acquisition(ens_f, ens_c, _space(), cfg, np.random.default_rng(8))
    after = [(m.X, m.T, m.targets, m.chol, m.alpha) for m in ens_f.members + ens_c.members]
    for old, new in zip(before, after):
        assert all(np.array_equal(a, b) for a, b in zip(old, new))


def test_expensive_target_task_sends_search_to_cheapest_task():
    xs = [0.2, 0.8]
    ens_f = make_ensemble(xs, [0.0, 1.0], ts=[1.0, 1.0], lengthscale=0.3, noise=1e-4)
    ens_c = make_ensemble(xs * 2, [0.0] * 4, ts=[0.0, 0.0, 1.0, 1.0], kind=KernelKind.COST,
                          costs=[1.0, 1.0, 100.0, 100.0], standardize=True)
    cfg = AcquisitionConfig(n_representers=10, n_mc=100, n_fantasy=3, n_candidates=20, task_grid=[0.0, 0.5, 1.0])
    _, t = maximize_acquisition(ens_f, ens_c, _space(), cfg, np.random.default_rng(0))
    assert t == 0.0
