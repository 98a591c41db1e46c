"""
Outer BO loop: initialization, ensemble refits, proposals, evaluation and
trace recording for IBO and its baselines.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .acquisition import maximize_acquisition
from .design import latin_hypercube
from .errors import (AcquisitionError, ConfigError, GPFitError, IBOError, McmcError,
                     RunAbortedError)
from .gp import GPEnsemble
from .kernels import KernelKind
from .logger import log_bo_iteration, log_processing_step
from .mcmc import fit_ensemble
from .models.config_model import InitScheme, RunConfig, Strategy, StrategyKind
from .models.observation import (FRACTION_OCTAVES, MAX_PRESAMPLE_FACTOR, TARGET_TASK,
                                 EvalResult, Observation, TaskSemantics, denormalize_task,
                                 presample_factor_from_task)
from .models.search_space import ConfigPoint, as_matrix
from .models.trace_model import TraceRecord
from .performance import ResourceMonitor, performance_context
from .problems import Problem, retrain_incumbent

logger = logging.getLogger(__name__)

LADDER_TASKS = tuple(k / FRACTION_OCTAVES for k in range(4))  # s = 1/128, 1/64, 1/32, 1/16


@dataclass(frozen=True)
class Proposal:
    """다음 평가 지점 (x, t) 및 별도로 뽑은 s_B"""

    x: ConfigPoint
    task: float
    presample_factor: Optional[float] = None


@dataclass
class Evaluated:
    """평가된 제안: GP용 관측과 기록용 결과"""

    proposal: Proposal
    observation: Observation
    result: EvalResult
    task_value: float
    presample_factor: Optional[float]


@dataclass
class BOState:
    """제안에 필요한 현재 상태"""

    history: List[Evaluated]
    ensemble_f: Optional[GPEnsemble] = None
    ensemble_c: Optional[GPEnsemble] = None

    @property
    def observations(self) -> List[Observation]:
        return [e.observation for e in self.history]


def _split(rng: np.random.Generator, n: int) -> List[np.random.Generator]:
    return [np.random.default_rng(int(s)) for s in rng.integers(0, 2 ** 32 - 1, size=n)]


def model_task(strategy: Strategy, t: float) -> float:
    """GP에 넣는 과제 값 (과제를 모델링하지 않는 전략은 항상 t=1)"""
    return float(t) if strategy.models_task else TARGET_TASK


def evaluate_proposal(strategy: Strategy, problem: Problem, proposal: Proposal,
                      rng: np.random.Generator) -> Evaluated:
    """전략별 과제 의미에 따라 문제를 평가"""
    semantics = strategy.task_semantics
    s_b = proposal.presample_factor
    if strategy.kind == StrategyKind.ES_IS:
        # x is searched at the target task; only the inner trainer sees s_B
        s_b = presample_factor_from_task(proposal.task) if s_b is None else s_b
        fidelity = TARGET_TASK
    else:
        fidelity = proposal.task
    if semantics == TaskSemantics.PRESAMPLE_FACTOR and s_b is None:
        s_b = presample_factor_from_task(fidelity)

    result = problem.evaluate(proposal.x, fidelity, rng, semantics=semantics,
                              presample_factor=s_b,
                              importance_sampling=strategy.uses_importance_sampling)
    obs = Observation(proposal.x, model_task(strategy, proposal.task), result.y, result.gp_cost)
    return Evaluated(proposal, obs, result, denormalize_task(proposal.task, semantics), s_b)


def initial_proposals(strategy: Strategy, problem: Problem, cfg: RunConfig,
                      rng: np.random.Generator) -> List[Proposal]:
    if cfg.n_init < 2:
        raise ConfigError(f"n_init는 2 이상이어야 합니다: {cfg.n_init}", field='n_init')
    design = latin_hypercube(problem.space, cfg.n_init, rng)
    draws_s_b = strategy.kind == StrategyKind.FABOLAS_IS
    s_b = MAX_PRESAMPLE_FACTOR if draws_s_b else None

    if cfg.init_scheme == InitScheme.MAX_TASK:
        return [Proposal(x, TARGET_TASK, s_b) for x in design]
    if cfg.init_scheme == InitScheme.LADDER:
        if strategy.task_semantics != TaskSemantics.DATASET_FRACTION:
            raise ConfigError("ladder 초기화는 Fabolas 계열 전략에서만 사용할 수 있습니다",
                              field='init_scheme', strategy=strategy.name)
        return [Proposal(x, t, s_b) for x in design for t in LADDER_TASKS]
    grid = strategy.task_grid()
    return [Proposal(x, float(grid[int(rng.integers(len(grid)))]), s_b) for x in design]


def initialize(strategy: Strategy, problem: Problem, cfg: RunConfig,
               rng: np.random.Generator) -> List[Observation]:
    """초기 설계를 평가해 관측 목록 반환"""
    proposal_rng, eval_rng = _split(rng, 2)
    return [evaluate_proposal(strategy, problem, p, eval_rng).observation
            for p in initial_proposals(strategy, problem, cfg, proposal_rng)]


def fit_state_ensembles(strategy: Strategy, observations: Sequence[Observation], cfg: RunConfig,
                        rng: np.random.Generator, chains: dict) -> Tuple[GPEnsemble, Optional[GPEnsemble]]:
    """목적 GP (및 비용 GP) 앙상블을 MCMC로 적합; ``chains``에 체인 상태 보관"""
    ensemble_f, chains['f'] = fit_ensemble(observations, KernelKind.OBJECTIVE, cfg.mcmc, rng,
                                           initial=chains.get('f'))
    ensemble_c = None
    if strategy.models_cost:
        ensemble_c, chains['c'] = fit_ensemble(observations, KernelKind.COST, cfg.mcmc, rng,
                                               initial=chains.get('c'))
    return ensemble_f, ensemble_c


def propose(strategy: Strategy, state: BOState, problem: Problem, cfg: RunConfig,
            rng: np.random.Generator) -> Proposal:
    """전략별 다음 (x, t) 제안"""
    kind = strategy.kind
    if kind == StrategyKind.RANDOM:
        return Proposal(ConfigPoint(tuple(problem.space.sample_uniform(1, rng)[0])), TARGET_TASK)
    if state.ensemble_f is None:
        raise AcquisitionError("목적 GP 앙상블이 적합되지 않았습니다")

    acq = replace(cfg.acquisition, task_grid=strategy.task_grid())
    ensemble_c = state.ensemble_c if strategy.models_cost else None
    x, t = maximize_acquisition(state.ensemble_f, ensemble_c, problem.space, acq, rng)

    if kind == StrategyKind.ES_IS:
        grid = strategy.presample_grid()
        return Proposal(x, float(grid[int(rng.integers(len(grid)))]))
    if kind == StrategyKind.FABOLAS_IS:
        factors = strategy.presample_factors
        return Proposal(x, t, float(factors[int(rng.integers(len(factors)))]))
    if kind == StrategyKind.ES:
        return Proposal(x, TARGET_TASK)
    return Proposal(x, t)


def incumbent(ensemble_f: GPEnsemble, history: Sequence[Observation],
              rng: Optional[np.random.Generator] = None) -> Tuple[ConfigPoint, float]:
    """관측된 설정 중 목표 과제 예측 평균이 가장 작은 것 (동률이면 먼저 관측된 것)"""
    if not history:
        raise GPFitError("관측 이력이 비어 있습니다")
    configs: List[ConfigPoint] = []
    for obs in history:
        if obs.x not in configs:
            configs.append(obs.x)
    X = as_matrix(configs)
    means = ensemble_f.mean(X, np.full(len(configs), TARGET_TASK))
    best = int(np.argmin(means))
    return configs[best], float(means[best])


def observed_incumbent(history: Sequence[Observation]) -> Tuple[ConfigPoint, float]:
    """GP 적합 전: 지금까지 본 가장 높은 과제에서의 최선 관측"""
    top = max(o.t for o in history)
    best = min((o for o in history if o.t == top), key=lambda o: o.y)
    return best.x, best.y


def _record(strategy: Strategy, problem: Problem, seed: int, it: int, phase: str,
            ev: Evaluated, cum_cost: float, inc: Tuple[ConfigPoint, float],
            wall: float) -> TraceRecord:
    inc_x, inc_pred = inc
    report = (ev.result.diagnostics or {}).get('report') or {}
    return TraceRecord(
        iter=it,
        phase=phase,
        x=problem.space.denormalize(ev.proposal.x),
        task=float(ev.task_value),
        y=float(ev.result.y),
        cost=float(ev.result.cost),
        cum_cost=float(cum_cost),
        model_cost=ev.result.model_cost,
        incumbent_x=problem.space.denormalize(inc_x),
        incumbent_pred=float(inc_pred),
        strategy=strategy.name,
        seed=seed,
        task_normalized=float(ev.proposal.task),
        presample_factor=None if ev.presample_factor is None else float(ev.presample_factor),
        incumbent_true=problem.true_value(inc_x),
        is_step_fraction=report.get('is_step_fraction'),
        wall_seconds=float(wall),
        extra={'aborted': True} if (ev.result.diagnostics or {}).get('aborted') else {},
    )


def run_bo(strategy: Strategy, problem: Problem, cfg: RunConfig, rng: np.random.Generator,
           on_record: Optional[Callable[[TraceRecord], None]] = None,
           monitor: Optional[ResourceMonitor] = None) -> List[TraceRecord]:
    """Initialize, then n_bo rounds of fit / propose / evaluate / record.

    ``on_record`` is called with every record as soon as it exists, so a
    trace file stays readable while the run is in progress.
    """
    monitor = monitor or ResourceMonitor()
    init_rng, mcmc_rng, acq_rng, eval_rng, retrain_rng = _split(rng, 5)
    trace: List[TraceRecord] = []
    history: List[Evaluated] = []
    cum_cost = 0.0
    seed = int(cfg.seed)

    proposals = initial_proposals(strategy, problem, cfg, init_rng)
    last_index = len(proposals) + cfg.n_bo - 1
    retrain = cfg.final_retrain and not problem.is_synthetic

    def emit(record: TraceRecord, inc_x: ConfigPoint):
        if retrain and record.iter == last_index:
            log_processing_step(logger, 3, "최종 incumbent 재학습")
            record.incumbent_true = retrain_incumbent(problem, inc_x, retrain_rng)
        trace.append(record)
        if on_record is not None:
            on_record(record)
        log_bo_iteration(logger, strategy.name, record.iter, record.y, record.cost,
                         '성공' if not record.extra.get('aborted') else '학습 중단',
                         details=f"incumbent={record.incumbent_value:.6g}")

    log_processing_step(logger, 1, f"초기화: {strategy.name} / {problem.name} "
                                   f"({cfg.init_scheme.value}, n_init={cfg.n_init})")
    for p in proposals:
        start = time.perf_counter()
        ev = evaluate_proposal(strategy, problem, p, eval_rng)
        history.append(ev)
        cum_cost += ev.result.cost
        inc = observed_incumbent([e.observation for e in history])
        emit(_record(strategy, problem, seed, len(trace), 'init', ev, cum_cost, inc,
                     time.perf_counter() - start), inc[0])

    log_processing_step(logger, 2, f"BO 반복 {cfg.n_bo}회 시작")
    chains: dict = {}
    state = BOState(history)
    for round_no in range(cfg.n_bo):
        start = time.perf_counter()
        with performance_context(f"BO 반복 {round_no + 1}", monitor, stage='bo_round'):
            try:
                state.ensemble_f, state.ensemble_c = fit_state_ensembles(
                    strategy, state.observations, cfg, mcmc_rng, chains)
                proposal = propose(strategy, state, problem, cfg, acq_rng)
            except (GPFitError, McmcError, AcquisitionError) as e:
                log_bo_iteration(logger, strategy.name, len(trace), float('nan'), 0.0, '중단',
                                 details=e.message)
                raise RunAbortedError(f"BO 반복 {round_no + 1}에서 중단: {e.message}",
                                      trace=trace, cause=e.code, round=round_no + 1) from e

            ev = evaluate_proposal(strategy, problem, proposal, eval_rng)
            history.append(ev)
            cum_cost += ev.result.cost
            try:
                inc = incumbent(state.ensemble_f.condition(state.observations), state.observations)
            except IBOError as e:
                raise RunAbortedError(f"incumbent 계산 실패: {e.message}", trace=trace, cause=e.code) from e
        emit(_record(strategy, problem, seed, len(trace), 'bo', ev, cum_cost, inc,
                     time.perf_counter() - start), inc[0])

    summary = monitor.get_performance_summary()
    logger.debug(f"실행 자원 요약: {summary}")
    return trace
