"""
Experiment runner: every (strategy, seed) pair of an ExperimentConfig, each
streamed to its own trace file.
"""
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from .config_parser import build_strategy, strategy_run_config
from .engine import run_bo
from .errors import RunAbortedError
from .logger import log_processing_step
from .models.config_model import BudgetMode, ExperimentConfig
from .models.trace_model import SCHEMA_VERSION
from .performance import ResourceMonitor
from .problems import SYNTHETIC_PROBLEMS, Problem, build_problem
from .trace_store import append_trace_record, reset_trace, trace_path, write_run_meta

logger = logging.getLogger(__name__)


def problem_for(cfg: ExperimentConfig, strategy_name: str, seed: int) -> Problem:
    run = strategy_run_config(cfg, strategy_name, seed)
    options: Dict[str, Any] = dict(cfg.problem_options)
    if cfg.problem in SYNTHETIC_PROBLEMS:
        return build_problem(cfg.problem, **options)
    options.setdefault('trainer', run.trainer)
    options.setdefault('holdout_test', run.final_retrain)
    return build_problem(cfg.problem, **options)


def run_experiment(cfg: ExperimentConfig, strategies: Optional[List[str]] = None,
                   seeds: Optional[List[int]] = None, out_dir: Optional[str] = None,
                   budget_mode: Optional[BudgetMode] = None,
                   monitor: Optional[ResourceMonitor] = None) -> Dict[str, Any]:
    """설정의 모든 (전략, 시드) 실행 후 결과 요약 반환"""
    strategies = strategies or list(cfg.strategies)
    seeds = list(cfg.seeds) if seeds is None else seeds
    out_dir = out_dir or cfg.output_dir
    budget_mode = budget_mode or cfg.budget_mode
    monitor = monitor or ResourceMonitor()

    write_run_meta(out_dir, {
        'schema_version': SCHEMA_VERSION,
        'problem': cfg.problem,
        'strategies': strategies,
        'seeds': seeds,
        'budget_mode': budget_mode.value,
        'config': cfg.to_dict(),
    })

    results: Dict[str, Any] = {'runs': [], 'aborted': []}
    for strategy_name in strategies:
        for seed in seeds:
            run = strategy_run_config(cfg, strategy_name, seed)
            strategy = build_strategy(strategy_name, run)
            problem = problem_for(cfg, strategy_name, seed)
            path = trace_path(out_dir, strategy_name, seed)
            reset_trace(path)
            log_processing_step(logger, f"{strategy_name}/seed {seed}", f"실행 시작 -> {path}")

            try:
                trace = run_bo(strategy, problem, run, np.random.default_rng(seed),
                               on_record=lambda r, p=path: append_trace_record(p, r),
                               monitor=monitor)
            except RunAbortedError as e:
                logger.error(f"{strategy_name}/seed {seed} 중단: {e.message} "
                             f"(기록된 레코드 {len(e.trace)}개)")
                results['aborted'].append({'strategy': strategy_name, 'seed': seed,
                                           'error': e.to_dict(), 'records': len(e.trace)})
                continue

            final = trace[-1] if trace else None
            results['runs'].append({
                'strategy': strategy_name,
                'seed': seed,
                'path': path,
                'records': len(trace),
                'final_incumbent': final.incumbent_value if final else None,
                'cum_cost': final.cum_cost if final else 0.0,
            })
    results['performance'] = monitor.get_performance_summary()
    return results
