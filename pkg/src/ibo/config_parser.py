"""
Experiment configuration: JSON text <-> ExperimentConfig.

Keys starting with ``_`` are comments at every nesting level.
"""
import logging
import os
from dataclasses import replace
from typing import Any, Dict, List, Optional

import ujson

from .errors import ConfigError
from .models.config_model import (AcquisitionConfig, BudgetMode, ExperimentConfig,
                                  HyperPriors, InitScheme, McmcConfig, PriorSpec,
                                  RunConfig, Strategy, StrategyKind, TrainerDefaults)
from .models.observation import MAX_PRESAMPLE_FACTOR, MIN_PRESAMPLE_FACTOR

logger = logging.getLogger(__name__)

VALID_STRATEGIES = [k.value for k in StrategyKind]
_TOP_KEYS = {'problem', 'strategy', 'strategies', 'seed', 'seeds', 'output_dir',
             'budget_mode', 'run', 'overrides', 'problem_options'}
_RUN_KEYS = {'n_init', 'n_bo', 'init_scheme', 'presample_factors', 'final_retrain',
             'mcmc', 'acquisition', 'trainer'}


def _strip_comments(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip_comments(v) for k, v in value.items() if not str(k).startswith('_')}
    if isinstance(value, list):
        return [_strip_comments(v) for v in value]
    return value


def _enum(enum_cls, value, field: str):
    try:
        return enum_cls(value)
    except ValueError:
        valid = [e.value for e in enum_cls]
        raise ConfigError(f"'{field}' 값이 잘못되었습니다: {value!r} (가능: {', '.join(valid)})",
                          field=field, valid=valid)


def _int(data: Dict[str, Any], key: str, default: int, field: str, minimum: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"'{field}'는 {minimum} 이상의 정수여야 합니다: {value!r}", field=field)
    return value


def _check_keys(data: Dict[str, Any], allowed, where: str):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}에 알 수 없는 키: {', '.join(unknown)}", field=f"{where}.{unknown[0]}")


def _parse_priors(data: Dict[str, Any], base: HyperPriors) -> HyperPriors:
    _check_keys(data, {'lengthscale', 'amplitude', 'noise'}, 'mcmc.priors')
    values = {}
    for name in ('lengthscale', 'amplitude', 'noise'):
        if name not in data:
            values[name] = getattr(base, name)
            continue
        spec = data[name]
        try:
            values[name] = PriorSpec(float(spec['mean']), float(spec['std']),
                                     spec.get('lower'), spec.get('upper'))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"사전분포 '{name}'에는 mean/std가 필요합니다", field=f"mcmc.priors.{name}") from e
    return HyperPriors(**values)


def _parse_mcmc(data: Dict[str, Any], base: McmcConfig) -> McmcConfig:
    _check_keys(data, {'n_samples', 'burn_in', 'thin', 'warm_burn_in', 'priors'}, 'mcmc')
    return McmcConfig(
        n_samples=_int(data, 'n_samples', base.n_samples, 'mcmc.n_samples', 1),
        burn_in=_int(data, 'burn_in', base.burn_in, 'mcmc.burn_in', 0),
        thin=_int(data, 'thin', base.thin, 'mcmc.thin', 1),
        warm_burn_in=_int(data, 'warm_burn_in', base.warm_burn_in, 'mcmc.warm_burn_in', 0),
        priors=_parse_priors(data['priors'], base.priors) if 'priors' in data else base.priors,
    )


def _parse_acquisition(data: Dict[str, Any], base: AcquisitionConfig) -> AcquisitionConfig:
    _check_keys(data, {'n_representers', 'n_mc', 'n_fantasy', 'n_candidates', 'task_grid'}, 'acquisition')
    grid = data.get('task_grid', base.task_grid)
    if not isinstance(grid, list) or not grid or any(not (0.0 <= float(t) <= 1.0) for t in grid):
        raise ConfigError("acquisition.task_grid는 [0,1] 값의 비어 있지 않은 목록이어야 합니다",
                          field='acquisition.task_grid')
    return AcquisitionConfig(
        n_representers=_int(data, 'n_representers', base.n_representers, 'acquisition.n_representers', 1),
        n_mc=_int(data, 'n_mc', base.n_mc, 'acquisition.n_mc', 1),
        n_fantasy=_int(data, 'n_fantasy', base.n_fantasy, 'acquisition.n_fantasy', 1),
        n_candidates=_int(data, 'n_candidates', base.n_candidates, 'acquisition.n_candidates', 1),
        task_grid=[float(t) for t in grid],
    )


def _parse_trainer(data: Dict[str, Any], base: TrainerDefaults) -> TrainerDefaults:
    _check_keys(data, {'epochs', 'lr_decay', 'decay_epoch'}, 'trainer')
    lr_decay = data.get('lr_decay', base.lr_decay)
    if not isinstance(lr_decay, (int, float)) or lr_decay <= 0:
        raise ConfigError(f"trainer.lr_decay는 양수여야 합니다: {lr_decay!r}", field='trainer.lr_decay')
    decay_epoch = data.get('decay_epoch', base.decay_epoch)
    if decay_epoch is not None:
        decay_epoch = _int(data, 'decay_epoch', 0, 'trainer.decay_epoch', 0)
    return TrainerDefaults(epochs=_int(data, 'epochs', base.epochs, 'trainer.epochs', 1),
                           lr_decay=float(lr_decay), decay_epoch=decay_epoch)


def parse_run(data: Dict[str, Any], base: Optional[RunConfig] = None) -> RunConfig:
    """RunConfig 섹션 파싱 (``base`` 위에 덮어쓰기)"""
    base = base or RunConfig()
    if not isinstance(data, dict):
        raise ConfigError("run 섹션은 객체여야 합니다", field='run')
    _check_keys(data, _RUN_KEYS, 'run')

    factors = data.get('presample_factors', base.presample_factors)
    if (not isinstance(factors, list) or not factors
            or any(not (MIN_PRESAMPLE_FACTOR <= float(s) <= MAX_PRESAMPLE_FACTOR) for s in factors)):
        raise ConfigError("presample_factors는 [2, 6] 범위 값의 목록이어야 합니다", field='presample_factors')

    return RunConfig(
        n_init=_int(data, 'n_init', base.n_init, 'n_init', 2),
        n_bo=_int(data, 'n_bo', base.n_bo, 'n_bo', 0),
        seed=base.seed,
        init_scheme=_enum(InitScheme, data.get('init_scheme', base.init_scheme.value), 'init_scheme'),
        acquisition=_parse_acquisition(data.get('acquisition', {}), base.acquisition),
        mcmc=_parse_mcmc(data.get('mcmc', {}), base.mcmc),
        trainer=_parse_trainer(data.get('trainer', {}), base.trainer),
        presample_factors=[int(s) if float(s).is_integer() else float(s) for s in factors],
        final_retrain=bool(data.get('final_retrain', base.final_retrain)),
    )


def _parse_strategies(data: Dict[str, Any]) -> List[str]:
    raw = data.get('strategies')
    if raw is None and 'strategy' in data:
        raw = [data['strategy']]
    if not raw:
        raise ConfigError("'strategies' 필드가 필요합니다", field='strategies', valid=VALID_STRATEGIES)
    if isinstance(raw, str):
        raw = [raw]
    for name in raw:
        if name not in VALID_STRATEGIES:
            raise ConfigError(f"알 수 없는 전략입니다: {name!r} (가능: {', '.join(VALID_STRATEGIES)})",
                              field='strategies', valid=VALID_STRATEGIES)
    return list(raw)


def _parse_seeds(data: Dict[str, Any]) -> List[int]:
    raw = data.get('seeds')
    if raw is None:
        raw = [data['seed']] if 'seed' in data else [0]
    if not isinstance(raw, list) or not raw or any(isinstance(s, bool) or not isinstance(s, int) for s in raw):
        raise ConfigError("'seeds'는 비어 있지 않은 정수 목록이어야 합니다", field='seeds')
    return list(raw)


def config_from_dict(data: Dict[str, Any]) -> ExperimentConfig:
    data = _strip_comments(data)
    if not isinstance(data, dict):
        raise ConfigError("설정 문서의 최상위는 객체여야 합니다", field='')
    _check_keys(data, _TOP_KEYS, 'config')

    problem = data.get('problem')
    if not problem or not isinstance(problem, str):
        raise ConfigError("'problem' 필드가 필요합니다", field='problem')

    strategies = _parse_strategies(data)
    run = parse_run(data.get('run', {}))

    overrides = data.get('overrides', {})
    if not isinstance(overrides, dict):
        raise ConfigError("overrides는 전략 이름별 객체여야 합니다", field='overrides')
    for name, section in overrides.items():
        if name not in VALID_STRATEGIES:
            raise ConfigError(f"overrides에 알 수 없는 전략: {name!r}", field='overrides', valid=VALID_STRATEGIES)
        parse_run(section, run)

    output_dir = data.get('output_dir', 'results')
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir는 경로 문자열이어야 합니다", field='output_dir')

    return ExperimentConfig(
        problem=problem,
        strategies=strategies,
        seeds=_parse_seeds(data),
        output_dir=output_dir,
        budget_mode=_enum(BudgetMode, data.get('budget_mode', 'iterations'), 'budget_mode'),
        run=run,
        overrides={k: dict(v) for k, v in overrides.items()},
        problem_options=dict(data.get('problem_options', {})),
    )


def parse_config(text: str) -> ExperimentConfig:
    """JSON 설정 텍스트 -> 검증된 ExperimentConfig"""
    try:
        data = ujson.loads(text)
    except ValueError as e:
        raise ConfigError(f"설정 JSON 파싱 실패: {e}", field='') from e
    return config_from_dict(data)


def serialize_config(cfg: ExperimentConfig) -> str:
    return ujson.dumps(cfg.to_dict(), indent=2, ensure_ascii=False)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"설정 파일을 읽을 수 없습니다: {path}", field='config', path=path) from e
    logger.debug(f"설정 파일 로드: {os.path.abspath(path)}")
    return parse_config(text)


def strategy_run_config(cfg: ExperimentConfig, strategy_name: str, seed: int) -> RunConfig:
    """전략별 overrides와 시드를 적용한 RunConfig"""
    run = cfg.run
    if strategy_name in cfg.overrides:
        run = parse_run(cfg.overrides[strategy_name], run)
    return replace(run, seed=int(seed))


def build_strategy(name: str, run: RunConfig) -> Strategy:
    kind = _enum(StrategyKind, name, 'strategies')
    return Strategy(kind, tuple(run.presample_factors))
