"""
Run and experiment configuration models.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .observation import (FRACTION_OCTAVES, TaskSemantics,
                          task_from_presample_factor)

DEFAULT_PRESAMPLE_FACTORS = [2, 3, 4, 5, 6]


class StrategyKind(Enum):
    """BO 전략 종류"""
    IBO = "ibo"
    ES = "es"
    ES_IS = "es_is"
    FABOLAS = "fabolas"
    FABOLAS_IS = "fabolas_is"
    RANDOM = "random"


class InitScheme(Enum):
    """초기 설계 방식"""
    MAX_TASK = "max_task"        # 모든 초기 설정을 목표 과제(t=1)에서 평가
    LADDER = "ladder"            # Fabolas 계열: 데이터 비율 1/128..1/16 사다리
    RANDOM_TASK = "random_task"  # 과제 격자에서 균일 추출


class BudgetMode(Enum):
    """예산 정렬 방식"""
    ITERATIONS = "iterations"
    COST = "cost"


@dataclass(frozen=True)
class PriorSpec:
    """로그 파라미터에 대한 정규 사전분포 (경계 포함)"""

    mean: float
    std: float
    lower: Optional[float] = None
    upper: Optional[float] = None

    @property
    def bounds(self):
        lo = self.mean - 6.0 * self.std if self.lower is None else self.lower
        hi = self.mean + 6.0 * self.std if self.upper is None else self.upper
        return lo, hi

    def to_dict(self) -> Dict[str, Any]:
        return {'mean': self.mean, 'std': self.std, 'lower': self.lower, 'upper': self.upper}


@dataclass(frozen=True)
class HyperPriors:
    """GP 하이퍼파라미터 사전분포: 길이척도/진폭 log-normal(0,1), 잡음 log-normal(ln 1e-3, 2)"""

    lengthscale: PriorSpec = PriorSpec(0.0, 1.0)
    amplitude: PriorSpec = PriorSpec(0.0, 1.0)
    noise: PriorSpec = PriorSpec(math.log(1e-3), 2.0, lower=math.log(1e-9))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lengthscale': self.lengthscale.to_dict(),
            'amplitude': self.amplitude.to_dict(),
            'noise': self.noise.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HyperPriors':
        defaults = cls()
        return cls(
            lengthscale=PriorSpec(**data['lengthscale']) if 'lengthscale' in data else defaults.lengthscale,
            amplitude=PriorSpec(**data['amplitude']) if 'amplitude' in data else defaults.amplitude,
            noise=PriorSpec(**data['noise']) if 'noise' in data else defaults.noise,
        )


@dataclass
class McmcConfig:
    """슬라이스 샘플링 설정"""

    n_samples: int = 10
    burn_in: int = 50
    thin: int = 3
    warm_burn_in: int = 10  # 이전 라운드 체인에서 이어 시작할 때
    priors: HyperPriors = field(default_factory=HyperPriors)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_samples': self.n_samples,
            'burn_in': self.burn_in,
            'thin': self.thin,
            'warm_burn_in': self.warm_burn_in,
            'priors': self.priors.to_dict(),
        }


@dataclass
class AcquisitionConfig:
    """엔트로피 탐색 획득 함수 설정"""

    n_representers: int = 50
    n_mc: int = 200
    n_fantasy: int = 10
    n_candidates: int = 500
    task_grid: List[float] = field(default_factory=lambda: [1.0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_representers': self.n_representers,
            'n_mc': self.n_mc,
            'n_fantasy': self.n_fantasy,
            'n_candidates': self.n_candidates,
            'task_grid': list(self.task_grid),
        }


@dataclass
class TrainerDefaults:
    """데이터셋 문제의 내부 학습 기본값"""

    epochs: int = 5
    lr_decay: float = 1.0
    decay_epoch: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {'epochs': self.epochs, 'lr_decay': self.lr_decay, 'decay_epoch': self.decay_epoch}


@dataclass
class RunConfig:
    """단일 (전략, 시드) 실행 설정"""

    n_init: int = 5
    n_bo: int = 30
    seed: int = 0
    init_scheme: InitScheme = InitScheme.MAX_TASK
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    trainer: TrainerDefaults = field(default_factory=TrainerDefaults)
    presample_factors: List[int] = field(default_factory=lambda: list(DEFAULT_PRESAMPLE_FACTORS))
    final_retrain: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_init': self.n_init,
            'n_bo': self.n_bo,
            'seed': self.seed,
            'init_scheme': self.init_scheme.value,
            'acquisition': self.acquisition.to_dict(),
            'mcmc': self.mcmc.to_dict(),
            'trainer': self.trainer.to_dict(),
            'presample_factors': list(self.presample_factors),
            'final_retrain': self.final_retrain,
        }


@dataclass(frozen=True)
class Strategy:
    """BO 전략 (IBO와 기준선)"""

    kind: StrategyKind
    presample_factors: tuple = tuple(DEFAULT_PRESAMPLE_FACTORS)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def models_task(self) -> bool:
        """GP가 과제 변수를 모델링하는지 여부"""
        return self.kind in (StrategyKind.IBO, StrategyKind.FABOLAS, StrategyKind.FABOLAS_IS)

    @property
    def models_cost(self) -> bool:
        """비용 GP로 획득 함수를 정규화하는지 여부"""
        return self.models_task

    @property
    def uses_importance_sampling(self) -> bool:
        return self.kind in (StrategyKind.IBO, StrategyKind.ES_IS, StrategyKind.FABOLAS_IS)

    @property
    def task_semantics(self) -> TaskSemantics:
        if self.kind in (StrategyKind.IBO, StrategyKind.ES_IS):
            return TaskSemantics.PRESAMPLE_FACTOR
        if self.kind in (StrategyKind.FABOLAS, StrategyKind.FABOLAS_IS):
            return TaskSemantics.DATASET_FRACTION
        return TaskSemantics.NONE

    def presample_grid(self) -> List[float]:
        """s_B 격자의 정규화 값"""
        return [task_from_presample_factor(float(s)) for s in self.presample_factors]

    def task_grid(self) -> List[float]:
        """획득 함수 최대화에 쓰는 과제 격자"""
        if self.kind == StrategyKind.IBO:
            return self.presample_grid()
        if self.kind in (StrategyKind.FABOLAS, StrategyKind.FABOLAS_IS):
            return [k / FRACTION_OCTAVES for k in range(FRACTION_OCTAVES + 1)]
        return [1.0]


@dataclass
class ExperimentConfig:
    """실험 설정 (문제, 전략 목록, 시드, 출력 경로)"""

    problem: str
    strategies: List[str]
    seeds: List[int] = field(default_factory=lambda: [0])
    output_dir: str = "results"
    budget_mode: BudgetMode = BudgetMode.ITERATIONS
    run: RunConfig = field(default_factory=RunConfig)
    overrides: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    problem_options: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        run = self.run.to_dict()
        run.pop('seed', None)
        return {
            'problem': self.problem,
            'strategies': list(self.strategies),
            'seeds': list(self.seeds),
            'output_dir': self.output_dir,
            'budget_mode': self.budget_mode.value,
            'run': run,
            'overrides': {k: dict(v) for k, v in self.overrides.items()},
            'problem_options': dict(self.problem_options),
        }
