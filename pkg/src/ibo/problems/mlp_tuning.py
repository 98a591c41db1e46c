"""
MLP hyperparameter tuning on a classification dataset.

Search space: learning rate, batch size, hidden width and L2 weight, all on
log scales. The task variable is the presample factor s_B = 2 + 4t for
IBO-style strategies, or the training-set fraction s = 2^(7(t - 1)) for
Fabolas-style strategies.

An evaluation reports measured training seconds as ``cost`` and the
trainer's work units as ``model_cost``; the cost GP is fit to the latter.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from ..errors import ProblemError, TrainingError
from ..is_trainer import TrainerConfig, train, train_model
from ..mlp import classification_error
from ..models.config_model import TrainerDefaults
from ..models.observation import (MIN_PRESAMPLE_FACTOR, EvalResult, TaskSemantics,
                                  fraction_from_task, presample_factor_from_task)
from ..models.search_space import ConfigPoint, Dimension, DimKind, Scale, SearchSpace
from .base import Problem
from .datasets import Dataset, LabeledData, split_dataset

logger = logging.getLogger(__name__)

WORST_ERROR = 1.0
MIN_WORK_UNITS = 1e-6


def mlp_search_space() -> SearchSpace:
    return SearchSpace([
        Dimension('learning_rate', 1e-3, 1.0, Scale.LOG),
        Dimension('batch_size', 16, 256, Scale.LOG, DimKind.INTEGER),
        Dimension('hidden_width', 8, 128, Scale.LOG, DimKind.INTEGER),
        Dimension('l2_weight', 1e-6, 1e-1, Scale.LOG),
    ])


class DatasetProblem(Problem):
    """데이터셋 기반 MLP 튜닝 문제"""

    def __init__(self, data: LabeledData, trainer: Optional[TrainerDefaults] = None,
                 split_seed: int = 0, holdout_test: bool = False, description: str = ""):
        super().__init__(mlp_search_space())
        self.name = data.name
        self.description = description or f"MLP 튜닝 ({data.n_rows} x {data.n_features}, {data.n_classes} 클래스)"
        self.trainer = trainer or TrainerDefaults()
        self.dataset: Dataset = split_dataset(data, seed=split_seed, holdout_test=holdout_test)

    def trainer_config(self, x: ConfigPoint, presample_factor: float, importance_sampling: bool,
                       seed: int) -> TrainerConfig:
        values = self.space.denormalize(x)
        return TrainerConfig(
            batch_size=int(values['batch_size']),
            presample_factor=float(presample_factor),
            epochs=self.trainer.epochs,
            learning_rate=values['learning_rate'],
            l2_weight=values['l2_weight'],
            seed=seed,
            hidden_widths=(int(values['hidden_width']),),
            use_importance_sampling=importance_sampling,
            lr_decay=self.trainer.lr_decay,
            decay_epoch=self.trainer.decay_epoch,
        )

    def evaluate(self, x: ConfigPoint, t: float, rng: np.random.Generator,
                 semantics: TaskSemantics = TaskSemantics.PRESAMPLE_FACTOR,
                 presample_factor: Optional[float] = None,
                 importance_sampling: bool = True) -> EvalResult:
        t = self.check(x, t)
        seed = int(rng.integers(0, 2 ** 31 - 1))
        data_rng = np.random.default_rng(seed)
        dataset = self.dataset
        diagnostics: Dict[str, Any] = {'semantics': semantics.value}

        if semantics == TaskSemantics.DATASET_FRACTION:
            fraction = fraction_from_task(t)
            dataset = dataset.subsample(fraction, data_rng)
            s_b = presample_factor if presample_factor is not None else MIN_PRESAMPLE_FACTOR
            use_is = importance_sampling and presample_factor is not None
            diagnostics['fraction'] = fraction
        elif semantics == TaskSemantics.PRESAMPLE_FACTOR:
            s_b = presample_factor if presample_factor is not None else presample_factor_from_task(t)
            use_is = importance_sampling
        else:
            s_b = presample_factor if presample_factor is not None else MIN_PRESAMPLE_FACTOR
            use_is = importance_sampling and presample_factor is not None

        cfg = self.trainer_config(x, s_b, use_is, seed)
        diagnostics['trainer'] = cfg.to_dict()
        try:
            report = train(cfg, dataset, data_rng)
        except TrainingError as e:
            partial = e.partial_report
            seconds = partial.cost_seconds if partial is not None else 1e-9
            work = partial.work_units if partial is not None else 0.0
            diagnostics.update({'aborted': True, 'reason': e.message})
            logger.warning(f"학습 중단 - 최악 오차 {WORST_ERROR}로 기록: {e.message}")
            return EvalResult(y=WORST_ERROR, cost=max(seconds, 1e-9), diagnostics=diagnostics,
                              model_cost=max(work, MIN_WORK_UNITS))

        diagnostics.update({'aborted': False, 'report': report.to_dict()})
        return EvalResult(y=report.validation_error, cost=report.cost_seconds, diagnostics=diagnostics,
                          model_cost=max(report.work_units, MIN_WORK_UNITS))


def dataset_blackbox_eval(problem: DatasetProblem, x: ConfigPoint, t: float, rng: np.random.Generator,
                          semantics: TaskSemantics = TaskSemantics.PRESAMPLE_FACTOR) -> EvalResult:
    return problem.evaluate(x, t, rng, semantics=semantics)


def retrain_incumbent(problem: Problem, x: ConfigPoint, rng: np.random.Generator) -> float:
    """incumbent를 학습+검증 전체로 vanilla SGD 재학습 후 테스트 오차 반환"""
    if not isinstance(problem, DatasetProblem):
        raise ProblemError("재학습은 데이터셋 문제에서만 가능합니다", problem=problem.name)
    merged = problem.dataset.merged_train()
    seed = int(rng.integers(0, 2 ** 31 - 1))
    cfg = problem.trainer_config(x, MIN_PRESAMPLE_FACTOR, False, seed)
    try:
        model, _ = train_model(cfg, merged, np.random.default_rng(seed))
    except TrainingError as e:
        logger.warning(f"incumbent 재학습 발산: {e.message}")
        return WORST_ERROR
    return classification_error(model, merged.X_val, merged.y_val)
