"""
Problem registry: built-in synthetic and dataset problems.
"""
import os
from typing import Any, List, Tuple

from ..errors import ProblemError
from ..models.config_model import TrainerDefaults
from .base import Problem
from .datasets import (BUILTIN_DATASETS, Dataset, LabeledData, digits_small,
                       load_dataset, split_dataset, two_moons)
from .mlp_tuning import (DatasetProblem, dataset_blackbox_eval, mlp_search_space,
                         retrain_incumbent)
from .synthetic import (BRANIN_MINIMIZERS, BRANIN_MINIMUM, HARTMANN3_MINIMIZER,
                        HARTMANN3_MINIMUM, SyntheticProblem, branin, hartmann3,
                        make_branin, make_hartmann3, minimizer_point, synthetic_eval)

SYNTHETIC_PROBLEMS = {
    'branin-mf': make_branin,
    'hartmann3-mf': make_hartmann3,
}

_SYNTHETIC_OPTIONS = ('bias', 'noise_low', 'noise_floor', 'base_cost', 'cost_slope', 'noise')


def list_problems() -> List[Tuple[str, str]]:
    """(이름, 설명) 목록"""
    names = [
        ('branin-mf', "Branin (2-D) 합성 다중 충실도, 모델 비용"),
        ('hartmann3-mf', "Hartmann-3 (3-D) 합성 다중 충실도, 모델 비용"),
    ]
    names += [(name, f"MLP 튜닝: {desc}") for name, desc in BUILTIN_DATASETS.items()]
    return names


def build_problem(name: str, **options: Any) -> Problem:
    """이름(또는 CSV 경로)으로 문제 생성

    Dataset options: ``trainer`` (TrainerDefaults), ``holdout_test``,
    ``split_seed``, ``data_seed``, ``n_classes``. Synthetic options: the
    noise and cost-model constants of SyntheticProblem.
    """
    if name in SYNTHETIC_PROBLEMS:
        unknown = set(options) - set(_SYNTHETIC_OPTIONS)
        if unknown:
            raise ProblemError(f"합성 문제에 알 수 없는 옵션: {sorted(unknown)}", problem=name)
        return SYNTHETIC_PROBLEMS[name](**options)

    if name in BUILTIN_DATASETS or os.path.isfile(name):
        trainer = options.pop('trainer', None)
        if isinstance(trainer, dict):
            trainer = TrainerDefaults(**trainer)
        data = load_dataset(name, seed=int(options.pop('data_seed', 0)),
                            n_classes=options.pop('n_classes', None))
        problem = DatasetProblem(data, trainer=trainer,
                                 split_seed=int(options.pop('split_seed', 0)),
                                 holdout_test=bool(options.pop('holdout_test', False)))
        if options:
            raise ProblemError(f"데이터셋 문제에 알 수 없는 옵션: {sorted(options)}", problem=name)
        return problem

    raise ProblemError(f"알 수 없는 문제입니다: {name}", problem=name,
                       valid=[n for n, _ in list_problems()])


__all__ = [
    'Problem',
    'SyntheticProblem',
    'DatasetProblem',
    'Dataset',
    'LabeledData',
    'build_problem',
    'list_problems',
    'load_dataset',
    'split_dataset',
    'two_moons',
    'digits_small',
    'synthetic_eval',
    'dataset_blackbox_eval',
    'retrain_incumbent',
    'mlp_search_space',
    'branin',
    'hartmann3',
    'make_branin',
    'make_hartmann3',
    'minimizer_point',
    'BRANIN_MINIMIZERS',
    'BRANIN_MINIMUM',
    'HARTMANN3_MINIMIZER',
    'HARTMANN3_MINIMUM',
]
