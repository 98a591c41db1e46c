"""
Observation data model: one row of the BO history.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from ..errors import ProblemError
from .search_space import ConfigPoint

TARGET_TASK = 1.0
MIN_PRESAMPLE_FACTOR = 2.0
MAX_PRESAMPLE_FACTOR = 6.0
FRACTION_OCTAVES = 7  # s in [1/128, 1]


class TaskSemantics(Enum):
    """과제 변수 의미"""
    PRESAMPLE_FACTOR = "presample_factor"   # IBO: s_B = 2 + 4t
    DATASET_FRACTION = "dataset_fraction"   # Fabolas: s = 2^(7(t-1))
    NONE = "none"                           # 단일 과제


def check_task(t: float) -> float:
    """과제 값이 [0,1] 범위인지 검증"""
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or t > 1.0:
        raise ProblemError(f"과제 값이 [0,1] 범위를 벗어났습니다: {t}", task=t)
    return t


def presample_factor_from_task(t: float) -> float:
    return MIN_PRESAMPLE_FACTOR + (MAX_PRESAMPLE_FACTOR - MIN_PRESAMPLE_FACTOR) * check_task(t)


def task_from_presample_factor(s_b: float) -> float:
    return check_task((s_b - MIN_PRESAMPLE_FACTOR) / (MAX_PRESAMPLE_FACTOR - MIN_PRESAMPLE_FACTOR))


def fraction_from_task(t: float) -> float:
    return float(2.0 ** (FRACTION_OCTAVES * (check_task(t) - 1.0)))


def task_from_fraction(s: float) -> float:
    if s <= 0:
        raise ProblemError(f"데이터 비율은 양수여야 합니다: {s}", fraction=s)
    return check_task(1.0 + math.log2(s) / FRACTION_OCTAVES)


def denormalize_task(t: float, semantics: TaskSemantics) -> float:
    """정규화 과제 값 -> 실제 값 (s_B 또는 데이터 비율)"""
    if semantics == TaskSemantics.PRESAMPLE_FACTOR:
        return presample_factor_from_task(t)
    if semantics == TaskSemantics.DATASET_FRACTION:
        return fraction_from_task(t)
    return check_task(t)


@dataclass(frozen=True)
class Observation:
    """관측 (x, t, y, c) - D_n의 한 행"""

    x: ConfigPoint
    t: float
    y: float
    cost: float

    def __post_init__(self):
        object.__setattr__(self, 't', check_task(self.t))
        if not math.isfinite(self.y):
            raise ProblemError(f"관측값 y가 유한하지 않습니다: {self.y}")
        if not (math.isfinite(self.cost) and self.cost > 0):
            raise ProblemError(f"비용은 양수여야 합니다: {self.cost}")

    def to_dict(self) -> Dict[str, Any]:
        return {'x': list(self.x.coords), 't': self.t, 'y': self.y, 'cost': self.cost}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Observation':
        return cls(ConfigPoint(tuple(data['x'])), data['t'], data['y'], data['cost'])


@dataclass
class EvalResult:
    """블랙박스 평가 결과"""

    y: float
    cost: float
    diagnostics: Optional[Dict[str, Any]] = field(default=None)
    # deterministic cost for the cost GP; None when ``cost`` is already modeled
    model_cost: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise ProblemError(f"평가 결과 y가 유한하지 않습니다: {self.y}")
        if not (math.isfinite(self.cost) and self.cost > 0):
            raise ProblemError(f"평가 비용은 양수여야 합니다: {self.cost}")
        if self.model_cost is not None and not (math.isfinite(self.model_cost) and self.model_cost > 0):
            raise ProblemError(f"모델 비용은 양수여야 합니다: {self.model_cost}")

    @property
    def gp_cost(self) -> float:
        """비용 GP가 학습하는 값"""
        return self.cost if self.model_cost is None else self.model_cost
