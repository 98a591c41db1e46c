"""
Black-box problem interface.
"""
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from ..errors import ProblemError
from ..models.observation import EvalResult, TaskSemantics, check_task
from ..models.search_space import ConfigPoint, SearchSpace


class Problem(ABC):
    """탐색 공간과 평가기를 묶은 블랙박스 문제"""

    name: str = ""
    description: str = ""

    def __init__(self, space: SearchSpace):
        self.space = space

    @property
    def is_synthetic(self) -> bool:
        return False

    def check(self, x: ConfigPoint, t: float) -> float:
        """x가 공간 안에 있고 t가 [0,1]인지 검증"""
        self.space.check(x)
        try:
            return check_task(t)
        except ProblemError as e:
            raise ProblemError(f"과제 값 범위 밖: {t}", task=float(t)) from e

    @abstractmethod
    def evaluate(self, x: ConfigPoint, t: float, rng: np.random.Generator,
                 semantics: TaskSemantics = TaskSemantics.PRESAMPLE_FACTOR,
                 presample_factor: Optional[float] = None,
                 importance_sampling: bool = True) -> EvalResult:
        """(x, t) 평가

        ``t`` is the fidelity seen by the problem; ``presample_factor``
        overrides the s_B implied by ``t`` for strategies that draw it
        separately.
        """

    def true_value(self, x: ConfigPoint) -> Optional[float]:
        """무잡음 목표 과제 값 (알 수 없으면 None)"""
        return None
