"""
Synthetic multi-fidelity test functions with modeled cost.

Low fidelities over-estimate the target:

    y = f(x) + (1 - t) * bias * g(x) + eps,  eps ~ N(0, (noise_low * (1 - t) + noise_floor)^2)
    cost = base_cost * (1 + cost_slope * t)

where g(x) = 1 + 0.5 sin(2 pi u_0) lies in [0.5, 1.5] and u_0 is the
normalized first coordinate.
"""
import math
from typing import Callable, Optional, Tuple

import numpy as np

from ..models.observation import EvalResult, TaskSemantics
from ..models.search_space import ConfigPoint, Dimension, SearchSpace
from .base import Problem

BRANIN_MINIMUM = 0.397887
BRANIN_MINIMIZERS = ((-math.pi, 12.275), (math.pi, 2.275), (9.42478, 2.475))
HARTMANN3_MINIMUM = -3.86278
HARTMANN3_MINIMIZER = (0.114614, 0.555649, 0.852547)

_H3_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H3_A = np.array([[3.0, 10.0, 30.0],
                  [0.1, 10.0, 35.0],
                  [3.0, 10.0, 30.0],
                  [0.1, 10.0, 35.0]])
_H3_P = 1e-4 * np.array([[3689, 1170, 2673],
                         [4699, 4387, 7470],
                         [1091, 8732, 5547],
                         [381, 5743, 8828]])


def branin(x) -> float:
    # search space = [-5, 10] x [0, 15]
    x1, x2 = float(x[0]), float(x[1])
    b = 5.1 / (4 * math.pi ** 2)
    c = 5 / math.pi
    t = 1 / (8 * math.pi)
    return (x2 - b * x1 ** 2 + c * x1 - 6) ** 2 + 10 * (1 - t) * math.cos(x1) + 10


def hartmann3(x) -> float:
    x = np.asarray(x, dtype=float)
    inner = np.sum(_H3_A * (x[None, :] - _H3_P) ** 2, axis=1)
    return float(-np.sum(_H3_ALPHA * np.exp(-inner)))


def fidelity_shape(u0: float) -> float:
    """g(x) in [0.5, 1.5]"""
    return 1.0 + 0.5 * math.sin(2.0 * math.pi * u0)


class SyntheticProblem(Problem):
    """합성 다중 충실도 문제"""

    def __init__(self, name: str, description: str, space: SearchSpace,
                 func: Callable, global_minimum: float,
                 bias: float = 2.0, noise_low: float = 0.2, noise_floor: float = 0.01,
                 base_cost: float = 1.0, cost_slope: float = 4.0, noise: bool = True):
        super().__init__(space)
        self.name = name
        self.description = description
        self.func = func
        self.global_minimum = global_minimum
        self.bias = bias
        self.noise_low = noise_low
        self.noise_floor = noise_floor
        self.base_cost = base_cost
        self.cost_slope = cost_slope
        self.noise = noise

    @property
    def is_synthetic(self) -> bool:
        return True

    def true_value(self, x: ConfigPoint) -> float:
        values = self.space.denormalize(x)
        return float(self.func([values[n] for n in self.space.names]))

    def cost(self, t: float) -> float:
        return self.base_cost * (1.0 + self.cost_slope * t)

    def noise_std(self, t: float) -> float:
        return self.noise_low * (1.0 - t) + self.noise_floor

    def mean(self, x: ConfigPoint, t: float) -> float:
        """E[y(x, t)]"""
        return self.true_value(x) + (1.0 - t) * self.bias * abs(fidelity_shape(x.coords[0]))

    def evaluate(self, x: ConfigPoint, t: float, rng: np.random.Generator,
                 semantics: TaskSemantics = TaskSemantics.PRESAMPLE_FACTOR,
                 presample_factor: Optional[float] = None,
                 importance_sampling: bool = True) -> EvalResult:
        t = self.check(x, t)
        y = self.mean(x, t)
        if self.noise:
            y += float(rng.normal(0.0, self.noise_std(t)))
        return EvalResult(y=y, cost=self.cost(t), diagnostics=None)


def synthetic_eval(problem: SyntheticProblem, x: ConfigPoint, t: float,
                   rng: np.random.Generator) -> EvalResult:
    return problem.evaluate(x, t, rng)


def make_branin(**options) -> SyntheticProblem:
    space = SearchSpace([Dimension('x1', -5.0, 10.0), Dimension('x2', 0.0, 15.0)])
    return SyntheticProblem('branin-mf', "Branin (2-D), 저충실도 과대추정 편향 + 모델 비용",
                            space, branin, BRANIN_MINIMUM, **options)


def make_hartmann3(**options) -> SyntheticProblem:
    space = SearchSpace([Dimension(f'x{i + 1}', 0.0, 1.0) for i in range(3)])
    return SyntheticProblem('hartmann3-mf', "Hartmann-3 (3-D), 저충실도 과대추정 편향 + 모델 비용",
                            space, hartmann3, HARTMANN3_MINIMUM, **options)


def minimizer_point(problem: SyntheticProblem, values: Tuple[float, ...]) -> ConfigPoint:
    """실제 좌표 -> 정규화 점"""
    return problem.space.normalize(dict(zip(problem.space.names, values)))
