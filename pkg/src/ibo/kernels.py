"""Multi-task kernels over (configuration, task) pairs.

Both kernels are a product of a Matern-5/2 kernel on the normalized
configuration and a task kernel on t in [0, 1]:

- objective: k_t(t, t') = (1 - t)^nu (1 - t')^nu + 1   (target task t = 1)
- cost:      k_t(t, t') = t^lam t'^lam + 1

Kernels are evaluated directly rather than through explicit feature maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import KernelError
from .models.search_space import ConfigPoint

OBJECTIVE_TASK_EXPONENT = 2.0  # nu
COST_TASK_EXPONENT = 1.0       # lambda
SQRT5 = np.sqrt(5.0)

PointLike = Union[ConfigPoint, Sequence[float], np.ndarray]


class KernelKind(Enum):
    """커널 종류"""
    OBJECTIVE = "objective"
    COST = "cost"


@dataclass(frozen=True)
class KernelSpec:
    """커널 하이퍼파라미터"""

    lengthscales: Tuple[float, ...]
    amplitude: float
    task_exponent: float
    kind: KernelKind

    def __post_init__(self):
        ls = tuple(float(v) for v in np.atleast_1d(self.lengthscales))
        object.__setattr__(self, 'lengthscales', ls)
        if not ls or not all(np.isfinite(v) and v > 0 for v in ls):
            raise KernelError(f"길이척도는 모두 양수여야 합니다: {ls}")
        if not (np.isfinite(self.amplitude) and self.amplitude > 0):
            raise KernelError(f"진폭은 양수여야 합니다: {self.amplitude}")
        if not (np.isfinite(self.task_exponent) and self.task_exponent > 0):
            raise KernelError(f"과제 지수는 양수여야 합니다: {self.task_exponent}")

    @classmethod
    def default(cls, kind: KernelKind, dim: int, lengthscale: float = 1.0,
                amplitude: float = 1.0) -> 'KernelSpec':
        exponent = OBJECTIVE_TASK_EXPONENT if kind == KernelKind.OBJECTIVE else COST_TASK_EXPONENT
        return cls((lengthscale,) * dim, amplitude, exponent, kind)

    @property
    def dim(self) -> int:
        return len(self.lengthscales)


def _as_array(x: PointLike) -> np.ndarray:
    if isinstance(x, ConfigPoint):
        return x.array
    return np.atleast_1d(np.asarray(x, dtype=float))


def _check_lengthscales(lengthscales, dim: int) -> np.ndarray:
    ls = np.atleast_1d(np.asarray(lengthscales, dtype=float))
    if ls.shape[0] != dim:
        raise KernelError(f"차원 불일치: 길이척도 {ls.shape[0]}, 입력 {dim}",
                          expected=int(ls.shape[0]), got=int(dim))
    if np.any(~np.isfinite(ls)) or np.any(ls <= 0):
        raise KernelError(f"길이척도는 모두 양수여야 합니다: {ls.tolist()}")
    return ls


def _check_tasks(T) -> np.ndarray:
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(~np.isfinite(T)) or np.any(T < 0.0) or np.any(T > 1.0):
        raise KernelError(f"과제 값은 [0,1] 범위여야 합니다: {T.tolist()}")
    return T


def scaled_distances(X1: np.ndarray, X2: np.ndarray, lengthscales) -> np.ndarray:
    """Lengthscale-scaled Euclidean distances, shape (n1, n2)."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    if X1.shape[1] != X2.shape[1]:
        raise KernelError(f"차원 불일치: {X1.shape[1]} vs {X2.shape[1]}",
                          expected=int(X1.shape[1]), got=int(X2.shape[1]))
    ls = _check_lengthscales(lengthscales, X1.shape[1])
    # explicit differences keep r(a, b) == r(b, a) bit-for-bit
    diff = (X1[:, None, :] - X2[None, :, :]) / ls
    return np.sqrt(np.sum(diff * diff, axis=-1))


def matern52_from_distance(r: np.ndarray, amplitude: float) -> np.ndarray:
    return amplitude ** 2 * (1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * np.exp(-SQRT5 * r)


def matern52(x: PointLike, x2: PointLike, lengthscales, amplitude: float) -> float:
    """Matern-5/2 kernel between two configuration points."""
    a, b = _as_array(x), _as_array(x2)
    if a.shape != b.shape:
        raise KernelError(f"차원 불일치: {a.shape[0]} vs {b.shape[0]}",
                          expected=int(a.shape[0]), got=int(b.shape[0]))
    if not (np.isfinite(amplitude) and amplitude > 0):
        raise KernelError(f"진폭은 양수여야 합니다: {amplitude}")
    r = scaled_distances(a[None, :], b[None, :], lengthscales)[0, 0]
    return float(matern52_from_distance(r, amplitude))


def matern52_matrix(X1, X2, lengthscales, amplitude: float) -> np.ndarray:
    return matern52_from_distance(scaled_distances(X1, X2, lengthscales), amplitude)


def objective_task_factor(T1, T2, nu: float = OBJECTIVE_TASK_EXPONENT) -> np.ndarray:
    """(1 - t)^nu (1 - t')^nu + 1, shape (n1, n2)."""
    a = (1.0 - _check_tasks(T1)) ** nu
    b = (1.0 - _check_tasks(T2)) ** nu
    return a[:, None] * b[None, :] + 1.0


def cost_task_factor(T1, T2, lam: float = COST_TASK_EXPONENT) -> np.ndarray:
    """t^lam t'^lam + 1, shape (n1, n2)."""
    a = _check_tasks(T1) ** lam
    b = _check_tasks(T2) ** lam
    return a[:, None] * b[None, :] + 1.0


def task_factor(T1, T2, spec: KernelSpec) -> np.ndarray:
    if spec.kind == KernelKind.OBJECTIVE:
        return objective_task_factor(T1, T2, spec.task_exponent)
    return cost_task_factor(T1, T2, spec.task_exponent)


def gram_matrix(X1, T1, X2, T2, spec: KernelSpec) -> np.ndarray:
    """Kernel matrix between (X1, T1) and (X2, T2) under ``spec``."""
    K = matern52_matrix(X1, X2, spec.lengthscales, spec.amplitude)
    return K * task_factor(T1, T2, spec)


def kernel_diag(X, T, spec: KernelSpec) -> np.ndarray:
    """Prior variances k(q, q) for each row."""
    T = _check_tasks(T)
    if spec.kind == KernelKind.OBJECTIVE:
        a = (1.0 - T) ** spec.task_exponent
    else:
        a = T ** spec.task_exponent
    factor = a * a + 1.0
    n = np.atleast_2d(X).shape[0]
    return np.full(n, spec.amplitude ** 2) * factor


def _pair(point) -> Tuple[np.ndarray, float]:
    x, t = point
    return _as_array(x), float(t)


def kernel_objective(a, b, spec: KernelSpec) -> float:
    """k((x, t), (x', t')) for the objective GP."""
    if spec.kind != KernelKind.OBJECTIVE:
        raise KernelError("kernel_objective는 objective 커널 명세가 필요합니다", kind=spec.kind.value)
    (x, t), (x2, t2) = _pair(a), _pair(b)
    return float(gram_matrix(x[None, :], [t], x2[None, :], [t2], spec)[0, 0])


def kernel_cost(a, b, spec: KernelSpec) -> float:
    """k((x, t), (x', t')) for the log-cost GP."""
    if spec.kind != KernelKind.COST:
        raise KernelError("kernel_cost는 cost 커널 명세가 필요합니다", kind=spec.kind.value)
    (x, t), (x2, t2) = _pair(a), _pair(b)
    return float(gram_matrix(x[None, :], [t], x2[None, :], [t2], spec)[0, 0])
