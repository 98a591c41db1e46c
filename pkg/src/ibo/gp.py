"""Exact GP regression over (configuration, task) pairs.

Objective GPs fit y directly; cost GPs fit ln(cost). With ``standardize`` the
fitted targets are shifted/scaled to zero mean and unit variance and all
predictions are reported back in original units.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .errors import GPFitError, KernelError
from .kernels import KernelKind, KernelSpec, gram_matrix, kernel_diag
from .models.observation import Observation, check_task
from .models.search_space import ConfigPoint

logger = logging.getLogger(__name__)

JITTER_SCHEDULE = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)
MIN_VARIANCE = 1e-12
LOG_2PI = np.log(2.0 * np.pi)


def stable_cholesky(A: np.ndarray, schedule: Sequence[float] = JITTER_SCHEDULE) -> Tuple[np.ndarray, float]:
    """Lower Cholesky factor of A + jitter*I with the smallest jitter that works."""
    n = A.shape[0]
    eye = np.eye(n)
    for jitter in schedule:
        try:
            L = np.linalg.cholesky(A + jitter * eye)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(L)):
            return L, jitter
    raise GPFitError(
        f"jitter {schedule[-1]:g}까지 증가시켰으나 Cholesky 분해 실패 (n={n})",
        size=int(n), max_jitter=float(schedule[-1]))


def cholesky_downdate(L: np.ndarray, v: np.ndarray, floor: Optional[float] = None) -> np.ndarray:
    """Return L' with L' L'^T = L L^T - v v^T (rank-one downdate).

    Leading axes are batch axes: L is (..., n, n) and v is (..., n). Without
    ``floor`` a non positive-definite result raises LinAlgError; with it the
    squared pivots are clamped at ``floor``.
    """
    L = np.array(L, dtype=float, copy=True)
    v = np.array(v, dtype=float, copy=True)
    n = L.shape[-1]
    for k in range(n):
        d = L[..., k, k]
        r2 = d * d - v[..., k] ** 2
        if floor is None:
            if not np.all(r2 > 0):
                raise np.linalg.LinAlgError("downdate would lose positive definiteness")
        else:
            r2 = np.maximum(r2, floor)
        r = np.sqrt(r2)
        c = r / d
        s = v[..., k] / d
        L[..., k, k] = r
        if k + 1 < n:
            col = (L[..., k + 1:, k] - s[..., None] * v[..., k + 1:]) / c[..., None]
            L[..., k + 1:, k] = col
            v[..., k + 1:] = c[..., None] * v[..., k + 1:] - s[..., None] * col
    return L


def targets_for(data: Sequence[Observation], kind: KernelKind) -> np.ndarray:
    """Objective GPs model y, cost GPs model ln(cost)."""
    if kind == KernelKind.COST:
        return np.log(np.array([o.cost for o in data], dtype=float))
    return np.array([o.y for o in data], dtype=float)


@dataclass(frozen=True, eq=False)
class GPModel:
    """적합된 다중 과제 GP (불변)"""

    spec: KernelSpec
    noise_var: float
    X: np.ndarray
    T: np.ndarray
    targets: np.ndarray      # fitted (possibly standardized) targets
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0
    y_shift: float = 0.0
    y_scale: float = 1.0
    standardize: bool = False
    data: Tuple[Observation, ...] = field(default=())

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def kind(self) -> KernelKind:
        return self.spec.kind

    def regularized_gram(self) -> np.ndarray:
        """K + (noise + jitter) I, the matrix factorized by ``chol``."""
        K = gram_matrix(self.X, self.T, self.X, self.T, self.spec)
        return K + (self.noise_var + self.jitter) * np.eye(self.n)


def gp_fit_arrays(X: np.ndarray, T: np.ndarray, raw_targets: np.ndarray, spec: KernelSpec,
                  noise_var: float, standardize: bool = False,
                  data: Tuple[Observation, ...] = ()) -> GPModel:
    """Fit on already-transformed targets (y or ln cost)."""
    X = np.array(np.atleast_2d(X), dtype=float, copy=True)
    T = np.array(np.atleast_1d(T), dtype=float, copy=True)
    y = np.atleast_1d(np.asarray(raw_targets, dtype=float))
    if y.size == 0:
        raise GPFitError("관측 데이터가 비어 있습니다")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(T)) and np.all(np.isfinite(y))):
        raise GPFitError("관측 데이터에 NaN/inf가 있습니다")
    if not (np.isfinite(noise_var) and noise_var >= 0):
        raise GPFitError(f"잡음 분산은 0 이상이어야 합니다: {noise_var}")
    if X.shape[1] != spec.dim:
        raise KernelError(f"차원 불일치: 데이터 {X.shape[1]}, 커널 {spec.dim}",
                          expected=spec.dim, got=int(X.shape[1]))

    shift, scale = 0.0, 1.0
    if standardize:
        shift = float(np.mean(y))
        std = float(np.std(y))
        scale = std if std > 1e-12 else 1.0
    z = (y - shift) / scale

    K = gram_matrix(X, T, X, T, spec) + noise_var * np.eye(y.size)
    L, jitter = stable_cholesky(K)
    alpha = cho_solve((L, True), z)
    return GPModel(spec=spec, noise_var=float(noise_var), X=X, T=T, targets=z, chol=L,
                   alpha=alpha, jitter=jitter, y_shift=shift, y_scale=scale,
                   standardize=standardize, data=tuple(data))


def gp_fit(data: Sequence[Observation], spec: KernelSpec, noise_var: float,
           standardize: bool = False) -> GPModel:
    """관측 목록에 GP 적합"""
    if not data:
        raise GPFitError("관측 데이터가 비어 있습니다")
    X = np.vstack([o.x.array for o in data])
    T = np.array([o.t for o in data], dtype=float)
    return gp_fit_arrays(X, T, targets_for(data, spec.kind), spec, noise_var,
                         standardize=standardize, data=tuple(data))


def gp_condition(model: GPModel, data: Sequence[Observation]) -> GPModel:
    """같은 하이퍼파라미터로 새 관측 목록에 재적합 (MCMC 없음)"""
    return gp_fit(data, model.spec, model.noise_var, standardize=model.standardize)


def _check_query(model: GPModel, X, T) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if X.shape[1] != model.spec.dim:
        raise KernelError(f"차원 불일치: 질의 {X.shape[1]}, 모델 {model.spec.dim}",
                          expected=model.spec.dim, got=int(X.shape[1]))
    if T.shape[0] != X.shape[0]:
        raise KernelError("질의 점과 과제 값의 개수가 다릅니다")
    return X, T


def gp_predict(model: GPModel, X, T, full_cov: bool = False):
    """Posterior mean and variance (or joint covariance) at query rows."""
    X, T = _check_query(model, X, T)
    Ks = gram_matrix(X, T, model.X, model.T, model.spec)
    mean = Ks @ model.alpha
    V = solve_triangular(model.chol, Ks.T, lower=True)
    scale2 = model.y_scale ** 2
    mean = model.y_shift + model.y_scale * mean
    if full_cov:
        cov = gram_matrix(X, T, X, T, model.spec) - V.T @ V
        cov = 0.5 * (cov + cov.T)
        return mean, cov * scale2
    var = kernel_diag(X, T, model.spec) - np.sum(V * V, axis=0)
    return mean, np.maximum(var, MIN_VARIANCE) * scale2


def gp_posterior(model: GPModel, query) -> Tuple[float, float]:
    """단일 질의 (x, t)의 사후 평균/분산"""
    x, t = query
    x_arr = x.array if isinstance(x, ConfigPoint) else np.atleast_1d(np.asarray(x, dtype=float))
    mean, var = gp_predict(model, x_arr[None, :], [check_task(t)])
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(model: GPModel) -> float:
    """log p(targets | hyperparameters) of the fitted (possibly standardized) targets."""
    n = model.n
    return float(-0.5 * model.targets @ model.alpha
                 - np.sum(np.log(np.diag(model.chol)))
                 - 0.5 * n * LOG_2PI)


@dataclass(frozen=True, eq=False)
class GPEnsemble:
    """MCMC 하이퍼파라미터 표본별 GP 묶음"""

    members: Tuple[GPModel, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, 'members', members)
        if not members:
            raise GPFitError("앙상블 구성원이 비어 있습니다")
        first = members[0]
        for m in members[1:]:
            if m.n != first.n or not (np.array_equal(m.X, first.X) and np.array_equal(m.T, first.T)):
                raise GPFitError("앙상블 구성원은 같은 관측 목록에 적합되어야 합니다")

    @property
    def kind(self) -> KernelKind:
        return self.members[0].kind

    @property
    def data(self) -> Tuple[Observation, ...]:
        return self.members[0].data

    def __len__(self) -> int:
        return len(self.members)

    def mean(self, X, T) -> np.ndarray:
        """구성원 평균 사후 평균"""
        return np.mean([gp_predict(m, X, T)[0] for m in self.members], axis=0)

    def condition(self, data: Sequence[Observation]) -> 'GPEnsemble':
        return GPEnsemble(tuple(gp_condition(m, data) for m in self.members))
