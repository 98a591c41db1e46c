"""Entropy-search acquisition over a GP ensemble.

p_min is estimated on a discrete set of representer points at the target task
by counting argmins of joint posterior samples. A candidate (x, t) is scored by
how much a fantasized observation there would shrink the entropy of p_min,
divided by the predicted evaluation cost.

One set of standard-normal draws is shared by the current and the fantasized
p_min estimates and by every candidate of one maximization. A candidate that
carries no information about the representers therefore scores exactly zero.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import norm

from .errors import AcquisitionError, GPFitError, ProblemError
from .gp import GPEnsemble, GPModel, JITTER_SCHEDULE, cholesky_downdate, gp_predict, stable_cholesky
from .kernels import gram_matrix
from .models.config_model import AcquisitionConfig
from .models.observation import TARGET_TASK
from .models.search_space import ConfigPoint, SearchSpace, as_matrix

logger = logging.getLogger(__name__)

EI_FLOOR = 1e-9
CANDIDATE_CHUNK = 64

Candidate = Tuple[ConfigPoint, float]


@dataclass(frozen=True)
class RepresenterSet:
    """p_min 이산화 지점 (모두 목표 과제 t=1)"""

    points: Tuple[ConfigPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(self.points))
        if not self.points:
            raise AcquisitionError("대표점 집합이 비어 있습니다")

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return as_matrix(self.points)


@dataclass(frozen=True)
class PminEstimate:
    """대표점 위 최소점 확률 분포"""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise AcquisitionError("p_min은 합이 1인 음이 아닌 벡터여야 합니다")
        object.__setattr__(self, 'probs', p)

    @property
    def count(self) -> int:
        return int(self.probs.size)


def check_config(cfg: AcquisitionConfig) -> AcquisitionConfig:
    for name in ('n_representers', 'n_mc', 'n_fantasy', 'n_candidates'):
        value = getattr(cfg, name)
        if int(value) < 1:
            raise AcquisitionError(f"{name}는 1 이상이어야 합니다: {value}", field=name)
    if not cfg.task_grid:
        raise AcquisitionError("task_grid가 비어 있습니다", field='task_grid')
    if any(not (0.0 <= t <= 1.0) for t in cfg.task_grid):
        raise AcquisitionError(f"task_grid 값은 [0,1] 범위여야 합니다: {cfg.task_grid}", field='task_grid')
    return cfg


def _target_tasks(n: int) -> np.ndarray:
    return np.full(n, TARGET_TASK)


def expected_improvement(ensemble: GPEnsemble, X: np.ndarray, best: float) -> np.ndarray:
    """EI for minimization at the target task, averaged over members."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = _target_tasks(X.shape[0])
    total = np.zeros(X.shape[0])
    for model in ensemble.members:
        mean, var = gp_predict(model, X, T)
        sd = np.sqrt(var)
        z = (best - mean) / sd
        total += (best - mean) * norm.cdf(z) + sd * norm.pdf(z)
    return np.maximum(total / len(ensemble), 0.0)


def current_best(ensemble: GPEnsemble) -> float:
    """관측된 설정들에서 목표 과제 예측 평균의 최솟값"""
    X = ensemble.members[0].X
    return float(np.min(ensemble.mean(X, _target_tasks(X.shape[0]))))


def select_representers(ensemble: GPEnsemble, space: SearchSpace, cfg: AcquisitionConfig,
                        rng: np.random.Generator) -> RepresenterSet:
    """Sample representers from uniform candidates with probability proportional to EI."""
    check_config(cfg)
    try:
        candidates = space.sample_uniform(cfg.n_candidates, rng)
    except ProblemError as e:
        raise AcquisitionError(f"대표점 선택 실패: {e.message}") from e

    ei = np.maximum(expected_improvement(ensemble, candidates, current_best(ensemble)), EI_FLOOR)
    idx = rng.choice(cfg.n_candidates, size=cfg.n_representers, replace=True, p=ei / ei.sum())
    return RepresenterSet(tuple(ConfigPoint.from_array(candidates[i]) for i in idx))


def _factor(cov: np.ndarray) -> np.ndarray:
    """Cholesky of a posterior covariance with jitter relative to its scale."""
    scale = max(float(np.mean(np.diag(cov))), 1e-12)
    try:
        L, _ = stable_cholesky(cov, tuple(j * scale for j in JITTER_SCHEDULE) + (1e-4 * scale,))
    except GPFitError as e:
        raise AcquisitionError("대표점 결합 공분산의 Cholesky 분해 실패", size=int(cov.shape[0])) from e
    return L


def _smoothed(counts: np.ndarray, n_mc: int) -> np.ndarray:
    R = counts.shape[-1]
    p = counts / n_mc + 1.0 / (n_mc * R)
    return p / p.sum(axis=-1, keepdims=True)


def _argmin_counts(samples: np.ndarray) -> np.ndarray:
    """Argmin frequencies along the last axis of (..., n_mc, R) samples."""
    R = samples.shape[-1]
    idx = np.argmin(samples, axis=-1)
    lead = idx.shape[:-1]
    flat = idx.reshape(-1, idx.shape[-1]) + R * np.arange(int(np.prod(lead, dtype=int)))[:, None]
    counts = np.bincount(flat.ravel(), minlength=R * flat.shape[0])
    return counts.reshape(lead + (R,)).astype(float)


def _entropies(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return -np.sum(terms, axis=-1)


def entropy(p: Union[PminEstimate, Sequence[float], np.ndarray]) -> float:
    """Shannon entropy in nats, with 0 ln 0 = 0."""
    probs = p.probs if isinstance(p, PminEstimate) else np.asarray(p, dtype=float)
    return float(_entropies(probs))


def _rep_moments(model: GPModel, R: np.ndarray):
    mean, cov = gp_predict(model, R, _target_tasks(R.shape[0]), full_cov=True)
    return mean, _factor(cov)


def estimate_pmin(ensemble: GPEnsemble, reps: RepresenterSet, n_mc: int,
                  rng: np.random.Generator, z: Optional[np.ndarray] = None) -> PminEstimate:
    """Monte-Carlo p_min over representers, averaged across ensemble members."""
    if n_mc < 1:
        raise AcquisitionError(f"n_mc는 1 이상이어야 합니다: {n_mc}", field='n_mc')
    R = reps.array
    if z is None:
        z = rng.standard_normal((n_mc, reps.count))
    probs = np.zeros(reps.count)
    for model in ensemble.members:
        mean, L = _rep_moments(model, R)
        samples = mean[None, :] + z @ L.T
        probs += _smoothed(_argmin_counts(samples), n_mc)
    probs /= len(ensemble)
    return PminEstimate(probs / probs.sum())


def fantasy_quantiles(n_fantasy: int) -> np.ndarray:
    """Stratified standard-normal quantiles for fantasized observations."""
    if n_fantasy < 1:
        raise AcquisitionError(f"n_fantasy는 1 이상이어야 합니다: {n_fantasy}", field='n_fantasy')
    return norm.ppf(np.linspace(1.0 / (n_fantasy + 1), 1.0 - 1.0 / (n_fantasy + 1), n_fantasy))


def _member_reductions(model: GPModel, R: np.ndarray, X: np.ndarray, T: np.ndarray,
                       z: np.ndarray, q: np.ndarray) -> np.ndarray:
    """H(p_min) minus mean fantasized H(p_min) for each candidate row, one member."""
    n_mc = z.shape[0]
    mean_r, L = _rep_moments(model, R)
    h_now = _entropies(_smoothed(_argmin_counts(mean_r[None, :] + z @ L.T), n_mc))

    scale2 = model.y_scale ** 2
    Tr = _target_tasks(R.shape[0])
    Vr = solve_triangular(model.chol, gram_matrix(model.X, model.T, R, Tr, model.spec), lower=True)
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], CANDIDATE_CHUNK):
        Xc, Tc = X[start:start + CANDIDATE_CHUNK], T[start:start + CANDIDATE_CHUNK]
        _, var_c = gp_predict(model, Xc, Tc)
        Vc = solve_triangular(model.chol, gram_matrix(model.X, model.T, Xc, Tc, model.spec), lower=True)
        cross = (gram_matrix(R, Tr, Xc, Tc, model.spec) - Vr.T @ Vc) * scale2   # (R, C)
        s = np.sqrt(var_c + model.noise_var * scale2)
        W = (cross / s[None, :]).T                                             # (C, R)

        Lc = cholesky_downdate(np.broadcast_to(L, (W.shape[0],) + L.shape), W,
                               floor=1e-12 * float(np.mean(np.diag(L)) ** 2))
        base = mean_r[None, None, :] + np.einsum('mr,ckr->cmk', z, Lc)       # (C, n_mc, R)
        shifted = base[:, None, :, :] + (q[None, :, None] * W[:, None, :])[:, :, None, :]
        h_new = _entropies(_smoothed(_argmin_counts(shifted), n_mc))           # (C, J)
        out[start:start + Xc.shape[0]] = h_now - h_new.mean(axis=1)
    return out


def entropy_reductions(ensemble: GPEnsemble, X: np.ndarray, T: np.ndarray, reps: RepresenterSet,
                       cfg: AcquisitionConfig, z: np.ndarray) -> np.ndarray:
    """Vectorized expected entropy reduction for candidate rows (X, T)."""
    q = fantasy_quantiles(cfg.n_fantasy)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    R = reps.array
    total = np.zeros(X.shape[0])
    for model in ensemble.members:
        total += _member_reductions(model, R, X, T, z, q)
    return total / len(ensemble)


def _check_candidate(candidate: Candidate) -> Tuple[np.ndarray, float]:
    x, t = candidate
    arr = x.array if isinstance(x, ConfigPoint) else np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not (0.0 <= float(t) <= 1.0):
        raise AcquisitionError("후보가 탐색 공간 밖에 있습니다", task=float(t))
    return arr, float(t)


def expected_entropy_reduction(ensemble: GPEnsemble, candidate: Candidate, reps: RepresenterSet,
                               cfg: AcquisitionConfig, rng: np.random.Generator,
                               z: Optional[np.ndarray] = None) -> float:
    fantasy_quantiles(cfg.n_fantasy)
    x, t = _check_candidate(candidate)
    if z is None:
        z = rng.standard_normal((cfg.n_mc, reps.count))
    return float(entropy_reductions(ensemble, x[None, :], np.array([t]), reps, cfg, z)[0])


def predicted_log_cost(ensemble_c: GPEnsemble, X, T) -> np.ndarray:
    """비용 GP 앙상블의 ln(cost) 예측 평균"""
    return ensemble_c.mean(X, T)


def normalize_by_cost(reductions, log_costs) -> np.ndarray:
    """Entropy reduction per unit of predicted cost."""
    return np.asarray(reductions, dtype=float) / np.exp(np.asarray(log_costs, dtype=float))


def acquisition_ibo(candidate: Candidate, ensemble_f: GPEnsemble, ensemble_c: Optional[GPEnsemble],
                    reps: RepresenterSet, cfg: AcquisitionConfig, rng: np.random.Generator,
                    z: Optional[np.ndarray] = None) -> float:
    """Cost-normalized expected entropy reduction of one (x, t) candidate."""
    reduction = expected_entropy_reduction(ensemble_f, candidate, reps, cfg, rng, z=z)
    if ensemble_c is None:
        return reduction
    x, t = _check_candidate(candidate)
    log_cost = predicted_log_cost(ensemble_c, x[None, :], [t])
    return float(normalize_by_cost(reduction, log_cost)[0])


def candidate_grid(n_candidates: int, task_grid: Sequence[float], dim: int,
                   rng: np.random.Generator,
                   extra: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Random configurations (then ``extra`` rows) crossed with every task value, candidate-major."""
    X = rng.uniform(0.0, 1.0, size=(n_candidates, dim))
    if extra is not None:
        X = np.vstack([X, np.asarray(extra, dtype=float).reshape(-1, dim)])
    n_candidates = X.shape[0]
    grid = np.asarray(task_grid, dtype=float)
    return np.repeat(X, grid.size, axis=0), np.tile(grid, n_candidates)


def maximize_acquisition(ensemble_f: GPEnsemble, ensemble_c: Optional[GPEnsemble], space: SearchSpace,
                         cfg: AcquisitionConfig, rng: np.random.Generator,
                         reps: Optional[RepresenterSet] = None) -> Candidate:
    """Argmax of the acquisition over the task grid crossed with random
    configurations and the representer configurations.

    Ties resolve to the lowest candidate index (random configurations come
    first). ``ensemble_c=None`` means unit cost everywhere.
    """
    check_config(cfg)
    if reps is None:
        reps = select_representers(ensemble_f, space, cfg, rng)
    z = rng.standard_normal((cfg.n_mc, reps.count))
    X, T = candidate_grid(cfg.n_candidates, cfg.task_grid, space.dimension, rng, extra=reps.array)

    values = entropy_reductions(ensemble_f, X, T, reps, cfg, z)
    if ensemble_c is not None:
        values = normalize_by_cost(values, predicted_log_cost(ensemble_c, X, T))
    if not np.all(np.isfinite(values)):
        raise AcquisitionError("획득 함수 값에 NaN/inf가 있습니다")

    best = int(np.argmax(values))
    logger.debug(f"획득 함수 최대화: {values.size}개 후보, 최댓값 {values[best]:.4g} (t={T[best]:.3f})")
    return ConfigPoint.from_array(X[best]), float(T[best])

