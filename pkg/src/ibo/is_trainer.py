"""
Importance-sampled SGD inner loop.

Each step draws a presample of B = round(b * s_B) training points, scores them
with a forward pass, and decides whether an importance-sampled step is worth
the scoring overhead. The decision statistic is tau = B * sum(p_i^2); the
step is importance-sampled when tau > (B + 3b) / (3b).

Reports carry measured seconds and ``work_units``: example forward+backward
passes times the parameter count, in millions, with a forward-only pass
counted as a third. ``work_units`` depends only on (seed, cfg, dataset).
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import TrainingError
from .mlp import Batch, MlpModel, classification_error, mlp_forward_backward, score_examples
from .models.observation import MAX_PRESAMPLE_FACTOR, MIN_PRESAMPLE_FACTOR

logger = logging.getLogger(__name__)

UNIFORM_FALLBACK = 1e-12
FORWARD_SHARE = 1.0 / 3.0
WORK_SCALE = 1e-6


@dataclass
class TrainerConfig:
    """내부 학습 설정"""

    batch_size: int
    presample_factor: float
    epochs: int
    learning_rate: float
    l2_weight: float = 0.0
    seed: int = 0
    hidden_widths: Tuple[int, ...] = (32,)
    use_importance_sampling: bool = True
    lr_decay: float = 1.0
    decay_epoch: Optional[int] = None

    def __post_init__(self):
        if int(self.batch_size) < 1:
            raise TrainingError(f"batch_size는 1 이상이어야 합니다: {self.batch_size}")
        if not (MIN_PRESAMPLE_FACTOR <= self.presample_factor <= MAX_PRESAMPLE_FACTOR):
            raise TrainingError(f"presample_factor는 [2, 6] 범위여야 합니다: {self.presample_factor}")
        if int(self.epochs) < 1:
            raise TrainingError(f"epochs는 1 이상이어야 합니다: {self.epochs}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise TrainingError(f"learning_rate는 양수여야 합니다: {self.learning_rate}")
        if not (math.isfinite(self.l2_weight) and self.l2_weight >= 0):
            raise TrainingError(f"l2_weight는 0 이상이어야 합니다: {self.l2_weight}")
        if not (self.lr_decay > 0):
            raise TrainingError(f"lr_decay는 양수여야 합니다: {self.lr_decay}")

    @property
    def presample_size(self) -> int:
        """B = round(b * s_B)"""
        return max(int(round(self.batch_size * self.presample_factor)), int(self.batch_size))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'batch_size': int(self.batch_size),
            'presample_factor': float(self.presample_factor),
            'epochs': int(self.epochs),
            'learning_rate': float(self.learning_rate),
            'l2_weight': float(self.l2_weight),
            'seed': int(self.seed),
            'hidden_widths': list(self.hidden_widths),
            'use_importance_sampling': self.use_importance_sampling,
            'lr_decay': self.lr_decay,
            'decay_epoch': self.decay_epoch,
        }


@dataclass(frozen=True)
class StepDecision:
    """IS 단계 사용 여부 판정"""

    use_is: bool
    tau: float
    threshold: float


@dataclass
class TrainReport:
    """학습 결과 보고"""

    validation_error: float
    cost_seconds: float
    is_step_fraction: float
    loss_curve: List[float] = field(default_factory=list)
    n_steps: int = 0
    n_is_steps: int = 0
    work_units: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'validation_error': self.validation_error,
            'cost_seconds': self.cost_seconds,
            'work_units': self.work_units,
            'is_step_fraction': self.is_step_fraction,
            'loss_curve': list(self.loss_curve),
            'n_steps': self.n_steps,
            'n_is_steps': self.n_is_steps,
        }


def count_work(passes: float, model: MlpModel) -> float:
    """example pass 수 x 파라미터 수 (백만 단위)"""
    return float(passes) * model.n_params * WORK_SCALE


def importance_distribution(scores: Sequence[float]) -> np.ndarray:
    """p_i = s_i / sum(s), uniform when the scores sum to (almost) zero."""
    s = np.asarray(scores, dtype=float).ravel()
    if s.size == 0:
        raise TrainingError("점수 목록이 비어 있습니다")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise TrainingError("점수는 유한한 음이 아닌 값이어야 합니다")
    total = s.sum()
    if total < UNIFORM_FALLBACK:
        return np.full(s.size, 1.0 / s.size)
    return s / total


def do_sgd_test(scores: Sequence[float], B: int, b: int) -> StepDecision:
    """Decide between an importance-sampled and a vanilla step."""
    if not (len(scores) == B and B >= b >= 1):
        raise TrainingError(f"do_sgd_test 전제 위반: len={len(scores)}, B={B}, b={b}")
    p = importance_distribution(scores)
    tau = float(B * np.sum(p * p))
    threshold = (B + 3.0 * b) / (3.0 * b)
    return StepDecision(use_is=tau > threshold, tau=tau, threshold=threshold)


def importance_weights(p: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """1 / (B p_i) for each sampled index."""
    return 1.0 / (p.size * p[idx])


def is_sgd_step(model: MlpModel, presample: Batch, b: int, lr: float, l2: float,
                rng: np.random.Generator, scores: Optional[np.ndarray] = None) -> MlpModel:
    """One reweighted step: b indices drawn from p, gradients scaled by 1/(B p_i)."""
    X, y = presample
    if scores is None:
        scores = score_examples(model, presample)
    p = importance_distribution(scores)
    idx = rng.choice(p.size, size=b, replace=True, p=p)
    _, grads = mlp_forward_backward(model, (X[idx], y[idx]), l2,
                                    sample_weights=importance_weights(p, idx))
    return model.apply_update(grads, lr)


def vanilla_sgd_step(model: MlpModel, batch: Batch, lr: float, l2: float) -> MlpModel:
    _, grads = mlp_forward_backward(model, batch, l2)
    return model.apply_update(grads, lr)


def train(cfg: TrainerConfig, dataset, rng: Optional[np.random.Generator] = None) -> TrainReport:
    """Train a fresh network on ``dataset`` and report validation error and wall cost.

    ``dataset`` needs ``X_train``, ``y_train``, ``X_val``, ``y_val`` and
    ``n_classes``.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    X, y = dataset.X_train, dataset.y_train
    m = X.shape[0]
    if m == 0:
        raise TrainingError("학습 데이터가 비어 있습니다")

    widths = (X.shape[1],) + tuple(cfg.hidden_widths) + (dataset.n_classes,)
    model = MlpModel.init(widths, rng)
    b = min(int(cfg.batch_size), m)
    B = min(cfg.presample_size, m)
    steps_per_epoch = math.ceil(m / b)
    lr = cfg.learning_rate

    loss_curve: List[float] = []
    n_steps = n_is = 0
    passes = 0.0
    step_passes = (B * FORWARD_SHARE + b) if cfg.use_importance_sampling else float(b)
    start = time.perf_counter()

    def partial() -> TrainReport:
        return TrainReport(validation_error=1.0,
                           cost_seconds=max(time.perf_counter() - start, 1e-9),
                           is_step_fraction=n_is / n_steps if n_steps else 0.0,
                           loss_curve=list(loss_curve), n_steps=n_steps, n_is_steps=n_is,
                           work_units=count_work(passes, model))

    for epoch in range(int(cfg.epochs)):
        if cfg.decay_epoch is not None and epoch == cfg.decay_epoch:
            lr *= cfg.lr_decay
        epoch_losses = []
        for _ in range(steps_per_epoch):
            try:
                if cfg.use_importance_sampling:
                    idx = rng.choice(m, size=B, replace=False)
                    presample = (X[idx], y[idx])
                    scores = score_examples(model, presample)
                    decision = do_sgd_test(scores, B, b)
                    epoch_losses.append(float(np.mean(scores)))
                    if decision.use_is:
                        model = is_sgd_step(model, presample, b, lr, cfg.l2_weight, rng, scores=scores)
                        n_is += 1
                    else:
                        model = vanilla_sgd_step(model, (presample[0][:b], presample[1][:b]),
                                                 lr, cfg.l2_weight)
                else:
                    idx = rng.choice(m, size=b, replace=False)
                    loss, grads = mlp_forward_backward(model, (X[idx], y[idx]), cfg.l2_weight)
                    epoch_losses.append(loss)
                    model = model.apply_update(grads, lr)
            except TrainingError as e:
                raise TrainingError(f"학습 발산 (epoch {epoch + 1}): {e.message}",
                                    partial_report=partial(), epoch=epoch + 1) from e
            n_steps += 1
            passes += step_passes
            if not all(np.all(np.isfinite(W)) for W, _ in model.params):
                raise TrainingError(f"학습 발산 (epoch {epoch + 1}): 파라미터가 유한하지 않습니다",
                                    partial_report=partial(), epoch=epoch + 1)

        epoch_loss = float(np.mean(epoch_losses))
        if not math.isfinite(epoch_loss):
            raise TrainingError(f"학습 발산 (epoch {epoch + 1})", partial_report=partial(), epoch=epoch + 1)
        loss_curve.append(epoch_loss)
        logger.debug(f"epoch {epoch + 1}/{cfg.epochs}: loss={epoch_loss:.4f}, lr={lr:.3g}")

    val_error = classification_error(model, dataset.X_val, dataset.y_val)
    passes += dataset.X_val.shape[0] * FORWARD_SHARE
    cost = max(time.perf_counter() - start, 1e-9)
    return TrainReport(validation_error=val_error, cost_seconds=cost,
                       is_step_fraction=n_is / n_steps if n_steps else 0.0,
                       loss_curve=loss_curve, n_steps=n_steps, n_is_steps=n_is,
                       work_units=count_work(passes, model))


def train_model(cfg: TrainerConfig, dataset, rng: Optional[np.random.Generator] = None
                ) -> Tuple[MlpModel, TrainReport]:
    """Vanilla SGD training that also returns the network (used for final retraining)."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    X, y = dataset.X_train, dataset.y_train
    m = X.shape[0]
    widths = (X.shape[1],) + tuple(cfg.hidden_widths) + (dataset.n_classes,)
    model = MlpModel.init(widths, rng)
    b = min(int(cfg.batch_size), m)
    lr = cfg.learning_rate
    loss_curve = []
    start = time.perf_counter()
    for epoch in range(int(cfg.epochs)):
        if cfg.decay_epoch is not None and epoch == cfg.decay_epoch:
            lr *= cfg.lr_decay
        order = rng.permutation(m)
        losses = []
        for s in range(0, m, b):
            idx = order[s:s + b]
            loss, grads = mlp_forward_backward(model, (X[idx], y[idx]), cfg.l2_weight)
            losses.append(loss)
            model = model.apply_update(grads, lr)
        loss_curve.append(float(np.mean(losses)))
        if not math.isfinite(loss_curve[-1]):
            raise TrainingError(f"재학습 발산 (epoch {epoch + 1})", epoch=epoch + 1)
    passes = int(cfg.epochs) * m + dataset.X_val.shape[0] * FORWARD_SHARE
    report = TrainReport(validation_error=classification_error(model, dataset.X_val, dataset.y_val),
                         cost_seconds=max(time.perf_counter() - start, 1e-9),
                         is_step_fraction=0.0, loss_curve=loss_curve,
                         n_steps=int(cfg.epochs) * math.ceil(m / b),
                         work_units=count_work(passes, model))
    return model, report
