"""
Small fully-connected ReLU network with a softmax cross-entropy head.

Parameters are kept as plain numpy arrays, one (W, b) pair per layer, with
W shaped (fan_in, fan_out). Updates return a new model; arrays are never
modified in place.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import TrainingError

logger = logging.getLogger(__name__)

Params = List[Tuple[np.ndarray, np.ndarray]]
Batch = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class MlpModel:
    """다층 퍼셉트론 (ReLU 은닉층 + softmax 출력)"""

    widths: Tuple[int, ...]
    params: Tuple[Tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        widths = tuple(int(w) for w in self.widths)
        object.__setattr__(self, 'widths', widths)
        object.__setattr__(self, 'params', tuple((W, b) for W, b in self.params))
        if len(widths) < 2 or any(w < 1 for w in widths):
            raise TrainingError(f"층 너비는 2개 이상의 양의 정수여야 합니다: {widths}")
        if len(self.params) != len(widths) - 1:
            raise TrainingError("층 수와 파라미터 수가 맞지 않습니다")
        for (W, b), n_in, n_out in zip(self.params, widths[:-1], widths[1:]):
            if W.shape != (n_in, n_out) or b.shape != (n_out,):
                raise TrainingError(f"파라미터 형태 불일치: W{W.shape}, b{b.shape}, 기대 ({n_in}, {n_out})")

    @classmethod
    def init(cls, widths: Sequence[int], rng: np.random.Generator) -> 'MlpModel':
        """He initialization, zero biases."""
        widths = tuple(int(w) for w in widths)
        params = tuple(
            (rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_in, n_out)), np.zeros(n_out))
            for n_in, n_out in zip(widths[:-1], widths[1:]))
        return cls(widths, params)

    @classmethod
    def zeros(cls, widths: Sequence[int]) -> 'MlpModel':
        widths = tuple(int(w) for w in widths)
        params = tuple((np.zeros((n_in, n_out)), np.zeros(n_out))
                       for n_in, n_out in zip(widths[:-1], widths[1:]))
        return cls(widths, params)

    @property
    def n_classes(self) -> int:
        return self.widths[-1]

    @property
    def n_params(self) -> int:
        return sum(W.size + b.size for W, b in self.params)

    def flat(self) -> np.ndarray:
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in self.params])

    def with_flat(self, theta: np.ndarray) -> 'MlpModel':
        return MlpModel(self.widths, unflatten(theta, self.widths))

    def apply_update(self, grads: Params, lr: float) -> 'MlpModel':
        if lr == 0.0:
            return self
        return MlpModel(self.widths, tuple((W - lr * gW, b - lr * gb)
                                           for (W, b), (gW, gb) in zip(self.params, grads)))


def unflatten(theta: np.ndarray, widths: Sequence[int]) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    out = []
    pos = 0
    for n_in, n_out in zip(widths[:-1], widths[1:]):
        W = theta[pos:pos + n_in * n_out].reshape(n_in, n_out)
        pos += n_in * n_out
        b = theta[pos:pos + n_out]
        pos += n_out
        out.append((np.array(W), np.array(b)))
    return tuple(out)


def _check_batch(model: MlpModel, batch: Batch) -> Batch:
    X, y = batch
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).ravel()
    if X.shape[0] == 0:
        raise TrainingError("배치가 비어 있습니다")
    if X.shape[1] != model.widths[0]:
        raise TrainingError(f"입력 너비 불일치: 데이터 {X.shape[1]}, 모델 {model.widths[0]}")
    if y.shape[0] != X.shape[0] or np.any(y < 0) or np.any(y >= model.n_classes):
        raise TrainingError("레이블 개수 또는 범위가 잘못되었습니다")
    return X, y


def _forward(model: MlpModel, X: np.ndarray):
    """Activations per layer plus log-softmax outputs."""
    acts = [X]
    pre = []
    h = X
    last = len(model.params) - 1
    for i, (W, b) in enumerate(model.params):
        z = h @ W + b
        pre.append(z)
        h = z if i == last else np.maximum(z, 0.0)
        if i != last:
            acts.append(h)
    z = pre[-1]
    z = z - np.max(z, axis=1, keepdims=True)
    log_probs = z - np.log(np.sum(np.exp(z), axis=1, keepdims=True))
    return acts, pre, log_probs


def _per_example_losses(log_probs: np.ndarray, y: np.ndarray) -> np.ndarray:
    return -log_probs[np.arange(y.shape[0]), y]


def predict_proba(model: MlpModel, X) -> np.ndarray:
    _, _, log_probs = _forward(model, np.atleast_2d(np.asarray(X, dtype=float)))
    return np.exp(log_probs)


def l2_penalty(model: MlpModel, l2_weight: float) -> float:
    return 0.5 * l2_weight * sum(float(np.sum(W * W)) for W, _ in model.params)


def mlp_forward_backward(model: MlpModel, batch: Batch, l2_weight: float,
                         sample_weights: Optional[np.ndarray] = None) -> Tuple[float, Params]:
    """Mean (optionally weighted) cross-entropy plus L2, and its gradients.

    With ``sample_weights`` the data term is (1/n) sum_i w_i loss_i. The L2
    term is never weighted.
    """
    X, y = _check_batch(model, batch)
    n = X.shape[0]
    w = np.ones(n) if sample_weights is None else np.asarray(sample_weights, dtype=float)

    acts, pre, log_probs = _forward(model, X)
    losses = _per_example_losses(log_probs, y)
    loss = float(np.dot(w, losses) / n) + l2_penalty(model, l2_weight)
    if not np.isfinite(loss):
        raise TrainingError("순전파 손실이 유한하지 않습니다", loss=str(loss))

    delta = np.exp(log_probs)
    delta[np.arange(n), y] -= 1.0
    delta *= (w / n)[:, None]

    grads: Params = []
    for i in range(len(model.params) - 1, -1, -1):
        W, _ = model.params[i]
        gW = acts[i].T @ delta + l2_weight * W
        gb = delta.sum(axis=0)
        grads.append((gW, gb))
        if i > 0:
            delta = (delta @ W.T) * (pre[i - 1] > 0)
    grads.reverse()
    return loss, grads


def score_examples(model: MlpModel, examples: Batch) -> np.ndarray:
    """Per-example cross-entropy (forward pass only)."""
    X, y = _check_batch(model, examples)
    _, _, log_probs = _forward(model, X)
    scores = _per_example_losses(log_probs, y)
    if not np.all(np.isfinite(scores)):
        raise TrainingError("예제 점수가 유한하지 않습니다")
    return np.maximum(scores, 0.0)


def per_example_gradients(model: MlpModel, batch: Batch) -> np.ndarray:
    """Gradient of each example's loss (no L2), flattened: (n_examples, n_params)."""
    X, y = _check_batch(model, batch)
    n = X.shape[0]
    acts, pre, log_probs = _forward(model, X)
    delta = np.exp(log_probs)
    delta[np.arange(n), y] -= 1.0

    blocks = []
    for i in range(len(model.params) - 1, -1, -1):
        W, _ = model.params[i]
        gW = np.einsum('ni,no->nio', acts[i], delta).reshape(n, -1)
        blocks.append(np.hstack([gW, delta]))
        if i > 0:
            delta = (delta @ W.T) * (pre[i - 1] > 0)
    blocks.reverse()
    return np.hstack(blocks)


def classification_error(model: MlpModel, X, y) -> float:
    """오분류율"""
    X, y = _check_batch(model, (X, y))
    return float(np.mean(np.argmax(predict_proba(model, X), axis=1) != y))
