"""
Classification datasets for the MLP-tuning problems.

Sources are either a comma-separated file (header row, feature columns, then
an integer label column) or one of the built-in generators. Features are
standardized per column on load. Row numbers in errors are file line numbers
(the header is line 1).
"""
import csv
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..errors import DatasetError
from ..logger import log_file_operation

logger = logging.getLogger(__name__)

GLYPH_SIZE = 8
DIGITS_PER_CLASS = 60


@dataclass(frozen=True, eq=False)
class LabeledData:
    """표준화된 특징 행렬과 레이블"""

    X: np.ndarray
    y: np.ndarray
    n_classes: int
    name: str = ""

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])


@dataclass(frozen=True, eq=False)
class Dataset:
    """학습/검증(/테스트) 분할"""

    X_train: np.ndarray
    y_train: np.ndarray
    X_val: np.ndarray
    y_val: np.ndarray
    n_classes: int
    X_test: Optional[np.ndarray] = None
    y_test: Optional[np.ndarray] = None
    name: str = ""

    @property
    def n_train(self) -> int:
        return int(self.X_train.shape[0])

    def subsample(self, fraction: float, rng: np.random.Generator) -> 'Dataset':
        """학습 세트를 균일하게 부분 추출 (검증 세트는 유지)"""
        n = max(int(np.ceil(fraction * self.n_train)), min(self.n_train, 2))
        idx = np.sort(rng.choice(self.n_train, size=n, replace=False))
        return Dataset(self.X_train[idx], self.y_train[idx], self.X_val, self.y_val,
                       self.n_classes, self.X_test, self.y_test, self.name)

    def merged_train(self) -> 'Dataset':
        """학습+검증을 합쳐 학습하고 테스트 세트로 평가하는 분할"""
        if self.X_test is None:
            raise DatasetError("테스트 분할이 없습니다 (final_retrain 필요)")
        return Dataset(np.vstack([self.X_train, self.X_val]),
                       np.concatenate([self.y_train, self.y_val]),
                       self.X_test, self.y_test, self.n_classes, name=self.name)


def standardize_columns(X: np.ndarray) -> np.ndarray:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 1e-12, std, 1.0)
    return (X - mean) / std


def two_moons(n: int = 500, noise: float = 0.1, seed: int = 0) -> LabeledData:
    """두 개의 반달 모양 2-클래스 데이터"""
    rng = np.random.default_rng(seed)
    n_a = n // 2
    n_b = n - n_a
    angle_a = rng.uniform(0.0, np.pi, n_a)
    angle_b = rng.uniform(0.0, np.pi, n_b)
    a = np.column_stack([np.cos(angle_a), np.sin(angle_a)])
    b = np.column_stack([1.0 - np.cos(angle_b), 0.5 - np.sin(angle_b)])
    X = np.vstack([a, b]) + rng.normal(0.0, noise, size=(n, 2))
    y = np.concatenate([np.zeros(n_a, dtype=int), np.ones(n_b, dtype=int)])
    order = rng.permutation(n)
    return LabeledData(standardize_columns(X[order]), y[order], 2, 'synthetic-2class')


def _glyph_templates(rng: np.random.Generator) -> np.ndarray:
    """10 fixed 8x8 stroke templates."""
    templates = np.zeros((10, GLYPH_SIZE, GLYPH_SIZE))
    for k in range(10):
        g = templates[k]
        # each class gets a distinct combination of bars plus a seeded random stroke
        g[1 + k % 3, 1:7] = 1.0
        g[1:7, 1 + (k // 3) % 3 * 2] = 1.0
        if k % 2:
            g[6, 1:7] = 1.0
        if k >= 5:
            np.fill_diagonal(g[1:7, 1:7], 1.0)
        r, c = rng.integers(0, GLYPH_SIZE, size=2)
        g[r, :] = np.maximum(g[r, :], 0.5)
        g[:, c] = np.maximum(g[:, c], 0.5)
    return templates


def digits_small(per_class: int = DIGITS_PER_CLASS, noise: float = 0.35, seed: int = 0) -> LabeledData:
    """8x8 숫자형 10-클래스 데이터 (템플릿 + 이동 + 잡음)"""
    rng = np.random.default_rng(seed)
    templates = _glyph_templates(np.random.default_rng(1234))
    rows, labels = [], []
    for k in range(10):
        for _ in range(per_class):
            shift = rng.integers(-1, 2, size=2)
            img = np.roll(templates[k], tuple(shift), axis=(0, 1))
            img = img + rng.normal(0.0, noise, size=img.shape)
            rows.append(img.ravel())
            labels.append(k)
    X = np.asarray(rows)
    y = np.asarray(labels, dtype=int)
    order = rng.permutation(y.size)
    return LabeledData(standardize_columns(X[order]), y[order], 10, 'digits-small')


BUILTIN_DATASETS: Dict[str, str] = {
    'synthetic-2class': "두 개의 반달 2-클래스 데이터 (500 x 2)",
    'digits-small': "8x8 숫자형 10-클래스 데이터 (600 x 64)",
}


def _infer_classes(y: np.ndarray, line_nos: List[int]) -> int:
    """레이블이 0..k-1을 빠짐없이 채워야 k개 클래스로 인정"""
    present = np.unique(y)
    classes = len(present)
    if np.array_equal(present, np.arange(classes)):
        return classes
    bad = int(np.flatnonzero(y >= classes)[0])
    raise DatasetError(
        f"{line_nos[bad]}행의 레이블 {int(y[bad])} 때문에 레이블이 0..{classes - 1}로 연속되지 않습니다 "
        f"(관측된 레이블: {present.tolist()})", row=line_nos[bad])


def _read_csv(path: str, n_classes: Optional[int]) -> LabeledData:
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            lines = list(csv.reader(f))
    except OSError as e:
        log_file_operation(logger, "읽기", path, success=False, error_msg=str(e))
        raise DatasetError(f"데이터 파일을 읽을 수 없습니다: {path}", path=path) from e

    if len(lines) < 2:
        raise DatasetError(f"헤더와 데이터 행이 필요합니다: {path}", path=path)
    width = len(lines[0])
    if width < 2:
        raise DatasetError("특징 열과 레이블 열이 필요합니다", row=1)

    features, labels, line_nos = [], [], []
    for line_no, cells in enumerate(lines[1:], start=2):
        if not cells:
            continue
        if len(cells) != width:
            raise DatasetError(f"{line_no}행의 열 개수가 {len(cells)}개입니다 (기대 {width}개)", row=line_no)
        try:
            values = [float(c) for c in cells[:-1]]
            label_value = float(cells[-1])
        except ValueError as e:
            raise DatasetError(f"{line_no}행에 숫자가 아닌 값이 있습니다", row=line_no) from e
        if not all(np.isfinite(values)) or not label_value.is_integer() or label_value < 0:
            raise DatasetError(f"{line_no}행의 값 또는 레이블이 잘못되었습니다", row=line_no)
        label = int(label_value)
        if n_classes is not None and label >= n_classes:
            raise DatasetError(f"{line_no}행의 레이블 {label}은 클래스 수 {n_classes} 밖입니다", row=line_no)
        features.append(values)
        labels.append(label)
        line_nos.append(line_no)

    if not labels:
        raise DatasetError(f"데이터 행이 없습니다: {path}", path=path)
    y = np.asarray(labels, dtype=int)
    classes = _infer_classes(y, line_nos) if n_classes is None else int(n_classes)
    log_file_operation(logger, "읽기", path)
    return LabeledData(standardize_columns(np.asarray(features, dtype=float)), y, classes,
                       os.path.splitext(os.path.basename(path))[0])


def load_dataset(source: str, seed: int = 0, n_classes: Optional[int] = None) -> LabeledData:
    """내장 데이터 이름 또는 CSV 경로에서 데이터 로드"""
    if source == 'synthetic-2class':
        return two_moons(seed=seed)
    if source == 'digits-small':
        return digits_small(seed=seed)
    if not os.path.isfile(source):
        raise DatasetError(f"알 수 없는 데이터 소스입니다: {source}", source=source,
                           builtin=sorted(BUILTIN_DATASETS))
    return _read_csv(source, n_classes)


def split_dataset(data: LabeledData, seed: int = 0, holdout_test: bool = False) -> Dataset:
    """결정적 분할: 80/20 학습/검증, holdout_test면 60/20/20"""
    if data.n_rows < 5:
        raise DatasetError(f"분할하기에 행이 너무 적습니다: {data.n_rows}")
    order = np.random.default_rng(seed).permutation(data.n_rows)
    X, y = data.X[order], data.y[order]
    n = data.n_rows
    if holdout_test:
        a, b = int(round(0.6 * n)), int(round(0.8 * n))
        return Dataset(X[:a], y[:a], X[a:b], y[a:b], data.n_classes, X[b:], y[b:], name=data.name)
    a = int(round(0.8 * n))
    return Dataset(X[:a], y[:a], X[a:], y[a:], data.n_classes, name=data.name)
