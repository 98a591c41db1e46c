"""
Search space and configuration point models.

Every point handed to the GPs lives in the unit cube; log-scaled dimensions
are normalized after the log transform.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..errors import ProblemError


class Scale(Enum):
    """차원 스케일"""
    LINEAR = "linear"
    LOG = "log"


class DimKind(Enum):
    """차원 자료형"""
    CONTINUOUS = "continuous"
    INTEGER = "integer"


@dataclass(frozen=True)
class ConfigPoint:
    """정규화된 [0,1]^d 하이퍼파라미터 점"""

    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, 'coords', coords)
        for i, c in enumerate(coords):
            if not np.isfinite(c) or c < 0.0 or c > 1.0:
                raise ProblemError(
                    f"좌표가 [0,1] 범위를 벗어났습니다: dim {i} = {c}", dim=i)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> 'ConfigPoint':
        return cls(tuple(np.clip(np.asarray(values, dtype=float), 0.0, 1.0)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Dimension:
    """탐색 공간의 한 차원"""

    name: str
    lower: float
    upper: float
    scale: Scale = Scale.LINEAR
    kind: DimKind = DimKind.CONTINUOUS

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ProblemError(
                f"차원 '{self.name}': lower < upper 조건 위반", field=self.name)
        if self.scale == Scale.LOG and self.lower <= 0:
            raise ProblemError(
                f"차원 '{self.name}': 로그 스케일은 lower > 0 필요", field=self.name)

    def to_unit(self, value: float) -> float:
        if self.scale == Scale.LOG:
            lo, hi, v = np.log(self.lower), np.log(self.upper), np.log(value)
        else:
            lo, hi, v = self.lower, self.upper, value
        return float(np.clip((v - lo) / (hi - lo), 0.0, 1.0))

    def from_unit(self, u: float) -> float:
        u = float(np.clip(u, 0.0, 1.0))
        if self.scale == Scale.LOG:
            value = float(np.exp(np.log(self.lower) + u * (np.log(self.upper) - np.log(self.lower))))
        else:
            value = self.lower + u * (self.upper - self.lower)
        if self.kind == DimKind.INTEGER:
            value = float(int(round(value)))
            value = min(max(value, np.ceil(self.lower)), np.floor(self.upper))
        return float(min(max(value, self.lower), self.upper))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'lower': self.lower,
            'upper': self.upper,
            'scale': self.scale.value,
            'kind': self.kind.value,
        }


@dataclass
class SearchSpace:
    """하이퍼파라미터 탐색 공간 (경계 상자)"""

    dims: List[Dimension] = field(default_factory=list)

    def __post_init__(self):
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ProblemError("차원 이름이 중복되었습니다", names=names)

    @property
    def dimension(self) -> int:
        """차원 수"""
        return len(self.dims)

    @property
    def names(self) -> List[str]:
        return [d.name for d in self.dims]

    def check(self, x: ConfigPoint) -> ConfigPoint:
        """점이 이 공간에 속하는지 검증"""
        if self.dimension == 0:
            raise ProblemError("빈 탐색 공간입니다")
        if x.dim != self.dimension:
            raise ProblemError(
                f"차원 불일치: 점 {x.dim}, 공간 {self.dimension}",
                expected=self.dimension, got=x.dim)
        return x

    def denormalize(self, x: ConfigPoint) -> Dict[str, float]:
        """정규화 좌표 -> 실제 하이퍼파라미터 값"""
        self.check(x)
        return {d.name: d.from_unit(u) for d, u in zip(self.dims, x.coords)}

    def normalize(self, values: Dict[str, float]) -> ConfigPoint:
        """실제 하이퍼파라미터 값 -> 정규화 좌표"""
        missing = [d.name for d in self.dims if d.name not in values]
        if missing:
            raise ProblemError(f"누락된 차원: {missing}", missing=missing)
        return ConfigPoint(tuple(d.to_unit(values[d.name]) for d in self.dims))

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """단위 상자에서 균일 표본 (n x d)"""
        if self.dimension == 0:
            raise ProblemError("빈 탐색 공간입니다")
        return rng.uniform(0.0, 1.0, size=(n, self.dimension))

    def to_dict(self) -> Dict[str, Any]:
        return {'dims': [d.to_dict() for d in self.dims]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SearchSpace':
        return cls([
            Dimension(
                name=d['name'],
                lower=float(d['lower']),
                upper=float(d['upper']),
                scale=Scale(d.get('scale', 'linear')),
                kind=DimKind(d.get('kind', 'continuous')),
            )
            for d in data.get('dims', [])
        ])


def as_matrix(points: Sequence[ConfigPoint]) -> np.ndarray:
    """ConfigPoint 목록 -> (n x d) 배열"""
    if not points:
        return np.zeros((0, 0))
    return np.vstack([p.array for p in points])
