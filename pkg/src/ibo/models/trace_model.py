"""
Trace record model: one line of a run's trace file.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

SCHEMA_VERSION = 1

# measured (hardware-dependent) fields; everything else is fixed by the seed
TIMING_FIELDS = ('cost', 'cum_cost', 'wall_seconds')


@dataclass
class TraceRecord:
    """BO 트레이스 레코드 (관측 1개 = 1행)"""

    # 반복 정보
    iter: int
    phase: str  # "init" | "bo"

    # 질의 정보 (비정규화)
    x: Dict[str, float]
    task: float
    y: float
    cost: float
    cum_cost: float

    # 현재 최선 (incumbent)
    incumbent_x: Dict[str, float]
    incumbent_pred: float

    # 실행 식별
    strategy: str = ""
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    # 부가 정보
    task_normalized: float = 1.0
    presample_factor: Optional[float] = None
    incumbent_true: Optional[float] = None
    is_step_fraction: Optional[float] = None
    model_cost: Optional[float] = None
    wall_seconds: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def incumbent_value(self) -> float:
        """요약에 사용할 incumbent 값 (참값 우선, 없으면 예측값)"""
        if self.incumbent_true is not None:
            return self.incumbent_true
        return self.incumbent_pred

    def to_dict(self) -> Dict[str, Any]:
        """딕셔너리로 변환"""
        return {
            'schema_version': self.schema_version,
            'strategy': self.strategy,
            'seed': self.seed,
            'iter': self.iter,
            'phase': self.phase,
            'x': dict(self.x),
            'task': self.task,
            'task_normalized': self.task_normalized,
            'presample_factor': self.presample_factor,
            'y': self.y,
            'cost': self.cost,
            'cum_cost': self.cum_cost,
            'incumbent_x': dict(self.incumbent_x),
            'incumbent_pred': self.incumbent_pred,
            'incumbent_true': self.incumbent_true,
            'is_step_fraction': self.is_step_fraction,
            'model_cost': self.model_cost,
            'wall_seconds': self.wall_seconds,
            'extra': dict(self.extra),
        }

    def non_timing_dict(self) -> Dict[str, Any]:
        """측정 시간 필드를 뺀 딕셔너리 (같은 시드의 실행끼리 비교용)"""
        data = self.to_dict()
        for key in TIMING_FIELDS:
            data.pop(key)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TraceRecord':
        """딕셔너리에서 생성 (이후 스키마에 추가된 필드는 무시)"""
        return cls(
            iter=int(data['iter']),
            phase=data.get('phase', 'bo'),
            x={k: float(v) for k, v in data['x'].items()},
            task=float(data['task']),
            y=float(data['y']),
            cost=float(data['cost']),
            cum_cost=float(data['cum_cost']),
            incumbent_x={k: float(v) for k, v in data['incumbent_x'].items()},
            incumbent_pred=float(data['incumbent_pred']),
            strategy=data.get('strategy', ''),
            seed=int(data.get('seed', 0)),
            schema_version=int(data.get('schema_version', SCHEMA_VERSION)),
            task_normalized=float(data.get('task_normalized', 1.0)),
            presample_factor=data.get('presample_factor'),
            incumbent_true=data.get('incumbent_true'),
            is_step_fraction=data.get('is_step_fraction'),
            model_cost=data.get('model_cost'),
            wall_seconds=float(data.get('wall_seconds', 0.0)),
            extra=dict(data.get('extra') or {}),
        )
