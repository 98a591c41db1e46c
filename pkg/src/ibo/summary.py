"""
Multi-seed aggregation of traces at fixed budget fractions.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import ReportingError
from .models.config_model import BudgetMode
from .models.trace_model import TraceRecord

logger = logging.getLogger(__name__)

BUDGET_FRACTIONS = (0.25, 0.5, 0.75, 1.0)

Traces = Dict[str, List[List[TraceRecord]]]


@dataclass(frozen=True)
class SummaryCell:
    """한 (전략, 예산 비율) 셀의 통계"""

    median: float
    q25: float
    q75: float
    mean: float
    std: float
    n: int

    @classmethod
    def from_values(cls, values: Sequence[float]) -> 'SummaryCell':
        v = np.asarray(values, dtype=float)
        q25, median, q75 = np.percentile(v, [25, 50, 75])
        return cls(float(median), float(q25), float(q75), float(v.mean()), float(v.std()), int(v.size))


@dataclass
class SummaryTable:
    """전략 x 예산 비율 요약 표"""

    budget_mode: BudgetMode
    budget: float
    strategies: List[str] = field(default_factory=list)
    fractions: Tuple[float, ...] = BUDGET_FRACTIONS
    cells: Dict[Tuple[str, float], SummaryCell] = field(default_factory=dict)

    def cell(self, strategy: str, fraction: float) -> SummaryCell:
        return self.cells[(strategy, fraction)]

    def rows(self) -> List[Tuple[str, float, SummaryCell]]:
        return [(s, f, self.cells[(s, f)]) for s in self.strategies for f in self.fractions]


def _check(traces: Traces) -> None:
    if not traces:
        raise ReportingError("요약할 트레이스가 없습니다")
    for strategy, runs in traces.items():
        if not runs:
            raise ReportingError(f"전략 '{strategy}'의 트레이스가 없습니다", strategy=strategy)
        if any(not run for run in runs):
            raise ReportingError(f"전략 '{strategy}'에 빈 트레이스가 있습니다", strategy=strategy)


def shared_budget(traces: Traces, mode: BudgetMode) -> float:
    """모든 트레이스가 도달한 예산 (반복 수 또는 최종 누적 비용의 최솟값)"""
    _check(traces)
    runs = [run for group in traces.values() for run in group]
    if mode == BudgetMode.COST:
        return min(run[-1].cum_cost for run in runs)
    return float(min(len(run) for run in runs))


def truncate(run: Sequence[TraceRecord], fraction: float, budget: float, mode: BudgetMode) -> TraceRecord:
    """예산 비율에서 마지막으로 완료된 레코드 (하나도 없으면 첫 레코드)"""
    if mode == BudgetMode.COST:
        limit = fraction * budget * (1.0 + 1e-12)
        done = [r for r in run if r.cum_cost <= limit]
        return done[-1] if done else run[0]
    n = max(1, int(math.ceil(fraction * budget - 1e-9)))
    return run[min(n, len(run)) - 1]


def summarize(traces: Traces, budget_mode: BudgetMode = BudgetMode.ITERATIONS) -> SummaryTable:
    """Median and quartiles of incumbent values at 25/50/75/100% of the shared budget."""
    budget = shared_budget(traces, budget_mode)
    table = SummaryTable(budget_mode=budget_mode, budget=budget, strategies=list(traces))
    for strategy, runs in traces.items():
        for fraction in BUDGET_FRACTIONS:
            values = [truncate(run, fraction, budget, budget_mode).incumbent_value for run in runs]
            table.cells[(strategy, fraction)] = SummaryCell.from_values(values)
    logger.debug(f"요약 완료: {len(table.strategies)}개 전략, 예산 {budget:.4g} ({budget_mode.value})")
    return table


def median_curve(runs: Sequence[Sequence[TraceRecord]], axis: str = 'cost', n_points: int = 100):
    """Median and quartile band of the incumbent value over cumulative cost or iteration."""
    if axis == 'cost':
        end = min(run[-1].cum_cost for run in runs)
        start = max(run[0].cum_cost for run in runs)
        grid = np.linspace(min(start, end), end, n_points)

        def at(run, g):
            done = [r for r in run if r.cum_cost <= g * (1.0 + 1e-12)]
            return (done[-1] if done else run[0]).incumbent_value
    else:
        length = min(len(run) for run in runs)
        grid = np.arange(length, dtype=float)

        def at(run, g):
            return run[int(g)].incumbent_value

    values = np.array([[at(run, g) for g in grid] for run in runs])
    q25, median, q75 = np.percentile(values, [25, 50, 75], axis=0)
    return grid, median, q25, q75
