# src/ibo/performance.py

import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Optional

import psutil

logger = logging.getLogger(__name__)


class ResourceMonitor:
    """
    BO 실행 자원 모니터링 클래스 (단계별 소요 시간, 메모리)
    """

    def __init__(self):
        self.metrics: Dict[str, Dict[str, Any]] = {}
        self.start_time = time.time()
        self.process = psutil.Process()
        self.stage_durations: Dict[str, list] = {}
        self.memory_peak_mb = 0.0

    def record_metric(self, name: str, value: float):
        """
        성능 지표를 기록합니다. 같은 이름은 한 항목에 누적 (최근값, 횟수, 합계, 최댓값).
        """
        now = time.time()
        entry = self.metrics.setdefault(name, {'count': 0, 'total': 0.0, 'max': value})
        entry.update(
            value=value,
            count=entry['count'] + 1,
            total=entry['total'] + value,
            max=max(entry['max'], value),
            timestamp=now,
            elapsed_since_start=now - self.start_time,
        )

    def get_memory_usage(self) -> Dict[str, float]:
        """
        현재 메모리 사용량을 반환합니다.
        """
        try:
            memory_info = self.process.memory_info()
            current_usage_mb = memory_info.rss / 1024 / 1024

            # 메모리 피크 업데이트
            if current_usage_mb > self.memory_peak_mb:
                self.memory_peak_mb = current_usage_mb

            return {
                'rss_mb': current_usage_mb,
                'percent': self.process.memory_percent(),
            }
        except psutil.Error:
            return {'rss_mb': 0.0, 'percent': 0.0}

    def record_stage(self, stage: str, duration: float):
        """단계 소요 시간 기록"""
        self.stage_durations.setdefault(stage, []).append(duration)

    def get_performance_summary(self) -> Dict[str, Any]:
        """
        성능 요약 정보를 반환합니다.
        """
        current_memory = self.get_memory_usage()
        mean_durations = {
            stage: sum(values) / len(values)
            for stage, values in self.stage_durations.items() if values
        }
        return {
            'total_runtime_seconds': time.time() - self.start_time,
            'current_memory_mb': current_memory['rss_mb'],
            'peak_memory_mb': self.memory_peak_mb,
            'mean_stage_seconds': mean_durations,
            'stage_counts': {k: len(v) for k, v in self.stage_durations.items()},
        }


@contextmanager
def performance_context(operation_name: str, monitor: Optional[ResourceMonitor] = None,
                        stage: Optional[str] = None):
    """
    성능 측정을 위한 컨텍스트 매니저
    """
    if monitor is None:
        monitor = ResourceMonitor()

    start_time = time.perf_counter()
    start_memory = monitor.get_memory_usage()

    logger.debug(f"{operation_name} 시작...")

    try:
        yield monitor
    finally:
        duration = time.perf_counter() - start_time
        end_memory = monitor.get_memory_usage()
        memory_delta = end_memory['rss_mb'] - start_memory['rss_mb']

        logger.debug(
            f"{operation_name} 완료 - 소요 시간: {duration:.2f}초, 메모리 증가: {memory_delta:+.1f}MB")

        monitor.record_stage(stage or operation_name, duration)
        monitor.record_metric(f'{stage or operation_name}_memory_delta', memory_delta)
