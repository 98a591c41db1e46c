"""
IBO 구조화 예외 계층.

Every error carries a stable ``code`` that the CLI prints as a single
machine-readable line, plus a ``details`` dict for the human message.
"""
from typing import Any, Dict, List, Optional


class IBOError(Exception):
    """IBO 기본 예외"""

    code = "ibo_error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """딕셔너리로 변환 (CLI 오류 보고용)"""
        payload: Dict[str, Any] = {'error': self.code, 'message': self.message}
        for key, value in self.details.items():
            if isinstance(value, (str, int, float, bool, list)) or value is None:
                payload[key] = value
        return payload


class KernelError(IBOError):
    """커널 입력 오류 (차원 불일치, 길이척도 <= 0, 과제 값 범위 밖)"""
    code = "kernel_invalid"


class GPFitError(IBOError):
    """GP 적합 실패 (jitter 증가 후에도 Cholesky 실패, NaN 데이터)"""
    code = "gp_fit_failed"


class McmcError(IBOError):
    """하이퍼파라미터 사전분포/샘플러 설정 오류"""
    code = "mcmc_invalid"


class AcquisitionError(IBOError):
    """획득 함수 계산 실패"""
    code = "acquisition_failed"


class TrainingError(IBOError):
    """내부 학습 루프 발산 (partial_report 포함)"""
    code = "training_diverged"

    def __init__(self, message: str, partial_report: Any = None, **details: Any):
        super().__init__(message, **details)
        self.partial_report = partial_report


class ProblemError(IBOError):
    """블랙박스 문제 정의/평가 오류"""
    code = "problem_invalid"


class DatasetError(IBOError):
    """데이터셋 로드 오류 (행 번호 포함)"""
    code = "dataset_invalid"

    def __init__(self, message: str, row: Optional[int] = None, **details: Any):
        super().__init__(message, row=row, **details)
        self.row = row


class ConfigError(IBOError):
    """실험 설정 오류 (필드 이름 포함)"""
    code = "config_invalid"

    def __init__(self, message: str, field: Optional[str] = None,
                 valid: Optional[List[str]] = None, **details: Any):
        super().__init__(message, field=field, valid=valid, **details)
        self.field = field
        self.valid = valid


class TraceIOError(IBOError):
    """트레이스 파일 입출력 오류"""
    code = "trace_io_failed"


class ReportingError(IBOError):
    """요약/내보내기 오류"""
    code = "reporting_failed"


class RunAbortedError(IBOError):
    """BO 실행 중단 (부분 트레이스 포함)"""
    code = "run_aborted"

    def __init__(self, message: str, trace: Optional[list] = None, **details: Any):
        super().__init__(message, **details)
        self.trace = trace or []
