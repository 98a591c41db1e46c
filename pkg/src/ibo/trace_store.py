"""
Trace persistence: one JSON record per line, appended with a single write.

Layout of an output directory::

    <out>/run_meta.json
    <out>/<strategy>/seed_<n>.jsonl
"""
import logging
import os
from collections import defaultdict
from typing import Any, Dict, List, Tuple

import ujson

from .errors import TraceIOError
from .logger import log_file_operation
from .models.trace_model import TraceRecord

logger = logging.getLogger(__name__)

RUN_META_FILE = 'run_meta.json'
TRACE_SUFFIX = '.jsonl'


def trace_path(out_dir: str, strategy: str, seed: int) -> str:
    return os.path.join(out_dir, strategy, f"seed_{seed}{TRACE_SUFFIX}")


def reset_trace(path: str) -> None:
    """새 실행 전에 기존 트레이스 파일 비우기"""
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'w', encoding='utf-8'):
            pass
    except OSError as e:
        raise TraceIOError(f"트레이스 파일 초기화 실패: {path}", path=path, reason=str(e)) from e


def append_trace_record(path: str, record: TraceRecord) -> None:
    """Append one complete line with a single O_APPEND write followed by fsync."""
    line = (ujson.dumps(record.to_dict(), ensure_ascii=False) + "\n").encode('utf-8')
    try:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        fd = os.open(path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            written = os.write(fd, line)
            if written != len(line):
                raise OSError(f"short write: {written}/{len(line)} bytes")
            os.fsync(fd)
        finally:
            os.close(fd)
    except OSError as e:
        log_file_operation(logger, "추가", path, success=False, error_msg=str(e))
        raise TraceIOError(f"트레이스 기록 실패: {path}", path=path, reason=str(e)) from e


def read_trace(path: str) -> List[TraceRecord]:
    """트레이스 파일 읽기 (끝의 불완전한 줄은 무시)"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise TraceIOError(f"트레이스 파일을 읽을 수 없습니다: {path}", path=path) from e

    lines = text.split("\n")
    # the last element is '' after a complete final line, or a partial write otherwise
    complete, tail = lines[:-1], lines[-1]
    if tail:
        logger.warning(f"불완전한 마지막 줄 무시: {path}")

    records = []
    for line_no, line in enumerate(complete, start=1):
        if not line.strip():
            continue
        try:
            records.append(TraceRecord.from_dict(ujson.loads(line)))
        except (ValueError, KeyError, TypeError) as e:
            raise TraceIOError(f"{path}:{line_no} 레코드 파싱 실패", path=path, line=line_no) from e
    return records


def write_run_meta(out_dir: str, meta: Dict[str, Any]) -> str:
    path = os.path.join(out_dir, RUN_META_FILE)
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(ujson.dumps(meta, indent=2, ensure_ascii=False))
    except OSError as e:
        raise TraceIOError(f"실행 메타데이터 저장 실패: {path}", path=path) from e
    log_file_operation(logger, "저장", path)
    return path


def read_run_meta(in_dir: str) -> Dict[str, Any]:
    path = os.path.join(in_dir, RUN_META_FILE)
    if not os.path.isfile(path):
        return {}
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return ujson.loads(f.read())
    except (OSError, ValueError) as e:
        raise TraceIOError(f"실행 메타데이터를 읽을 수 없습니다: {path}", path=path) from e


def load_traces(in_dir: str) -> Tuple[Dict[str, List[List[TraceRecord]]], Dict[str, Any]]:
    """출력 디렉터리의 모든 트레이스를 전략별로 묶어 반환"""
    if not os.path.isdir(in_dir):
        raise TraceIOError(f"입력 디렉터리가 없습니다: {in_dir}", path=in_dir)
    grouped: Dict[str, List[List[TraceRecord]]] = defaultdict(list)
    for strategy in sorted(os.listdir(in_dir)):
        sub = os.path.join(in_dir, strategy)
        if not os.path.isdir(sub):
            continue
        files = sorted((f for f in os.listdir(sub) if f.endswith(TRACE_SUFFIX)),
                       key=lambda f: (len(f), f))
        for name in files:
            records = read_trace(os.path.join(sub, name))
            if records:
                grouped[strategy].append(records)
    logger.debug(f"트레이스 로드: {', '.join(f'{k}={len(v)}' for k, v in grouped.items())}")
    return dict(grouped), read_run_meta(in_dir)
