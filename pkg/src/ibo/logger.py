# src/ibo/logger.py
import logging
import os
from datetime import datetime

import colorlog

FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
CONSOLE_FORMAT = '%(log_color)s%(levelname)s%(reset)s - %(message)s'
LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red',
}


def _file_handler(log_dir: str, prefix: str) -> logging.Handler:
    os.makedirs(log_dir, exist_ok=True)
    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    handler = logging.FileHandler(os.path.join(log_dir, f"{prefix}_{stamp}.log"), encoding='utf-8')
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def _console_handler(level: int) -> logging.Handler:
    handler = colorlog.StreamHandler()
    handler.setLevel(level)
    handler.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT, log_colors=LOG_COLORS))
    return handler


def setup_logger(name='ibo', log_dir=None, console_level=logging.INFO):
    """
    실험 로거 설정: DEBUG 파일 로그 (IBO_LOG_DIR, 기본값 logs) + 컬러 콘솔 로그.
    다시 호출하면 기존 핸들러를 교체합니다.
    """
    log_dir = log_dir or os.getenv('IBO_LOG_DIR', 'logs')
    prefix = name.rsplit('.', 1)[-1]

    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    logger.addHandler(_file_handler(log_dir, prefix))
    logger.addHandler(_console_handler(console_level))
    return logger


def log_processing_step(logger, step, message, level='info'):
    """처리 단계별 로깅 헬퍼 함수"""
    log = getattr(logger, level.lower(), logger.info)
    log(f"[단계 {step}] {message}")


def log_file_operation(logger, operation, filepath, success=True, error_msg=None):
    """파일 작업 로깅 헬퍼 함수"""
    if success:
        logger.info(f"파일 {operation} 성공: {filepath}")
    else:
        logger.error(f"파일 {operation} 실패: {filepath} - {error_msg}")


def log_bo_iteration(logger, strategy, iteration, y, cost, status, details=None):
    """
    BO 관측 1건 로깅 (성공은 INFO, 학습 중단 등은 WARNING)
    """
    parts = [f"[{strategy}] #{iteration}", f"y={y:.6g}", f"비용={cost:.4g}", f"상태={status}"]
    if details:
        parts.append(details)
    level = logging.INFO if status in ('성공', 'SUCCESS') else logging.WARNING
    logger.log(level, " | ".join(parts))
