"""
IBO 실험 명령줄 도구

    python main.py run --config config.json [--seed N] [--strategy NAME] [--out DIR] [--budget-mode MODE]
    python main.py summarize --in DIR [--format csv|svg|xlsx] [--budget-mode MODE]
    python main.py list-problems
"""
import argparse
import logging
import os
import sys
from pathlib import Path

import ujson

# 현재 파일의 부모 디렉터리를 sys.path에 추가
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

from src.ibo.config_parser import VALID_STRATEGIES, load_config  # noqa: E402
from src.ibo.errors import IBOError  # noqa: E402
from src.ibo.experiment import run_experiment  # noqa: E402
from src.ibo.exporter import EXPORT_FORMATS, export  # noqa: E402
from src.ibo.logger import setup_logger  # noqa: E402
from src.ibo.models.config_model import BudgetMode  # noqa: E402
from src.ibo.performance import ResourceMonitor  # noqa: E402
from src.ibo.problems import list_problems  # noqa: E402
from src.ibo.summary import summarize  # noqa: E402
from src.ibo.trace_store import load_traces  # noqa: E402

BUDGET_MODES = [m.value for m in BudgetMode]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="비용 인지 다중 충실도 BO 실험 도구")
    parser.add_argument("--verbose", "-v", action="store_true", help="상세 출력 (DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="실험 실행 (전략 x 시드별 트레이스 기록)")
    run.add_argument("--config", "-c", default="config.json", help="설정 파일 경로")
    run.add_argument("--seed", type=int, help="이 시드만 실행")
    run.add_argument("--strategy", choices=VALID_STRATEGIES, help="이 전략만 실행")
    run.add_argument("--out", "-o", help="출력 디렉터리 (기본값: 설정의 output_dir)")
    run.add_argument("--budget-mode", choices=BUDGET_MODES, help="요약 예산 정렬 방식")

    summ = sub.add_parser("summarize", help="트레이스 요약 및 내보내기")
    summ.add_argument("--in", dest="in_dir", required=True, help="run 출력 디렉터리")
    summ.add_argument("--format", "-f", choices=EXPORT_FORMATS, default="csv", help="내보내기 형식")
    summ.add_argument("--budget-mode", choices=BUDGET_MODES,
                      help="예산 정렬 방식 (기본값: 실행 시 저장된 값)")

    sub.add_parser("list-problems", help="내장 문제 목록")
    return parser


def report_error(error: IBOError) -> int:
    """한 줄 JSON 오류 + 사람이 읽는 메시지를 stderr로 출력"""
    print(ujson.dumps(error.to_dict(), ensure_ascii=False), file=sys.stderr)
    print(f"❌ 오류: {error.message}", file=sys.stderr)
    return 1


def cmd_run(args, logger) -> int:
    cfg = load_config(args.config)
    strategies = [args.strategy] if args.strategy else None
    seeds = [args.seed] if args.seed is not None else None
    budget_mode = BudgetMode(args.budget_mode) if args.budget_mode else None
    out_dir = args.out or cfg.output_dir

    monitor = ResourceMonitor()
    results = run_experiment(cfg, strategies=strategies, seeds=seeds, out_dir=out_dir,
                             budget_mode=budget_mode, monitor=monitor)

    for run in results['runs']:
        print(f"✅ {run['strategy']:<11} seed {run['seed']:<4} "
              f"레코드 {run['records']:>4}  incumbent {run['final_incumbent']:.6g}  "
              f"누적 비용 {run['cum_cost']:.4g}")
    for aborted in results['aborted']:
        print(f"⚠️ {aborted['strategy']} seed {aborted['seed']} 중단: {aborted['error']['message']}")

    perf = results['performance']
    logger.info(f"최대 메모리 {perf['peak_memory_mb']:.1f}MB, "
                f"평균 BO 반복 {perf['mean_stage_seconds'].get('bo_round', 0.0):.2f}초")
    print(f"📁 출력 디렉터리: {os.path.abspath(out_dir)}")
    return 1 if results['aborted'] and not results['runs'] else 0


def cmd_summarize(args, logger) -> int:
    traces, meta = load_traces(args.in_dir)
    mode = args.budget_mode or meta.get('budget_mode', BudgetMode.ITERATIONS.value)
    table = summarize(traces, BudgetMode(mode))

    print(f"{'strategy':<12}{'fraction':>9}{'median':>12}{'q25':>12}{'q75':>12}{'n':>4}")
    for strategy, fraction, cell in table.rows():
        print(f"{strategy:<12}{fraction:>9.2f}{cell.median:>12.6g}{cell.q25:>12.6g}"
              f"{cell.q75:>12.6g}{cell.n:>4}")

    title = f"{meta.get('problem', '')} ({mode})".strip()
    for path in export(table, traces, args.format, args.in_dir, title=title):
        print(f"📊 {path}")
    return 0


def cmd_list_problems() -> int:
    for name, description in list_problems():
        print(f"{name:<18} {description}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    debug = args.verbose or os.getenv('DEBUG', 'false').lower() == 'true'
    logger = setup_logger('src.ibo', console_level=logging.DEBUG if debug else logging.INFO)

    try:
        if args.command == "run":
            return cmd_run(args, logger)
        if args.command == "summarize":
            return cmd_summarize(args, logger)
        return cmd_list_problems()
    except IBOError as e:
        logger.debug("실행 실패", exc_info=True)
        return report_error(e)
    except KeyboardInterrupt:
        print("\n⏹️ 사용자에 의해 중단됨", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
