# src/ibo/exporter.py

import csv
import logging
import os
from typing import Callable, Dict, List, Optional

from .errors import ReportingError
from .logger import log_file_operation
from .summary import SummaryTable, Traces, median_curve


logger = logging.getLogger(__name__)

CSV_HEADER = ['strategy', 'fraction', 'median', 'q25', 'q75']
EXPORT_FORMATS = ('csv', 'svg', 'xlsx')


def export_csv(summary: SummaryTable, path: str) -> str:
    """요약 표를 CSV로 저장 (전략 x 4개 비율 행)"""
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for strategy, fraction, cell in summary.rows():
            writer.writerow([strategy, repr(fraction), repr(cell.median), repr(cell.q25), repr(cell.q75)])
    return path


def export_svg(traces: Traces, path: str, title: str = "") -> str:
    """
    incumbent 중앙값 곡선 (사분위 띠) 그래프를 SVG로 저장합니다.
    왼쪽: 누적 비용 기준, 오른쪽: 반복 기준.
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, (ax_cost, ax_iter) = plt.subplots(1, 2, figsize=(11, 4.5))
    for strategy, runs in traces.items():
        for ax, axis in ((ax_cost, 'cost'), (ax_iter, 'iteration')):
            grid, median, q25, q75 = median_curve(runs, axis=axis)
            line, = ax.plot(grid, median, label=strategy)
            ax.fill_between(grid, q25, q75, color=line.get_color(), alpha=0.2, linewidth=0)

    ax_cost.set_xlabel('cumulative cost')
    ax_iter.set_xlabel('iteration')
    for ax in (ax_cost, ax_iter):
        ax.set_ylabel('incumbent value')
        ax.grid(True, alpha=0.3)
    ax_iter.legend(loc='upper right')
    if title:
        fig.suptitle(title)
    fig.tight_layout()

    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    try:
        fig.savefig(path, format='svg')
    finally:
        plt.close(fig)
    return path


def export_xlsx(summary: SummaryTable, traces: Traces, path: str) -> str:
    """요약 시트 + 전략별 트레이스 시트 Excel 저장"""
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Font, PatternFill
    from openpyxl.utils import get_column_letter

    wb = Workbook()
    ws = wb.active
    ws.title = "요약"

    header_font = Font(bold=True, color="FFFFFF")
    header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
    headers = CSV_HEADER + ['mean', 'std', 'n']
    for col, header in enumerate(headers, 1):
        cell = ws.cell(row=1, column=col, value=header)
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = Alignment(horizontal="center")
    for row, (strategy, fraction, c) in enumerate(summary.rows(), 2):
        for col, value in enumerate([strategy, fraction, c.median, c.q25, c.q75, c.mean, c.std, c.n], 1):
            ws.cell(row=row, column=col, value=value)
    for col in range(1, len(headers) + 1):
        ws.column_dimensions[get_column_letter(col)].width = 14

    trace_headers = ['seed', 'iter', 'phase', 'task', 'y', 'cost', 'cum_cost',
                     'incumbent_pred', 'incumbent_true']
    for strategy, runs in traces.items():
        sheet = wb.create_sheet(strategy[:31])
        for col, header in enumerate(trace_headers, 1):
            sheet.cell(row=1, column=col, value=header).font = Font(bold=True)
        row = 2
        for run in runs:
            for r in run:
                values = [r.seed, r.iter, r.phase, r.task, r.y, r.cost, r.cum_cost,
                          r.incumbent_pred, r.incumbent_true]
                for col, value in enumerate(values, 1):
                    sheet.cell(row=row, column=col, value=value)
                row += 1

    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    wb.save(path)
    return path


def export(summary: SummaryTable, traces: Traces, fmt: str, out_dir: str,
           stem: str = "summary", title: Optional[str] = None) -> List[str]:
    """요약/트레이스를 지정 형식으로 내보내고 생성된 경로 목록 반환"""
    writers: Dict[str, Callable[[str], str]] = {
        'csv': lambda p: export_csv(summary, p),
        'svg': lambda p: export_svg(traces, p, title or stem),
        'xlsx': lambda p: export_xlsx(summary, traces, p),
    }
    if fmt not in writers:
        raise ReportingError(f"알 수 없는 내보내기 형식: {fmt!r}", format=fmt, valid=list(EXPORT_FORMATS))

    path = os.path.join(out_dir, f"{stem}.{fmt}")
    try:
        writers[fmt](path)
    except OSError as e:
        log_file_operation(logger, "저장", path, success=False, error_msg=str(e))
        raise ReportingError(f"내보내기 실패: {path}", path=path, reason=str(e)) from e
    log_file_operation(logger, "저장", path)
    return [path]
