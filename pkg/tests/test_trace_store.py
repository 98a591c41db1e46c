import json
import os

import pytest

from src.ibo.errors import TraceIOError
from src.ibo.models import SCHEMA_VERSION, TraceRecord
from src.ibo.trace_store import (append_trace_record, load_traces, read_run_meta, read_trace,
                                 reset_trace, trace_path, write_run_meta)


def make_record(i, strategy='ibo', seed=0, incumbent=1.0):
    return TraceRecord(
        iter=i, phase='init' if i < 2 else 'bo',
        x={'x1': 0.25 * i, 'x2': 1.5}, task=1.0, y=2.0 - 0.125 * i,
        cost=0.5, cum_cost=0.5 * (i + 1),
        incumbent_x={'x1': 0.25, 'x2': 1.5}, incumbent_pred=incumbent,
        strategy=strategy, seed=seed, task_normalized=1.0, presample_factor=6.0,
        incumbent_true=incumbent, is_step_fraction=0.5, wall_seconds=0.25,
        extra={'aborted': True} if i == 3 else {},
    )


def test_one_line_per_record(tmp_path):
    path = trace_path(str(tmp_path), 'ibo', 0)
    records = [make_record(i) for i in range(5)]
    for r in records:
        append_trace_record(path, r)

    with open(path, encoding='utf-8') as f:
        lines = f.read().split('\n')
    assert lines[-1] == ''
    assert len(lines[:-1]) == 5
    for line, record in zip(lines, records):
        data = json.loads(line)
        assert data['schema_version'] == SCHEMA_VERSION
        assert {'iter', 'x', 'task', 'y', 'cost', 'cum_cost', 'incumbent_x', 'incumbent_pred'} <= set(data)
        assert TraceRecord.from_dict(data) == record
    assert read_trace(path) == records


def test_partial_last_line_is_ignored(tmp_path):
    path = trace_path(str(tmp_path), 'es', 1)
    append_trace_record(path, make_record(0))
    append_trace_record(path, make_record(1))
    with open(path, 'a', encoding='utf-8') as f:
        f.write('{"iter": 2, "x": {')
    assert len(read_trace(path)) == 2


def test_corrupt_line_is_an_error(tmp_path):
    path = tmp_path / 'bad.jsonl'
    path.write_text('{"iter": 0}\n', encoding='utf-8')
    with pytest.raises(TraceIOError) as exc:
        read_trace(str(path))
    assert exc.value.details['line'] == 1


def test_unknown_fields_are_ignored():
    data = make_record(0).to_dict()
    data['added_later'] = [1, 2]
    assert TraceRecord.from_dict(data) == make_record(0)


def test_reset_truncates(tmp_path):
    path = trace_path(str(tmp_path), 'ibo', 2)
    append_trace_record(path, make_record(0))
    reset_trace(path)
    assert os.path.getsize(path) == 0


def test_write_failure_is_structured(tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('not a directory', encoding='utf-8')
    with pytest.raises(TraceIOError):
        append_trace_record(str(blocker / 'ibo' / 'seed_0.jsonl'), make_record(0))


def test_load_traces_groups_by_strategy(tmp_path):
    out = str(tmp_path)
    write_run_meta(out, {'problem': 'branin-mf', 'budget_mode': 'cost'})
    for strategy in ('ibo', 'random'):
        for seed in (0, 1, 10):
            for i in range(3):
                append_trace_record(trace_path(out, strategy, seed), make_record(i, strategy, seed))
    traces, meta = load_traces(out)
    assert sorted(traces) == ['ibo', 'random']
    assert [run[0].seed for run in traces['ibo']] == [0, 1, 10]
    assert meta['budget_mode'] == 'cost'
    assert read_run_meta(str(tmp_path / 'missing')) == {}


def test_load_traces_missing_dir(tmp_path):
    with pytest.raises(TraceIOError):
        load_traces(str(tmp_path / 'nope'))
