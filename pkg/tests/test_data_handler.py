import json
import os
import tracemalloc

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlinspect.data_handler import TraceError, TraceReader, open_reader, open_writer
from rlinspect.trace_model import StateVisit, StepReward

from conftest import make_header


def test_fresh_file_begins_with_header(tmp_path):
    path = tmp_path / "t.jsonl"
    with open_writer(str(path), make_header()) as writer:
        assert writer.events_written == 0
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    obj = json.loads(lines[0])
    assert obj["type"] == "header"
    assert obj["format_version"] == 1
    assert obj["action_space"] == {"kind": "discrete", "n": 2}


def test_unwritable_path_raises(tmp_path):
    with pytest.raises(OSError):
        open_writer(str(tmp_path / "nope" / "t.jsonl"), make_header())


def test_header_written_exactly_once(tmp_path):
    with open_writer(str(tmp_path / "t.jsonl"), make_header()) as writer:
        with pytest.raises(TraceError, match="header already written"):
            writer.write_header()


def test_append_three_events(tmp_path):
    path = tmp_path / "t.jsonl"
    with open_writer(str(path), make_header()) as writer:
        for step in range(3):
            writer.append(StepReward(episode=0, step=step, reward=1.0))
    assert len(path.read_text().splitlines()) == 4  # header + 3


def test_append_invalid_leaves_file_unchanged(tmp_path):
    path = tmp_path / "t.jsonl"
    with open_writer(str(path), make_header(state_dim=4)) as writer:
        writer.flush()
        before = path.read_text()
        bad = StateVisit(episode=0, step=0, state=(1.0,), mode="explore", trained=True)
        with pytest.raises(TraceError, match="state"):
            writer.append(bad)
        writer.flush()
        assert path.read_text() == before


def test_out_of_order_visit_rejected(tmp_path):
    with open_writer(str(tmp_path / "t.jsonl"), make_header(state_dim=1)) as writer:
        writer.append(StateVisit(episode=1, step=0, state=(0.0,), mode="explore", trained=True))
        with pytest.raises(TraceError, match="precedes"):
            writer.append(StateVisit(episode=0, step=5, state=(0.0,), mode="explore", trained=True))


def test_ten_thousand_rewards_round_trip(tmp_path):
    """Round-trip oracle: the parsed stream equals the source event list."""
    path = str(tmp_path / "t.jsonl")
    source = [StepReward(episode=i // 100, step=i % 100, reward=float(i) * 0.25) for i in range(10_000)]
    with open_writer(path, make_header()) as writer:
        for event in source:
            writer.append(event)
    assert list(open_reader(path).stream()) == source


def test_stream_counts(tmp_path):
    path = str(tmp_path / "t.jsonl")
    with open_writer(path, make_header()) as writer:
        for step in range(7):
            writer.append(StepReward(episode=0, step=step, reward=1.0))
    reader = TraceReader(path)
    assert sum(1 for _ in reader.stream()) == 7
    assert reader.header.run_id == "test-run"


def test_corrupted_line_reported_with_number(tmp_path):
    path = tmp_path / "t.jsonl"
    with open_writer(str(path), make_header()) as writer:
        for step in range(5):
            writer.append(StepReward(episode=0, step=step, reward=1.0))
    lines = path.read_text().splitlines()
    lines[4] = '{"type":"step_reward", BROKEN'
    path.write_text("\n".join(lines) + "\n")
    reader = TraceReader(str(path))
    with pytest.raises(TraceError, match="line 5"):
        list(reader.stream())


def test_empty_file_missing_header(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text("")
    with pytest.raises(TraceError, match="missing header"):
        TraceReader(str(path))


def test_non_header_first_line(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text('{"type":"step_reward","episode":0,"step":0,"reward":1.0}\n')
    with pytest.raises(TraceError, match="missing header"):
        TraceReader(str(path))


@settings(max_examples=200, deadline=None)
@given(
    rewards=st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=0, max_size=50
    )
)
def test_write_then_read_identity(tmp_path_factory, rewards):
    """Write-then-read is the identity on event sequences."""
    path = str(tmp_path_factory.mktemp("prop") / "t.jsonl")
    events = [StepReward(episode=0, step=i, reward=r) for i, r in enumerate(rewards)]
    with open_writer(path, make_header()) as writer:
        for event in events:
            writer.append(event)
    assert list(open_reader(path).stream()) == events


def test_streaming_memory_independent_of_trace_size(tmp_path):
    """Peak memory while consuming a large trace stays far below the file size."""
    path = str(tmp_path / "big.jsonl")
    with open_writer(path, make_header()) as writer:
        for i in range(120_000):
            writer.append(StepReward(episode=i // 500, step=i % 500, reward=1.23456789 * i))
    file_size = os.path.getsize(path)
    assert file_size > 5_000_000
    reader = TraceReader(path)
    tracemalloc.start()
    count = sum(1 for _ in reader.stream())
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert count == 120_000
    assert peak < file_size / 10
