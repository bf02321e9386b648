"""Centralized trace IO: append-only JSONL writing and streaming reads.

Wire format: one JSON object per line. Line 1 is the header
(``"type":"header"``); every later line is one event. Floats are written
with full round-trip precision so that a re-read trace is value-identical
to what the producer emitted.

Any object satisfying the open/append/stream contract can replace these
classes as a custom handler.

Concurrency: one writer per trace file, never shared across threads;
any number of readers may stream concurrently once the writer has
flushed.
"""
from __future__ import annotations

import json
import os
from typing import Iterator, Optional

from .trace_model import (
    ActionProbe,
    ActionSpace,
    LayerSnapshot,
    LayerSummary,
    LossPoint,
    StateVisit,
    StepReward,
    TraceEvent,
    TraceHeader,
    ValidationResult,
    validate_event,
)


class TraceError(Exception):
    """Malformed trace content (bad line, missing header, invalid event)."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


def _dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def encode_header(header: TraceHeader) -> str:
    space = header.action_space
    if space.is_discrete:
        space_obj = {"kind": "discrete", "n": space.n}
    else:
        space_obj = {"kind": "continuous", "dim": space.dim}
    return _dumps(
        {
            "type": "header",
            "format_version": header.format_version,
            "run_id": header.run_id,
            "state_dim": header.state_dim,
            "action_space": space_obj,
            "state_kind": header.state_kind,
            "probe_count": header.probe_count,
        }
    )


def encode_event(event: TraceEvent) -> str:
    if isinstance(event, StateVisit):
        return _dumps(
            {
                "type": "state_visit",
                "episode": event.episode,
                "step": event.step,
                "state": list(event.state),
                "mode": event.mode,
                "trained": event.trained,
            }
        )
    if isinstance(event, ActionProbe):
        obj = {"type": "action_probe", "update": event.update, "probe_id": event.probe_id}
        if event.q_values is not None:
            obj["q_values"] = list(event.q_values)
        else:
            obj["action"] = list(event.action)
        return _dumps(obj)
    if isinstance(event, StepReward):
        return _dumps(
            {"type": "step_reward", "episode": event.episode, "step": event.step, "reward": event.reward}
        )
    if isinstance(event, LayerSnapshot):
        s = event.summary
        return _dumps(
            {
                "type": "layer_snapshot",
                "update": event.update,
                "layer": event.layer,
                "kind": event.kind,
                "summary": {
                    "min": s.min,
                    "max": s.max,
                    "mean": s.mean,
                    "std": s.std,
                    "near_zero_fraction": s.near_zero_fraction,
                    "histogram": list(s.histogram),
                },
            }
        )
    if isinstance(event, LossPoint):
        return _dumps({"type": "loss", "update": event.update, "loss": event.loss})
    raise TypeError(f"cannot encode {type(event).__name__}")


def decode_header(obj: dict) -> TraceHeader:
    space_obj = obj["action_space"]
    if space_obj["kind"] == "discrete":
        space = ActionSpace(kind="discrete", n=int(space_obj["n"]))
    else:
        space = ActionSpace(kind="continuous", dim=int(space_obj["dim"]))
    return TraceHeader(
        format_version=int(obj["format_version"]),
        run_id=str(obj["run_id"]),
        state_dim=int(obj["state_dim"]),
        action_space=space,
        state_kind=str(obj["state_kind"]),
        probe_count=int(obj["probe_count"]),
    )


def decode_event(obj: dict) -> TraceEvent:
    kind = obj.get("type")
    if kind == "state_visit":
        return StateVisit(
            episode=int(obj["episode"]),
            step=int(obj["step"]),
            state=tuple(obj["state"]),
            mode=str(obj["mode"]),
            trained=bool(obj["trained"]),
        )
    if kind == "action_probe":
        return ActionProbe(
            update=int(obj["update"]),
            probe_id=int(obj["probe_id"]),
            q_values=tuple(obj["q_values"]) if "q_values" in obj else None,
            action=tuple(obj["action"]) if "action" in obj else None,
        )
    if kind == "step_reward":
        return StepReward(episode=int(obj["episode"]), step=int(obj["step"]), reward=float(obj["reward"]))
    if kind == "layer_snapshot":
        s = obj["summary"]
        return LayerSnapshot(
            update=int(obj["update"]),
            layer=str(obj["layer"]),
            kind=str(obj["kind"]),
            summary=LayerSummary(
                min=float(s["min"]),
                max=float(s["max"]),
                mean=float(s["mean"]),
                std=float(s["std"]),
                near_zero_fraction=float(s["near_zero_fraction"]),
                histogram=tuple(int(c) for c in s["histogram"]),
            ),
        )
    if kind == "loss":
        return LossPoint(update=int(obj["update"]), loss=float(obj["loss"]))
    raise TraceError(f"unknown event type {kind!r}")


class TraceWriter:
    """Single-writer append-only trace file. The header is written exactly once."""

    def __init__(self, path: str, header: TraceHeader):
        self.path = path
        self.header = header
        self.events_written = 0
        self._header_written = False
        self._last_visit: Optional[tuple] = None
        self._fh = open(path, "w", encoding="utf-8")
        try:
            self.write_header()
        except Exception:
            self._fh.close()
            raise

    def write_header(self) -> None:
        """Persist the header line. Exactly once per writer, before any event."""
        if self._header_written:
            raise TraceError("header already written")
        self._fh.write(encode_header(self.header) + "\n")
        self._header_written = True

    def append(self, event: TraceEvent) -> None:
        """Validate and append one event; the file is unchanged on failure."""
        if self._fh.closed:
            raise TraceError("writer is closed")
        result: ValidationResult = validate_event(event, self.header)
        if not result.ok:
            raise TraceError(f"invalid event ({result.field}): {result.error}")
        if isinstance(event, StateVisit):
            key = (event.episode, event.step)
            if self._last_visit is not None and key < self._last_visit:
                raise TraceError(
                    f"state visit (episode={event.episode}, step={event.step}) "
                    f"precedes previous visit {self._last_visit}"
                )
            self._last_visit = key
        self._fh.write(encode_event(event) + "\n")
        self.events_written += 1

    def flush(self) -> None:
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_writer(path: str, header: TraceHeader) -> TraceWriter:
    return TraceWriter(path, header)


class TraceReader:
    """Streaming reader. The header is parsed eagerly; events are yielded lazily."""

    def __init__(self, path: str):
        self.path = path
        self.header = self._read_header()

    def _read_header(self) -> TraceHeader:
        with open(self.path, "r", encoding="utf-8") as fh:
            first = fh.readline()
        if not first.strip():
            raise TraceError("missing header: trace file is empty", line_number=1)
        try:
            obj = json.loads(first)
        except json.JSONDecodeError as exc:
            raise TraceError(f"malformed header: {exc.msg}", line_number=1) from exc
        if not isinstance(obj, dict) or obj.get("type") != "header":
            raise TraceError("missing header: first line is not a header record", line_number=1)
        try:
            return decode_header(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(f"malformed header: {exc}", line_number=1) from exc

    def stream(self) -> Iterator[TraceEvent]:
        """Yield every event exactly once, in file order, without loading the file."""
        with open(self.path, "r", encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if line_number == 1:
                    continue  # header, already parsed
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise TraceError(f"malformed line: {exc.msg}", line_number=line_number) from exc
                if not isinstance(obj, dict):
                    raise TraceError("malformed line: not a JSON object", line_number=line_number)
                if obj.get("type") == "header":
                    raise TraceError("duplicate header", line_number=line_number)
                try:
                    yield decode_event(obj)
                except TraceError as exc:
                    raise TraceError(str(exc), line_number=line_number) from exc
                except (KeyError, TypeError, ValueError) as exc:
                    raise TraceError(f"malformed event: {exc}", line_number=line_number) from exc

    def __iter__(self) -> Iterator[TraceEvent]:
        return self.stream()


def open_reader(path: str) -> TraceReader:
    return TraceReader(path)
