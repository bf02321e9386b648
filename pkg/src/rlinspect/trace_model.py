"""Domain types for training-trace events.

A trace is a single append-only stream: one header followed by events of
five kinds (state visits, action probes, step rewards, layer snapshots,
loss points). Every type here is an immutable value object; the wire
format lives in :mod:`rlinspect.data_handler`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

FORMAT_VERSION = 1

MODE_EXPLORE = "explore"
MODE_EXPLOIT = "exploit"

KIND_WEIGHT = "weight"
KIND_BIAS = "bias"
KIND_GRADIENT = "gradient"

STATE_CONTINUOUS = "continuous"
STATE_DISCRETE_SET = "discrete-set"

HISTOGRAM_BINS = 64


@dataclass(frozen=True)
class ActionSpace:
    """Discrete action space with ``n`` actions, or continuous with ``dim`` components."""

    kind: str  # "discrete" | "continuous"
    n: Optional[int] = None
    dim: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == "discrete":
            if self.n is None or self.n < 2:
                raise ValueError("discrete action space requires n >= 2")
        elif self.kind == "continuous":
            if self.dim is None or self.dim < 1:
                raise ValueError("continuous action space requires dim >= 1")
        else:
            raise ValueError(f"unknown action space kind: {self.kind!r}")

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"


@dataclass(frozen=True)
class TraceHeader:
    """First record of every trace; fixes dimensions for all later events."""

    format_version: int
    run_id: str
    state_dim: int
    action_space: ActionSpace
    state_kind: str  # "continuous" | "discrete-set"
    probe_count: int

    def __post_init__(self) -> None:
        if self.state_dim < 1:
            raise ValueError("state_dim must be >= 1")
        if self.probe_count < 1:
            raise ValueError("probe_count must be >= 1")
        if self.state_kind not in (STATE_CONTINUOUS, STATE_DISCRETE_SET):
            raise ValueError(f"unknown state_kind: {self.state_kind!r}")


@dataclass(frozen=True)
class StateVisit:
    """One state the agent acted from.

    ``state`` is a vector of ``state_dim`` reals for continuous state spaces,
    or a sorted tuple of integer tokens for discrete-set spaces. ``trained``
    records whether the visit entered a training update.
    """

    episode: int
    step: int
    state: tuple
    mode: str  # "explore" | "exploit"
    trained: bool


@dataclass(frozen=True)
class ActionProbe:
    """Q-values (discrete) or an action vector (continuous) at one probe state."""

    update: int
    probe_id: int
    q_values: Optional[tuple] = None
    action: Optional[tuple] = None


@dataclass(frozen=True)
class StepReward:
    episode: int
    step: int
    reward: float


@dataclass(frozen=True)
class LayerSummary:
    """Bounded summary of one tensor: moments plus a 64-bin histogram over [min, max]."""

    min: float
    max: float
    mean: float
    std: float
    near_zero_fraction: float
    histogram: tuple  # 64 integer counts


@dataclass(frozen=True)
class LayerSnapshot:
    update: int
    layer: str
    kind: str  # "weight" | "bias" | "gradient"
    summary: LayerSummary


@dataclass(frozen=True)
class LossPoint:
    update: int
    loss: float


TraceEvent = Union[StateVisit, ActionProbe, StepReward, LayerSnapshot, LossPoint]


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of validating one event: ``ok``, or a diagnostic naming the field."""

    ok: bool
    field: Optional[str] = None
    error: Optional[str] = None

    @classmethod
    def valid(cls) -> "ValidationResult":
        return cls(ok=True)

    @classmethod
    def invalid(cls, field: str, error: str) -> "ValidationResult":
        return cls(ok=False, field=field, error=error)


def _all_finite(values) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


def validate_event(event: TraceEvent, header: TraceHeader) -> ValidationResult:
    """Check one event against the header's dimensions and the type invariants.

    Returns ``ValidationResult.valid()`` or a diagnostic naming the violated
    invariant and field. Ordering invariants that span multiple events
    (monotone episode/step, probe completeness) are enforced by the writer
    and the analyzers, not here.
    """
    if isinstance(event, StateVisit):
        if event.episode < 0 or event.step < 0:
            return ValidationResult.invalid("episode/step", "episode and step must be >= 0")
        if event.mode not in (MODE_EXPLORE, MODE_EXPLOIT):
            return ValidationResult.invalid("mode", f"mode must be explore or exploit, got {event.mode!r}")
        if header.state_kind == STATE_CONTINUOUS:
            if len(event.state) != header.state_dim:
                return ValidationResult.invalid(
                    "state",
                    f"dimension mismatch: state has length {len(event.state)}, header state_dim is {header.state_dim}",
                )
            if not _all_finite(event.state):
                return ValidationResult.invalid("state", "non-finite value in state vector")
        else:
            if not all(isinstance(t, int) for t in event.state):
                return ValidationResult.invalid("state", "discrete-set state must contain integer tokens")
            if tuple(sorted(set(event.state))) != tuple(event.state):
                return ValidationResult.invalid("state", "discrete-set state must be a sorted set of tokens")
        return ValidationResult.valid()

    if isinstance(event, ActionProbe):
        if event.update < 0:
            return ValidationResult.invalid("update", "update index must be >= 0")
        if not (0 <= event.probe_id < header.probe_count):
            return ValidationResult.invalid(
                "probe_id",
                f"probe_id {event.probe_id} out of range [0, {header.probe_count})",
            )
        if (event.q_values is None) == (event.action is None):
            return ValidationResult.invalid("payload", "exactly one of q_values or action must be present")
        if header.action_space.is_discrete:
            if event.q_values is None:
                return ValidationResult.invalid("payload", "discrete action space requires q_values")
            if len(event.q_values) != header.action_space.n:
                return ValidationResult.invalid(
                    "q_values",
                    f"dimension mismatch: {len(event.q_values)} q-values for {header.action_space.n} actions",
                )
            if not _all_finite(event.q_values):
                return ValidationResult.invalid("q_values", "non-finite q-value")
        else:
            if event.action is None:
                return ValidationResult.invalid("payload", "continuous action space requires an action vector")
            if not _all_finite(event.action):
                return ValidationResult.invalid("action", "non-finite action component")
        return ValidationResult.valid()

    if isinstance(event, StepReward):
        if event.episode < 0 or event.step < 0:
            return ValidationResult.invalid("episode/step", "episode and step must be >= 0")
        if not (isinstance(event.reward, (int, float)) and math.isfinite(event.reward)):
            return ValidationResult.invalid("reward", "non-finite reward")
        return ValidationResult.valid()

    if isinstance(event, LayerSnapshot):
        if event.update < 0:
            return ValidationResult.invalid("update", "update index must be >= 0")
        if event.kind not in (KIND_WEIGHT, KIND_BIAS, KIND_GRADIENT):
            return ValidationResult.invalid("kind", f"unknown snapshot kind {event.kind!r}")
        s = event.summary
        if not _all_finite((s.min, s.max, s.mean, s.std, s.near_zero_fraction)):
            return ValidationResult.invalid("summary", "non-finite summary statistic")
        if not (s.min <= s.mean <= s.max):
            return ValidationResult.invalid("summary", "summary violates min <= mean <= max")
        if s.std < 0:
            return ValidationResult.invalid("summary.std", "std must be >= 0")
        if not (0.0 <= s.near_zero_fraction <= 1.0):
            return ValidationResult.invalid("summary.near_zero_fraction", "near_zero_fraction must be in [0, 1]")
        if len(s.histogram) != HISTOGRAM_BINS:
            return ValidationResult.invalid(
                "summary.histogram", f"histogram must have {HISTOGRAM_BINS} bins, got {len(s.histogram)}"
            )
        if any((not isinstance(c, int)) or c < 0 for c in s.histogram):
            return ValidationResult.invalid("summary.histogram", "histogram counts must be non-negative integers")
        return ValidationResult.valid()

    if isinstance(event, LossPoint):
        if event.update < 0:
            return ValidationResult.invalid("update", "update index must be >= 0")
        if not (isinstance(event.loss, (int, float)) and math.isfinite(event.loss)):
            return ValidationResult.invalid("loss", "non-finite loss")
        if event.loss < 0:
            return ValidationResult.invalid("loss", "loss must be >= 0")
        return ValidationResult.valid()

    return ValidationResult.invalid("type", f"unknown event type {type(event).__name__}")
