"""Action-decision analysis over the fixed probe states.

Every analysis runs on the k probe states recorded at each training
update and averages across probes, giving one number per update (or per
transition between consecutive updates):

* confidence: 1 minus the base-|A| entropy of the softmax policy, so a
  decided (one-hot) policy scores 1 and a uniform one scores 0;
* convergence: mean distance between consecutive actions, Euclidean for
  continuous actions and greedy-action mismatch for discrete ones;
* divergence: mean Jensen-Shannon divergence (natural log, bounded by
  ln 2) between consecutive softmax policies, with sudden spikes flagged
  by a median + MAD rule.

Confidence and divergence are defined for discrete action spaces only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analyzer_core import AnalysisResult, Analyzer, Annotation, Axes, Flag, PlotSpec, Series
from .state_analyzer import euclidean_distance
from .trace_model import ActionProbe, TraceHeader

LN2 = math.log(2.0)
DEFAULT_SPIKE_MAD_MULT = 3.0


class UnsupportedAnalysis(Exception):
    """Raised for analyses the tool does not define on this action space."""


def softmax_policy(q_values: Sequence[float]) -> np.ndarray:
    """Convert q-values to a policy distribution, max-shifted for stability."""
    q = np.asarray(q_values, dtype=float)
    if q.ndim != 1 or q.shape[0] < 2:
        raise ValueError("q_values must be a vector over at least 2 actions")
    if not np.all(np.isfinite(q)):
        raise ValueError("q_values must be finite")
    shifted = np.exp(q - q.max())
    return shifted / shifted.sum()


def entropy_base_a(dist: Sequence[float]) -> float:
    """Entropy with logarithm base |A| (the action count), so the result is in [0, 1]."""
    p = np.asarray(dist, dtype=float)
    n = p.shape[0]
    nonzero = p[p > 0.0]
    h = float(-(nonzero * (np.log(nonzero) / np.log(n))).sum())
    return min(max(h, 0.0), 1.0)


def confidence(dist: Sequence[float]) -> float:
    """1 - entropy_base_a(dist): 0 for a uniform policy, 1 for a delta policy."""
    return 1.0 - entropy_base_a(dist)


def jsd_natural(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence with natural log; symmetric and bounded by ln 2."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    m = 0.5 * (a + b)

    def _kl(x: np.ndarray) -> float:
        mask = x > 0.0
        return float((x[mask] * np.log(x[mask] / m[mask])).sum())

    value = 0.5 * _kl(a) + 0.5 * _kl(b)
    return min(max(value, 0.0), LN2)


@dataclass(frozen=True)
class ActionSeries:
    """Per-update, per-probe action payloads with strictly increasing update indices."""

    updates: Tuple[int, ...]
    payloads: Tuple[Tuple[np.ndarray, ...], ...]  # one tuple of k arrays per update
    discrete: bool

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.updates, self.updates[1:])):
            raise ValueError("update indices must be strictly increasing")
        k = {len(row) for row in self.payloads}
        if len(k) > 1:
            raise ValueError("every update must carry the same probe count")


def build_action_series(
    probes: Sequence[ActionProbe], probe_count: int, discrete: bool
) -> Tuple[ActionSeries, List[str]]:
    """Group probes by update index, dropping (and reporting) incomplete updates."""
    by_update: Dict[int, Dict[int, np.ndarray]] = {}
    for probe in probes:
        payload = probe.q_values if discrete else probe.action
        by_update.setdefault(probe.update, {})[probe.probe_id] = np.asarray(payload, dtype=float)
    updates: List[int] = []
    rows: List[Tuple[np.ndarray, ...]] = []
    dropped: List[int] = []
    for update in sorted(by_update):
        row = by_update[update]
        if len(row) != probe_count or set(row) != set(range(probe_count)):
            dropped.append(update)
            continue
        updates.append(update)
        rows.append(tuple(row[i] for i in range(probe_count)))
    warnings = []
    if dropped:
        warnings.append(f"dropped {len(dropped)} update(s) with incomplete probe sets: {dropped[:10]}")
    return ActionSeries(updates=tuple(updates), payloads=tuple(rows), discrete=discrete), warnings


def _greedy_mismatch(q_a: np.ndarray, q_b: np.ndarray) -> float:
    return 0.0 if int(np.argmax(q_a)) == int(np.argmax(q_b)) else 1.0


def action_convergence(series: ActionSeries) -> AnalysisResult:
    """Mean per-probe distance between consecutive updates' actions.

    Continuous actions use the Euclidean distance; discrete ones use the
    greedy-action mismatch (0 when the argmax action is unchanged, else 1).
    Each transition is indexed by its later update.
    """
    points: List[Tuple[int, float]] = []
    for i in range(1, len(series.updates)):
        prev, cur = series.payloads[i - 1], series.payloads[i]
        if series.discrete:
            dists = [_greedy_mismatch(a, b) for a, b in zip(prev, cur)]
        else:
            dists = [euclidean_distance(a, b) for a, b in zip(prev, cur)]
        points.append((series.updates[i], float(np.mean(dists))))
    return AnalysisResult(analyzer="action", metric="action_convergence", series=tuple(points))


def policy_divergence(
    series: ActionSeries, spike_mad_mult: float = DEFAULT_SPIKE_MAD_MULT
) -> AnalysisResult:
    """Mean per-probe JSD between consecutive softmax policies, with spike flags.

    A transition is flagged when its value exceeds the series median plus
    ``spike_mad_mult`` times the median absolute deviation. With a constant
    learning rate, such spikes point at unusually large TD errors.
    """
    if not series.discrete:
        raise UnsupportedAnalysis("policy divergence is defined for discrete action spaces only")
    points: List[Tuple[int, float]] = []
    for i in range(1, len(series.updates)):
        prev, cur = series.payloads[i - 1], series.payloads[i]
        values = [jsd_natural(softmax_policy(a), softmax_policy(b)) for a, b in zip(prev, cur)]
        points.append((series.updates[i], float(np.mean(values))))
    flags: List[Flag] = []
    if points:
        values = np.asarray([v for _, v in points])
        median = float(np.median(values))
        mad = float(np.median(np.abs(values - median)))
        threshold = median + spike_mad_mult * mad
        for (update, value) in points:
            if value > threshold:
                flags.append(
                    Flag(
                        range=(update, update),
                        reason=(
                            f"divergence spike at transition {update}: {value:.6g} exceeds "
                            f"median + {spike_mad_mult:g} * MAD ({threshold:.6g}); with a constant "
                            "learning rate this indicates an unusually large error"
                        ),
                    )
                )
    return AnalysisResult(
        analyzer="action", metric="policy_divergence", series=tuple(points), flags=tuple(flags)
    )


def confidence_curve(series: ActionSeries) -> AnalysisResult:
    """Mean action confidence over the probe states, one value per update."""
    if not series.discrete:
        raise UnsupportedAnalysis("action confidence is defined for discrete action spaces only")
    points = tuple(
        (update, float(np.mean([confidence(softmax_policy(q)) for q in row])))
        for update, row in zip(series.updates, series.payloads)
    )
    return AnalysisResult(analyzer="action", metric="action_confidence", series=points)


class ActionAnalyzer(Analyzer):
    """Tracks probe q-values across updates and emits the combined action figure."""

    def __init__(self, spike_mad_mult: float = DEFAULT_SPIKE_MAD_MULT):
        super().__init__(name="action")
        self.spike_mad_mult = spike_mad_mult
        self.reset()

    def reset(self) -> None:
        super().reset()
        self._header: Optional[TraceHeader] = None
        self._probes: List[ActionProbe] = []
        self._analysed: Optional[List[AnalysisResult]] = None

    def consume(self, event) -> None:
        if isinstance(event, TraceHeader):
            self._header = event
            self._analysed = None
        elif isinstance(event, ActionProbe):
            self._probes.append(event)
            self._analysed = None

    def _series(self) -> Optional[ActionSeries]:
        if self._header is None or not self._probes:
            return None
        series, warnings = build_action_series(
            self._probes, self._header.probe_count, self._header.action_space.is_discrete
        )
        self.warnings.extend(warnings)
        return series if series.updates else None

    def analyse(self) -> List[AnalysisResult]:
        if self._analysed is not None:
            return self._analysed
        series = self._series()
        if series is None:
            self.warnings.append("no action probes in trace; action analysis skipped")
            self._analysed = []
            return self._analysed
        results: List[AnalysisResult] = []
        if len(series.updates) >= 2:
            results.append(action_convergence(series))
        else:
            self.warnings.append("fewer than 2 probed updates; convergence series is empty")
        if series.discrete:
            if len(series.updates) >= 2:
                results.append(policy_divergence(series, self.spike_mad_mult))
            results.append(confidence_curve(series))
        else:
            self.warnings.append(
                "continuous action space: confidence and divergence analyses are unsupported"
            )
        self._analysed = results
        return results

    def plot(self) -> List[PlotSpec]:
        results = {r.metric: r for r in self.analyse()}
        series_layers = []
        annotations: List[Annotation] = []
        for metric, label in (
            ("action_convergence", "convergence"),
            ("policy_divergence", "divergence"),
            ("action_confidence", "confidence"),
        ):
            result = results.get(metric)
            if result is None or not result.series:
                continue
            series_layers.append(
                Series(label=label, points=tuple((float(i), float(v)) for i, v in result.series))
            )
            for flag in result.flags:
                annotations.append(Annotation(flag.range, flag.reason))
        if not series_layers:
            return []
        return [
            PlotSpec(
                id="action.summary",
                kind="multi_line",
                title="Action convergence, divergence and confidence",
                axes=Axes(x_label="update", y_label="value"),
                series=tuple(series_layers),
                annotations=tuple(annotations) if annotations else None,
            )
        ]
