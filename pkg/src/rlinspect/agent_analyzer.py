"""Weight, bias, and gradient distribution tracking across training updates.

Each layer/kind pair becomes a ridgeline of per-update histograms
(the producer summarizes tensors into 64-bin histograms, so this stays
cheap). Gradient histories are additionally scanned for vanishing
windows (nearly all entries close to zero for several consecutive
snapshots) and exploding windows (extreme magnitudes).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .analyzer_core import AnalysisResult, Analyzer, Annotation, Axes, Flag, PlotSpec, Series
from .trace_model import KIND_GRADIENT, LayerSnapshot, LayerSummary, StateVisit, TraceHeader

RIDGELINE_MAX_ROWS = 60
VG_THRESHOLD = 1e-7
VG_FRACTION = 0.99
VG_WINDOW = 5
EG_THRESHOLD = 1e3
EG_WINDOW = 3


@dataclass
class LayerHistory:
    """Ordered snapshot summaries for one layer and kind."""

    layer: str
    kind: str
    updates: List[int] = field(default_factory=list)
    summaries: List[LayerSummary] = field(default_factory=list)
    episodes: List[Optional[int]] = field(default_factory=list)

    def append(self, update: int, summary: LayerSummary, episode: Optional[int]) -> None:
        if self.updates and update <= self.updates[-1]:
            raise ValueError(
                f"snapshot updates must be strictly increasing for {self.layer}/{self.kind}"
            )
        self.updates.append(update)
        self.summaries.append(summary)
        self.episodes.append(episode)


def _subsample_indices(count: int, max_rows: int = RIDGELINE_MAX_ROWS) -> List[int]:
    """At most max_rows evenly spaced indices; first and last always included."""
    if count <= max_rows:
        return list(range(count))
    positions = np.linspace(0, count - 1, max_rows)
    return sorted(set(int(round(p)) for p in positions))


def distribution_ridgeline(history: LayerHistory) -> PlotSpec:
    """One histogram row per sampled update for a single layer/kind history."""
    if not history.updates:
        raise ValueError("empty layer history")
    rows = _subsample_indices(len(history.updates))
    series = []
    for i in rows:
        summary = history.summaries[i]
        lo, hi = summary.min, summary.max
        if hi <= lo:
            hi = lo + 1.0
        edges = np.linspace(lo, hi, len(summary.histogram) + 1)
        series.append(
            Series(
                label=f"update {history.updates[i]}",
                bins={
                    "edges": [float(e) for e in edges],
                    "counts": [int(c) for c in summary.histogram],
                },
            )
        )
    return PlotSpec(
        id=f"agent.{history.layer}.{history.kind}",
        kind="histogram_ridgeline",
        title=f"{history.kind.capitalize()} distribution: {history.layer}",
        axes=Axes(x_label="value", y_label="update"),
        series=tuple(series),
    )


def _flag_runs(
    history: LayerHistory, hit: List[bool], window: int, reason_fmt: str
) -> List[Flag]:
    """Maximal runs of consecutive hits with length >= window, as update-range flags."""
    flags: List[Flag] = []
    start = None
    for i, is_hit in enumerate(hit + [False]):
        if is_hit and start is None:
            start = i
        elif not is_hit and start is not None:
            if i - start >= window:
                lo, hi = history.updates[start], history.updates[i - 1]
                episodes = [e for e in history.episodes[start:i] if e is not None]
                span = f"updates {lo}-{hi}"
                if episodes:
                    span += f" (episodes {min(episodes)}-{max(episodes)})"
                flags.append(Flag(range=(lo, hi), reason=reason_fmt.format(layer=history.layer, span=span)))
            start = None
    return flags


def vanishing_gradient_flags(
    histories: List[LayerHistory],
    threshold: float = VG_THRESHOLD,
    frac: float = VG_FRACTION,
    window: int = VG_WINDOW,
) -> List[Flag]:
    """Flag windows where nearly every gradient entry is close to zero.

    A snapshot counts as vanishing when its recorded near-zero fraction
    (entries with magnitude below ``threshold``, computed by the producer)
    is at least ``frac``; a flag covers each maximal run of at least
    ``window`` consecutive vanishing snapshots.
    """
    flags: List[Flag] = []
    for history in histories:
        if history.kind != KIND_GRADIENT:
            continue
        hit = [s.near_zero_fraction >= frac for s in history.summaries]
        flags.extend(
            _flag_runs(
                history,
                hit,
                window,
                "vanishing gradient in {layer}: {span} have near-zero fraction >= "
                + f"{frac:g} (|g| < {threshold:g})",
            )
        )
    return flags


def exploding_gradient_flags(
    histories: List[LayerHistory],
    threshold: float = EG_THRESHOLD,
    window: int = EG_WINDOW,
) -> List[Flag]:
    """Flag runs of snapshots whose maximum gradient magnitude reaches the threshold."""
    flags: List[Flag] = []
    for history in histories:
        if history.kind != KIND_GRADIENT:
            continue
        hit = [max(abs(s.min), abs(s.max)) >= threshold for s in history.summaries]
        flags.extend(
            _flag_runs(
                history,
                hit,
                window,
                "exploding gradient in {layer}: {span} reach |g| >= " + f"{threshold:g}",
            )
        )
    return flags


class AgentAnalyzer(Analyzer):
    """Collects layer snapshots and reports distribution ridgelines plus gradient flags."""

    def __init__(
        self,
        vg_threshold: float = VG_THRESHOLD,
        vg_frac: float = VG_FRACTION,
        vg_window: int = VG_WINDOW,
        eg_threshold: float = EG_THRESHOLD,
        eg_window: int = EG_WINDOW,
    ):
        super().__init__(name="agent")
        self.vg_threshold = vg_threshold
        self.vg_frac = vg_frac
        self.vg_window = vg_window
        self.eg_threshold = eg_threshold
        self.eg_window = eg_window
        self.reset()

    def reset(self) -> None:
        super().reset()
        self._histories: Dict[Tuple[str, str], LayerHistory] = {}
        self._episode: Optional[int] = None

    def consume(self, event) -> None:
        if isinstance(event, TraceHeader):
            return
        if isinstance(event, StateVisit):
            # Tracked only to label flag ranges with episodes as well as updates.
            self._episode = event.episode
        elif isinstance(event, LayerSnapshot):
            key = (event.layer, event.kind)
            if key not in self._histories:
                self._histories[key] = LayerHistory(layer=event.layer, kind=event.kind)
            self._histories[key].append(event.update, event.summary, self._episode)

    def _gradient_histories(self) -> List[LayerHistory]:
        return [h for h in self._histories.values() if h.kind == KIND_GRADIENT]

    def analyse(self) -> List[AnalysisResult]:
        if not self._histories:
            self.warnings.append("no layer snapshots in trace; agent analysis skipped")
            return []
        results: List[AnalysisResult] = []
        vanishing = vanishing_gradient_flags(
            self._gradient_histories(), self.vg_threshold, self.vg_frac, self.vg_window
        )
        exploding = exploding_gradient_flags(
            self._gradient_histories(), self.eg_threshold, self.eg_window
        )
        for history in self._gradient_histories():
            results.append(
                AnalysisResult(
                    analyzer=self.name,
                    metric=f"near_zero_fraction[{history.layer}]",
                    series=tuple(
                        (u, float(s.near_zero_fraction))
                        for u, s in zip(history.updates, history.summaries)
                    ),
                )
            )
        results.append(
            AnalysisResult(
                analyzer=self.name,
                metric="vanishing_gradient",
                series=(),
                flags=tuple(vanishing),
            )
        )
        results.append(
            AnalysisResult(
                analyzer=self.name,
                metric="exploding_gradient",
                series=(),
                flags=tuple(exploding),
            )
        )
        return results

    def plot(self) -> List[PlotSpec]:
        if not self._histories:
            return []
        plots = []
        for key in sorted(self._histories):
            history = self._histories[key]
            spec = distribution_ridgeline(history)
            if history.kind == KIND_GRADIENT:
                flags = vanishing_gradient_flags(
                    [history], self.vg_threshold, self.vg_frac, self.vg_window
                ) + exploding_gradient_flags([history], self.eg_threshold, self.eg_window)
                if flags:
                    spec = PlotSpec(
                        id=spec.id,
                        kind=spec.kind,
                        title=spec.title,
                        axes=spec.axes,
                        series=spec.series,
                        facets=spec.facets,
                        annotations=tuple(Annotation(f.range, f.reason) for f in flags),
                    )
            plots.append(spec)
        return plots
