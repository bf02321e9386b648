"""Loss-over-time series with EMA smoothing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .analyzer_core import AnalysisResult, Analyzer, Axes, PlotSpec, Series
from .reward_analyzer import DEFAULT_EMA_BETA, ema
from .trace_model import LossPoint, TraceHeader


@dataclass(frozen=True)
class LossSeries:
    """Ordered (update, loss) pairs; losses are finite and non-negative."""

    points: Tuple[Tuple[int, float], ...]

    def __post_init__(self) -> None:
        indices = [i for i, _ in self.points]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("loss update indices must be strictly increasing")
        if any(v < 0 for _, v in self.points):
            raise ValueError("losses must be >= 0")


def loss_curve(series: LossSeries, ema_beta: float = DEFAULT_EMA_BETA) -> PlotSpec:
    """Raw loss plus its EMA-smoothed companion as one multi-line plot."""
    if not series.points:
        raise ValueError("empty loss series")
    raw = tuple((float(i), float(v)) for i, v in series.points)
    smoothed = ema([v for _, v in series.points], ema_beta)
    return PlotSpec(
        id="loss.curve",
        kind="multi_line",
        title="Loss per update",
        axes=Axes(x_label="update", y_label="loss"),
        series=(
            Series(label="loss", points=raw),
            Series(label="ema", points=tuple((float(i), v) for (i, _), v in zip(series.points, smoothed))),
        ),
    )


class LossAnalyzer(Analyzer):
    """Collects loss points and emits the smoothed loss curve."""

    def __init__(self, ema_beta: float = DEFAULT_EMA_BETA):
        super().__init__(name="loss")
        self.ema_beta = ema_beta
        self.reset()

    def reset(self) -> None:
        super().reset()
        self._points: List[Tuple[int, float]] = []
        self._cached: Optional[LossSeries] = None

    def consume(self, event) -> None:
        if isinstance(event, TraceHeader):
            return
        if isinstance(event, LossPoint):
            self._points.append((event.update, event.loss))
            self._cached = None

    def _series(self) -> Optional[LossSeries]:
        if not self._points:
            return None
        if self._cached is not None:
            return self._cached
        points = sorted(self._points)
        deduped = [points[0]]
        for update, value in points[1:]:
            if update == deduped[-1][0]:
                continue
            deduped.append((update, value))
        if len(deduped) != len(points):
            self.warnings.append(f"dropped {len(points) - len(deduped)} duplicate loss update(s)")
        self._cached = LossSeries(points=tuple(deduped))
        return self._cached

    def analyse(self) -> List[AnalysisResult]:
        series = self._series()
        if series is None:
            self.warnings.append("no loss points in trace; loss analysis skipped")
            return []
        smoothed = ema([v for _, v in series.points], self.ema_beta)
        return [
            AnalysisResult(analyzer=self.name, metric="loss", series=series.points),
            AnalysisResult(
                analyzer=self.name,
                metric="loss_ema",
                series=tuple((i, v) for (i, _), v in zip(series.points, smoothed)),
            ),
        ]

    def plot(self) -> List[PlotSpec]:
        series = self._series()
        if series is None:
            return []
        return [loss_curve(series, self.ema_beta)]
