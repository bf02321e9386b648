"""Per-episode reward statistics: outlier filtering, averages, EMA,
volatility, and the risk-reward ratio.

Outliers are removed per episode with an IQR fence before any statistic
is computed; the fence is re-applied until no further point is removed,
which makes the filter idempotent. Volatility is the population standard
deviation of the kept step rewards. The risk-reward ratio ships in two
variants: the coefficient of variation sigma/mu (default) and the robust
100 * MAD/median. Episodes where the denominator is ~0 render as plot
gaps, not errors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analyzer_core import AnalysisResult, Analyzer, Annotation, Axes, PlotSpec, Series
from .trace_model import StepReward, TraceHeader

DEFAULT_EMA_BETA = 0.9
ZERO_DENOMINATOR = 1e-12


@dataclass(frozen=True)
class EpisodeRewards:
    """Step rewards of one episode after outlier filtering."""

    episode: int
    rewards: Tuple[float, ...]
    removed_count: int


def _iqr_pass(values: np.ndarray) -> np.ndarray:
    q1, q3 = np.percentile(values, [25.0, 75.0])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    mask = (values >= lo) & (values <= hi)
    if not mask.any():
        # Degenerate fence: keep a median element rather than emptying the episode.
        mask[int(np.argsort(values)[len(values) // 2])] = True
    return mask


def filter_outliers(rewards: Sequence[float]) -> Tuple[List[float], int]:
    """Drop rewards outside the IQR fence, re-applying until stable.

    Quartiles use linear interpolation. Returns the kept rewards in their
    original order and the number removed.
    """
    if len(rewards) == 0:
        raise ValueError("cannot filter an empty reward list")
    values = np.asarray(rewards, dtype=float)
    kept = values
    while True:
        mask = _iqr_pass(kept)
        if mask.all():
            break
        kept = kept[mask]
    return [float(v) for v in kept], int(len(values) - len(kept))


def ema(values: Sequence[float], beta: float = DEFAULT_EMA_BETA) -> List[float]:
    """ema_0 = x_0; ema_t = beta * ema_{t-1} + (1 - beta) * x_t."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    out: List[float] = []
    for v in values:
        out.append(v if not out else beta * out[-1] + (1.0 - beta) * v)
    return out


def volatility(episode: EpisodeRewards) -> float:
    """Population standard deviation of the episode's kept step rewards."""
    values = np.asarray(episode.rewards, dtype=float)
    if values.size == 0:
        raise ValueError("episode has no rewards")
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


def risk_reward_cv(episode: EpisodeRewards) -> Optional[float]:
    """Coefficient of variation sigma/mu; None when the mean is ~0 (rendered as a gap)."""
    values = np.asarray(episode.rewards, dtype=float)
    mu = float(values.mean())
    if abs(mu) < ZERO_DENOMINATOR:
        return None
    return volatility(episode) / mu


def risk_reward_mad(episode: EpisodeRewards) -> Optional[float]:
    """Robust variant: 100 * MAD / median; None when the median is ~0."""
    values = np.asarray(episode.rewards, dtype=float)
    med = float(np.median(values))
    if abs(med) < ZERO_DENOMINATOR:
        return None
    mad = float(np.median(np.abs(values - med)))
    return 100.0 * mad / med


def average_per_episode(episodes: Sequence[EpisodeRewards]) -> AnalysisResult:
    """Mean kept step reward, one value per episode."""
    series = tuple((e.episode, float(np.mean(e.rewards))) for e in episodes)
    return AnalysisResult(analyzer="reward", metric="average_reward", series=series)


def ema_per_episode(averages: Sequence[float], beta: float = DEFAULT_EMA_BETA) -> AnalysisResult:
    """EMA of the per-episode averages, indexed by position."""
    smoothed = ema(averages, beta)
    return AnalysisResult(
        analyzer="reward",
        metric="ema_reward",
        series=tuple((i, v) for i, v in enumerate(smoothed)),
    )


class RewardAnalyzer(Analyzer):
    """Groups step rewards by episode and emits the four reward analyses."""

    def __init__(
        self,
        rrr: str = "cv",
        ema_beta: float = DEFAULT_EMA_BETA,
        outlier_filter: bool = True,
    ):
        super().__init__(name="reward")
        if rrr not in ("cv", "mad"):
            raise ValueError(f"unknown risk-reward variant {rrr!r}")
        self.rrr = rrr
        self.ema_beta = ema_beta
        self.outlier_filter = outlier_filter
        self.reset()

    def reset(self) -> None:
        super().reset()
        self._by_episode: Dict[int, List[float]] = {}

    def consume(self, event) -> None:
        if isinstance(event, TraceHeader):
            return
        if isinstance(event, StepReward):
            self._by_episode.setdefault(event.episode, []).append(event.reward)

    def _episodes(self) -> List[EpisodeRewards]:
        episodes = []
        for ep in sorted(self._by_episode):
            raw = self._by_episode[ep]
            if self.outlier_filter:
                kept, removed = filter_outliers(raw)
            else:
                kept, removed = list(raw), 0
            episodes.append(EpisodeRewards(episode=ep, rewards=tuple(kept), removed_count=removed))
        return episodes

    def analyse(self) -> List[AnalysisResult]:
        episodes = self._episodes()
        if not episodes:
            self.warnings.append("no step rewards in trace; reward analysis skipped")
            return []
        averages = average_per_episode(episodes)
        smoothed = ema([v for _, v in averages.series], self.ema_beta)
        ema_result = AnalysisResult(
            analyzer=self.name,
            metric="ema_reward",
            series=tuple((e.episode, v) for e, v in zip(episodes, smoothed)),
        )
        vol_result = AnalysisResult(
            analyzer=self.name,
            metric="volatility",
            series=tuple((e.episode, volatility(e)) for e in episodes),
        )
        rrr_fn = risk_reward_cv if self.rrr == "cv" else risk_reward_mad
        rrr_points = []
        for e in episodes:
            value = rrr_fn(e)
            if value is not None:
                rrr_points.append((e.episode, value))
        results = [averages, ema_result, vol_result]
        results.append(
            AnalysisResult(
                analyzer=self.name, metric=f"risk_reward_{self.rrr}", series=tuple(rrr_points)
            )
        )
        return results

    def plot(self) -> List[PlotSpec]:
        episodes = self._episodes()
        if not episodes:
            return []
        results = {r.metric: r for r in self.analyse()}
        avg = results["average_reward"]
        ema_r = results["ema_reward"]
        removed_total = sum(e.removed_count for e in episodes)
        avg_annotations = None
        if removed_total:
            avg_annotations = (
                Annotation(None, f"outlier filter removed {removed_total} step reward(s)"),
            )
        plots = [
            PlotSpec(
                id="reward.average",
                kind="multi_line",
                title="Average reward per episode",
                axes=Axes(x_label="episode", y_label="reward"),
                series=(
                    Series(label="average", points=tuple((float(i), v) for i, v in avg.series)),
                    Series(label="ema", points=tuple((float(i), v) for i, v in ema_r.series)),
                ),
                annotations=avg_annotations,
            ),
            PlotSpec(
                id="reward.volatility",
                kind="line",
                title="Reward volatility per episode",
                axes=Axes(x_label="episode", y_label="volatility"),
                series=(
                    Series(
                        label="volatility",
                        points=tuple((float(i), v) for i, v in results["volatility"].series),
                    ),
                ),
            ),
        ]
        rrr = results[f"risk_reward_{self.rrr}"]
        gaps = [e.episode for e in episodes if all(i != e.episode for i, _ in rrr.series)]
        annotations = tuple(
            Annotation(
                (ep, ep),
                "risk-reward undefined for this episode (denominator ~ 0); rendered as a gap",
            )
            for ep in gaps
        )
        if rrr.series:
            plots.append(
                PlotSpec(
                    id=f"reward.risk_reward_{self.rrr}",
                    kind="line",
                    title=f"Risk-reward ratio per episode ({self.rrr})",
                    axes=Axes(x_label="episode", y_label=self.rrr),
                    series=(
                        Series(label=self.rrr, points=tuple((float(i), v) for i, v in rrr.series)),
                    ),
                    annotations=annotations if annotations else None,
                )
            )
        elif gaps:
            self.warnings.append("risk-reward ratio undefined for every episode")
        return plots
