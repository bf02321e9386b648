"""Analyzer registry, single-pass event dispatch, and the extension contract.

Custom analyses plug in by subclassing :class:`Analyzer`: implement
``consume`` (called with the trace header first, then every event in
order; ignore kinds you do not handle), ``analyse`` and ``plot``. Both
must be pure functions of the consumed events, so a re-run over the same
trace produces identical output. Register the instance and it
participates in every subsequent run, in registration order.

Dispatch is sequential. Each analyzer owns its accumulated state, so
analyse/plot could run in parallel across analyzers after consumption;
an analyzer itself need not be thread safe.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Iterator, List, Mapping, Optional, Tuple, Union

from .data_handler import TraceReader
from .trace_model import TraceEvent, TraceHeader

PLOT_KINDS = (
    "scatter2d",
    "histogram2d",
    "line",
    "multi_line",
    "histogram_ridgeline",
    "faceted_scatter",
)


@dataclass(frozen=True)
class Axes:
    x_label: str
    y_label: str


@dataclass(frozen=True)
class Series:
    """One plot layer: either a point list or a binned payload, never both."""

    label: str
    points: Optional[Tuple[Tuple[float, float], ...]] = None
    bins: Optional[Mapping] = None

    def __post_init__(self) -> None:
        if (self.points is None) and (self.bins is None):
            raise ValueError(f"series {self.label!r} has neither points nor bins")
        if (self.points is not None) and (self.bins is not None):
            raise ValueError(f"series {self.label!r} has both points and bins")


@dataclass(frozen=True)
class Annotation:
    """A message tied to an update or episode range (or to the whole plot when None)."""

    update_or_episode_range: Optional[Tuple[int, int]]
    message: str


@dataclass(frozen=True)
class PlotSpec:
    """Serializable plot description; the contract between engine and viewer."""

    id: str
    kind: str
    title: str
    axes: Axes
    series: Tuple[Series, ...]
    facets: Optional[Tuple[str, ...]] = None
    annotations: Optional[Tuple[Annotation, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if self.facets is not None and len(self.facets) != len(self.series):
            raise ValueError(
                f"plot {self.id!r}: {len(self.facets)} facets but {len(self.series)} series"
            )

    def to_json_dict(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind,
            "title": self.title,
            "axes": {"x_label": self.axes.x_label, "y_label": self.axes.y_label},
            "series": [],
            "facets": list(self.facets) if self.facets is not None else None,
            "annotations": None,
        }
        for s in self.series:
            entry: dict = {"label": s.label}
            if s.points is not None:
                entry["points"] = [[float(x), float(y)] for x, y in s.points]
            else:
                entry["bins"] = _jsonify(s.bins)
            out["series"].append(entry)
        if self.annotations is not None:
            out["annotations"] = [
                {
                    "update_or_episode_range": list(a.update_or_episode_range)
                    if a.update_or_episode_range is not None
                    else None,
                    "message": a.message,
                }
                for a in self.annotations
            ]
        return out


def _jsonify(value):
    if isinstance(value, Mapping):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value
    # numpy scalars
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass(frozen=True)
class Flag:
    """A flagged index range with the reason it was raised."""

    range: Tuple[int, int]
    reason: str


@dataclass(frozen=True)
class AnalysisResult:
    """One numeric series produced by an analyzer, with optional flags."""

    analyzer: str
    metric: str
    series: Tuple[Tuple[int, float], ...]
    flags: Tuple[Flag, ...] = ()

    def __post_init__(self) -> None:
        indices = [i for i, _ in self.series]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"result {self.metric!r}: indices must be strictly increasing")

    def values(self) -> List[float]:
        return [v for _, v in self.series]


class Analyzer(abc.ABC):
    """Base contract for all analyzers.

    ``consume`` receives the :class:`TraceHeader` first, then every event
    in trace order. ``reset`` clears accumulated state so one instance can
    run over several traces.
    """

    name: str = ""

    def __init__(self, name: str):
        self.name = name
        self.warnings: List[str] = []

    def reset(self) -> None:
        self.warnings = []

    @abc.abstractmethod
    def consume(self, event: Union[TraceHeader, TraceEvent]) -> None:
        ...

    @abc.abstractmethod
    def analyse(self) -> List[AnalysisResult]:
        ...

    @abc.abstractmethod
    def plot(self) -> List[PlotSpec]:
        ...


class DuplicateAnalyzerError(ValueError):
    pass


class Registry:
    """Ordered analyzer registry; names are unique and order is report order."""

    def __init__(self):
        self._analyzers: List[Analyzer] = []
        self._names: set = set()

    def register(self, analyzer: Analyzer) -> None:
        if analyzer.name in self._names:
            raise DuplicateAnalyzerError(f"analyzer {analyzer.name!r} already registered")
        self._names.add(analyzer.name)
        self._analyzers.append(analyzer)

    def names(self) -> List[str]:
        return [a.name for a in self._analyzers]

    def __iter__(self) -> Iterator[Analyzer]:
        return iter(self._analyzers)

    def __len__(self) -> int:
        return len(self._analyzers)


def register(registry: Registry, analyzer: Analyzer) -> None:
    registry.register(analyzer)


@dataclass
class SectionRun:
    """Everything one analyzer produced during a run."""

    analyzer: str
    results: List[AnalysisResult] = field(default_factory=list)
    plots: List[PlotSpec] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def run(registry: Registry, reader: TraceReader) -> List[SectionRun]:
    """Dispatch every event to every analyzer once, then collect analyses and plots.

    A failing analyzer is isolated: its section carries a warning and the
    other analyzers are unaffected. Output order equals registration order.
    """
    sections = {a.name: SectionRun(analyzer=a.name) for a in registry}
    failed: set = set()

    for analyzer in registry:
        analyzer.reset()
        try:
            analyzer.consume(reader.header)
        except Exception as exc:  # noqa: BLE001 - isolation contract
            failed.add(analyzer.name)
            sections[analyzer.name].warnings.append(f"analyzer failed on header: {exc}")

    for position, event in enumerate(reader.stream()):
        for analyzer in registry:
            if analyzer.name in failed:
                continue
            try:
                analyzer.consume(event)
            except Exception as exc:  # noqa: BLE001
                failed.add(analyzer.name)
                sections[analyzer.name].warnings.append(
                    f"analyzer failed while consuming event {position}: {exc}"
                )

    for analyzer in registry:
        section = sections[analyzer.name]
        if analyzer.name not in failed:
            try:
                section.results = list(analyzer.analyse())
                section.plots = list(analyzer.plot())
            except Exception as exc:  # noqa: BLE001
                section.results = []
                section.plots = []
                section.warnings.append(f"analysis failed: {exc}")
        section.warnings.extend(analyzer.warnings)

    return [sections[a.name] for a in registry]
