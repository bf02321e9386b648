"""rlinspect: training-trace analytics and reporting for RL runs."""

__version__ = "0.1.0"

from .analyzer_core import (
    AnalysisResult,
    Analyzer,
    Annotation,
    Axes,
    Flag,
    PlotSpec,
    Registry,
    SectionRun,
    Series,
    register,
    run,
)
from .data_handler import TraceError, TraceReader, TraceWriter, open_reader, open_writer
from .trace_model import (
    ActionProbe,
    ActionSpace,
    LayerSnapshot,
    LayerSummary,
    LossPoint,
    StateVisit,
    StepReward,
    TraceHeader,
    ValidationResult,
    validate_event,
)

__all__ = [
    "__version__",
    "AnalysisResult",
    "Analyzer",
    "Annotation",
    "Axes",
    "Flag",
    "PlotSpec",
    "Registry",
    "SectionRun",
    "Series",
    "register",
    "run",
    "TraceError",
    "TraceReader",
    "TraceWriter",
    "open_reader",
    "open_writer",
    "ActionProbe",
    "ActionSpace",
    "LayerSnapshot",
    "LayerSummary",
    "LossPoint",
    "StateVisit",
    "StepReward",
    "TraceHeader",
    "ValidationResult",
    "validate_event",
]
