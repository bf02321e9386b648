"""State-space analysis: 2-D embedding of visited states and their distributions.

High-dimensional states are embedded with incremental PCA by default.
Metric MDS by stress majorization is available as an alternative and is
the only option for discrete-set states (PCA needs a vector space; the
pairwise matrix uses the Jaccard distance there).

Three plots are produced over the embedding: the overall state-space
distribution (scatter plus 2-D density histogram), exploration versus
exploitation facets, and trained versus not-trained facets with a
histogram-intersection overlap score.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .analyzer_core import AnalysisResult, Analyzer, Annotation, Axes, PlotSpec, Series
from .trace_model import (
    MODE_EXPLORE,
    MODE_EXPLOIT,
    STATE_CONTINUOUS,
    StateVisit,
    TraceHeader,
)

MDS_MAX_ITER = 300
MDS_TOL = 1e-6
DEFAULT_BINS = 50
DEFAULT_MDS_MAX_POINTS = 2000
IPCA_BATCH = 256


# ---------------------------------------------------------------------------
# distances


def euclidean_distance(x: Sequence[float], y: Sequence[float]) -> float:
    """sqrt(sum_i (x_i - y_i)^2); x and y must have equal length."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def jaccard_distance(x, y) -> float:
    """1 - |x & y| / |x | y| over token sets; two empty sets give 0 by convention."""
    xs, ys = set(x), set(y)
    union = xs | ys
    if not union:
        return 0.0
    return 1.0 - len(xs & ys) / len(union)


def pairwise_distances(states: Sequence, state_kind: str) -> np.ndarray:
    """Full symmetric distance matrix for either state representation."""
    n = len(states)
    if state_kind == STATE_CONTINUOUS:
        pts = np.asarray(states, dtype=float)
        sq = np.sum(pts**2, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
        np.fill_diagonal(d2, 0.0)
        return np.sqrt(np.maximum(d2, 0.0))
    d = np.zeros((n, n))
    sets = [set(s) for s in states]
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = jaccard_distance(sets[i], sets[j])
    return d


# ---------------------------------------------------------------------------
# metric MDS by stress majorization


def mds_stress(distances: np.ndarray, coords: np.ndarray) -> float:
    """Raw stress: sqrt of the summed squared mismatch between target and embedded distances."""
    d = np.asarray(distances, dtype=float)
    x = np.asarray(coords, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if x.shape[0] != d.shape[0]:
        raise ValueError("coordinate count does not match distance matrix")
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    if not np.allclose(d, d.T, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.abs(np.diag(d)) > 1e-12):
        raise ValueError("distance matrix must have a zero diagonal")
    emb = _coord_distances(x)
    iu = np.triu_indices(d.shape[0], k=1)
    return float(np.sqrt(np.sum((d[iu] - emb[iu]) ** 2)))


def _coord_distances(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=2))


def smacof(
    distances: np.ndarray,
    seed: int,
    max_iter: int = MDS_MAX_ITER,
    tol: float = MDS_TOL,
) -> Tuple[np.ndarray, List[float]]:
    """Stress majorization from a seeded random start.

    Iterates the Guttman transform, which never increases the stress,
    until the per-iteration improvement drops below ``tol`` or ``max_iter``
    is reached. Returns the coordinates and the stress trajectory
    (initial value included), so the final stress never exceeds the first.
    An all-zero distance matrix puts every point at the origin.
    """
    d = np.asarray(distances, dtype=float)
    mds_stress(d, np.zeros((d.shape[0], 2)))  # reuse the input validation
    n = d.shape[0]
    if not np.any(d > 0):
        return np.zeros((n, 2)), [0.0]

    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, 1.0, size=(n, 2)) * (d.max() / 2.0)
    history = [mds_stress(d, x)]
    for _ in range(max_iter):
        emb = _coord_distances(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(emb > 0, d / np.where(emb > 0, emb, 1.0), 0.0)
        b = -ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        x = (b @ x) / n
        history.append(mds_stress(d, x))
        if history[-2] - history[-1] < tol:
            break
    return x, history


def mds_embed(
    distances: np.ndarray,
    seed: int,
    labels: Tuple["VisitLabel", ...] = (),
    max_iter: int = MDS_MAX_ITER,
    tol: float = MDS_TOL,
) -> "Embedding2D":
    """Embed a distance matrix into 2-D by SMACOF stress majorization."""
    coords, _ = smacof(distances, seed, max_iter=max_iter, tol=tol)
    return Embedding2D(
        points=tuple((float(px), float(py)) for px, py in coords), labels=labels, method="mds"
    )


# ---------------------------------------------------------------------------
# incremental PCA


@dataclass(frozen=True)
class VisitLabel:
    mode: str
    trained: bool


@dataclass(frozen=True)
class Embedding2D:
    """2-D projection of states. ``labels`` may be empty for standalone embeddings."""

    points: Tuple[Tuple[float, float], ...]
    labels: Tuple[VisitLabel, ...]
    method: str  # "ipca" | "mds"

    def __post_init__(self) -> None:
        if self.labels and len(self.labels) != len(self.points):
            raise ValueError("labels and points must have equal length")
        for x, y in self.points:
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ValueError("embedding coordinates must be finite")


@dataclass(frozen=True)
class IpcaState:
    """Running mean plus the top-2 principal directions of everything seen so far."""

    mean: np.ndarray
    components: np.ndarray  # (2, state_dim), orthonormal rows
    singular_values: np.ndarray  # (2,)
    samples_seen: int


def _fix_signs(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def ipca_partial_fit(state: Optional[IpcaState], batch: np.ndarray) -> IpcaState:
    """Fold one batch into the incremental PCA state.

    The update stacks the previous components scaled by their singular
    values, a mean-shift correction row, and the centered batch, then takes
    the top-2 right singular vectors of the stack. The first call needs at
    least 2 rows. Component signs are fixed so the largest-magnitude entry
    of each component is positive.
    """
    x = np.asarray(batch, dtype=float)
    if x.ndim != 2:
        raise ValueError("batch must be a 2-D array of states")
    dim = x.shape[1]
    if dim < 2:
        raise ValueError("incremental PCA needs state_dim >= 2")
    if state is None or state.samples_seen == 0:
        if x.shape[0] < 2:
            raise ValueError("first batch must contain at least 2 states")
        mean = x.mean(axis=0)
        stack = x - mean
        total = x.shape[0]
    else:
        if dim != state.mean.shape[0]:
            raise ValueError(f"dimension mismatch: batch has {dim}, state has {state.mean.shape[0]}")
        n_prev = state.samples_seen
        m = x.shape[0]
        total = n_prev + m
        batch_mean = x.mean(axis=0)
        correction = np.sqrt(n_prev * m / total) * (state.mean - batch_mean)
        stack = np.vstack(
            [
                state.singular_values[:, None] * state.components,
                x - batch_mean,
                correction[None, :],
            ]
        )
        mean = (n_prev * state.mean + m * batch_mean) / total
    _, s, vt = np.linalg.svd(stack, full_matrices=False)
    return IpcaState(
        mean=mean,
        components=_fix_signs(vt[:2]),
        singular_values=s[:2].copy(),
        samples_seen=total,
    )


def project(
    state: IpcaState, points: np.ndarray, labels: Tuple[VisitLabel, ...] = ()
) -> Embedding2D:
    """Project points onto the fitted components: (points - mean) @ components.T."""
    if state is None or state.samples_seen < 2:
        raise ValueError("cannot project with an unfitted incremental PCA state")
    pts = np.asarray(points, dtype=float)
    coords = (pts - state.mean) @ state.components.T
    return Embedding2D(
        points=tuple((float(x), float(y)) for x, y in coords), labels=labels, method="ipca"
    )


# ---------------------------------------------------------------------------
# distribution plots


def _bounds(points: np.ndarray) -> Tuple[float, float, float, float]:
    """Embedding bounding box expanded by 1% per side; degenerate axes get +-0.5."""
    x_lo, x_hi = float(points[:, 0].min()), float(points[:, 0].max())
    y_lo, y_hi = float(points[:, 1].min()), float(points[:, 1].max())
    x_pad = 0.01 * (x_hi - x_lo) if x_hi > x_lo else 0.5
    y_pad = 0.01 * (y_hi - y_lo) if y_hi > y_lo else 0.5
    return x_lo - x_pad, x_hi + x_pad, y_lo - y_pad, y_hi + y_pad


def histogram2d(
    points: Sequence[Tuple[float, float]],
    bins: int,
    bounds: Optional[Tuple[float, float, float, float]] = None,
) -> dict:
    """bins x bins counts over the (possibly shared) bounding box, as a JSON-ready dict."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if bounds is None:
        bounds = _bounds(pts)
    x_lo, x_hi, y_lo, y_hi = bounds
    counts, x_edges, y_edges = np.histogram2d(
        pts[:, 0], pts[:, 1], bins=bins, range=[[x_lo, x_hi], [y_lo, y_hi]]
    )
    return {
        "x_edges": [float(e) for e in x_edges],
        "y_edges": [float(e) for e in y_edges],
        "counts": [[int(c) for c in row] for row in counts],
    }


def histogram_intersection(p_counts: np.ndarray, q_counts: np.ndarray) -> float:
    """Overlap of two histograms: sum of min(p, q) over mass-normalized bins, in [0, 1]."""
    p = np.asarray(p_counts, dtype=float).ravel()
    q = np.asarray(q_counts, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("histograms must have the same shape")
    if p.sum() <= 0 or q.sum() <= 0:
        return 0.0
    return float(np.minimum(p / p.sum(), q / q.sum()).sum())


def _scatter_series(label: str, coords: Sequence[Tuple[float, float]]) -> Series:
    return Series(label=label, points=tuple((float(x), float(y)) for x, y in coords))


def state_space_distribution(
    visits: Sequence[StateVisit], embedding: Embedding2D, bins: int
) -> PlotSpec:
    """Scatter of all embedded states plus a bins x bins density histogram."""
    if not visits:
        raise ValueError("no state visits to plot")
    pts = np.asarray(embedding.points, dtype=float)
    hist = histogram2d(embedding.points, bins)
    return PlotSpec(
        id="state.space_distribution",
        kind="histogram2d",
        title="State-space distribution",
        axes=Axes(x_label="component 1", y_label="component 2"),
        series=(
            Series(label="density", bins=hist),
            _scatter_series("states", [tuple(p) for p in pts]),
        ),
    )


def _facet_plot(
    plot_id: str,
    title: str,
    embedding: Embedding2D,
    facet_names: Tuple[str, str],
    facet_masks: Tuple[np.ndarray, np.ndarray],
    bins: int,
) -> Tuple[PlotSpec, List[dict]]:
    pts = np.asarray(embedding.points, dtype=float)
    bounds = _bounds(pts)
    series = []
    annotations: List[Annotation] = []
    histograms: List[dict] = []
    for name, mask in zip(facet_names, facet_masks):
        facet_pts = pts[mask]
        series.append(_scatter_series(name, [tuple(p) for p in facet_pts]))
        if len(facet_pts) == 0:
            annotations.append(Annotation(None, f"no states in this facet: {name}"))
            histograms.append(histogram2d(np.empty((0, 2)), bins, bounds))
        else:
            hist = histogram2d(facet_pts, bins, bounds)
            histograms.append(hist)
            occupied = int(np.count_nonzero(np.asarray(hist["counts"])))
            annotations.append(
                Annotation(None, f"{name}: {int(mask.sum())} states over {occupied} occupied bins")
            )
    spec = PlotSpec(
        id=plot_id,
        kind="faceted_scatter",
        title=title,
        axes=Axes(x_label="component 1", y_label="component 2"),
        series=tuple(series),
        facets=facet_names,
        annotations=tuple(annotations),
    )
    return spec, histograms


def exploration_vs_exploitation(
    visits: Sequence[StateVisit], embedding: Embedding2D, bins: int
) -> PlotSpec:
    """Side-by-side facets of explore-mode and exploit-mode states."""
    if not visits:
        raise ValueError("no state visits to plot")
    modes = np.asarray([lbl.mode for lbl in embedding.labels])
    spec, _ = _facet_plot(
        "state.exploration_vs_exploitation",
        "Exploration vs exploitation",
        embedding,
        (MODE_EXPLORE, MODE_EXPLOIT),
        (modes == MODE_EXPLORE, modes == MODE_EXPLOIT),
        bins,
    )
    return spec


def training_states_distribution(
    visits: Sequence[StateVisit], embedding: Embedding2D, bins: int
) -> PlotSpec:
    """Trained vs not-trained facets, annotated with their histogram overlap score."""
    if not visits:
        raise ValueError("no state visits to plot")
    trained = np.asarray([lbl.trained for lbl in embedding.labels], dtype=bool)
    spec, hists = _facet_plot(
        "state.training_distribution",
        "Training vs non-training states",
        embedding,
        ("trained", "not-trained"),
        (trained, ~trained),
        bins,
    )
    overlap = histogram_intersection(
        np.asarray(hists[0]["counts"]), np.asarray(hists[1]["counts"])
    )
    annotations = tuple(spec.annotations or ()) + (
        Annotation(None, f"trained/not-trained histogram overlap: {overlap:.4f}"),
    )
    return PlotSpec(
        id=spec.id,
        kind=spec.kind,
        title=spec.title,
        axes=spec.axes,
        series=spec.series,
        facets=spec.facets,
        annotations=annotations,
    )


def training_overlap_score(embedding: Embedding2D, bins: int) -> float:
    """Histogram intersection between trained and not-trained state densities."""
    pts = np.asarray(embedding.points, dtype=float)
    trained = np.asarray([lbl.trained for lbl in embedding.labels], dtype=bool)
    bounds = _bounds(pts)
    p = np.asarray(histogram2d(pts[trained], bins, bounds)["counts"])
    q = np.asarray(histogram2d(pts[~trained], bins, bounds)["counts"])
    return histogram_intersection(p, q)


# ---------------------------------------------------------------------------
# analyzer


class StateAnalyzer(Analyzer):
    """Collects state visits, fits the embedding, and emits the three distribution plots."""

    def __init__(
        self,
        embedding: str = "ipca",
        bins: int = DEFAULT_BINS,
        mds_max_points: int = DEFAULT_MDS_MAX_POINTS,
        seed: int = 0,
        ipca_batch: int = IPCA_BATCH,
    ):
        super().__init__(name="state")
        if embedding not in ("ipca", "mds"):
            raise ValueError(f"unknown embedding method {embedding!r}")
        self.embedding_method = embedding
        self.bins = bins
        self.mds_max_points = mds_max_points
        self.seed = seed
        self.ipca_batch = ipca_batch
        self.reset()

    def reset(self) -> None:
        super().reset()
        self._header: Optional[TraceHeader] = None
        self._visits: List[StateVisit] = []
        self._embedding: Optional[Embedding2D] = None
        self._embedded_visits: List[StateVisit] = []

    def consume(self, event) -> None:
        if isinstance(event, TraceHeader):
            self._header = event
            self._embedding = None
        elif isinstance(event, StateVisit):
            self._visits.append(event)
            self._embedding = None

    def _fit_embedding(self) -> Embedding2D:
        if self._embedding is not None:
            return self._embedding
        header = self._header
        self._embedded_visits = list(self._visits)
        labels = tuple(VisitLabel(v.mode, v.trained) for v in self._visits)
        if self.embedding_method == "ipca":
            if header is not None and header.state_kind != STATE_CONTINUOUS:
                raise ValueError(
                    "incremental PCA needs continuous state vectors; "
                    "re-run with --embedding mds for discrete-set states"
                )
            states = np.asarray([v.state for v in self._visits], dtype=float)
            fitted: Optional[IpcaState] = None
            for start in range(0, len(states), self.ipca_batch):
                fitted = ipca_partial_fit(fitted, states[start : start + self.ipca_batch])
            self._embedding = project(fitted, states, labels)
        else:
            states: List = [v.state for v in self._visits]
            if len(states) > self.mds_max_points:
                rng = np.random.default_rng(self.seed)
                keep = np.sort(rng.choice(len(states), size=self.mds_max_points, replace=False))
                states = [states[i] for i in keep]
                labels = tuple(labels[i] for i in keep)
                self._embedded_visits = [self._visits[i] for i in keep]
                self.warnings.append(
                    f"mds: subsampled {self.mds_max_points} of {len(self._visits)} states (seed {self.seed})"
                )
            kind = header.state_kind if header is not None else STATE_CONTINUOUS
            d = pairwise_distances(states, kind)
            self._embedding = mds_embed(d, seed=self.seed, labels=labels)
        return self._embedding

    def analyse(self) -> List[AnalysisResult]:
        if not self._visits:
            self.warnings.append("no state visits in trace; state analysis skipped")
            return []
        emb = self._fit_embedding()
        overlap = training_overlap_score(emb, self.bins)
        explore = sum(1 for v in self._visits if v.mode == MODE_EXPLORE)
        return [
            AnalysisResult(
                analyzer=self.name,
                metric="training_overlap",
                series=((0, overlap),),
            ),
            AnalysisResult(
                analyzer=self.name,
                metric="explore_fraction",
                series=((0, explore / len(self._visits)),),
            ),
        ]

    def plot(self) -> List[PlotSpec]:
        if not self._visits:
            return []
        emb = self._fit_embedding()
        visits = self._embedded_visits
        return [
            state_space_distribution(visits, emb, self.bins),
            exploration_vs_exploitation(visits, emb, self.bins),
            training_states_distribution(visits, emb, self.bins),
        ]
