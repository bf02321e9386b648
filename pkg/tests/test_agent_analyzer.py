import numpy as np

from rlinspect.agent_analyzer import (
    AgentAnalyzer,
    LayerHistory,
    distribution_ridgeline,
    exploding_gradient_flags,
    vanishing_gradient_flags,
)
from rlinspect.demo_trainer import summarize
from rlinspect.trace_model import LayerSnapshot, StateVisit

from conftest import make_header


def history_from_values(values_per_update, layer="dense1", kind="gradient", start=0):
    history = LayerHistory(layer=layer, kind=kind)
    for i, values in enumerate(values_per_update):
        history.append(start + i, summarize(np.asarray(values, dtype=float), 1e-7), None)
    return history


class TestRidgeline:
    def test_single_snapshot_single_row(self):
        history = history_from_values([np.linspace(-1, 1, 100)])
        spec = distribution_ridgeline(history)
        assert len(spec.series) == 1
        assert spec.kind == "histogram_ridgeline"

    def test_600_snapshots_subsampled_with_endpoints(self, rng):
        history = history_from_values([rng.normal(size=50) for _ in range(600)])
        spec = distribution_ridgeline(history)
        assert len(spec.series) <= 60
        labels = [s.label for s in spec.series]
        assert labels[0] == "update 0"
        assert labels[-1] == "update 599"

    def test_constant_snapshots_single_occupied_bin(self):
        history = history_from_values([np.full(10, 3.5) for _ in range(4)])
        spec = distribution_ridgeline(history)
        for s in spec.series:
            counts = np.asarray(s.bins["counts"])
            assert counts.sum() == 10
            assert (counts > 0).sum() == 1

    def test_row_count_bounded_for_any_input(self, rng):
        for n in (1, 59, 60, 61, 200):
            history = history_from_values([rng.normal(size=5) for _ in range(n)])
            spec = distribution_ridgeline(history)
            assert len(spec.series) <= 60
            assert spec.series[0].label == "update 0"
            assert spec.series[-1].label == f"update {n - 1}"


class TestVanishingFlags:
    def test_all_zero_ten_updates(self):
        history = history_from_values([np.zeros(20) for _ in range(10)])
        flags = vanishing_gradient_flags([history], window=5)
        assert len(flags) == 1
        assert flags[0].range == (0, 9)

    def test_half_near_zero_not_flagged(self):
        values = np.concatenate([np.zeros(10), np.ones(10)])  # fraction 0.5
        history = history_from_values([values for _ in range(10)])
        assert vanishing_gradient_flags([history]) == []

    def test_exact_range_666_672(self):
        """Zeros only in updates 666-672; the flag spans exactly that range."""
        values_per_update = []
        rng = np.random.default_rng(0)
        for update in range(650, 690):
            if 666 <= update <= 672:
                values_per_update.append(np.zeros(30))
            else:
                values_per_update.append(rng.normal(size=30) + 0.5)
        history = history_from_values(values_per_update, start=650)
        flags = vanishing_gradient_flags([history], window=5)
        assert [f.range for f in flags] == [(666, 672)]

    def test_short_run_below_window_not_flagged(self):
        values_per_update = [np.zeros(5) for _ in range(4)]  # run of 4 < window 5
        history = history_from_values(values_per_update)
        assert vanishing_gradient_flags([history], window=5) == []

    def test_non_gradient_kind_ignored(self):
        history = history_from_values([np.zeros(5) for _ in range(10)], kind="weight")
        assert vanishing_gradient_flags([history]) == []

    def test_flags_maximal_and_disjoint(self, rng):
        pattern = [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1]  # 0 = vanishing
        values_per_update = [np.zeros(8) if p == 0 else np.ones(8) for p in pattern]
        history = history_from_values(values_per_update)
        flags = vanishing_gradient_flags([history], window=5)
        assert [f.range for f in flags] == [(0, 4), (6, 11)]


class TestExplodingFlags:
    def test_small_gradients_not_flagged(self):
        history = history_from_values([np.full(5, 10.0) for _ in range(10)])
        assert exploding_gradient_flags([history]) == []

    def test_three_consecutive_large(self):
        values_per_update = [np.ones(5)] * 3 + [np.full(5, 1e4)] * 3 + [np.ones(5)] * 3
        history = history_from_values(values_per_update)
        flags = exploding_gradient_flags([history], window=3)
        assert [f.range for f in flags] == [(3, 5)]

    def test_alternating_no_run(self):
        values_per_update = []
        for i in range(10):
            values_per_update.append(np.full(5, 1e4) if i % 2 == 0 else np.ones(5))
        history = history_from_values(values_per_update)
        assert exploding_gradient_flags([history], window=3) == []

    def test_negative_magnitudes_count(self):
        values_per_update = [np.full(5, -2e3) for _ in range(3)]
        history = history_from_values(values_per_update)
        flags = exploding_gradient_flags([history], window=3)
        assert len(flags) == 1


class TestAgentAnalyzer:
    def test_pipeline_with_episode_labels(self, rng):
        analyzer = AgentAnalyzer()
        analyzer.reset()
        analyzer.consume(make_header())
        for update in range(12):
            analyzer.consume(
                StateVisit(
                    episode=update // 4,
                    step=update % 4,
                    state=(0.0, 0.0, 0.0, 0.0),
                    mode="explore",
                    trained=True,
                )
            )
            grad = np.zeros(10) if 3 <= update <= 9 else rng.normal(size=10) + 1.0
            analyzer.consume(
                LayerSnapshot(
                    update=update, layer="dense1", kind="gradient", summary=summarize(grad, 1e-7)
                )
            )
        results = analyzer.analyse()
        vanishing = [r for r in results if r.metric == "vanishing_gradient"][0]
        assert [f.range for f in vanishing.flags] == [(3, 9)]
        assert "episodes 0-2" in vanishing.flags[0].reason
        plots = analyzer.plot()
        assert len(plots) == 1
        assert plots[0].annotations is not None

    def test_empty_trace(self):
        analyzer = AgentAnalyzer()
        analyzer.reset()
        analyzer.consume(make_header())
        assert analyzer.analyse() == []
        assert analyzer.plot() == []
