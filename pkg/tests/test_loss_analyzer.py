import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlinspect.loss_analyzer import LossAnalyzer, LossSeries, loss_curve
from rlinspect.reward_analyzer import ema
from rlinspect.trace_model import LossPoint

from conftest import make_header


class TestLossCurve:
    def test_constant_loss_both_lines_constant(self):
        series = LossSeries(points=tuple((i, 2.5) for i in range(10)))
        spec = loss_curve(series)
        for layer in spec.series:
            assert all(y == 2.5 for _, y in layer.points)

    def test_smoothed_length_matches_raw(self):
        series = LossSeries(points=tuple((i, float(i % 3)) for i in range(25)))
        spec = loss_curve(series)
        assert len(spec.series[0].points) == len(spec.series[1].points) == 25

    def test_one_step_ema(self):
        series = LossSeries(points=((0, 1.0), (1, 0.0)))
        spec = loss_curve(series, ema_beta=0.9)
        smoothed = [y for _, y in spec.series[1].points]
        assert smoothed == [1.0, pytest.approx(0.9)]

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            loss_curve(LossSeries(points=()))

    def test_invariants(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            LossSeries(points=((0, 1.0), (0, 2.0)))
        with pytest.raises(ValueError, match=">= 0"):
            LossSeries(points=((0, -1.0),))

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=2, max_size=60))
    def test_smoothing_reduces_total_variation(self, losses):
        smoothed = ema(losses)
        tv = lambda xs: sum(abs(b - a) for a, b in zip(xs, xs[1:]))
        assert tv(smoothed) <= tv(losses) + 1e-6


class TestLossAnalyzer:
    def test_pipeline(self):
        analyzer = LossAnalyzer()
        analyzer.reset()
        analyzer.consume(make_header())
        for i in range(5):
            analyzer.consume(LossPoint(update=i, loss=float(5 - i)))
        results = analyzer.analyse()
        assert [r.metric for r in results] == ["loss", "loss_ema"]
        plots = analyzer.plot()
        assert plots[0].id == "loss.curve"
        assert [s.label for s in plots[0].series] == ["loss", "ema"]

    def test_empty_trace(self):
        analyzer = LossAnalyzer()
        analyzer.reset()
        analyzer.consume(make_header())
        assert analyzer.analyse() == []
        assert analyzer.plot() == []
