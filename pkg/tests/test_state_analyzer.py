import math

import numpy as np
import pytest

from rlinspect.state_analyzer import (
    Embedding2D,
    StateAnalyzer,
    VisitLabel,
    euclidean_distance,
    exploration_vs_exploitation,
    histogram_intersection,
    ipca_partial_fit,
    jaccard_distance,
    mds_embed,
    mds_stress,
    pairwise_distances,
    project,
    smacof,
    state_space_distribution,
    training_states_distribution,
)
from rlinspect.trace_model import StateVisit

from conftest import make_header


def make_visits(points, modes=None, trained=None):
    n = len(points)
    modes = modes or ["explore"] * n
    trained = trained if trained is not None else [True] * n
    return [
        StateVisit(episode=0, step=i, state=tuple(p), mode=modes[i], trained=trained[i])
        for i, p in enumerate(points)
    ]


def make_embedding(points, modes=None, trained=None, method="ipca"):
    n = len(points)
    modes = modes or ["explore"] * n
    trained = trained if trained is not None else [True] * n
    labels = tuple(VisitLabel(m, t) for m, t in zip(modes, trained))
    return Embedding2D(points=tuple(tuple(p) for p in points), labels=labels, method=method)


class TestDistances:
    def test_three_four_five(self):
        assert euclidean_distance((0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)

    def test_identity(self):
        assert euclidean_distance((1.5, -2.0, 7.0), (1.5, -2.0, 7.0)) == 0.0

    def test_sqrt_21(self):
        # direct evaluation of the formula at high precision
        assert euclidean_distance((1, 1, 1), (2, 3, 5)) == pytest.approx(math.sqrt(21), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            euclidean_distance((1.0,), (1.0, 2.0))

    def test_jaccard_identity(self):
        assert jaccard_distance({1, 2}, {1, 2}) == 0.0

    def test_jaccard_disjoint(self):
        assert jaccard_distance({1, 2}, {3, 4}) == 1.0

    def test_jaccard_two_thirds(self):
        # |intersection| = 1, |union| = 3
        assert jaccard_distance({1, 2}, {2, 3}) == pytest.approx(2.0 / 3.0)

    def test_jaccard_both_empty(self):
        assert jaccard_distance(set(), set()) == 0.0

    def test_distance_axioms_1000_triples(self, rng):
        """Symmetry, identity of indiscernibles, triangle inequality."""
        for _ in range(1000):
            x, y, z = rng.normal(size=(3, 4))
            dxy = euclidean_distance(x, y)
            assert dxy == pytest.approx(euclidean_distance(y, x), abs=1e-12)
            assert euclidean_distance(x, x) == 0.0
            assert dxy >= 0
            assert dxy <= euclidean_distance(x, z) + euclidean_distance(z, y) + 1e-9

        for _ in range(1000):
            universe = list(range(8))
            a, b, c = (
                set(int(t) for t in rng.choice(universe, size=rng.integers(1, 6), replace=False))
                for _ in range(3)
            )
            dab = jaccard_distance(a, b)
            assert dab == pytest.approx(jaccard_distance(b, a), abs=1e-15)
            assert jaccard_distance(a, a) == 0.0
            assert 0.0 <= dab <= 1.0
            assert dab <= jaccard_distance(a, c) + jaccard_distance(c, b) + 1e-12


class TestMdsStress:
    def test_zero_for_exact_embedding(self, rng):
        pts = rng.normal(size=(6, 2))
        d = pairwise_distances([tuple(p) for p in pts], "continuous")
        assert mds_stress(d, pts) == pytest.approx(0.0, abs=1e-9)

    def test_two_points_exact(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        coords = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert mds_stress(d, coords) == pytest.approx(0.0, abs=1e-12)

    def test_two_points_mismatch(self):
        # single-term evaluation: sqrt((1 - 3)^2) = 2
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        coords = np.array([[0.0, 0.0], [3.0, 0.0]])
        assert mds_stress(d, coords) == pytest.approx(2.0, abs=1e-12)

    def test_asymmetric_rejected(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError, match="symmetric"):
            mds_stress(d, np.zeros((2, 2)))

    def test_negative_rejected(self):
        d = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(ValueError, match="non-negative"):
            mds_stress(d, np.zeros((2, 2)))

    def test_nonzero_diagonal_rejected(self):
        d = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="diagonal"):
            mds_stress(d, np.zeros((2, 2)))


class TestMdsEmbed:
    def test_three_four_five_triangle_realized(self):
        """Any exact 2-D realization is an oracle; compare distance matrices."""
        d = np.array([[0.0, 3.0, 5.0], [3.0, 0.0, 4.0], [5.0, 4.0, 0.0]])
        emb = mds_embed(d, seed=0)
        coords = np.asarray(emb.points)
        realized = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
        assert np.abs(realized - d).max() < 1e-3

    def test_identical_points_coincide(self):
        d = np.zeros((2, 2))
        emb = mds_embed(d, seed=1)
        assert emb.points[0] == emb.points[1] == (0.0, 0.0)

    def test_stress_non_increasing_every_iteration(self, rng):
        pts = rng.normal(size=(12, 5))
        d = pairwise_distances([tuple(p) for p in pts], "continuous")
        _, history = smacof(d, seed=2)
        assert len(history) >= 2
        for earlier, later in zip(history, history[1:]):
            assert later <= earlier + 1e-12
        assert history[-1] <= history[0]

    def test_deterministic_given_seed(self, rng):
        pts = rng.normal(size=(8, 3))
        d = pairwise_distances([tuple(p) for p in pts], "continuous")
        assert mds_embed(d, seed=7).points == mds_embed(d, seed=7).points


class TestIpca:
    def test_rank_one_line_recovers_axis(self, rng):
        """Closed-form principal axis of data on the line y = 2x."""
        t = rng.normal(size=300)
        data = np.column_stack([t, 2.0 * t])
        state = None
        for start in range(0, 300, 50):
            state = ipca_partial_fit(state, data[start : start + 50])
        expected = np.array([1.0, 2.0]) / math.sqrt(5.0)
        assert np.abs(state.components[0] - expected).max() < 1e-6

    def test_single_repeated_point_zero_variance(self):
        batch = np.tile([1.0, 2.0, 3.0, 4.0], (5, 1))
        state = ipca_partial_fit(None, batch)
        assert state.singular_values[0] == pytest.approx(0.0, abs=1e-12)
        assert state.singular_values[1] == pytest.approx(0.0, abs=1e-12)
        gram = state.components @ state.components.T
        assert np.abs(gram - np.eye(2)).max() < 1e-8

    def test_incremental_matches_batch_pca(self, rng):
        """Batch PCA via full SVD as the oracle, on anisotropic random points."""
        data = rng.normal(size=(500, 4)) * np.array([3.0, 2.0, 1.0, 0.5])
        half = len(data) // 2
        state = ipca_partial_fit(None, data[:half])
        state = ipca_partial_fit(state, data[half:])

        centered = data - data.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        dot = abs(float(np.dot(state.components[0], vt[0])))
        assert dot >= 0.99

    def test_orthonormal_after_every_partial_fit(self, rng):
        """1000 random batch sequences keep the components orthonormal."""
        for _ in range(1000):
            state = None
            for _ in range(int(rng.integers(1, 4))):
                batch = rng.normal(size=(int(rng.integers(2, 12)), 4))
                state = ipca_partial_fit(state, batch)
                norms = np.linalg.norm(state.components, axis=1)
                assert np.abs(norms - 1.0).max() < 1e-8
                assert abs(float(np.dot(state.components[0], state.components[1]))) < 1e-8

    def test_dimension_mismatch(self, rng):
        state = ipca_partial_fit(None, rng.normal(size=(4, 4)))
        with pytest.raises(ValueError, match="dimension mismatch"):
            ipca_partial_fit(state, rng.normal(size=(4, 3)))

    def test_first_batch_needs_two_rows(self):
        with pytest.raises(ValueError, match="at least 2"):
            ipca_partial_fit(None, np.zeros((1, 4)))

    def test_project_mean_is_origin(self, rng):
        data = rng.normal(size=(100, 4))
        state = ipca_partial_fit(None, data)
        emb = project(state, state.mean[None, :])
        assert emb.points[0] == pytest.approx((0.0, 0.0), abs=1e-12)

    def test_projection_variance_ordering(self, rng):
        data = rng.normal(size=(200, 4)) * np.array([5.0, 2.0, 1.0, 0.5])
        state = ipca_partial_fit(None, data)
        emb = np.asarray(project(state, data).points)
        assert emb[:, 0].var() >= emb[:, 1].var()

    def test_line_data_projects_to_x_axis(self, rng):
        t = rng.normal(size=200)
        data = np.column_stack([t, 2.0 * t])
        state = ipca_partial_fit(None, data)
        emb = np.asarray(project(state, data).points)
        assert np.abs(emb[:, 1]).max() < 1e-6

    def test_project_unfitted_rejected(self):
        with pytest.raises(ValueError, match="unfitted"):
            project(None, np.zeros((1, 4)))


class TestHistograms:
    def test_all_visits_one_state_single_bin(self):
        emb = make_embedding([(1.0, 1.0)] * 9)
        spec = state_space_distribution(make_visits([(1.0, 1.0)] * 9), emb, bins=10)
        counts = np.asarray(spec.series[0].bins["counts"])
        assert counts.sum() == 9
        assert (counts > 0).sum() == 1
        assert counts.max() == 9

    def test_mass_conservation(self, rng):
        pts = rng.normal(size=(137, 2))
        emb = make_embedding([tuple(p) for p in pts])
        spec = state_space_distribution(make_visits(pts.tolist()), emb, bins=13)
        assert np.asarray(spec.series[0].bins["counts"]).sum() == 137

    def test_uniform_grid_every_bin_one(self):
        """2500 grid states, 50 bins: constructed so each state lands in its own bin."""
        grid = [(float(i), float(j)) for i in range(50) for j in range(50)]
        emb = make_embedding(grid)
        spec = state_space_distribution(make_visits(grid), emb, bins=50)
        counts = np.asarray(spec.series[0].bins["counts"])
        assert counts.shape == (50, 50)
        assert (counts == 1).all()

    def test_intersection_identical(self):
        counts = np.array([[1, 2], [3, 4]])
        assert histogram_intersection(counts, counts * 7) == pytest.approx(1.0)

    def test_intersection_disjoint(self):
        assert histogram_intersection(np.array([1, 0]), np.array([0, 3])) == 0.0

    def test_intersection_half(self):
        # p uniform over 2 bins, q all mass in bin 1: sum(min) = 0.5
        assert histogram_intersection(np.array([1, 1]), np.array([0, 2])) == pytest.approx(0.5)


class TestFacetPlots:
    def test_all_explore_empty_exploit_facet(self):
        pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
        emb = make_embedding(pts, modes=["explore"] * 3)
        spec = exploration_vs_exploitation(make_visits(pts, modes=["explore"] * 3), emb, bins=5)
        assert spec.facets == ("explore", "exploit")
        assert len(spec.series[0].points) == 3
        assert len(spec.series[1].points) == 0
        assert any("no states in this facet" in a.message for a in spec.annotations)

    def test_facet_counts_partition_visits(self, rng):
        pts = rng.normal(size=(40, 2)).tolist()
        modes = ["explore" if rng.random() < 0.4 else "exploit" for _ in range(40)]
        emb = make_embedding(pts, modes=modes)
        spec = exploration_vs_exploitation(make_visits(pts, modes=modes), emb, bins=5)
        assert len(spec.series[0].points) + len(spec.series[1].points) == 40
        explore_set = {tuple(p) for p in spec.series[0].points}
        exploit_set = {tuple(p) for p in spec.series[1].points}
        assert explore_set | exploit_set == {(float(x), float(y)) for x, y in pts}

    def test_training_overlap_identical_distributions(self):
        pts = [(float(i % 5), float(i // 5)) for i in range(25)]
        emb = make_embedding(pts + pts, trained=[True] * 25 + [False] * 25)
        spec = training_states_distribution(
            make_visits(pts + pts, trained=[True] * 25 + [False] * 25), emb, bins=5
        )
        assert spec.facets == ("trained", "not-trained")
        overlap_note = [a.message for a in spec.annotations if "overlap" in a.message]
        assert overlap_note and "1.0000" in overlap_note[0]

    def test_training_overlap_disjoint(self):
        trained_pts = [(0.0, 0.0)] * 10
        untrained_pts = [(9.0, 9.0)] * 10
        pts = trained_pts + untrained_pts
        emb = make_embedding(pts, trained=[True] * 10 + [False] * 10)
        spec = training_states_distribution(
            make_visits(pts, trained=[True] * 10 + [False] * 10), emb, bins=5
        )
        overlap_note = [a.message for a in spec.annotations if "overlap" in a.message]
        assert overlap_note and "0.0000" in overlap_note[0]


class TestStateAnalyzer:
    def _run(self, analyzer, header, visits):
        analyzer.reset()
        analyzer.consume(header)
        for v in visits:
            analyzer.consume(v)
        return analyzer.analyse(), analyzer.plot()

    def test_ipca_pipeline(self, rng):
        header = make_header(state_dim=4)
        visits = make_visits(rng.normal(size=(300, 4)).tolist())
        results, plots = self._run(StateAnalyzer(), header, visits)
        assert {r.metric for r in results} == {"training_overlap", "explore_fraction"}
        assert [p.id for p in plots] == [
            "state.space_distribution",
            "state.exploration_vs_exploitation",
            "state.training_distribution",
        ]

    def test_discrete_set_requires_mds(self):
        header = make_header(state_dim=3, state_kind="discrete-set")
        visits = [
            StateVisit(episode=0, step=i, state=(i, i + 1), mode="explore", trained=True)
            for i in range(5)
        ]
        analyzer = StateAnalyzer(embedding="ipca")
        analyzer.reset()
        analyzer.consume(header)
        for v in visits:
            analyzer.consume(v)
        with pytest.raises(ValueError, match="--embedding mds"):
            analyzer.analyse()

    def test_discrete_set_mds_works(self):
        header = make_header(state_dim=3, state_kind="discrete-set")
        visits = [
            StateVisit(episode=0, step=i, state=(i, i + 1, i + 2), mode="explore", trained=True)
            for i in range(6)
        ]
        results, plots = self._run(StateAnalyzer(embedding="mds", seed=5), header, visits)
        assert len(plots) == 3

    def test_mds_subsampling_cap(self, rng):
        header = make_header(state_dim=2)
        visits = make_visits(rng.normal(size=(60, 2)).tolist())
        analyzer = StateAnalyzer(embedding="mds", mds_max_points=25, seed=1)
        _, plots = self._run(analyzer, header, visits)
        scatter = [s for s in plots[0].series if s.points is not None][0]
        assert len(scatter.points) == 25
        assert any("subsampled" in w for w in analyzer.warnings)

    def test_empty_trace_no_crash(self):
        analyzer = StateAnalyzer()
        analyzer.reset()
        analyzer.consume(make_header())
        assert analyzer.analyse() == []
        assert analyzer.plot() == []
        assert any("no state visits" in w for w in analyzer.warnings)
