"""Tests for elasticts.centroid — means, k-means, Ward prototypes and NN classification."""

from __future__ import annotations

import numpy as np
import pytest

from elasticts import centroid
from elasticts.centroid import (
    ahc_prototypes,
    compute_mean,
    initial_mean_matrix,
    kme_prototypes,
    kmeans,
    mean_step,
    medoid,
    nn_classify,
    resample,
    variation,
    ward_merge_order,
)
from elasticts.exceptions import ElasticConfigError, ElasticDataError
from elasticts.maps import elastic_euclidean, identical_row_matrix
from elasticts.models import Dataset, MeanConfig, NNMode, PrototypeSet
from elasticts.warping import dtw_alignment, dtw_distance


def _bundle(
    rng: np.random.Generator, centre: np.ndarray, count: int, noise: float = 0.01
) -> list[np.ndarray]:
    return [centre + rng.normal(scale=noise, size=len(centre)) for _ in range(count)]


class TestVariation:
    def test_empty_set(self):
        assert variation(np.ones((3, 2)), []) == 0.0

    def test_identical_rows_sum_dtw(self, rng):
        z = rng.normal(size=5)
        series = [rng.normal(size=int(rng.integers(1, 7))) for _ in range(6)]
        Y = identical_row_matrix(z, 6)
        expected = sum(dtw_distance(x, z) ** 2 for x in series)
        assert variation(Y, series) == pytest.approx(expected, abs=1e-9)

    def test_series_on_zero_cost_path(self):
        Y = np.array([[1.0, 9.0], [9.0, 2.0]])
        assert variation(Y, [[1.0, 2.0]]) == 0.0


class TestMeanStep:
    def test_singleton_full_step(self, rng):
        x = rng.normal(size=6)
        Y = mean_step(rng.normal(size=(6, 4)), [x], eta=1.0)
        assert variation(Y, [x]) == 0.0

    def test_duplicates_half_step(self, rng):
        x = rng.normal(size=5)
        Y = mean_step(rng.normal(size=(5, 3)), [x, x.copy()], eta=0.5)
        assert variation(Y, [x]) == 0.0

    def test_default_rate_is_average(self, rng):
        series = [rng.normal(size=4) for _ in range(3)]
        Y = rng.normal(size=(4, 3))
        assert np.array_equal(mean_step(Y, series), mean_step(Y, series, eta=1 / 3))

    def test_small_rate_interpolates(self, rng):
        series = [rng.normal(size=4) for _ in range(4)]
        Y = rng.normal(size=(4, 2))
        full = mean_step(Y, series)
        quarter = mean_step(Y, series, eta=1 / 16)
        assert np.allclose(quarter, 0.75 * Y + 0.25 * full)

    def test_uncovered_cells_keep_value(self):
        Y = np.array([[0.0, 5.0], [7.0, 0.0]])
        stepped = mean_step(Y, [[0.0, 0.0]])
        assert stepped[0, 1] == 5.0
        assert stepped[1, 0] == 7.0

    def test_never_increases_variation(self, rng):
        for _ in range(50):
            N = int(rng.integers(1, 11))
            series = [rng.normal(size=int(rng.integers(2, 31))) for _ in range(N)]
            rows = max(len(x) for x in series)
            Y = rng.normal(size=(rows, int(rng.integers(1, 8))))
            before = variation(Y, series)
            assert variation(mean_step(Y, series), series) <= before + 1e-9

    def test_empty_set_rejected(self):
        with pytest.raises(ElasticDataError):
            mean_step(np.ones((2, 2)), [])


class TestComputeMean:
    def test_singleton_reaches_zero(self, rng):
        x = rng.normal(size=8)
        state = compute_mean([x], init=rng.normal(size=(8, 5)))
        assert state.variation_trace[1] == 0.0
        assert state.variation == 0.0

    def test_two_identical_series(self, rng):
        x = rng.normal(size=7)
        assert compute_mean([x, x.copy()]).variation == 0.0

    def test_monotone_trace(self, rng):
        for _ in range(50):
            N = int(rng.integers(1, 11))
            series = [rng.normal(size=int(rng.integers(1, 31))) for _ in range(N)]
            state = compute_mean(series, MeanConfig(elasticity=int(rng.integers(1, 10))))
            trace = state.variation_trace
            assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:], strict=False))
            assert state.variation == trace[-1]
            assert len(trace) == state.iterations + 1

    def test_beats_every_member(self, rng):
        for _ in range(20):
            length = int(rng.integers(3, 20))
            series = [rng.normal(size=length) for _ in range(int(rng.integers(2, 8)))]
            state = compute_mean(series)
            for z in series:
                assert state.variation <= variation(identical_row_matrix(z, length), series) + 1e-9

    def test_shape(self, rng):
        series = [rng.normal(size=n) for n in (5, 9, 7)]
        state = compute_mean(series, MeanConfig(elasticity=3))
        assert state.Y.shape == (9, 3)

    def test_explicit_row_count(self, rng):
        state = compute_mean([rng.normal(size=4)], n=10)
        assert state.Y.shape == (10, 10)

    def test_empty_rejected(self):
        with pytest.raises(ElasticDataError):
            compute_mean([])

    def test_config_validation(self):
        with pytest.raises(ElasticConfigError):
            MeanConfig(eta=0.0)
        with pytest.raises(ElasticConfigError):
            MeanConfig(max_iter=0)


class TestMedoid:
    def test_central_series(self):
        series = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]
        assert medoid(series) == 1

    def test_tie_goes_to_first(self):
        assert medoid([[1.0, 2.0], [1.0, 2.0]]) == 0

    def test_initial_matrix_is_identical_rows(self):
        series = [np.array([0.0, 0.0, 0.0]), np.array([1.0, 2.0, 3.0]), np.array([2.0, 2.0, 2.0])]
        Y = initial_mean_matrix(series, m=3, n=4)
        assert Y.shape == (4, 3)
        assert np.all(Y == Y[0])

    def test_resample(self):
        assert resample(np.array([0.0, 2.0]), 3).tolist() == [0.0, 1.0, 2.0]
        assert resample(np.array([4.0]), 3).tolist() == [4.0, 4.0, 4.0]
        assert resample(np.array([0.0, 1.0, 2.0, 3.0]), 2).tolist() == [0.0, 3.0]


class TestKMeans:
    def test_one_cluster_is_the_mean(self, rng):
        series = [rng.normal(size=6) for _ in range(5)]
        centroids, clusters = kmeans(series, 1)
        assert np.array_equal(centroids[0], compute_mean(series).Y)
        assert clusters.members == [[0, 1, 2, 3, 4]]

    def test_every_series_its_own_cluster(self, rng):
        series = [rng.normal(size=5) for _ in range(4)]
        centroids, clusters = kmeans(series, 4)
        assert sorted(clusters.assignments.tolist()) == [0, 1, 2, 3]
        for c, members in enumerate(clusters.members):
            assert variation(centroids[c], [series[i] for i in members]) == 0.0

    def test_separates_bundles(self, rng):
        low = _bundle(rng, np.sin(np.linspace(0, 3, 12)), 4)
        high = _bundle(rng, 10.0 + np.cos(np.linspace(0, 3, 12)), 4)
        _, clusters = kmeans(low + high, 2)
        groups = {frozenset(m) for m in clusters.members}
        assert groups == {frozenset(range(4)), frozenset(range(4, 8))}

    def test_objective_non_increasing(self, rng):
        for _ in range(10):
            series = [rng.normal(size=int(rng.integers(4, 12))) for _ in range(9)]
            _, clusters = kmeans(series, 3, MeanConfig(max_iter=5))
            trace = clusters.objective_trace
            assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:], strict=False))

    def test_assignment_is_partition(self, rng):
        series = [rng.normal(size=6) for _ in range(7)]
        _, clusters = kmeans(series, 3)
        flat = sorted(i for members in clusters.members for i in members)
        assert flat == list(range(7))
        assert all(len(members) > 0 for members in clusters.members)

    def test_bad_k(self, rng):
        with pytest.raises(ElasticDataError):
            kmeans([rng.normal(size=3)], 2)


class TestWard:
    def test_pairs_merge_first(self):
        series = [
            np.array([0.0, 0.0, 0.0]),
            np.array([0.0, 0.1, 0.0]),
            np.array([5.0, 5.0, 5.0]),
            np.array([5.0, 5.1, 5.0]),
        ]
        merges = ward_merge_order(series)
        first_two = {frozenset(map(int, merges[k, :2])) for k in range(2)}
        assert first_two == {frozenset({0, 1}), frozenset({2, 3})}
        assert merges.shape == (3, 4)

    def test_single_series(self):
        assert ward_merge_order([np.ones(3)]).shape == (0, 4)


class TestPrototypes:
    def _dataset(self, rng: np.random.Generator) -> Dataset:
        pos = _bundle(rng, np.linspace(0.0, 1.0, 10), 4, noise=0.05)
        neg = _bundle(rng, np.linspace(1.0, 0.0, 10), 3, noise=0.05)
        return Dataset(labels=np.array([1] * 4 + [-1] * 3), series=pos + neg)

    def test_kme_one_per_class(self, rng):
        dataset = self._dataset(rng)
        protos = kme_prototypes(dataset)
        assert protos.mode is NNMode.KME
        assert protos.labels == [-1, 1]
        assert all(p.shape == (10, 10) for p in protos.prototypes)
        for label, Y in zip(protos.labels, protos.prototypes, strict=True):
            assert np.array_equal(Y, compute_mean(dataset.of_class(label)).Y)

    def test_ahc_one_per_class(self, rng):
        dataset = self._dataset(rng)
        protos = ahc_prototypes(dataset, MeanConfig(elasticity=4))
        assert protos.mode is NNMode.AHC
        assert protos.labels == [-1, 1]
        assert all(p.shape == (10, 4) for p in protos.prototypes)

    def test_ahc_singleton_class(self, rng):
        x = rng.normal(size=6)
        others = [rng.normal(size=6), rng.normal(size=6)]
        dataset = Dataset(labels=np.array([1, -1, -1]), series=[x, *others])
        protos = ahc_prototypes(dataset)
        assert variation(protos.prototypes[protos.labels.index(1)], [x]) == 0.0

    def test_ahc_identical_pair(self, rng):
        x = rng.normal(size=5)
        dataset = Dataset(labels=np.array([1, 1, -1]), series=[x, x.copy(), -x])
        protos = ahc_prototypes(dataset)
        assert variation(protos.prototypes[protos.labels.index(1)], [x, x]) == 0.0

    def test_ahc_pair_is_pair_mean(self, rng):
        a, b = rng.normal(size=6), rng.normal(loc=2.0, size=6)
        dataset = Dataset(labels=np.array([1, 1, -1]), series=[a, b, -a])
        protos = ahc_prototypes(dataset)
        expected = compute_mean([a, b], n=6).Y
        assert np.allclose(protos.prototypes[protos.labels.index(1)], expected)

    def test_ahc_merges_run_the_mean_over_members(self, rng, monkeypatch):
        calls: list[int] = []
        real_mean = centroid.compute_mean

        def recording_mean(series, *args, **kwargs):
            calls.append(len(series))
            return real_mean(series, *args, **kwargs)

        monkeypatch.setattr(centroid, "compute_mean", recording_mean)
        members = [rng.normal(size=5) for _ in range(4)]
        dataset = Dataset(labels=np.array([1, 1, 1, 1, -1]), series=[*members, -members[0]])
        Y = ahc_prototypes(dataset).prototypes[1]
        assert Y.shape == (5, 5)
        # Class -1: one singleton. Class 1: four singletons, then three merges.
        assert calls[:1] == [1]
        assert calls[1:5] == [1, 1, 1, 1]
        assert sorted(calls[5:-1]) in ([2, 2], [2, 3])
        assert calls[-1] == 4

    def test_prototypes_classify_training_data(self, rng):
        dataset = self._dataset(rng)
        for protos in (kme_prototypes(dataset), ahc_prototypes(dataset)):
            predicted = [nn_classify(x, protos.mode, protos) for x in dataset.series]
            assert predicted == dataset.labels.tolist()


class TestNNClassify:
    def test_training_series_verbatim(self, rng):
        series = [rng.normal(size=8) for _ in range(6)]
        dataset = Dataset(labels=np.array([1, -1, 1, -1, 1, -1]), series=series)
        for x, y in dataset:
            assert nn_classify(x, NNMode.ALL, dataset) == y

    def test_single_reference(self, rng):
        dataset = Dataset(labels=np.array([-1]), series=[rng.normal(size=4)])
        assert nn_classify(rng.normal(size=4), NNMode.ALL, dataset) == -1

    def test_tie_goes_to_first(self):
        dataset = Dataset(labels=np.array([-1, 1]), series=[[1.0, 1.0], [1.0, 1.0]])
        assert nn_classify([1.0, 1.0], NNMode.ALL, dataset) == -1
        protos = PrototypeSet(NNMode.KME, [1, -1], [np.ones((2, 2)), np.ones((2, 2))])
        assert nn_classify([1.0, 1.0], NNMode.KME, protos) == 1

    def test_band_applies(self):
        dataset = Dataset(labels=np.array([1]), series=[[1.0, 2.0, 3.0, 4.0]])
        assert nn_classify([1.0, 2.0, 3.0, 4.0], NNMode.ALL, dataset, band=0) == 1

    def test_prototype_mode_needs_prototypes(self, rng):
        dataset = Dataset(labels=np.array([1]), series=[rng.normal(size=3)])
        with pytest.raises(ElasticDataError):
            nn_classify(rng.normal(size=3), NNMode.KME, dataset)

    def test_all_mode_needs_dataset(self):
        protos = PrototypeSet(NNMode.KME, [1], [np.ones((2, 2))])
        with pytest.raises(ElasticDataError):
            nn_classify([1.0], NNMode.ALL, protos)

    def test_alignment_active_paths_match_dtw(self, rng):
        z = rng.normal(size=6)
        x = rng.normal(size=6)
        _, path = elastic_euclidean(x, identical_row_matrix(z, 6))
        assert path == dtw_alignment(x, z).path
