import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iblmm.benchmark import table1_spec
from iblmm.kmeans import kmeans, kmeans_init
from iblmm.mixture import sample_mixture


class TestKmeans:
    def test_single_cluster(self):
        X = np.random.default_rng(0).uniform(1, 2, size=(20, 3))
        np.testing.assert_array_equal(kmeans_init(X, 1, seed=0), np.ones((20, 1)))

    def test_separated_blobs(self):
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(1, 0.05, (30, 2)), rng.normal(10, 0.05, (40, 2))])
        labels, _ = kmeans(np.abs(X), 2, seed=3)
        truth = np.repeat([0, 1], [30, 40])
        assert np.all(labels == truth) or np.all(labels == 1 - truth)

    def test_fifteen_clusters_non_empty_on_dataset_a(self):
        X, _ = sample_mixture(table1_spec("A").true_model, 500, seed=2, stratified=True)
        r = kmeans_init(X, 15, seed=0)
        assert r.shape == (500, 15)
        assert np.all(r.sum(axis=0) >= 1)
        np.testing.assert_array_equal(r.sum(axis=1), 1.0)

    def test_deterministic(self):
        X = np.random.default_rng(4).lognormal(size=(100, 2))
        np.testing.assert_array_equal(kmeans_init(X, 5, seed=9), kmeans_init(X, 5, seed=9))

    def test_too_few_points(self):
        with pytest.raises(ValueError, match="k=5"):
            kmeans(np.ones((3, 2)), 5)

    def test_duplicate_points_still_fill_clusters(self):
        X = np.vstack([np.ones((8, 2)), 2 * np.ones((2, 2))])
        labels, _ = kmeans(X, 4, seed=0)
        assert len(np.unique(labels)) == 4

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_every_cluster_non_empty(self, k, seed):
        rng = np.random.default_rng(seed)
        X = rng.lognormal(size=(k + int(rng.integers(0, 30)), 2))
        labels, _ = kmeans(X, k, seed=seed)
        assert np.all(np.bincount(labels, minlength=k) >= 1)
