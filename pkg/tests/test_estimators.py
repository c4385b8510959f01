"""Conformance tests for the sklearn-style estimator wrappers."""

import numpy as np
import pytest
from sklearn.base import clone

from storysphere.branches import cluster_directions
from storysphere.diversity import DiversityWeights, greedy_select, select_branches
from storysphere.errors import ContractError
from storysphere.estimators import DirectionClusterer, DiversitySelector, PathSmoother
from storysphere.geometry import ViewingPath, angles_to_vectors, dir_from_angles, smooth_path


def unit_rows(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_clusterer_matches_functional_api():
    rng = np.random.RandomState(1)
    X = unit_rows(rng, 9)
    est = DirectionClusterer(merge_angle_deg=30.0).fit(X)
    dirs = [dir_from_angles(*_angles(v)) for v in X]
    expected = cluster_directions(dirs, 30.0)
    assert est.n_clusters_ == len(expected)
    np.testing.assert_allclose(
        est.cluster_centers_, [d.as_array() for d in expected], atol=1e-9
    )
    assert est.labels_.shape == (9,)
    assert set(est.labels_) == set(range(est.n_clusters_))


def _angles(v):
    import math

    yaw = math.degrees(math.atan2(v[1], v[0]))
    pitch = math.degrees(math.asin(max(-1.0, min(1.0, v[2]))))
    return yaw, pitch


def test_clusterer_fit_predict():
    X = angles_to_vectors([0.0, 5.0, 120.0], [0.0, 0.0, 0.0])
    labels = DirectionClusterer().fit_predict(X)
    assert labels[0] == labels[1] != labels[2]


def test_clusterer_validates_input():
    with pytest.raises(ContractError):
        DirectionClusterer().fit(np.ones((4, 3)))  # not unit rows
    with pytest.raises(ContractError):
        DirectionClusterer().fit(np.ones((4, 2)))


def test_smoother_matches_smooth_path():
    rng = np.random.RandomState(2)
    X = unit_rows(rng, 20)
    out = PathSmoother(window=5).fit_transform(X)
    expected = smooth_path(ViewingPath(0, X), 5).vectors
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_smoother_rejects_even_window():
    X = unit_rows(np.random.RandomState(3), 4)
    with pytest.raises(ContractError):
        PathSmoother(window=2).fit(X)


def test_selector_fit_metrics_matches_greedy():
    rng = np.random.RandomState(5)
    n = 6
    spa = rng.uniform(0, 1, size=(n, n))
    spa = (spa + spa.T) / 2
    np.fill_diagonal(spa, 0.0)
    sem = np.zeros((n, n))
    soc = rng.uniform(0, 1, size=n)
    est = DiversitySelector().fit_metrics(spa, sem, soc)
    expected, _ = greedy_select(spa, sem, soc, DiversityWeights(), 0.75, 5)
    assert est.selected_indices_ == expected


def test_selector_fit_on_candidates(project_inputs):
    from storysphere.branches import build_candidates, SceneSegment

    segment = SceneSegment(0, None, None, 0, 9)
    by_frame = {}
    for entry in project_inputs.captions:
        by_frame.setdefault(entry.frame_index, []).append(entry)
    candidates = build_candidates(
        segment, project_inputs.saliency, by_frame, project_inputs.embedding_dim
    )
    est = DiversitySelector().fit(candidates, project_inputs.saliency)
    expected = select_branches(candidates, DiversityWeights(), project_inputs.saliency)
    assert est.selected_indices_ == expected.order
    assert est.breakdown_ == expected.breakdown


def test_estimators_clone_and_get_params():
    for est in (
        DirectionClusterer(merge_angle_deg=25.0),
        PathSmoother(window=7),
        DiversitySelector(max_options=3),
    ):
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()
    sel = DiversitySelector()
    sel.set_params(diversity_lambda=0.5)
    assert sel.get_params()["diversity_lambda"] == 0.5


def test_selector_validates_lambda():
    with pytest.raises(ContractError):
        DiversitySelector(diversity_lambda=1.5).fit_metrics(
            np.zeros((2, 2)), np.zeros((2, 2)), np.array([1.0, 0.5])
        )
