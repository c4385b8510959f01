"""scikit-learn style wrappers around the array-shaped pipeline stages.

These make the spherical clusterer, path smoother, and diversity selector
compose with sklearn pipelines and parameter search; the functional APIs
in branches/diversity remain the primitive layer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin

from .branches import _agglomerate
from .diversity import DiversityWeights, greedy_select, pairwise_metrics, select_branches
from .errors import ContractError
from .geometry import ViewingPath, smooth_path
from .validation import check_direction_array, check_in_range, check_odd_window


class DirectionClusterer(ClusterMixin, BaseEstimator):
    """Agglomerative clustering of unit directions with centroid linkage.

    Merges the closest pair of clusters while their centroids (renormalized
    member means) are within `merge_angle_deg` of each other.

    Attributes after fit: labels_ (n,), cluster_centers_ (k, 3),
    n_clusters_.
    """

    def __init__(self, merge_angle_deg: float = 30.0):
        self.merge_angle_deg = merge_angle_deg

    def fit(self, X, y=None):
        check_in_range("merge_angle_deg", self.merge_angle_deg, 0.0, 180.0, lo_open=True)
        X = check_direction_array(X)
        centers, labels = _agglomerate(X, self.merge_angle_deg)
        self.cluster_centers_ = centers
        self.labels_ = labels
        self.n_clusters_ = len(centers)
        return self


class PathSmoother(TransformerMixin, BaseEstimator):
    """Centered moving-average smoothing of direction rows on the sphere.

    The window truncates at the array ends; output rows stay unit-norm.
    """

    def __init__(self, window: int = 5):
        self.window = window

    def fit(self, X, y=None):
        check_odd_window(self.window)
        check_direction_array(X)
        return self

    def transform(self, X) -> np.ndarray:
        check_odd_window(self.window)
        X = check_direction_array(X)
        if len(X) == 0:
            return X
        return smooth_path(ViewingPath(0, X), self.window).vectors


class DiversitySelector(BaseEstimator):
    """Greedy diversity-maximizing branch selection.

    Fit either on candidate branches plus saliency frames, or directly on
    precomputed metrics via fit_metrics. Attributes after fit:
    selected_indices_, selection_trace_, breakdown_ (when candidates were
    given).
    """

    def __init__(
        self,
        w_spa: float = 1.0 / 3.0,
        w_sem: float = 1.0 / 3.0,
        w_soc: float = 1.0 / 3.0,
        diversity_lambda: float = 0.75,
        max_options: int = 5,
    ):
        self.w_spa = w_spa
        self.w_sem = w_sem
        self.w_soc = w_soc
        self.diversity_lambda = diversity_lambda
        self.max_options = max_options

    def _weights(self) -> DiversityWeights:
        return DiversityWeights.from_raw(self.w_spa, self.w_sem, self.w_soc)

    def _check(self):
        check_in_range("diversity_lambda", self.diversity_lambda, 0.0, 1.0, lo_open=True)
        check_in_range("max_options", self.max_options, 1, 10**9)

    def fit(self, candidates, saliency, y=None):
        self._check()
        result = select_branches(
            candidates,
            self._weights(),
            saliency,
            lambda_=self.diversity_lambda,
            max_options=self.max_options,
        )
        self.selected_indices_ = result.order
        self.selection_trace_ = result.selection_trace
        self.breakdown_ = result.breakdown
        self.branch_set_ = result
        return self

    def fit_metrics(self, spa, sem, soc):
        """Select from precomputed pairwise matrices and social scores."""
        self._check()
        spa, sem, soc = np.asarray(spa, float), np.asarray(sem, float), np.asarray(soc, float)
        n = len(soc)
        if spa.shape != (n, n) or sem.shape != (n, n):
            raise ContractError(
                f"metric shapes disagree: spa {spa.shape}, sem {sem.shape}, soc ({n},)"
            )
        order, trace = greedy_select(
            spa, sem, soc, self._weights(), self.diversity_lambda, self.max_options
        )
        self.selected_indices_ = order
        self.selection_trace_ = trace
        return self

    def precompute(self, candidates, saliency):
        return pairwise_metrics(candidates, saliency, self._weights())
