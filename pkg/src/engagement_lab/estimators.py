"""scikit-learn style wrappers over the closed forms.

Rows of ``X`` are content parameters ``(p, q, v_bar)``.  The wrappers hold
only the outside option (and population bounds) as hyperparameters, so they
slot into pipelines and grid searches; ``fit`` validates input and records
fitted attributes but the model itself has nothing to learn.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_params_array, check_positive
from .core import ContentParams, g_engagement_array, g_utility_array, participates_array
from .manifolds import Manifold, find_optima
from .population import Population, population_metrics

__all__ = ["DualSystemModel", "ManifoldOptimizer", "PopulationTransformer"]


class DualSystemModel(TransformerMixin, BaseEstimator):
    """Expected utility and engagement for each content row.

    ``transform`` returns columns ``[E[S], E[T]]``; ``predict`` returns the
    participation indicator.

    Parameters
    ----------
    w : float, default=1.0
        Per-step outside option.
    """

    def __init__(self, w: float = 1.0):
        self.w = w

    def fit(self, X, y=None):
        X = check_params_array(X)
        check_positive(self.w, "w")
        self.n_features_in_ = X.shape[1]
        return self

    def _columns(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_params_array(X)
        p, q, v = X.T
        part = participates_array(p, q, v, self.w)
        return part, g_utility_array(p, q, v, self.w), g_engagement_array(p, q)

    def transform(self, X):
        part, gs, gt = self._columns(X)
        return np.column_stack([np.where(part, np.maximum(gs, 0.0), 0.0), np.where(part, gt, 0.0)])

    def predict(self, X):
        return self._columns(X)[0]

    def get_feature_names_out(self, input_features=None):
        return np.array(["e_s", "e_t"], dtype=object)


class ManifoldOptimizer(BaseEstimator):
    """Utility and engagement maximisers over a finite set of content rows.

    After ``fit``: ``index_s_``, ``index_t_`` (row indices), ``omega_s_``,
    ``omega_t_`` and ``classification_``.  ``predict`` marks the rows that
    maximise the chosen ``objective``.
    """

    def __init__(self, w: float = 1.0, objective: str = "utility"):
        self.w = w
        self.objective = objective

    def fit(self, X, y=None):
        X = check_params_array(X)
        if self.objective not in ("utility", "engagement"):
            raise ValueError(f"objective must be 'utility' or 'engagement', got {self.objective!r}")
        points = [ContentParams(*row) for row in X]
        report = find_optima(Manifold.point_set(points), self.w)
        self.report_ = report
        self.index_s_, self.index_t_ = report.index_s, report.index_t
        self.omega_s_, self.omega_t_ = report.omega_s, report.omega_t
        self.classification_ = report.classification.value
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "report_")
        X = check_params_array(X)
        best = self.omega_s_ if self.objective == "utility" else self.omega_t_
        return np.all(X == np.asarray(best.as_tuple()), axis=1)


class PopulationTransformer(TransformerMixin, BaseEstimator):
    """Population metrics under ``W ~ U[w_low, w_high]``.

    Output columns: ``pr_use, e_t_given_use, e_t_total, e_s_total``.
    """

    def __init__(self, w_low: float = 0.5, w_high: float = 1.0):
        self.w_low = w_low
        self.w_high = w_high

    def fit(self, X, y=None):
        X = check_params_array(X)
        self.population_ = Population.uniform(self.w_low, self.w_high)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "population_")
        X = check_params_array(X)
        rows = []
        for row in X:
            m = population_metrics(ContentParams(*row), self.population_)
            rows.append((m.pr_use, m.e_t_given_use, m.e_t_total, m.e_s_total))
        return np.asarray(rows)

    def get_feature_names_out(self, input_features=None):
        return np.array(["pr_use", "e_t_given_use", "e_t_total", "e_s_total"], dtype=object)
