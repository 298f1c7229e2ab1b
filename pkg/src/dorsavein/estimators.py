"""Scikit-learn compatible wrappers around the functional pipeline, so the
templating and matching steps compose with sklearn pipelines and grid search.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .matching import MatchParams, match_templates
from .pipeline import PipelineConfig, image_to_template


class VeinTemplateExtractor(TransformerMixin, BaseEstimator):
    """Stateless transformer: color rasters in, normalized templates out.

    Parameters mirror the pipeline configuration; see `PipelineConfig` for
    their meaning and defaults.
    """

    def __init__(self, sigma=1.0, m0=100.0, v0=100.0, binarize_window=9,
                 median_window=3, dilation_radius=1, prune_min_size=30,
                 eta1=0.1, eta2=0.01, step=0.5, max_iters=2000,
                 converge_eps=0.01, balloon=0.45, contour_points=100):
        self.sigma = sigma
        self.m0 = m0
        self.v0 = v0
        self.binarize_window = binarize_window
        self.median_window = median_window
        self.dilation_radius = dilation_radius
        self.prune_min_size = prune_min_size
        self.eta1 = eta1
        self.eta2 = eta2
        self.step = step
        self.max_iters = max_iters
        self.converge_eps = converge_eps
        self.balloon = balloon
        self.contour_points = contour_points

    def _config(self):
        return PipelineConfig(**self.get_params()).validate()

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        config = self._config()
        return [image_to_template(img, config, source_id=str(k))
                for k, img in enumerate(X)]


class TemplateVerifier(BaseEstimator):
    """1:1 verifier against a single enrolled template.

    `fit` enrolls the reference template; `decision_function` returns the
    match percentage per probe and `predict` the accept decision.
    """

    def __init__(self, t1=10.0, t2=15.0, decision_threshold=25.0):
        self.t1 = t1
        self.t2 = t2
        self.decision_threshold = decision_threshold

    def _params(self):
        p = MatchParams(t1=self.t1, t2=self.t2,
                        decision_threshold=self.decision_threshold)
        p.validate()
        return p

    def fit(self, X, y=None):
        self._params()
        self.reference_ = X[0] if isinstance(X, (list, tuple)) else X
        return self

    def decision_function(self, X):
        params = self._params()
        return np.array([match_templates(probe, self.reference_, params).score_v
                         for probe in X])

    def predict(self, X):
        return self.decision_function(X) > self.decision_threshold
