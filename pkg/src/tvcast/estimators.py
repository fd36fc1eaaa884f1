"""scikit-learn style wrappers around the pipeline stages.

The stages have no trainable state; ``fit`` validates hyperparameters and
resolves configuration so the wrappers compose with ``Pipeline`` and
``GridSearchCV``-style tooling.
"""

from __future__ import annotations

from statistics import fmean

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_grouping_results, check_positive_int, check_trees
from .classify import classify_page, load_templates
from .config import load_config
from .grouping import GroupingConfig, group_page
from .pipeline import convert_tree
from .wireframe import Wireframe, compute_miou


class ComponentGrouper(TransformerMixin, BaseEstimator):
    """Pages in, ``GroupingResult`` objects out."""

    def __init__(
        self,
        gap_coefficient=0.025,
        row_width_coefficient=0.85,
        overlap_fraction=0.5,
        allow_one_mismatch=True,
        corner_tolerance=4,
    ):
        self.gap_coefficient = gap_coefficient
        self.row_width_coefficient = row_width_coefficient
        self.overlap_fraction = overlap_fraction
        self.allow_one_mismatch = allow_one_mismatch
        self.corner_tolerance = corner_tolerance

    def fit(self, X=None, y=None):
        self.config_ = GroupingConfig(
            gap_coefficient=self.gap_coefficient,
            row_width_coefficient=self.row_width_coefficient,
            overlap_fraction=self.overlap_fraction,
            allow_one_mismatch=self.allow_one_mismatch,
            corner_tolerance=self.corner_tolerance,
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return [group_page(tree, tree.screen, self.config_) for tree in check_trees(X)]


class GroupClassifier(TransformerMixin, BaseEstimator):
    """Grouping results in; ``transform`` gives classified groups, ``predict`` their categories."""

    def __init__(self, templates=None, threshold=2):
        self.templates = templates
        self.threshold = threshold

    def fit(self, X=None, y=None):
        check_positive_int(self.threshold, "threshold")
        catalog = load_templates(self.templates)
        self.catalog_ = type(catalog)(catalog.templates, self.threshold)
        return self

    def transform(self, X):
        check_is_fitted(self, "catalog_")
        return [classify_page(result, result.screen, self.catalog_) for result in check_grouping_results(X)]

    def predict(self, X):
        return [[c.category for c in page] for page in self.transform(X)]


class TvConverter(TransformerMixin, BaseEstimator):
    """Whole pipeline: pages in, ``PageConversion`` objects out.

    ``predict`` returns the DSL text of each page and ``score`` the mean
    wireframe mIoU against reference frames.
    """

    def __init__(self, config=None, tv_width=None, tv_height=None, templates=None):
        self.config = config
        self.tv_width = tv_width
        self.tv_height = tv_height
        self.templates = templates

    def fit(self, X=None, y=None):
        overrides = {}
        if self.tv_width is not None or self.tv_height is not None:
            overrides["tv_screen"] = {}
            if self.tv_width is not None:
                overrides["tv_screen"]["width"] = check_positive_int(self.tv_width, "tv_width")
            if self.tv_height is not None:
                overrides["tv_screen"]["height"] = check_positive_int(self.tv_height, "tv_height")
        if self.templates is not None:
            overrides["classify"] = {"templates": str(self.templates)}
        self.config_ = load_config(self.config, overrides)
        self.catalog_ = self.config_.templates()
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return [convert_tree(tree, self.config_, self.catalog_) for tree in check_trees(X)]

    def predict(self, X):
        return [result.dsl for result in self.transform(X)]

    def score(self, X, y):
        frames = [result.wireframe for result in self.transform(X)]
        y = list(y)
        if len(y) != len(frames):
            raise ValueError(f"{len(frames)} pages but {len(y)} reference frames")
        if not all(isinstance(f, Wireframe) for f in y):
            raise TypeError("reference frames must be Wireframe objects")
        return fmean(compute_miou(a, b).miou for a, b in zip(frames, y))
