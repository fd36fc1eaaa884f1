"""Convert phone GUI hierarchy dumps into landscape TV layouts."""

from .classify import ClassifiedGroup, PhoneGroupCategory, TemplateCatalog, classify_page, load_templates, match_template
from .config import PipelineConfig, load_config
from .dsl import DslDocument, emit_dsl, format_dsl, parse_dsl
from .errors import *  # noqa: F401,F403
from .grouping import ComponentGroup, GroupingConfig, GroupingResult, GroupKind, group_page, group_rows
from .hierarchy import Bounds, DomTree, ScreenInfo, UiNode, WidgetKind, load_hierarchy, parse_hierarchy
from .layout import (
    ConstraintSystem,
    LayoutConfig,
    LayoutSolution,
    SizeBounds,
    brute_force_layout,
    build_constraints,
    layout_page,
    solve_layout,
    water_fill,
)
from .pipeline import ConversionReport, convert_page, run_convert, run_eval
from .transform import MAPPING_TABLE, SizeClass, TvGroup, TvGroupCategory, TvItem, TvPage, build_tv_page
from .wireframe import MiouReport, Wireframe, compute_miou, exact_match_rate, reduced_ratio, render_wireframe

__version__ = "0.1.0"

_ESTIMATORS = ("ComponentGrouper", "GroupClassifier", "TvConverter")


def __getattr__(name):
    # sklearn is slow to import; load the wrappers only when asked for
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
