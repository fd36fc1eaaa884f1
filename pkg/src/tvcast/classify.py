"""Template matching of component groups to phone group categories.

Each template is a list of named attribute predicates. A group is assigned
the template with the most satisfied predicates, provided that count exceeds
the threshold; otherwise it falls back to ``Others``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .errors import ConfigError
from .grouping import ComponentGroup, GroupingResult, GroupKind
from .hierarchy import Bounds, ScreenInfo, UiNode, WidgetKind, _short_id


class PhoneGroupCategory(str, enum.Enum):
    ICON_INFO = "IconInfo"
    TOOL_BAR = "ToolBar"
    BOTTOM_TAB_LAYOUT = "BottomTabLayout"
    SEARCH = "Search"
    TOP_TAB_LAYOUT = "TopTabLayout"
    PIC_SIDE_INFO = "PicSideInfo"
    PIC_INFO = "PicInfo"
    SIDE_NAV = "SideNav"
    SHORT_VIDEO_PLAYER = "ShortVideoPlayer"
    VIDEO_MUSIC_PLAYER = "VideoMusicPlayer"
    BIG_PIC = "BigPic"
    LIST_VIEW = "ListView"
    OTHERS = "Others"


DEFAULT_THRESHOLD = 2

_IMAGE_KINDS = (WidgetKind.IMAGE,)


class GroupFeatures:
    """Geometry and DOM context of one group, computed once per match."""

    def __init__(self, group: ComponentGroup, screen: ScreenInfo):
        self.group = group
        self.screen = screen
        self.bounds = group.bounding
        self.rows = group.rows()
        self.context = _context_nodes(group.members)
        self.kinds = {n.widget_kind for n in self.context}
        words = []
        for node in self.context:
            if node.resource_id:
                words.append(_short_id(node.resource_id).lower())
            desc = node.attributes.get("content-desc")
            if desc:
                words.append(desc.lower())
        words.extend(m.text.lower() for m in group.members if m.text)
        self.words = words
        self.images = [m.bounds for m in group.members if m.widget_kind in _IMAGE_KINDS]
        self.texts = [m.bounds for m in group.members if m.widget_kind is WidgetKind.TEXT]

    @property
    def largest_image(self) -> Optional[Bounds]:
        if not self.images:
            return None
        return max(self.images, key=lambda b: (b.area(), -b.top, -b.left))


def _context_nodes(members: list[UiNode]) -> list[UiNode]:
    """Members, their ancestors up to the lowest common ancestor, and wrappers
    of that ancestor sharing its exact bounds."""
    chains = [list(reversed([m, *m.ancestors()])) for m in members]
    depth = 0
    shortest = min(len(c) for c in chains)
    while depth < shortest and all(c[depth] is chains[0][depth] for c in chains):
        depth += 1
    lca_depth = depth - 1
    seen: dict[int, UiNode] = {}
    if lca_depth >= 0:
        lca = chains[0][lca_depth]
        seen[id(lca)] = lca
        node = lca.parent
        while node is not None and node.bounds == lca.bounds:
            seen[id(node)] = node
            node = node.parent
    for chain in chains:
        for node in chain[max(lca_depth, 0):]:
            seen.setdefault(id(node), node)
    return list(seen.values())


def _h_overlap(a: Bounds, b: Bounds) -> int:
    return min(a.right, b.right) - max(a.left, b.left)


def _v_overlap(a: Bounds, b: Bounds) -> int:
    return min(a.bottom, b.bottom) - max(a.top, b.top)


def _text_below(img: Bounds, txt: Bounds) -> bool:
    return txt.top >= img.bottom and _h_overlap(img, txt) > 0


def _text_right(img: Bounds, txt: Bounds) -> bool:
    return txt.left >= img.right and _v_overlap(img, txt) > 0


def _text_side(img: Bounds, txt: Bounds) -> bool:
    return (txt.left >= img.right or txt.right <= img.left) and _v_overlap(img, txt) > 0


# -- predicate catalog ------------------------------------------------------


def _has_kind(f: GroupFeatures, kinds) -> bool:
    return any(WidgetKind(k) in f.kinds for k in kinds)


def _keyword(f: GroupFeatures, words) -> bool:
    return any(w.lower() in text for w in words for text in f.words)


def _top_band(f: GroupFeatures, fraction=0.3) -> bool:
    return f.bounds.top < fraction * f.screen.height_px


def _bottom_band(f: GroupFeatures, fraction=0.3) -> bool:
    return f.bounds.bottom > (1 - fraction) * f.screen.height_px


def _upper_half(f: GroupFeatures) -> bool:
    return f.bounds.top + f.bounds.bottom < f.screen.height_px


def _left_band(f: GroupFeatures, fraction=0.25, span=0.85) -> bool:
    w = f.screen.width_px
    return f.bounds.left < fraction * w and f.bounds.width() < span * w


def _tall(f: GroupFeatures) -> bool:
    return f.bounds.height() > f.bounds.width()


def _single_row(f: GroupFeatures) -> bool:
    return len(f.rows) == 1


def _multi_item_row(f: GroupFeatures, min_items=2) -> bool:
    return any(len(row) >= min_items for row in f.rows)


def _min_rows(f: GroupFeatures, count=3) -> bool:
    return f.group.kind is GroupKind.MULTI_ROW and len(f.rows) >= count


def _full_width(f: GroupFeatures, fraction=0.85) -> bool:
    return f.bounds.width() >= fraction * f.screen.width_px


def _landscape_aspect(f: GroupFeatures) -> bool:
    return f.bounds.width() > f.bounds.height()


def _portrait_aspect(f: GroupFeatures) -> bool:
    return f.bounds.height() >= f.bounds.width()


def _tall_fraction(f: GroupFeatures, fraction=0.6) -> bool:
    return f.bounds.height() >= fraction * f.screen.height_px


def _has_image(f: GroupFeatures) -> bool:
    return bool(f.images)


def _small_square_image(f: GroupFeatures, max_fraction=0.15, aspect_tolerance=0.2) -> bool:
    for b in f.images:
        w, h = b.width(), b.height()
        if w <= max_fraction * f.screen.width_px and abs(w - h) <= aspect_tolerance * max(w, h):
            return True
    return False


def _image_width_between(f: GroupFeatures, low=0.15, high=0.85) -> bool:
    img = f.largest_image
    return img is not None and low * f.screen.width_px < img.width() < high * f.screen.width_px


def _big_image(f: GroupFeatures, fraction=0.85) -> bool:
    img = f.largest_image
    return img is not None and img.width() >= fraction * f.screen.width_px


def _text_below_image(f: GroupFeatures) -> bool:
    return any(_text_below(i, t) for i in f.images for t in f.texts)


def _text_right_of_image(f: GroupFeatures) -> bool:
    return any(_text_right(i, t) for i in f.images for t in f.texts)


def _text_beside_or_below_image(f: GroupFeatures) -> bool:
    return any(_text_right(i, t) or _text_below(i, t) for i in f.images for t in f.texts)


def _no_side_text(f: GroupFeatures) -> bool:
    img = f.largest_image
    return img is not None and not any(_text_side(img, t) for t in f.texts)


PREDICATES: dict[str, Callable[..., bool]] = {
    "has_kind": _has_kind,
    "keyword": _keyword,
    "top_band": _top_band,
    "bottom_band": _bottom_band,
    "upper_half": _upper_half,
    "left_band": _left_band,
    "tall": _tall,
    "single_row": _single_row,
    "multi_item_row": _multi_item_row,
    "min_rows": _min_rows,
    "full_width": _full_width,
    "landscape_aspect": _landscape_aspect,
    "portrait_aspect": _portrait_aspect,
    "tall_fraction": _tall_fraction,
    "has_image": _has_image,
    "small_square_image": _small_square_image,
    "image_width_between": _image_width_between,
    "big_image": _big_image,
    "text_below_image": _text_below_image,
    "text_right_of_image": _text_right_of_image,
    "text_beside_or_below_image": _text_beside_or_below_image,
    "no_side_text": _no_side_text,
}


@dataclass(frozen=True)
class AttributePredicate:
    name: str
    args: tuple = ()

    def __call__(self, features: GroupFeatures) -> bool:
        return PREDICATES[self.name](features, **dict(self.args))

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class TemplateSpec:
    category: PhoneGroupCategory
    attribute_predicates: tuple[AttributePredicate, ...]

    def __post_init__(self):
        if len(self.attribute_predicates) < 2:
            raise ConfigError(f"template {self.category.value} needs at least two predicates")


@dataclass(frozen=True)
class TemplateCatalog:
    templates: tuple[TemplateSpec, ...]
    threshold: int = DEFAULT_THRESHOLD


@dataclass(eq=False)
class ClassifiedGroup:
    group: ComponentGroup
    category: PhoneGroupCategory
    matched_attribute_count: int
    matched_attribute_names: list[str] = field(default_factory=list)
    scores: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "matched_attribute_count": self.matched_attribute_count,
            "matched_attribute_names": list(self.matched_attribute_names),
            "group": self.group.to_dict(),
        }


def parse_templates(raw: dict) -> TemplateCatalog:
    try:
        templates = []
        for entry in raw["templates"]:
            preds = []
            for p in entry["predicates"]:
                if p["name"] not in PREDICATES:
                    raise ConfigError(f"unknown predicate {p['name']!r}")
                args = tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in p.get("args", {}).items()))
                preds.append(AttributePredicate(p["name"], args))
            templates.append(TemplateSpec(PhoneGroupCategory(entry["category"]), tuple(preds)))
        threshold = int(raw.get("threshold", DEFAULT_THRESHOLD))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid template catalog: {exc}") from exc
    if not templates:
        raise ConfigError("template catalog is empty")
    if threshold < 1:
        raise ConfigError("threshold must be at least 1")
    return TemplateCatalog(tuple(templates), threshold)


def load_templates(path=None) -> TemplateCatalog:
    """Read a template catalog from JSON or TOML (by suffix); packaged default when None."""
    if path is None:
        text = resources.files("tvcast").joinpath("data", "templates.json").read_text(encoding="utf-8")
        return parse_templates(json.loads(text))
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"template file not found: {path}")
    if path.suffix == ".toml":
        from ._toml import loads as toml_loads

        raw = toml_loads(path.read_text(encoding="utf-8"))
    else:
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_templates(raw)


def match_template(
    group: ComponentGroup,
    templates,
    threshold: int = DEFAULT_THRESHOLD,
    *,
    screen: ScreenInfo,
) -> ClassifiedGroup:
    if not templates:
        raise ValueError("at least one template is required")
    features = GroupFeatures(group, screen)
    best: Optional[TemplateSpec] = None
    best_names: list[str] = []
    scores = {}
    for template in templates:
        names = [p.label for p in template.attribute_predicates if p(features)]
        scores[template.category.value] = len(names)
        # strict '>' keeps the earlier template on ties
        if best is None or len(names) > len(best_names):
            best, best_names = template, names
    count = len(best_names)
    category = best.category if count > threshold else PhoneGroupCategory.OTHERS
    return ClassifiedGroup(group, category, count, best_names, scores)


def classify_page(
    result: GroupingResult,
    screen: Optional[ScreenInfo] = None,
    catalog: Optional[TemplateCatalog] = None,
) -> list[ClassifiedGroup]:
    """Classify every group and every ungrouped leaf, in reading order."""
    screen = screen or result.screen
    if screen is None:
        raise ValueError("a screen is required to classify groups")
    catalog = catalog or load_templates()
    units = list(result.groups)
    units.extend(ComponentGroup(members=[leaf], kind=GroupKind.SINGLETON) for leaf in result.ungrouped)
    units.sort(key=lambda g: (g.bounding.top, g.bounding.left, g.members[0].index))
    return [match_template(g, catalog.templates, catalog.threshold, screen=screen) for g in units]

