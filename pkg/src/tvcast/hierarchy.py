"""Parse UI Automator hierarchy dumps into a typed tree.

The dump format is the one produced by ``uiautomator dump``: a ``hierarchy``
root (with an optional ``rotation`` attribute) wrapping nested ``node``
elements that carry ``class``, ``text``, ``resource-id`` and ``bounds``.
"""

from __future__ import annotations

import enum
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional

from .errors import EmptyHierarchy, MalformedBounds, MalformedXml

_BOUNDS_RE = re.compile(r"\[(-?\d+),(-?\d+)\]\[(-?\d+),(-?\d+)\]")


class Orientation(str, enum.Enum):
    PORTRAIT = "portrait"
    LANDSCAPE = "landscape"


class WidgetKind(str, enum.Enum):
    TEXT = "Text"
    IMAGE = "Image"
    BUTTON = "Button"
    TAB_BAR = "TabBar"
    ACTION_BAR = "ActionBar"
    LIST_CONTAINER = "ListContainer"
    PLAYER = "Player"
    SEARCH_BOX = "SearchBox"
    SIDE_NAV_CONTAINER = "SideNavContainer"
    WEB_CONTENT = "WebContent"
    OTHER = "Other"


@dataclass(frozen=True)
class ScreenInfo:
    width_px: int
    height_px: int
    orientation: Orientation = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError(f"screen dimensions must be positive, got {self.width_px}x{self.height_px}")
        if self.orientation is None:
            guess = Orientation.LANDSCAPE if self.width_px > self.height_px else Orientation.PORTRAIT
            object.__setattr__(self, "orientation", guess)
        else:
            object.__setattr__(self, "orientation", Orientation(self.orientation))

    def to_dict(self) -> dict:
        return {"width_px": self.width_px, "height_px": self.height_px, "orientation": self.orientation.value}


@dataclass(frozen=True, order=True)
class Bounds:
    left: int
    top: int
    right: int
    bottom: int

    def __post_init__(self):
        if self.left > self.right or self.top > self.bottom:
            raise MalformedBounds(f"inverted bounds {self.format()}")

    @classmethod
    def parse(cls, text: str) -> "Bounds":
        m = _BOUNDS_RE.fullmatch(text.strip()) if text is not None else None
        if m is None:
            raise MalformedBounds(f"bounds {text!r} do not match '[x1,y1][x2,y2]'")
        return cls(*(int(g) for g in m.groups()))

    def format(self) -> str:
        return f"[{self.left},{self.top}][{self.right},{self.bottom}]"

    def width(self) -> int:
        return self.right - self.left

    def height(self) -> int:
        return self.bottom - self.top

    def area(self) -> int:
        return self.width() * self.height()

    def union(self, other: "Bounds") -> "Bounds":
        return Bounds(
            min(self.left, other.left),
            min(self.top, other.top),
            max(self.right, other.right),
            max(self.bottom, other.bottom),
        )

    @staticmethod
    def union_all(boxes) -> "Bounds":
        boxes = list(boxes)
        if not boxes:
            raise ValueError("union of no bounds")
        out = boxes[0]
        for b in boxes[1:]:
            out = out.union(b)
        return out

    def to_list(self) -> list[int]:
        return [self.left, self.top, self.right, self.bottom]


@dataclass(eq=False)
class UiNode:
    bounds: Bounds
    class_name: str = ""
    widget_kind: WidgetKind = WidgetKind.OTHER
    text: Optional[str] = None
    resource_id: Optional[str] = None
    attributes: dict[str, str] = field(default_factory=dict)
    children: list["UiNode"] = field(default_factory=list)
    index: int = -1
    parent: Optional["UiNode"] = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def iter(self) -> Iterator["UiNode"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ancestors(self) -> Iterator["UiNode"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    @property
    def selected(self) -> bool:
        return self.attributes.get("selected", "false") == "true"

    @property
    def label(self) -> str:
        """Visible text, falling back to the content description."""
        if self.text:
            return self.text
        return self.attributes.get("content-desc", "") or ""

    @property
    def source(self) -> str:
        """A stable identifier for image content."""
        desc = self.attributes.get("content-desc")
        if desc:
            return desc
        if self.resource_id:
            return _short_id(self.resource_id)
        return f"node_{self.index}"


@dataclass(eq=False)
class DomTree:
    root: UiNode
    screen: ScreenInfo
    nodes: list[UiNode] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.nodes:
            self.nodes = list(self.root.iter())
        for i, node in enumerate(self.nodes):
            node.index = i

    def __len__(self) -> int:
        return len(self.nodes)

    def all_leaves(self) -> list[UiNode]:
        return [n for n in self.nodes if n.is_leaf]

    def leaves(self) -> list[UiNode]:
        """Leaves eligible for grouping, in document order.

        Zero-area nodes are skipped and web content is kept as a single opaque
        leaf (its subtree is not descended into).
        """
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.widget_kind is WidgetKind.WEB_CONTENT or node.is_leaf:
                if node.bounds.area() > 0:
                    out.append(node)
                continue
            stack.extend(reversed(node.children))
        return out


def _short_id(resource_id: str) -> str:
    return resource_id.rsplit("/", 1)[-1]


@lru_cache(maxsize=8)
def _load_rules_cached(path: Optional[str]) -> dict:
    if path is None:
        text = resources.files("tvcast").joinpath("data", "widget_rules.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    rules = {}
    for section in ("class_rules", "resource_id_rules", "fallback_class_rules"):
        rules[section] = tuple(
            (tuple(rule["contains"]), WidgetKind(rule["kind"])) for rule in raw.get(section, [])
        )
    return rules


def load_widget_rules(path=None) -> dict:
    """Load the substring rule table; the packaged table when ``path`` is None."""
    return _load_rules_cached(None if path is None else str(path))


def infer_widget_kind(node: UiNode, rules: Optional[dict] = None) -> WidgetKind:
    rules = rules or load_widget_rules()
    class_name = node.class_name or ""
    for needles, kind in rules["class_rules"]:
        if any(n in class_name for n in needles):
            return kind
    if node.resource_id:
        rid = _short_id(node.resource_id).lower()
        for needles, kind in rules["resource_id_rules"]:
            if any(n.lower() in rid for n in needles):
                return kind
    for needles, kind in rules["fallback_class_rules"]:
        if any(n in class_name for n in needles):
            return kind
    return WidgetKind.OTHER


def _build(element: ET.Element, rules: dict) -> UiNode:
    children = [_build(child, rules) for child in element]
    attrs = dict(element.attrib)
    raw_bounds = attrs.get("bounds")
    if raw_bounds is None:
        if element.tag != "hierarchy":
            raise MalformedBounds(f"<{element.tag}> element without a bounds attribute")
        if not children:
            raise EmptyHierarchy("hierarchy contains no nodes")
        bounds = Bounds.union_all(c.bounds for c in children)
    else:
        bounds = Bounds.parse(raw_bounds)
    class_name = attrs.get("class", element.tag if element.tag == "hierarchy" else "")
    node = UiNode(
        bounds=bounds,
        class_name=class_name,
        text=attrs.get("text") or None,
        resource_id=attrs.get("resource-id") or None,
        attributes=attrs,
        children=children,
    )
    for child in children:
        child.parent = node
    node.widget_kind = infer_widget_kind(node, rules)
    return node


def parse_hierarchy(xml_text: str, screen: Optional[ScreenInfo] = None, *, rules: Optional[dict] = None) -> DomTree:
    """Parse a UI Automator XML dump.

    When ``screen`` is omitted it is inferred from the root bounds, and the
    orientation from the ``rotation`` attribute of the root if present.
    """
    if xml_text is None or not str(xml_text).strip():
        raise MalformedXml("empty document")
    try:
        root_el = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    root = _build(root_el, rules or load_widget_rules())
    if screen is None:
        screen = _infer_screen(root, root_el.attrib.get("rotation"))
    return DomTree(root=root, screen=screen)


def _infer_screen(root: UiNode, rotation: Optional[str]) -> ScreenInfo:
    width, height = root.bounds.right, root.bounds.bottom
    if width <= 0 or height <= 0:
        raise MalformedBounds(f"cannot infer screen size from root bounds {root.bounds.format()}")
    orientation = None
    if rotation is not None and rotation.strip() in {"0", "1", "2", "3"}:
        orientation = Orientation.LANDSCAPE if int(rotation) % 2 else Orientation.PORTRAIT
    return ScreenInfo(width, height, orientation)


def load_hierarchy(path, screen: Optional[ScreenInfo] = None) -> DomTree:
    return parse_hierarchy(Path(path).read_text(encoding="utf-8"), screen)
