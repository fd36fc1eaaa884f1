"""Phone-to-TV group mapping and TV page construction."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .classify import ClassifiedGroup, PhoneGroupCategory
from .errors import EmptyPage
from .grouping import part_leaves
from .hierarchy import Bounds, Orientation, ScreenInfo, WidgetKind


class TvGroupCategory(str, enum.Enum):
    ICON_INFO = "IconInfo"
    TOOL_BAR = "ToolBar"
    SEARCH = "Search"
    TAB_LAYOUT = "TabLayout"
    CHANNEL = "Channel"
    GRID_LAYOUT = "GridLayout"
    PIC_INFO = "PicInfo"
    VIDEO_MUSIC_PLAYER = "VideoMusicPlayer"
    LIST_VIEW = "ListView"


class SizeClass(str, enum.Enum):
    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"


class ContentKind(str, enum.Enum):
    IMAGE = "image"
    ICON = "icon"
    TEXT = "text"
    PLAYER = "player"


P, T = PhoneGroupCategory, TvGroupCategory

MAPPING_TABLE: dict[PhoneGroupCategory, TvGroupCategory] = {
    P.ICON_INFO: T.ICON_INFO,
    P.TOOL_BAR: T.TOOL_BAR,
    P.LIST_VIEW: T.LIST_VIEW,
    P.TOP_TAB_LAYOUT: T.TAB_LAYOUT,
    P.SEARCH: T.SEARCH,
    P.OTHERS: T.GRID_LAYOUT,
    P.VIDEO_MUSIC_PLAYER: T.VIDEO_MUSIC_PLAYER,
    P.PIC_SIDE_INFO: T.PIC_INFO,
    P.PIC_INFO: T.PIC_INFO,
    P.BIG_PIC: T.PIC_INFO,
    P.BOTTOM_TAB_LAYOUT: T.CHANNEL,
    P.SIDE_NAV: T.CHANNEL,
    P.SHORT_VIDEO_PLAYER: T.VIDEO_MUSIC_PLAYER,
}

del P, T

# categories whose items are cards (an image plus its caption)
_CARD_CATEGORIES = {
    TvGroupCategory.PIC_INFO,
    TvGroupCategory.ICON_INFO,
    TvGroupCategory.GRID_LAYOUT,
    TvGroupCategory.LIST_VIEW,
    TvGroupCategory.VIDEO_MUSIC_PLAYER,
}


def map_category(phone: PhoneGroupCategory) -> TvGroupCategory:
    return MAPPING_TABLE[PhoneGroupCategory(phone)]


@dataclass
class TvItem:
    kind: ContentKind
    source: str = ""
    text: str = ""
    selected: bool = False
    id: str = ""
    phone_area: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "source": self.source,
            "text": self.text,
            "selected": self.selected,
            "phone_area": self.phone_area,
        }


@dataclass
class TvGroup:
    category: TvGroupCategory
    size_class: SizeClass
    items: list[TvItem]
    origin: list[ClassifiedGroup] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "size_class": self.size_class.value,
            "items": [item.to_dict() for item in self.items],
            "origin": [
                {"phone_category": c.category.value, "members": [m.index for m in c.group.members]}
                for c in self.origin
            ],
        }


@dataclass
class TvPage:
    screen: ScreenInfo
    groups: list[TvGroup]

    def __post_init__(self):
        if self.screen.orientation is not Orientation.LANDSCAPE:
            raise ValueError("a TV page must be landscape")

    def items(self) -> list[TvItem]:
        return [item for g in self.groups for item in g.items]

    def to_dict(self) -> dict:
        return {"screen": self.screen.to_dict(), "groups": [g.to_dict() for g in self.groups]}


@dataclass(frozen=True)
class SizeRule:
    """Largest per-row item counts for the large and medium card variants."""

    large_max: int = 3
    medium_max: int = 5

    def __post_init__(self):
        if not 1 <= self.large_max < self.medium_max:
            raise ValueError("size thresholds must satisfy 1 <= large_max < medium_max")

    def classify(self, per_row: int) -> SizeClass:
        if per_row <= self.large_max:
            return SizeClass.LARGE
        if per_row <= self.medium_max:
            return SizeClass.MEDIUM
        return SizeClass.SMALL


def _labels(leaves) -> str:
    texts = [leaf.label for leaf in leaves if leaf.widget_kind is WidgetKind.TEXT and leaf.label]
    return "\n".join(texts)


def _area(leaves) -> int:
    return Bounds.union_all(leaf.bounds for leaf in leaves).area()


def _visual(leaves):
    for leaf in leaves:
        if leaf.widget_kind is WidgetKind.PLAYER:
            return leaf, ContentKind.PLAYER
        if leaf.widget_kind is WidgetKind.IMAGE:
            return leaf, ContentKind.IMAGE
    return None, None


def _card_items(classified: ClassifiedGroup, icon: bool) -> tuple[list[TvItem], int]:
    items: list[TvItem] = []
    per_row = 0
    for row in classified.group.rows():
        row_items: list[tuple[TvItem, list]] = []
        for part in row:
            leaves = part_leaves(part)
            visual, kind = _visual(leaves)
            text = _labels(leaves)
            if visual is not None:
                if icon and kind is ContentKind.IMAGE:
                    kind = ContentKind.ICON
                row_items.append((TvItem(kind=kind, source=visual.source, text=text), list(leaves)))
            elif row_items:
                item, owned = row_items[-1]
                item.text = "\n".join(t for t in (item.text, text) if t)
                owned.extend(leaves)
            else:
                row_items.append((TvItem(kind=ContentKind.TEXT, text=text), list(leaves)))
        for item, owned in row_items:
            item.phone_area = _area(owned)
            item.selected = any(leaf.selected for leaf in owned)
            items.append(item)
        per_row = max(per_row, len(row_items))
    return items, per_row


def _label_items(classified: ClassifiedGroup) -> tuple[list[TvItem], int]:
    items = []
    per_row = 0
    for row in classified.group.rows():
        for part in row:
            leaves = part_leaves(part)
            visual, _ = _visual(leaves)
            text = _labels(leaves) or next((leaf.label for leaf in leaves if leaf.label), "")
            source = visual.source if visual is not None else ""
            items.append(
                TvItem(
                    kind=ContentKind.TEXT,
                    source=source,
                    text=text or source,
                    selected=any(leaf.selected for leaf in leaves),
                    phone_area=_area(leaves),
                )
            )
        per_row = max(per_row, len(row))
    return items, per_row


def build_tv_page(
    classified: list[ClassifiedGroup],
    phone_screen: Optional[ScreenInfo],
    tv_screen: ScreenInfo,
    size_rule: Optional[SizeRule] = None,
) -> TvPage:
    """Map each classified phone group to a TV group.

    Bottom tabs and side navigation collapse into a single channel rail,
    hoisted to the front of the page.
    """
    if not classified:
        raise EmptyPage("no classified groups to convert")
    if tv_screen.orientation is not Orientation.LANDSCAPE:
        raise ValueError("the TV screen must be landscape")
    size_rule = size_rule or SizeRule()

    groups: list[TvGroup] = []
    channel: Optional[TvGroup] = None
    for cg in classified:
        category = map_category(cg.category)
        if category in _CARD_CATEGORIES:
            items, per_row = _card_items(cg, icon=category is TvGroupCategory.ICON_INFO)
        else:
            items, per_row = _label_items(cg)
        if category is TvGroupCategory.CHANNEL:
            if channel is None:
                channel = TvGroup(category, SizeClass.LARGE, [], [])
            channel.items.extend(items)
            channel.origin.append(cg)
            continue
        groups.append(TvGroup(category, size_rule.classify(per_row), items, [cg]))

    if channel is not None:
        channel.size_class = size_rule.classify(len(channel.items))
        groups.insert(0, channel)
    for gi, group in enumerate(groups):
        for ii, item in enumerate(group.items):
            item.id = f"g{gi}.i{ii}"
    return TvPage(screen=tv_screen, groups=groups)
