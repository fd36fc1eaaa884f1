"""Three-level component grouping: atomic pairs, DOM rows, multi-row merges."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import DegenerateTreeWarning
from .hierarchy import Bounds, DomTree, ScreenInfo, UiNode, WidgetKind


class GroupKind(str, enum.Enum):
    TEXT_PAIR = "TextPair"
    IMAGE_WITH_TEXT = "ImageWithText"
    ROW = "Row"
    MULTI_ROW = "MultiRow"
    SINGLETON = "Singleton"


ATOMIC_KINDS = (GroupKind.TEXT_PAIR, GroupKind.IMAGE_WITH_TEXT)


@dataclass(frozen=True)
class GroupingConfig:
    gap_coefficient: float = 0.025
    row_width_coefficient: float = 0.85
    overlap_fraction: float = 0.5
    allow_one_mismatch: bool = True
    corner_tolerance: int = 4

    def __post_init__(self):
        if not 0 < self.gap_coefficient < 1:
            raise ValueError(f"gap_coefficient must be in (0, 1), got {self.gap_coefficient}")
        if not 0 < self.row_width_coefficient <= 1:
            raise ValueError(f"row_width_coefficient must be in (0, 1], got {self.row_width_coefficient}")
        if not 0 < self.overlap_fraction <= 1:
            raise ValueError(f"overlap_fraction must be in (0, 1], got {self.overlap_fraction}")
        if self.corner_tolerance < 0:
            raise ValueError("corner_tolerance must be non-negative")


Part = Union[UiNode, "ComponentGroup"]


@dataclass(eq=False)
class ComponentGroup:
    """A set of leaves plus how they were assembled.

    ``parts`` holds the direct sub-units: leaves and fused atomic groups for a
    row, the rows themselves for a multi-row group.
    """

    members: list[UiNode]
    kind: GroupKind
    parts: list[Part] = field(default_factory=list)
    row_spans: list[tuple[int, int]] = field(default_factory=list)
    anchor: Optional[UiNode] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("a component group needs at least one member")
        if not self.parts:
            self.parts = list(self.members)

    @property
    def bounding(self) -> Bounds:
        return Bounds.union_all(m.bounds for m in self.members)

    def rows(self) -> list[list[Part]]:
        """Sub-units arranged by visual row."""
        if self.kind is GroupKind.MULTI_ROW:
            return [list(row.parts) for row in self.parts]
        if self.kind is GroupKind.ROW:
            return [list(self.parts)]
        if self.kind in ATOMIC_KINDS:
            return [[self]]
        return [list(self.members)]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "members": [m.index for m in self.members],
            "bounding": self.bounding.to_list(),
            "row_spans": [list(span) for span in self.row_spans],
            "parts": [_part_to_dict(p) for p in self.parts],
        }


def _part_to_dict(part: Part) -> dict:
    if isinstance(part, UiNode):
        return {"leaf": part.index}
    return part.to_dict()


def part_bounds(part: Part) -> Bounds:
    return part.bounds if isinstance(part, UiNode) else part.bounding


def part_leaves(part: Part) -> list[UiNode]:
    return [part] if isinstance(part, UiNode) else list(part.members)


def part_kind(part: Part) -> str:
    return part.widget_kind.value if isinstance(part, UiNode) else part.kind.value


@dataclass(eq=False)
class GroupingResult:
    groups: list[ComponentGroup]
    ungrouped: list[UiNode]
    original_leaf_count: int
    final_unit_count: int
    screen: Optional[ScreenInfo] = None

    def to_dict(self) -> dict:
        return {
            "groups": [g.to_dict() for g in self.groups],
            "ungrouped": [n.index for n in self.ungrouped],
            "original_leaf_count": self.original_leaf_count,
            "final_unit_count": self.final_unit_count,
            "screen": self.screen.to_dict() if self.screen else None,
        }


# -- geometry helpers -------------------------------------------------------


def _x_overlap(a: Bounds, b: Bounds) -> int:
    return min(a.right, b.right) - max(a.left, b.left)


def _x_gap(a: Bounds, b: Bounds) -> int:
    return max(a.left - b.right, b.left - a.right, 0)


def _center_x2(b: Bounds) -> int:
    # doubled so integer midpoints compare exactly
    return b.left + b.right


def _below(upper: Bounds, lower: Bounds) -> bool:
    return lower.top >= upper.bottom


def _nearest_below(anchor: UiNode, leaves, related) -> Optional[UiNode]:
    best, best_key = None, None
    for cand in leaves:
        if cand is anchor or not _below(anchor.bounds, cand.bounds):
            continue
        if not related(anchor.bounds, cand.bounds):
            continue
        key = (
            cand.bounds.top - anchor.bounds.bottom,
            _x_gap(anchor.bounds, cand.bounds),
            abs(_center_x2(cand.bounds) - _center_x2(anchor.bounds)),
            cand.index,
        )
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def _sort_key(upper: UiNode, lower: UiNode) -> tuple:
    return (
        lower.bounds.top - upper.bounds.bottom,
        _x_gap(upper.bounds, lower.bounds),
        abs(_center_x2(lower.bounds) - _center_x2(upper.bounds)),
        upper.index,
        lower.index,
    )


# -- atomic grouping --------------------------------------------------------


def group_text_pairs(leaves: list[UiNode], screen: ScreenInfo, cfg: GroupingConfig) -> list[ComponentGroup]:
    """Pair an upper text with the nearest text right below it.

    Horizontally the two must overlap or sit closer than ``gap_coefficient``
    of the screen width; vertically the gap must be below ``gap_coefficient``
    of the screen height.
    """
    x_limit = cfg.gap_coefficient * screen.width_px
    y_limit = cfg.gap_coefficient * screen.height_px

    def related(a: Bounds, b: Bounds) -> bool:
        return _x_overlap(a, b) > 0 or _x_gap(a, b) < x_limit

    candidates = []
    for upper in leaves:
        if upper.widget_kind is not WidgetKind.TEXT:
            continue
        lower = _nearest_below(upper, leaves, related)
        if lower is None or lower.widget_kind is not WidgetKind.TEXT:
            continue
        if lower.bounds.top - upper.bounds.bottom < y_limit:
            candidates.append((_sort_key(upper, lower), upper, lower))

    used: set[int] = set()
    pairs = []
    for _, upper, lower in sorted(candidates, key=lambda c: c[0]):
        if id(upper) in used or id(lower) in used:
            continue
        used.update((id(upper), id(lower)))
        pairs.append(ComponentGroup(members=[upper, lower], kind=GroupKind.TEXT_PAIR))
    pairs.sort(key=lambda g: g.members[0].index)
    return pairs


def group_image_text(
    leaves: list[UiNode],
    screen: ScreenInfo,
    cfg: GroupingConfig,
    pairs: list[ComponentGroup] = (),
) -> list[ComponentGroup]:
    """Attach to each image the caption text directly below it.

    A caption in a text pair brings its partner along.
    """
    y_limit = cfg.gap_coefficient * screen.height_px
    pair_of = {id(m): p for p in pairs for m in p.members}

    def related(a: Bounds, b: Bounds) -> bool:
        return _x_overlap(a, b) > 0 or _center_x2(a) == _center_x2(b)

    def aligned(img: Bounds, txt: Bounds) -> bool:
        if _center_x2(img) == _center_x2(txt):
            return True
        return _x_overlap(img, txt) > cfg.overlap_fraction * min(img.width(), txt.width())

    candidates = []
    for image in leaves:
        if image.widget_kind is not WidgetKind.IMAGE:
            continue
        text = _nearest_below(image, leaves, related)
        if text is None or text.widget_kind is not WidgetKind.TEXT:
            continue
        if text.bounds.top - image.bounds.bottom >= y_limit:
            continue
        if aligned(image.bounds, text.bounds):
            candidates.append((_sort_key(image, text), image, text))

    used: set[int] = set()
    groups = []
    for _, image, text in sorted(candidates, key=lambda c: c[0]):
        pair = pair_of.get(id(text))
        texts = list(pair.members) if pair is not None else [text]
        if id(image) in used or any(id(t) in used for t in texts):
            continue
        used.add(id(image))
        used.update(id(t) for t in texts)
        members = sorted([image, *texts], key=lambda n: n.index)
        groups.append(ComponentGroup(members=members, kind=GroupKind.IMAGE_WITH_TEXT))
    groups.sort(key=lambda g: g.members[0].index)
    return groups


# -- row grouping -----------------------------------------------------------


def _lca(nodes: list[UiNode]) -> UiNode:
    chains = []
    for node in nodes:
        chain = [node, *node.ancestors()]
        chains.append(list(reversed(chain)))
    lca = chains[0][0]
    for depth in range(min(len(c) for c in chains)):
        step = chains[0][depth]
        if all(c[depth] is step for c in chains):
            lca = step
        else:
            break
    return lca


def group_rows(
    tree: DomTree,
    screen: Optional[ScreenInfo] = None,
    cfg: Optional[GroupingConfig] = None,
    atomic: list[ComponentGroup] = (),
) -> list[ComponentGroup]:
    """Cut the DOM into rows.

    Every unit climbs from its own node towards the root until it reaches a
    node at least ``row_width_coefficient`` of the screen wide; units that
    stop at the same node form one row. Atomic groups in ``atomic`` travel as
    a single unit starting from their lowest common ancestor.
    """
    screen = screen or tree.screen
    cfg = cfg or GroupingConfig()
    required = cfg.row_width_coefficient * screen.width_px

    # top-down: the row anchor of a node is itself if wide enough, else its parent's anchor
    anchor_of: dict[int, UiNode] = {}
    degenerate = False
    for node in tree.nodes:
        if node.bounds.width() >= required or node.parent is None:
            anchor_of[id(node)] = node
            if node.parent is None and node.bounds.width() < required:
                degenerate = True
        else:
            anchor_of[id(node)] = anchor_of[id(node.parent)]

    fused = {id(m) for g in atomic for m in g.members}
    units: list[tuple[object, Part]] = []
    for group in atomic:
        if group.bounding.width() >= required:
            units.append((("atomic", id(group)), group))
        else:
            units.append((id(anchor_of[id(_lca(group.members))]), group))
    for leaf in tree.leaves():
        if id(leaf) not in fused:
            units.append((id(anchor_of[id(leaf)]), leaf))

    if degenerate and any(key == id(tree.root) for key, _ in units):
        warnings.warn(
            f"root width {tree.root.bounds.width()} is below the row width {required:g}; "
            "leaves without a wide ancestor were grouped under the root",
            DegenerateTreeWarning,
            stacklevel=2,
        )

    anchors = {id(n): n for n in tree.nodes}
    buckets: dict[object, list[Part]] = {}
    for key, part in units:
        buckets.setdefault(key, []).append(part)

    rows = []
    for key, parts in buckets.items():
        parts.sort(key=lambda p: part_leaves(p)[0].index)
        members = sorted((leaf for p in parts for leaf in part_leaves(p)), key=lambda n: n.index)
        anchor = anchors.get(key) if not isinstance(key, tuple) else None
        rows.append(ComponentGroup(members=members, kind=GroupKind.ROW, parts=parts, anchor=anchor))
    rows.sort(key=_reading_order)
    return rows


def _reading_order(group: ComponentGroup) -> tuple:
    b = group.bounding
    return (b.top, b.left, group.members[0].index)


# -- multi-row merging ------------------------------------------------------


def _signature(row: ComponentGroup) -> list[tuple]:
    origin = row.bounding
    sig = []
    for part in row.parts:
        b = part_bounds(part)
        dx = b.left - origin.left
        sig.append((part_kind(part), dx, b.top - origin.top, dx, b.bottom - origin.top))
    return sig


def _same_unit(a: tuple, b: tuple, tol: int) -> bool:
    return a[0] == b[0] and all(abs(x - y) <= tol for x, y in zip(a[1:], b[1:]))


def rows_match(a: ComponentGroup, b: ComponentGroup, cfg: GroupingConfig) -> bool:
    """Whether two rows share widget kinds and relative corner positions."""
    sa, sb = _signature(a), _signature(b)
    tol = cfg.corner_tolerance
    if len(sa) == len(sb):
        mismatches = sum(not _same_unit(x, y, tol) for x, y in zip(sa, sb))
        if mismatches == 0:
            return True
        return cfg.allow_one_mismatch and mismatches == 1 and len(sa) >= 2
    if not cfg.allow_one_mismatch or abs(len(sa) - len(sb)) != 1 or min(len(sa), len(sb)) < 2:
        return False
    longer, shorter = (sa, sb) if len(sa) > len(sb) else (sb, sa)
    for skip in range(len(longer)):
        rest = longer[:skip] + longer[skip + 1:]
        if all(_same_unit(x, y, tol) for x, y in zip(rest, shorter)):
            return True
    return False


def merge_multirow(rows: list[ComponentGroup], cfg: Optional[GroupingConfig] = None) -> list[ComponentGroup]:
    """Merge runs of adjacent, structurally identical rows."""
    cfg = cfg or GroupingConfig()
    runs: list[list[ComponentGroup]] = []
    for row in rows:
        if runs and rows_match(runs[-1][-1], row, cfg):
            runs[-1].append(row)
        else:
            runs.append([row])

    out = []
    for run in runs:
        if len(run) == 1:
            out.append(run[0])
            continue
        members, spans = [], []
        for row in run:
            spans.append((len(members), len(members) + len(row.members)))
            members.extend(row.members)
        out.append(ComponentGroup(members=members, kind=GroupKind.MULTI_ROW, parts=list(run), row_spans=spans))
    return out


# -- full page --------------------------------------------------------------


def group_page(
    tree: DomTree,
    screen: Optional[ScreenInfo] = None,
    cfg: Optional[GroupingConfig] = None,
) -> GroupingResult:
    screen = screen or tree.screen
    cfg = cfg or GroupingConfig()
    leaves = tree.leaves()
    if not leaves:
        return GroupingResult([], [], 0, 0, screen)

    pairs = group_text_pairs(leaves, screen, cfg)
    image_groups = group_image_text(leaves, screen, cfg, pairs)
    absorbed = {id(m) for g in image_groups for m in g.members}
    atomic = image_groups + [p for p in pairs if id(p.members[0]) not in absorbed]

    rows = group_rows(tree, screen, cfg, atomic=atomic)
    groups, ungrouped = [], []
    for group in merge_multirow(rows, cfg):
        if group.kind is GroupKind.ROW and len(group.parts) == 1:
            (part,) = group.parts
            if isinstance(part, UiNode):
                ungrouped.append(part)
            else:
                groups.append(part)
        else:
            groups.append(group)
    groups.sort(key=_reading_order)
    ungrouped.sort(key=lambda n: (n.bounds.top, n.bounds.left, n.index))
    return GroupingResult(
        groups=groups,
        ungrouped=ungrouped,
        original_leaf_count=len(leaves),
        final_unit_count=len(groups) + len(ungrouped),
        screen=screen,
    )
