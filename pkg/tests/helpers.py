"""Builders, random generators and independent oracles shared by the tests."""

from __future__ import annotations

import random
from collections import defaultdict
from html import escape
from pathlib import Path

from tvcast.hierarchy import Bounds, DomTree, ScreenInfo, UiNode, WidgetKind, parse_hierarchy
from tvcast.layout import ConstraintSystem, FormulaUnit, LayoutItem, SizeBounds
from tvcast.transform import ContentKind, SizeClass, TvGroup, TvGroupCategory, TvItem, TvPage

FIXTURES = Path(__file__).parent / "fixtures"
PKG = "com.example.app:id/"
TV = ScreenInfo(1920, 1080)

# results of the acceptance criteria, reported at the end of the session
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


# -- hierarchy XML ----------------------------------------------------------


def node(cls, bounds, rid="", text="", desc="", selected=False, children=()):
    """One UI Automator ``<node>`` element as text."""
    l, t, r, b = bounds
    rid = PKG + rid if rid and "/" not in rid else rid
    attrs = (
        f'index="0" text="{escape(text)}" resource-id="{rid}" class="{cls}" package="com.example.app" '
        f'content-desc="{escape(desc)}" selected="{str(selected).lower()}" bounds="[{l},{t}][{r},{b}]"'
    )
    if not children:
        return f"<node {attrs} />"
    return f"<node {attrs}>{''.join(children)}</node>"


def text(bounds, label="t", **kw):
    return node("android.widget.TextView", bounds, text=label, **kw)


def image(bounds, desc="img", **kw):
    return node("android.widget.ImageView", bounds, desc=desc, **kw)


def frame(bounds, *children, cls="android.widget.FrameLayout", **kw):
    return node(cls, bounds, children=children, **kw)


def hierarchy(*children, rotation="0") -> str:
    return f"<?xml version='1.0' encoding='UTF-8'?><hierarchy rotation=\"{rotation}\">{''.join(children)}</hierarchy>"


def tree_of(*children, width=1080, height=1920) -> DomTree:
    """A page whose root FrameLayout spans the whole screen."""
    return parse_hierarchy(hierarchy(frame((0, 0, width, height), *children)), ScreenInfo(width, height))


def leaf_by_text(tree: DomTree, label: str) -> UiNode:
    return next(n for n in tree.nodes if n.label == label)


# -- random DOM trees -------------------------------------------------------


def random_tree(rng: random.Random, max_nodes: int = 50, width: int = 1080, height: int = 1920) -> DomTree:
    """A random tree of at most ``max_nodes`` nodes, children nested in their parents."""
    root = UiNode(Bounds(0, 0, rng.choice([width, width, rng.randint(200, width)]), height), "android.widget.FrameLayout")
    nodes = [root]
    target = rng.randint(2, max_nodes)
    while len(nodes) < target:
        parent = rng.choice(nodes)
        pb = parent.bounds
        w = rng.randint(1, pb.width()) if rng.random() < 0.6 else pb.width() - rng.randint(0, 40)
        w = max(1, min(w, pb.width()))
        left = pb.left + rng.randint(0, pb.width() - w)
        h = max(1, rng.randint(1, max(1, pb.height() // 2)))
        top = pb.top + rng.randint(0, pb.height() - h)
        child = UiNode(Bounds(left, top, left + w, top + h), "android.view.View", parent=parent)
        parent.children.append(child)
        nodes.append(child)
    return DomTree(root=root, screen=ScreenInfo(width, height))


def oracle_rows(tree: DomTree, coefficient: float = 0.85) -> set[frozenset[int]]:
    """Brute force: each leaf walks up to its first ancestor-or-self wide enough to hold a row."""
    required = coefficient * tree.screen.width_px
    rows = defaultdict(set)
    for leaf in tree.leaves():
        anchor = leaf
        while anchor.parent is not None and anchor.bounds.width() < required:
            anchor = anchor.parent
        rows[id(anchor)].add(leaf.index)
    return {frozenset(r) for r in rows.values()}


# -- random constraint systems ----------------------------------------------


def random_bounds(rng: random.Random, row_width: int) -> SizeBounds:
    wmin = rng.randint(20, max(20, int(row_width * rng.choice([0.2, 0.4, 0.7, 1.0]))))
    if rng.random() < 0.03:
        wmin = row_width + rng.randint(1, 50)  # occasionally infeasible
    wmax = wmin + rng.randint(0, row_width)
    hmin = rng.randint(20, 200)
    hmax = hmin + rng.randint(0, 200)
    return SizeBounds(wmin, wmax, hmin, hmax, rng.randint(hmin, hmax))


def random_system(rng: random.Random, max_items: int = 8, step: int = 8) -> ConstraintSystem:
    n = rng.randint(1, max_items)
    n_units = rng.randint(1, min(3, n))
    cuts = sorted(rng.sample(range(1, n), n_units - 1)) if n_units > 1 else []
    sizes = [b - a for a, b in zip([0, *cuts], [*cuts, n])]
    # multiples of step keep the brute-force grid aligned with the row width
    row_width = step * rng.randint(20, 200)
    units, k = [], 0
    for size in sizes:
        items = []
        for _ in range(size):
            items.append(LayoutItem(id=f"i{k}", size_bounds=random_bounds(rng, row_width), phone_area=rng.randint(1, 10**5)))
            k += 1
        units.append(FormulaUnit(items, row_width, origin_x=48))
    return ConstraintSystem(units, row_width=row_width, max_height=10**9, row_gap=rng.choice([0, 16, 32]),
                            margin_x=48, margin_y=27)


def predicate_violations(system: ConstraintSystem, solution) -> list[str]:
    """Direct check of placement, size bounds, containment and overlaps."""
    out = []
    placed = defaultdict(list)
    for it in solution.items:
        placed[it.unit].append(it)
    for ui, unit in enumerate(system.units):
        items = placed[ui]
        if [i.id for i in items] != [i.id for i in unit.items]:
            out.append(f"unit {ui} lost or reordered items")
        T = unit.row_width
        row_bottom = None
        for k, it in enumerate(items):
            b = it.size_bounds
            sized = b.width_min <= it.width <= b.width_max and b.height_min <= it.height <= b.height_max
            if k == 0:
                placement_ok = it.left == 0
                row_bottom = it.top + it.height
            else:
                prev = items[k - 1]
                remaining = T - (prev.left + prev.width)
                cont = it.left == prev.left + prev.width and it.top == prev.top and remaining >= b.width_min
                wrap = it.left == 0 and it.top >= row_bottom and remaining < b.width_min
                placement_ok = cont != wrap
                row_bottom = it.top + it.height if wrap else max(row_bottom, it.top + it.height)
            if not (placement_ok and sized):
                out.append(f"{it.id}: placement={placement_ok} size={sized}")
            if it.left < 0 or it.left + it.width > T:
                out.append(f"{it.id}: leaves its row")
    rects = []
    for it in solution.items:
        x = system.units[it.unit].origin_x + it.left
        rects.append((it.id, x, it.top, x + it.width, it.top + it.height))
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            a, b = rects[i], rects[j]
            if a[1] < b[3] and b[1] < a[3] and a[2] < b[4] and b[2] < a[4]:
                out.append(f"{a[0]} overlaps {b[0]}")
    return out


# -- random TV pages --------------------------------------------------------

_ALPHABET = 'abcXYZ 019"\\\n\t\r\x00\x1f\x7fé漢字😀,()'


def random_string(rng: random.Random, max_len: int = 12) -> str:
    return "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(0, max_len)))


def random_page(rng: random.Random, max_groups: int = 5) -> TvPage:
    groups = []
    cats = [c for c in TvGroupCategory if c is not TvGroupCategory.CHANNEL]
    if rng.random() < 0.5:
        items = [TvItem(ContentKind.TEXT, text=random_string(rng)) for _ in range(rng.randint(1, 6))]
        groups.append(TvGroup(TvGroupCategory.CHANNEL, SizeClass.LARGE, items))
    for _ in range(rng.randint(0, max_groups)):
        cat = rng.choice(cats)
        kind = rng.choice(list(ContentKind))
        items = [
            TvItem(kind, source=random_string(rng), text=random_string(rng), selected=rng.random() < 0.3,
                   phone_area=rng.randint(1, 1000))
            for _ in range(rng.randint(1, 7))
        ]
        groups.append(TvGroup(cat, rng.choice(list(SizeClass)), items))
    for gi, g in enumerate(groups):
        for ii, it in enumerate(g.items):
            it.id = f"g{gi}.i{ii}"
    return TvPage(TV, groups)


def messy_format(doc, rng: random.Random) -> str:
    """Valid DSL for ``doc`` with random whitespace between every token."""
    from tvcast.dsl import FLAG_LITERAL, PropertyName, quote

    def ws():
        return rng.choice(["", " ", "  ", "\n", "\t", " \n "])

    parts = []
    for stmt in doc.statements:
        groups = []
        for g in stmt.groups:
            args = []
            for p in g.properties:
                if p.name is PropertyName.SIZE:
                    args.append(p.value)
                elif p.name is PropertyName.SELECTED:
                    args.append(FLAG_LITERAL)
                else:
                    args.append(quote(p.value))
            groups.append(f"{g.category}{ws()}({ws()}" + f"{ws()},{ws()}".join(args) + f"{ws()})")
        parts.append(f"{ws()}{stmt.layout.value}{ws()}({ws()}" + f"{ws()},{ws()}".join(groups) + f"{ws()}){ws()}")
    return "\n".join(parts)
