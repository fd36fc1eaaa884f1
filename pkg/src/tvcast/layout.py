"""Constraint-based landscape layout for TV pages.

Each TV group is a formula unit laid out left to right. Every item either
continues the current row or, when the remaining row width cannot hold
its minimum width, starts the next row at the left edge. Widths and
heights stay inside per-category bounds. The soft goal is to fill each
row to the full usable width.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

from .errors import CannotFit, EmptyPage, Infeasible, MissingSizeEntry
from .hierarchy import ScreenInfo
from .transform import SizeClass, TvGroup, TvGroupCategory, TvPage

FILL_WIDTH = "fill_width"
SOFT_CONSTRAINTS = (FILL_WIDTH,)


@dataclass(frozen=True)
class SizeBounds:
    width_min: int
    width_max: int
    height_min: int
    height_max: int
    height_pref: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.width_min <= self.width_max:
            raise ValueError(f"invalid width bounds [{self.width_min}, {self.width_max}]")
        if not 0 < self.height_min <= self.height_max:
            raise ValueError(f"invalid height bounds [{self.height_min}, {self.height_max}]")

    @property
    def preferred_height(self) -> int:
        pref = self.height_min if self.height_pref is None else self.height_pref
        return min(max(pref, self.height_min), self.height_max)


SizeTable = dict[tuple[TvGroupCategory, SizeClass], SizeBounds]


@dataclass
class LayoutConfig:
    size_table: SizeTable
    margin_x: int = 48
    margin_y: int = 27
    row_gap: int = 32
    channel_rail_width: int = 280
    soft_weights: dict[str, float] = field(default_factory=lambda: {FILL_WIDTH: 1.0})
    max_height: Optional[int] = None

    def __post_init__(self):
        if min(self.margin_x, self.margin_y, self.row_gap) < 0 or self.channel_rail_width <= 0:
            raise ValueError("margins and gaps must be non-negative and the rail width positive")
        unknown = set(self.soft_weights) - set(SOFT_CONSTRAINTS)
        if unknown:
            raise ValueError(f"unknown soft constraints: {sorted(unknown)}")

    def canvas_height(self, tv_screen: ScreenInfo) -> int:
        if self.max_height is not None:
            return self.max_height
        return tv_screen.height_px - 2 * self.margin_y


@dataclass
class LayoutItem:
    id: str
    size_bounds: SizeBounds
    phone_area: int = 0
    left: int = 0
    top: int = 0
    width: int = 0
    height: int = 0
    unit: int = 0
    row: int = 0
    placement: str = ""
    available_width: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "unit": self.unit,
            "row": self.row,
            "left": self.left,
            "top": self.top,
            "width": self.width,
            "height": self.height,
            "placement": self.placement,
        }


@dataclass
class FormulaUnit:
    items: list[LayoutItem]
    row_width: int
    origin_x: int
    column: str = "main"
    category: Optional[TvGroupCategory] = None


@dataclass
class ConstraintSystem:
    units: list[FormulaUnit]
    row_width: int
    max_height: int
    row_gap: int = 32
    margin_x: int = 0
    margin_y: int = 0
    soft_constraints: list[tuple[str, float]] = field(default_factory=lambda: [(FILL_WIDTH, 1.0)])

    def __post_init__(self):
        if self.row_width <= 0:
            raise ValueError("row width must be positive")
        ids = [item.id for unit in self.units for item in unit.items]
        if len(ids) != len(set(ids)):
            raise ValueError("item ids must be unique across units")

    @property
    def fill_weight(self) -> float:
        return sum(w for name, w in self.soft_constraints if name == FILL_WIDTH)

    def items(self) -> list[LayoutItem]:
        return [item for unit in self.units for item in unit.items]


@dataclass
class RowResidual:
    unit: int
    row: int
    residual: int
    weight: float

    def to_dict(self) -> dict:
        return {"unit": self.unit, "row": self.row, "residual": self.residual, "weight": self.weight}


@dataclass
class LayoutSolution:
    items: list[LayoutItem]
    pruned: list[str] = field(default_factory=list)
    soft_satisfaction: list[RowResidual] = field(default_factory=list)
    objective: float = 0.0
    unit_tops: list[int] = field(default_factory=list)
    total_height: int = 0
    system: Optional[ConstraintSystem] = field(default=None, repr=False)

    @property
    def fits(self) -> bool:
        return self.system is None or self.total_height <= self.system.max_height

    def by_id(self) -> dict[str, LayoutItem]:
        return {item.id: item for item in self.items}

    def absolute_rects(self) -> dict[str, tuple[int, int, int, int]]:
        """Pixel rectangles ``(x, y, width, height)`` on the TV canvas."""
        sysm = self.system
        out = {}
        for item in self.items:
            origin = sysm.units[item.unit].origin_x if sysm else 0
            dy = sysm.margin_y if sysm else 0
            out[item.id] = (origin + item.left, dy + item.top, item.width, item.height)
        return out

    def to_dict(self) -> dict:
        rects = self.absolute_rects()
        return {
            "items": [dict(item.to_dict(), rect=list(rects[item.id])) for item in self.items],
            "pruned": list(self.pruned),
            "soft_satisfaction": [r.to_dict() for r in self.soft_satisfaction],
            "objective": self.objective,
            "total_height": self.total_height,
        }


# -- system construction ----------------------------------------------------


def build_constraints(
    page: TvPage,
    tv_screen: Optional[ScreenInfo] = None,
    size_table: Optional[SizeTable] = None,
    config: Optional[LayoutConfig] = None,
) -> ConstraintSystem:
    """One formula unit per TV group; the channel rail gets its own column."""
    if not page.groups:
        raise EmptyPage("page has no groups to lay out")
    tv_screen = tv_screen or page.screen
    if config is None:
        from .config import default_layout_config

        config = default_layout_config()
    table = size_table if size_table is not None else config.size_table

    has_rail = any(g.category is TvGroupCategory.CHANNEL for g in page.groups)
    rail = config.channel_rail_width if has_rail else 0
    row_width = tv_screen.width_px - 2 * config.margin_x - rail
    if row_width <= 0:
        raise ValueError("margins and rail leave no usable row width")

    units = []
    for gi, group in enumerate(page.groups):
        bounds = _lookup(table, group)
        items = [
            LayoutItem(id=item.id or f"g{gi}.i{ii}", size_bounds=bounds, phone_area=item.phone_area, unit=gi)
            for ii, item in enumerate(group.items)
        ]
        if group.category is TvGroupCategory.CHANNEL:
            units.append(FormulaUnit(items, rail, config.margin_x, "rail", group.category))
        else:
            units.append(FormulaUnit(items, row_width, config.margin_x + rail, "main", group.category))
    return ConstraintSystem(
        units=units,
        row_width=row_width,
        max_height=config.canvas_height(tv_screen),
        row_gap=config.row_gap,
        margin_x=config.margin_x,
        margin_y=config.margin_y,
        soft_constraints=sorted(config.soft_weights.items()),
    )


def _lookup(table: SizeTable, group: TvGroup) -> SizeBounds:
    try:
        return table[(group.category, group.size_class)]
    except KeyError:
        raise MissingSizeEntry(
            f"no size entry for {group.category.value}/{group.size_class.value}"
        ) from None


# -- solver -----------------------------------------------------------------


def water_fill(mins: list[int], maxs: list[int], target: int) -> list[int]:
    """Integer widths within bounds summing to ``target``, as even as the bounds allow.

    ``target`` is clamped into ``[sum(mins), sum(maxs)]``.
    """
    target = max(sum(mins), min(target, sum(maxs)))

    def filled(level: int) -> int:
        return sum(min(max(level, lo), hi) for lo, hi in zip(mins, maxs))

    lo, hi = min(mins), max(maxs)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if filled(mid) <= target:
            lo = mid
        else:
            hi = mid - 1
    widths = [min(max(lo, a), b) for a, b in zip(mins, maxs)]
    remainder = target - sum(widths)
    for i, (a, b) in enumerate(zip(mins, maxs)):
        if remainder == 0:
            break
        if a <= lo < b:
            widths[i] += 1
            remainder -= 1
    return widths


def _break_rows(items: list[LayoutItem], row_width: int, weight: float) -> list[tuple[int, int]]:
    """Optimal split of a unit into rows.

    A row ``items[i:j]`` is admissible when its minimum widths fit, and when
    another row follows, its widths can grow enough that the next item's
    minimum no longer fits (the wrap condition). Its cost is the unfillable
    remainder of the row. Ties prefer longer leading rows.
    """
    n = len(items)
    mins = [it.size_bounds.width_min for it in items]
    maxs = [it.size_bounds.width_max for it in items]
    best: list[Optional[float]] = [None] * (n + 1)
    choice = [n] * (n + 1)
    best[n] = 0.0
    for i in range(n - 1, -1, -1):
        for j in range(n, i, -1):
            if best[j] is None:
                continue
            lo, hi = sum(mins[i:j]), sum(maxs[i:j])
            if lo > row_width:
                continue
            if j < n and hi <= row_width - mins[j]:
                continue
            cost = weight * max(0, row_width - hi) + best[j]
            if best[i] is None or cost < best[i]:
                best[i], choice[i] = cost, j
    if best[0] is None:
        raise Infeasible("no admissible row split", [it.id for it in items])
    rows, i = [], 0
    while i < n:
        rows.append((i, choice[i]))
        i = choice[i]
    return rows


def solve_layout(system: ConstraintSystem) -> LayoutSolution:
    """Place and size every item of ``system``.

    Raises Infeasible when an item is wider than its row even at its minimum.
    The returned solution may still overflow the canvas vertically; see
    ``LayoutSolution.fits`` and ``prune_overflow``.
    """
    too_wide = [
        it.id for unit in system.units for it in unit.items if it.size_bounds.width_min > unit.row_width
    ]
    if too_wide:
        raise Infeasible(f"items wider than their row: {too_wide}", too_wide)

    weight = system.fill_weight
    solved: list[LayoutItem] = []
    residuals: list[RowResidual] = []
    column_bottom: dict[str, int] = {}
    unit_tops = []
    for ui, unit in enumerate(system.units):
        top = column_bottom.get(unit.column)
        top = 0 if top is None else top + system.row_gap
        unit_tops.append(top)
        if not unit.items:
            continue
        row_top = top
        for ri, (i, j) in enumerate(_break_rows(unit.items, unit.row_width, weight)):
            row = unit.items[i:j]
            widths = water_fill(
                [it.size_bounds.width_min for it in row],
                [it.size_bounds.width_max for it in row],
                unit.row_width,
            )
            left = 0
            placed = []
            for k, (it, w) in enumerate(zip(row, widths)):
                available = unit.row_width - (solved[-1].left + solved[-1].width if solved and solved[-1].unit == ui else 0)
                placed_item = replace(
                    it,
                    unit=ui,
                    row=ri,
                    left=left,
                    top=row_top,
                    width=w,
                    height=it.size_bounds.preferred_height,
                    placement="continue" if (k > 0 or (ri == 0)) else "wrap",
                    available_width=available,
                )
                solved.append(placed_item)
                placed.append(placed_item)
                left += w
            residuals.append(RowResidual(ui, ri, abs(unit.row_width - sum(widths)), weight))
            row_top += max(p.height for p in placed) + system.row_gap
        column_bottom[unit.column] = row_top - system.row_gap

    total = max(column_bottom.values(), default=0)
    solution = LayoutSolution(
        items=solved,
        soft_satisfaction=residuals,
        objective=sum(r.weight * r.residual for r in residuals),
        unit_tops=unit_tops,
        total_height=total,
        system=system,
    )
    violations = check_hard_constraints(system, solution, check_height=False)
    if violations:
        raise AssertionError(f"solver produced an invalid layout: {violations[:3]}")
    return solution


# -- verification -----------------------------------------------------------


def check_hard_constraints(
    system: ConstraintSystem, solution: LayoutSolution, *, check_height: bool = True
) -> list[str]:
    """Evaluate the placement, size and containment constraints directly.

    Returns a list of human-readable violations (empty when the layout holds).
    """
    problems = []
    by_unit: dict[int, list[LayoutItem]] = {}
    for item in solution.items:
        by_unit.setdefault(item.unit, []).append(item)

    for ui, unit in enumerate(system.units):
        placed = by_unit.get(ui, [])
        expected = [it.id for it in unit.items]
        got = [it.id for it in placed]
        if got != [i for i in expected if i in set(got)]:
            problems.append(f"unit {ui}: items out of order")
        width = unit.row_width
        prev: Optional[LayoutItem] = None
        row_floor = 0
        for item in placed:
            b = item.size_bounds
            wmin = b.width_min
            if prev is None:
                top0 = solution.unit_tops[ui] if ui < len(solution.unit_tops) else item.top
                cont = item.left == 0 and item.top == top0 and width >= wmin
                wrap = False
                row_floor = item.top + item.height
            else:
                remaining = width - (prev.left + prev.width)
                cont = item.left == prev.left + prev.width and item.top == prev.top and remaining >= wmin
                wrap = item.left == 0 and item.top >= row_floor and remaining < wmin
                if wrap:
                    row_floor = item.top + item.height
                else:
                    row_floor = max(row_floor, item.top + item.height)
            if cont == wrap:
                problems.append(f"{item.id}: continue={cont} wrap={wrap}")
            if not (b.width_min <= item.width <= b.width_max and b.height_min <= item.height <= b.height_max):
                problems.append(f"{item.id}: size {item.width}x{item.height} outside bounds")
            if item.left < 0 or item.left + item.width > width or item.top < 0:
                problems.append(f"{item.id}: outside the row")
            if check_height and item.top + item.height > system.max_height:
                problems.append(f"{item.id}: below the canvas")
            prev = item

    rects = solution.absolute_rects() if solution.system is not None else {
        it.id: (system.units[it.unit].origin_x + it.left, it.top, it.width, it.height) for it in solution.items
    }
    boxes = list(rects.items())
    for (ida, a), (idb, b) in itertools.combinations(boxes, 2):
        if a[0] < b[0] + b[2] and b[0] < a[0] + a[2] and a[1] < b[1] + b[3] and b[1] < a[1] + a[3]:
            problems.append(f"{ida} overlaps {idb}")
    return problems


# -- exhaustive oracle ------------------------------------------------------


def brute_force_layout(system: ConstraintSystem, step: int = 8) -> LayoutSolution:
    """Exhaustive search over widths on a ``step`` grid (bounds always included).

    Row breaks follow from the widths: an item stays on the row exactly when
    the remaining width holds its minimum. Only meant for small test systems.
    """
    total = sum(len(u.items) for u in system.units)
    if total > 6:
        raise ValueError("brute_force_layout supports at most 6 items")
    if step < 8:
        raise ValueError("step must be at least 8")
    weight = system.fill_weight

    solved: list[LayoutItem] = []
    residuals: list[RowResidual] = []
    unit_tops = []
    column_bottom: dict[str, int] = {}
    for ui, unit in enumerate(system.units):
        width = unit.row_width
        items = unit.items
        grids = [
            sorted(set(range(it.size_bounds.width_min, it.size_bounds.width_max + 1, step)) | {it.size_bounds.width_max})
            for it in items
        ]

        @lru_cache(maxsize=None)
        def search(i: int, edge: int):
            # edge: right edge of the previous item on the current row
            if i == len(items):
                return weight * (width - edge), ()
            wmin = items[i].size_bounds.width_min
            wraps = i > 0 and width - edge < wmin
            start = 0 if (i == 0 or wraps) else edge
            close = weight * (width - edge) if wraps else 0.0
            best = None
            for w in grids[i]:
                if start + w > width:
                    continue
                sub = search(i + 1, start + w)
                if sub is None:
                    continue
                cost = close + sub[0]
                if best is None or cost < best[0]:
                    best = (cost, (w,) + sub[1])
            return best

        top = column_bottom.get(unit.column)
        top = 0 if top is None else top + system.row_gap
        unit_tops.append(top)
        if not items:
            continue
        found = search(0, 0)
        search.cache_clear()
        if found is None:
            raise Infeasible("no admissible assignment on the grid", [it.id for it in items])
        widths = found[1]
        edge, row, row_top, row_height = 0, 0, top, 0
        for k, (it, w) in enumerate(zip(items, widths)):
            wmin = it.size_bounds.width_min
            if k > 0 and width - edge < wmin:
                residuals.append(RowResidual(ui, row, width - edge, weight))
                row += 1
                row_top += row_height + system.row_gap
                edge, row_height = 0, 0
            h = it.size_bounds.preferred_height
            solved.append(replace(it, unit=ui, row=row, left=edge, top=row_top, width=w, height=h,
                                  placement="wrap" if (row > 0 and edge == 0) else "continue"))
            edge += w
            row_height = max(row_height, h)
        residuals.append(RowResidual(ui, row, width - edge, weight))
        column_bottom[unit.column] = row_top + row_height

    return LayoutSolution(
        items=solved,
        soft_satisfaction=residuals,
        objective=sum(r.weight * r.residual for r in residuals),
        unit_tops=unit_tops,
        total_height=max(column_bottom.values(), default=0),
        system=system,
    )


# -- pruning ----------------------------------------------------------------


def _without(page: TvPage, removed: set[str]) -> TvPage:
    groups = [replace(g, items=[it for it in g.items if it.id not in removed]) for g in page.groups]
    return TvPage(screen=page.screen, groups=groups)


def prune_overflow(
    page: TvPage,
    tv_screen: Optional[ScreenInfo] = None,
    max_height: Optional[int] = None,
    *,
    config: Optional[LayoutConfig] = None,
) -> tuple[TvPage, list[str]]:
    """Drop items, smallest phone footprint first, until the page fits.

    The last item of a group is never dropped; when nothing removable is left
    and the page still does not fit, CannotFit is raised.
    """
    tv_screen = tv_screen or page.screen
    if config is None:
        from .config import default_layout_config

        config = default_layout_config()
    if max_height is not None:
        config = replace(config, max_height=max_height)

    order = {item.id: n for n, item in enumerate(page.items())}
    pruned: list[str] = []
    current = page
    while True:
        try:
            solution = solve_layout(build_constraints(current, tv_screen, config=config))
            if solution.fits:
                return current, pruned
        except Infeasible:
            pass
        removable = [item for g in current.groups if len(g.items) > 1 for item in g.items]
        if not removable:
            raise CannotFit("the page does not fit the canvas even after pruning")
        victim = min(removable, key=lambda it: (it.phone_area, order[it.id]))
        pruned.append(victim.id)
        current = _without(current, {victim.id})


def layout_page(page: TvPage, config: Optional[LayoutConfig] = None, tv_screen: Optional[ScreenInfo] = None) -> tuple[TvPage, LayoutSolution]:
    """Prune as needed, then solve; the solution records the pruned ids."""
    tv_screen = tv_screen or page.screen
    if config is None:
        from .config import default_layout_config

        config = default_layout_config()
    fitted, pruned = prune_overflow(page, tv_screen, config=config)
    solution = solve_layout(build_constraints(fitted, tv_screen, config=config))
    solution.pruned = pruned
    return fitted, solution
