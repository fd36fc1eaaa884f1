"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .grouping import GroupingResult
from .hierarchy import DomTree, load_hierarchy, parse_hierarchy


def check_tree(obj) -> DomTree:
    """Accept a DomTree, raw XML text or a path to an XML dump."""
    if isinstance(obj, DomTree):
        return obj
    if isinstance(obj, Path):
        return load_hierarchy(obj)
    if isinstance(obj, str):
        if obj.lstrip().startswith("<"):
            return parse_hierarchy(obj)
        return load_hierarchy(obj)
    raise TypeError(f"expected a DomTree, XML text or a path, got {type(obj).__name__}")


def check_trees(X) -> list[DomTree]:
    if isinstance(X, (str, Path, DomTree)):
        raise TypeError("expected a sequence of pages, got a single page")
    trees = [check_tree(x) for x in _as_list(X)]
    if not trees:
        raise ValueError("expected at least one page")
    return trees


def check_grouping_results(X) -> list[GroupingResult]:
    items = _as_list(X)
    bad = [type(x).__name__ for x in items if not isinstance(x, GroupingResult)]
    if bad:
        raise TypeError(f"expected GroupingResult items, got {bad[0]}")
    return items


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def _as_list(X) -> list:
    if not isinstance(X, Iterable):
        raise TypeError(f"expected an iterable of pages, got {type(X).__name__}")
    return list(X)
