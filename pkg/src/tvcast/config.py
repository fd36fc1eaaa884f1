"""Pipeline configuration loaded from TOML."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from . import _toml
from .classify import TemplateCatalog, load_templates
from .errors import ConfigError
from .grouping import GroupingConfig
from .hierarchy import Orientation, ScreenInfo
from .layout import LayoutConfig, SizeBounds, SizeTable
from .transform import SizeClass, SizeRule, TvGroupCategory

ENV_VAR = "TVCAST_CONFIG"


@dataclass
class PipelineConfig:
    grouping: GroupingConfig = field(default_factory=GroupingConfig)
    classify_threshold: int = 2
    template_path: Optional[Path] = None
    size_table_path: Optional[Path] = None
    tv_screen: ScreenInfo = field(default_factory=lambda: ScreenInfo(1920, 1080, Orientation.LANDSCAPE))
    layout: Optional[LayoutConfig] = None
    size_rule: SizeRule = field(default_factory=SizeRule)
    jobs: int = 1

    def __post_init__(self):
        if self.layout is None:
            self.layout = default_layout_config()
        if self.tv_screen.orientation is not Orientation.LANDSCAPE:
            raise ConfigError("the TV screen must be landscape")
        if self.classify_threshold < 1:
            raise ConfigError("classify threshold must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")

    def templates(self) -> TemplateCatalog:
        catalog = load_templates(self.template_path)
        return replace(catalog, threshold=self.classify_threshold)


def _default_raw() -> dict:
    text = resources.files("tvcast").joinpath("data", "default.toml").read_text(encoding="utf-8")
    return _toml.loads(text)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _bounds(entry: dict, where: str) -> SizeBounds:
    try:
        (wmin, wmax), (hmin, hmax) = entry["width"], entry["height"]
        return SizeBounds(int(wmin), int(wmax), int(hmin), int(hmax), entry.get("height_pref"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid size entry {where}: {exc}") from exc


def parse_size_table(raw: dict) -> SizeTable:
    table: SizeTable = {}
    for cat_name, entry in raw.items():
        try:
            category = TvGroupCategory(cat_name)
        except ValueError:
            raise ConfigError(f"unknown TV category in size table: {cat_name!r}") from None
        if "width" in entry:
            bounds = _bounds(entry, cat_name)
            for size in SizeClass:
                table[(category, size)] = bounds
            continue
        for size_name, sub in entry.items():
            try:
                size = SizeClass(size_name)
            except ValueError:
                raise ConfigError(f"unknown size class {size_name!r} for {cat_name}") from None
            table[(category, size)] = _bounds(sub, f"{cat_name}.{size_name}")
    return table


def _resolve(value: str, base_dir: Optional[Path]) -> Optional[Path]:
    if not value:
        return None
    path = Path(value)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"referenced file not found: {path}")
    return path


def config_from_dict(raw: dict, base_dir: Optional[Path] = None) -> PipelineConfig:
    """Build a config from a (partial) TOML-shaped dict layered over the defaults."""
    data = _merge(_default_raw(), raw)
    try:
        grouping = GroupingConfig(**data["grouping"])
        layout_raw = dict(data["layout"])
        size_table_path = _resolve(layout_raw.pop("size_table", ""), base_dir)
        sizes = layout_raw.pop("sizes", {})
        if size_table_path is not None:
            sizes = _merge(sizes, _toml.loads(size_table_path.read_text(encoding="utf-8")).get("sizes", {}))
        layout = LayoutConfig(size_table=parse_size_table(sizes), **layout_raw)
        tv = data["tv_screen"]
        tv_screen = ScreenInfo(int(tv["width"]), int(tv["height"]), Orientation.LANDSCAPE)
        if tv_screen.width_px <= tv_screen.height_px:
            raise ConfigError("the TV screen must be wider than it is tall")
        transform = data["transform"]
        size_rule = SizeRule(int(transform["large_max_items"]), int(transform["medium_max_items"]))
        return PipelineConfig(
            grouping=grouping,
            classify_threshold=int(data["classify"]["threshold"]),
            template_path=_resolve(data["classify"].get("templates", ""), base_dir),
            size_table_path=size_table_path,
            tv_screen=tv_screen,
            layout=layout,
            size_rule=size_rule,
            jobs=int(data["pipeline"]["jobs"]),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path=None, overrides: Optional[dict] = None) -> PipelineConfig:
    """Load a TOML config file layered over the packaged defaults.

    ``overrides`` (same shape as the file) is applied last; relative paths in
    it resolve against the working directory.
    """
    raw: dict = {}
    base_dir = None
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = _toml.loads(path.read_text(encoding="utf-8"))
        except (_toml.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        base_dir = path.parent
        for section, key in (("classify", "templates"), ("layout", "size_table")):
            value = raw.get(section, {}).get(key)
            if value:
                raw[section][key] = str(_resolve(value, base_dir))
    if overrides:
        overrides = copy.deepcopy(overrides)
        for section, key in (("classify", "templates"), ("layout", "size_table")):
            value = overrides.get(section, {}).get(key)
            if value:
                overrides[section][key] = str(Path(value).resolve())
        raw = _merge(raw, overrides)
    return config_from_dict(raw, base_dir=base_dir)


@lru_cache(maxsize=1)
def _default_layout() -> LayoutConfig:
    layout_raw = dict(_default_raw()["layout"])
    layout_raw.pop("size_table", None)
    sizes = layout_raw.pop("sizes")
    return LayoutConfig(size_table=parse_size_table(sizes), **layout_raw)


def default_layout_config() -> LayoutConfig:
    base = _default_layout()
    return replace(base, size_table=dict(base.size_table), soft_weights=dict(base.soft_weights))
