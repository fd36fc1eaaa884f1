"""Class-colored wireframes of solved layouts and the evaluation metrics."""

from __future__ import annotations

import csv
import enum
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import DimensionMismatch, EmptyJudgments, ZeroLeaves
from .layout import LayoutSolution
from .transform import ContentKind, TvPage

MAGIC = b"WFRM"
_HEADER = struct.Struct("<4sII")


class PixelClass(enum.IntEnum):
    BACKGROUND = 0
    IMAGE = 1
    TEXT = 2


METRIC_CLASSES = (PixelClass.IMAGE, PixelClass.TEXT)
COLORS = {PixelClass.IMAGE: "#FF0000", PixelClass.TEXT: "#00FF00"}
_IMAGE_KINDS = {ContentKind.IMAGE, ContentKind.ICON, ContentKind.PLAYER}


@dataclass(frozen=True)
class Block:
    x: int
    y: int
    width: int
    height: int
    cls: PixelClass


class Wireframe:
    """A ``height x width`` grid of pixel classes plus the blocks drawn into it."""

    def __init__(self, width: int, height: int, cells: Optional[np.ndarray] = None, blocks=()):
        if width <= 0 or height <= 0:
            raise ValueError("wireframe dimensions must be positive")
        if cells is None:
            cells = np.zeros((height, width), dtype=np.uint8)
        cells = np.array(cells, dtype=np.uint8)
        if cells.shape != (height, width):
            raise ValueError(f"cells shape {cells.shape} does not match {height}x{width}")
        if cells.size and cells.max() > max(PixelClass):
            raise ValueError("cells contain an unknown class")
        self.width = width
        self.height = height
        self.cells = cells
        self.cells.setflags(write=False)
        self.blocks = tuple(blocks)

    @classmethod
    def from_blocks(cls, width: int, height: int, blocks: Iterable[Block]) -> "Wireframe":
        """Rasterize blocks in order, clamped to the canvas; later blocks win."""
        cells = np.zeros((height, width), dtype=np.uint8)
        kept = []
        for b in blocks:
            x0, y0 = max(b.x, 0), max(b.y, 0)
            x1, y1 = min(b.x + b.width, width), min(b.y + b.height, height)
            if x1 > x0 and y1 > y0:
                cells[y0:y1, x0:x1] = b.cls
                kept.append(Block(x0, y0, x1 - x0, y1 - y0, b.cls))
        return cls(width, height, cells, kept)

    def count(self, cls: PixelClass) -> int:
        return int(np.count_nonzero(self.cells == cls))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Wireframe):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(self.cells, other.cells)

    def to_svg(self) -> str:
        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#FFFFFF"/>',
        ]
        for b in self.blocks:
            lines.append(
                f'<rect x="{b.x}" y="{b.y}" width="{b.width}" height="{b.height}" fill="{COLORS[b.cls]}"/>'
            )
        lines.append("</svg>")
        return "\n".join(lines) + "\n"

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, self.width, self.height) + self.cells.tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Wireframe":
        if len(data) < _HEADER.size:
            raise ValueError("truncated wireframe header")
        magic, width, height = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("not a wireframe file")
        body = data[_HEADER.size :]
        if len(body) != width * height:
            raise ValueError(f"expected {width * height} cell bytes, found {len(body)}")
        cells = np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy()
        return cls(width, height, cells)


def item_class(kind: ContentKind) -> PixelClass:
    return PixelClass.IMAGE if kind in _IMAGE_KINDS else PixelClass.TEXT


def render_wireframe(solution: LayoutSolution, page: TvPage) -> Wireframe:
    """Draw every placed item of ``page`` in document order."""
    rects = solution.absolute_rects()
    blocks = []
    for item in page.items():
        if item.id in rects:
            x, y, w, h = rects[item.id]
            blocks.append(Block(x, y, w, h, item_class(item.kind)))
    return Wireframe.from_blocks(page.screen.width_px, page.screen.height_px, blocks)


def write_wf(frame: Wireframe, path) -> None:
    Path(path).write_bytes(frame.to_bytes())


def read_wf(path) -> Wireframe:
    return Wireframe.from_bytes(Path(path).read_bytes())


# -- metrics ----------------------------------------------------------------


@dataclass(frozen=True)
class ClassScore:
    tp: int
    fp: int
    fn: int

    @property
    def present(self) -> bool:
        return self.tp + self.fp + self.fn > 0

    @property
    def iou(self) -> float:
        total = self.tp + self.fp + self.fn
        return self.tp / total if total else 1.0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "iou": self.iou}


@dataclass(frozen=True)
class MiouReport:
    per_class: dict[str, ClassScore]
    miou: float

    def to_dict(self) -> dict:
        return {"per_class": {k: v.to_dict() for k, v in self.per_class.items()}, "miou": self.miou}


def compute_miou(a: Wireframe, b: Wireframe) -> MiouReport:
    """Mean IoU over image and text; classes absent from both frames are skipped.

    Two frames with no foreground at all score 1.0.
    """
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(f"{a.width}x{a.height} vs {b.width}x{b.height}")
    per_class = {}
    for cls in METRIC_CLASSES:
        in_a = a.cells == cls
        in_b = b.cells == cls
        tp = int(np.count_nonzero(in_a & in_b))
        per_class[cls.name.lower()] = ClassScore(
            tp=tp, fp=int(np.count_nonzero(in_a)) - tp, fn=int(np.count_nonzero(in_b)) - tp
        )
    included = [s.iou for s in per_class.values() if s.present]
    miou = sum(included) / len(included) if included else 1.0
    return MiouReport(per_class, miou)


def reduced_ratio(original_leaf_count: int, final_unit_count: int) -> float:
    """Fraction of leaves absorbed by grouping: ``(j - k) / j``."""
    if original_leaf_count <= 0:
        raise ZeroLeaves("the page has no leaves")
    if not 0 <= final_unit_count <= original_leaf_count:
        raise ValueError("final unit count must lie in [0, original leaf count]")
    return (original_leaf_count - final_unit_count) / original_leaf_count


def exact_match_rate(judgments: Iterable[bool]) -> float:
    values = [bool(j) for j in judgments]
    if not values:
        raise EmptyJudgments("no judgments given")
    return sum(values) / len(values)


def read_judgments(path) -> list[tuple[str, str, bool]]:
    """Rows of a ``page_id,group_id,match`` CSV with match in {0, 1}."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"page_id", "group_id", "match"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"judgment CSV lacks columns: {sorted(missing)}")
        for row in reader:
            match = row["match"].strip()
            if match not in ("0", "1"):
                raise ValueError(f"match must be 0 or 1, got {match!r}")
            out.append((row["page_id"], row["group_id"], match == "1"))
    return out
