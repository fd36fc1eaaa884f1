"""End-to-end conversion of phone hierarchy dumps into TV artifacts."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Optional, Sequence

from .classify import ClassifiedGroup, TemplateCatalog, classify_page
from .config import PipelineConfig
from .dsl import emit_dsl, parse_dsl
from .errors import DimensionMismatch, PairingMismatch
from .grouping import GroupingResult, group_page
from .hierarchy import DomTree, load_hierarchy
from .layout import LayoutSolution, layout_page
from .transform import TvPage, build_tv_page, map_category
from .wireframe import Wireframe, compute_miou, exact_match_rate, read_judgments, read_wf, reduced_ratio, render_wireframe

log = logging.getLogger(__name__)

ARTIFACT_SUFFIXES = {"page_json": ".page.json", "tvdsl": ".tvdsl", "svg": ".svg", "wf": ".wf"}


@dataclass
class PageConversion:
    tree: DomTree
    grouping: GroupingResult
    classified: list[ClassifiedGroup]
    tv_page: TvPage
    solution: LayoutSolution
    dsl: str
    wireframe: Wireframe

    def page_json(self) -> dict:
        return {
            "phone_screen": self.tree.screen.to_dict(),
            "grouping": self.grouping.to_dict(),
            "classified": [c.to_dict() for c in self.classified],
            "tv_page": self.tv_page.to_dict(),
            "layout": self.solution.to_dict(),
        }


def convert_tree(tree: DomTree, config: PipelineConfig, catalog: Optional[TemplateCatalog] = None) -> PageConversion:
    catalog = catalog or config.templates()
    grouping = group_page(tree, tree.screen, config.grouping)
    classified = classify_page(grouping, tree.screen, catalog)
    page = build_tv_page(classified, tree.screen, config.tv_screen, config.size_rule)
    fitted, solution = layout_page(page, config.layout, config.tv_screen)
    dsl = emit_dsl(fitted, solution)
    parse_dsl(dsl)  # every emitted file must parse
    return PageConversion(tree, grouping, classified, fitted, solution, dsl, render_wireframe(solution, fitted))


def convert_page(path, config: PipelineConfig, catalog: Optional[TemplateCatalog] = None) -> PageConversion:
    return convert_tree(load_hierarchy(path), config, catalog)


# -- reports ----------------------------------------------------------------


@dataclass
class PageEntry:
    input: str
    name: str
    ok: bool
    error: Optional[dict] = None
    original_leaf_count: int = 0
    final_unit_count: int = 0
    reduced_ratio: Optional[float] = None
    classifications: list[dict] = field(default_factory=list)
    mapping: list[dict] = field(default_factory=list)
    objective: Optional[float] = None
    pruned: list[str] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)
    miou: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"input": self.input, "name": self.name, "status": "ok" if self.ok else "error"}
        if not self.ok:
            out["error"] = self.error
            return out
        out.update(
            original_leaf_count=self.original_leaf_count,
            final_unit_count=self.final_unit_count,
            reduced_ratio=self.reduced_ratio,
            classifications=self.classifications,
            mapping=self.mapping,
            objective=self.objective,
            pruned=self.pruned,
            outputs=self.outputs,
        )
        if self.miou is not None:
            out["miou"] = self.miou
        return out


@dataclass
class ConversionReport:
    entries: list[PageEntry]

    @property
    def succeeded(self) -> list[PageEntry]:
        return [e for e in self.entries if e.ok]

    @property
    def failed(self) -> list[PageEntry]:
        return [e for e in self.entries if not e.ok]

    @property
    def exit_code(self) -> int:
        return 0 if self.succeeded else 2

    def aggregates(self) -> dict:
        ratios = [e.reduced_ratio for e in self.succeeded if e.reduced_ratio is not None]
        mious = [e.miou for e in self.succeeded if e.miou is not None]
        return {
            "pages": len(self.entries),
            "succeeded": len(self.succeeded),
            "failed": len(self.failed),
            "mean_reduced_ratio": fmean(ratios) if ratios else None,
            "mean_miou": fmean(mious) if mious else None,
        }

    def to_dict(self) -> dict:
        return {"pages": [e.to_dict() for e in self.entries], "aggregates": self.aggregates()}


def _dump(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _page_names(inputs: Sequence[Path]) -> list[str]:
    names, seen = [], {}
    for path in inputs:
        stem = path.name[: -len(".xml")] if path.name.endswith(".xml") else path.stem
        n = seen.get(stem, 0)
        seen[stem] = n + 1
        names.append(stem if n == 0 else f"{stem}-{n + 1}")
    return names


def _convert_one(args) -> PageEntry:
    path, name, config, out_dir, truth_dir = args
    entry = PageEntry(input=str(path), name=name, ok=False)
    try:
        result = convert_page(path, config)
        texts = {
            "page_json": _dump(result.page_json()),
            "tvdsl": result.dsl,
            "svg": result.wireframe.to_svg(),
        }
        outputs = {}
        for key, suffix in ARTIFACT_SUFFIXES.items():
            target = out_dir / f"{name}{suffix}"
            if key == "wf":
                target.write_bytes(result.wireframe.to_bytes())
            else:
                target.write_text(texts[key], encoding="utf-8", newline="\n")
            outputs[key] = target.name
        g = result.grouping
        entry.original_leaf_count = g.original_leaf_count
        entry.final_unit_count = g.final_unit_count
        entry.reduced_ratio = reduced_ratio(g.original_leaf_count, g.final_unit_count)
        entry.classifications = [
            {"category": c.category.value, "matched": c.matched_attribute_count, "members": [m.index for m in c.group.members]}
            for c in result.classified
        ]
        entry.mapping = [{"phone": c.category.value, "tv": map_category(c.category).value} for c in result.classified]
        entry.objective = result.solution.objective
        entry.pruned = list(result.solution.pruned)
        entry.outputs = outputs
        if truth_dir is not None:
            truth = Path(truth_dir) / f"{name}.wf"
            if truth.is_file():
                entry.miou = compute_miou(result.wireframe, read_wf(truth)).miou
        entry.ok = True
    except Exception as exc:  # one bad page must not sink the corpus
        log.warning("failed to convert %s: %s", path, exc)
        entry.error = {"type": type(exc).__name__, "message": str(exc)}
    return entry


def run_convert(
    inputs: Sequence,
    config: PipelineConfig,
    out_dir,
    jobs: Optional[int] = None,
    truth_dir=None,
) -> ConversionReport:
    """Convert every input page, writing artifacts and ``report.json`` to ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config.templates()  # surface template problems before any page is touched
    paths = [Path(p) for p in inputs]
    jobs = jobs or config.jobs
    work = [(p, n, config, out_dir, truth_dir) for p, n in zip(paths, _page_names(paths))]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_convert_one, work))
    else:
        entries = [_convert_one(w) for w in work]
    report = ConversionReport(entries)
    (out_dir / "report.json").write_text(_dump(report.to_dict()), encoding="utf-8", newline="\n")
    return report


# -- evaluation -------------------------------------------------------------


def _wf_stem(path: Path) -> str:
    return path.name[: -len(".wf")] if path.name.endswith(".wf") else path.stem


def run_eval(generated: Sequence, truth: Sequence, judgments=None) -> dict:
    """Pair frames by file stem and score each pair; optionally add exact match."""
    gen = {_wf_stem(Path(p)): Path(p) for p in generated}
    ref = {_wf_stem(Path(p)): Path(p) for p in truth}
    if len(gen) != len(generated) or len(ref) != len(truth) or set(gen) != set(ref):
        missing = sorted(set(gen) ^ set(ref))
        raise PairingMismatch(f"generated and truth frames do not pair up: {missing}")
    pairs = []
    for stem in sorted(gen):
        try:
            report = compute_miou(read_wf(gen[stem]), read_wf(ref[stem]))
            pairs.append({"name": stem, "miou": report.miou, "per_class": report.to_dict()["per_class"]})
        except (DimensionMismatch, ValueError, OSError) as exc:
            pairs.append({"name": stem, "error": {"type": type(exc).__name__, "message": str(exc)}})
    scored = [p["miou"] for p in pairs if "miou" in p]
    out = {"pairs": pairs, "mean_miou": fmean(scored) if scored else None}
    if judgments is not None:
        rows = read_judgments(judgments)
        out["exact_match"] = exact_match_rate(r[2] for r in rows)
        out["judgments"] = len(rows)
    return out


def format_eval_table(report: dict) -> str:
    rows = [("page", "image", "text", "mIoU")]
    for p in report["pairs"]:
        if "error" in p:
            rows.append((p["name"], "-", "-", p["error"]["type"]))
            continue
        cls = p["per_class"]
        rows.append((p["name"], f"{cls['image']['iou']:.4f}", f"{cls['text']['iou']:.4f}", f"{p['miou']:.4f}"))
    mean = report["mean_miou"]
    rows.append(("mean", "", "", "-" if mean is None else f"{mean:.4f}"))
    if "exact_match" in report:
        rows.append(("exact match", "", "", f"{report['exact_match']:.4f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = [r[0].ljust(widths[0]) + "  " + "  ".join(c.rjust(w) for c, w in zip(r[1:], widths[1:])) for r in rows]
    return "\n".join(line.rstrip() for line in lines) + "\n"
