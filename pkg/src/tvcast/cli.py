"""Command-line entry point: ``tvcast <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ENV_VAR, PipelineConfig, load_config
from .dsl import canonicalize, parse_dsl
from .errors import ConfigError, DslSyntaxError, PairingMismatch, TvcastError
from .pipeline import convert_page, format_eval_table, run_convert, run_eval

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


def _config(args) -> PipelineConfig:
    path = args.config or os.environ.get(ENV_VAR) or None
    overrides: dict = {}
    if args.tv_width is not None or args.tv_height is not None:
        overrides["tv_screen"] = {}
        if args.tv_width is not None:
            overrides["tv_screen"]["width"] = args.tv_width
        if args.tv_height is not None:
            overrides["tv_screen"]["height"] = args.tv_height
    if args.templates:
        overrides["classify"] = {"templates": args.templates}
    if getattr(args, "jobs", None) is not None:
        overrides["pipeline"] = {"jobs": args.jobs}
    return load_config(path, overrides)


def _emit_json(data, out: Optional[str]) -> None:
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_convert(args) -> int:
    config = _config(args)
    report = run_convert(args.inputs, config, args.out, jobs=config.jobs, truth_dir=args.truth)
    agg = report.aggregates()
    print(f"converted {agg['succeeded']}/{agg['pages']} pages into {args.out}")
    for entry in report.failed:
        print(f"  {entry.input}: {entry.error['type']}: {entry.error['message']}", file=sys.stderr)
    return report.exit_code


def cmd_group(args) -> int:
    config = _config(args)
    result = convert_page(args.input, config)
    _emit_json(result.grouping.to_dict(), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    config = _config(args)
    result = convert_page(args.input, config)
    _emit_json([c.to_dict() for c in result.classified], args.out)
    return EXIT_OK


def cmd_layout(args) -> int:
    config = _config(args)
    result = convert_page(args.input, config)
    _emit_json({"tv_page": result.tv_page.to_dict(), "layout": result.solution.to_dict()}, args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    config = _config(args)
    result = convert_page(args.input, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = Path(args.input).name.removesuffix(".xml")
    (out / f"{name}.svg").write_text(result.wireframe.to_svg(), encoding="utf-8", newline="\n")
    (out / f"{name}.wf").write_bytes(result.wireframe.to_bytes())
    print(f"wrote {out / (name + '.svg')} and {out / (name + '.wf')}")
    return EXIT_OK


def cmd_dsl(args) -> int:
    status = EXIT_OK
    for name in args.files:
        path = Path(name)
        text = path.read_text(encoding="utf-8")
        try:
            if args.action == "check":
                parse_dsl(text)
                print(f"{path}: ok")
                continue
            canonical = canonicalize(text)
        except DslSyntaxError as exc:
            print(f"{path}:{exc}", file=sys.stderr)
            status = EXIT_FAILED
            continue
        if args.in_place:
            if canonical != text:
                path.write_text(canonical, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(canonical)
    return status


def _wf_files(paths: Sequence[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        out.extend(sorted(p.glob("*.wf")) if p.is_dir() else [p])
    return out


def cmd_eval(args) -> int:
    report = run_eval(_wf_files(args.generated), _wf_files(args.truth), args.judgments)
    if args.format in ("table", "both"):
        sys.stdout.write(format_eval_table(report))
    if args.format in ("json", "both"):
        _emit_json(report, args.json_out)
    elif args.json_out:
        _emit_json(report, args.json_out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvcast", description="Convert phone GUI hierarchies to TV layouts.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"TOML config file (falls back to ${ENV_VAR})")
    common.add_argument("--tv-width", type=int)
    common.add_argument("--tv-height", type=int)
    common.add_argument("--templates", help="template catalog (JSON or TOML)")

    p = sub.add_parser("convert", parents=[common], help="run the full pipeline over a corpus")
    p.add_argument("inputs", nargs="+", help="UI hierarchy XML dumps")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--truth", help="directory of ground-truth .wf frames, matched by page name")
    p.set_defaults(func=cmd_convert)

    for name, func, what in (
        ("group", cmd_group, "component groups"),
        ("classify", cmd_classify, "phone group categories"),
        ("layout", cmd_layout, "the TV page and its layout"),
    ):
        p = sub.add_parser(name, parents=[common], help=f"print {what} for one page as JSON")
        p.add_argument("input")
        p.add_argument("--out", help="write JSON here instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("render", parents=[common], help="write the wireframe (.svg and .wf) of one page")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("dsl", help="format or validate .tvdsl files")
    p.add_argument("action", choices=("fmt", "check"))
    p.add_argument("files", nargs="+")
    p.add_argument("-i", "--in-place", action="store_true", help="fmt: rewrite files instead of printing")
    p.set_defaults(func=cmd_dsl)

    p = sub.add_parser("eval", help="score generated wireframes against ground truth")
    p.add_argument("--generated", nargs="+", required=True, help=".wf files or directories")
    p.add_argument("--truth", nargs="+", required=True, help=".wf files or directories")
    p.add_argument("--judgments", help="CSV with page_id,group_id,match")
    p.add_argument("--format", choices=("table", "json", "both"), default="both")
    p.add_argument("--json-out", help="write the JSON report here")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"tvcast: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PairingMismatch as exc:
        print(f"tvcast: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (TvcastError, OSError, ValueError) as exc:
        print(f"tvcast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
