"""Command line access to bag inspection, extraction, export, and serving.

Exit codes: 0 success, 1 domain error (single-line diagnostic on
stderr), 2 usage error.  Machine-readable output goes to stdout only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from rosann.annotation.core import Project
from rosann.annotation.storage import export_csv, load_project
from rosann.bag import list_topics, open_bag
from rosann.errors import RosannError
from rosann.media.pipeline import (
    ExtractionConfig,
    MANIFEST_NAME,
    load_manifest,
    process_bag,
)
from rosann.paths import DataDirs, ENV_DATA_DIR
from rosann.stats import compute_all, stats_to_csv, stats_to_json

ENV_PORT = "ROSANN_PORT"
DEFAULT_PORT = 8000


class CliError(RosannError):
    code = "CLI"


class NotFound(RosannError):
    code = "NOT_FOUND"


def _dirs(args) -> DataDirs:
    dirs = DataDirs.from_env(args.data_dir)
    if not dirs.root.is_dir():
        raise CliError(
            f"data directory {dirs.root} does not exist "
            f"(set --data-dir or {ENV_DATA_DIR}, or run: serve --init)"
        )
    return dirs


def _resolve_bag(path_arg: str, dirs: DataDirs | None) -> Path:
    path = Path(path_arg)
    if path.is_file():
        return path
    if dirs is not None:
        candidate = dirs.bags / path_arg
        if candidate.is_file():
            return candidate
    raise NotFound(f"no such bag file: {path_arg}")


def _load_project_or_empty(dirs: DataDirs, bag_id: str) -> Project:
    project_path = dirs.project_file(bag_id)
    if project_path.exists():
        return load_project(project_path)
    manifest_path = dirs.processed_for(bag_id) / MANIFEST_NAME
    if manifest_path.exists():
        manifest = load_manifest(dirs, bag_id)
        return Project(bag_id=bag_id,
                       observation_ms=max(manifest.observation_ms, 1))
    raise NotFound(f"no project or manifest for {bag_id!r}")


def cmd_list_topics(args) -> int:
    dirs = DataDirs.from_env(args.data_dir)
    handle = open_bag(_resolve_bag(args.bag, dirs if dirs.root.is_dir() else None))
    rows = list_topics(handle)
    if args.format == "json":
        print(json.dumps([
            {"topic": t, "type": ty, "md5sum": md5, "messages": n}
            for t, ty, md5, n in rows
        ], indent=1))
    else:
        widths = [
            max([len("topic")] + [len(r[0]) for r in rows]),
            max([len("type")] + [len(r[1]) for r in rows]),
            max([len("messages")] + [len(str(r[3])) for r in rows]),
        ]
        print(f"{'topic':<{widths[0]}}  {'type':<{widths[1]}}  messages")
        for topic, type_name, _, count in rows:
            print(f"{topic:<{widths[0]}}  {type_name:<{widths[1]}}  {count}")
    if handle.reindexed:
        print("note: bag index was rebuilt by scanning", file=sys.stderr)
    return 0


def cmd_process(args) -> int:
    dirs = _dirs(args)
    bag_path = _resolve_bag(args.bag, dirs)
    handle = open_bag(bag_path)
    config = ExtractionConfig(
        video_topic=args.video_topic,
        audio_topic=args.audio_topic,
        audio_format_hint=args.audio_format,
        transcribe=args.transcribe,
    )
    transcriber = None
    if args.transcribe:
        from rosann.service.app import default_transcriber_factory
        transcriber = default_transcriber_factory()
    result = process_bag(handle, config, dirs, transcriber=transcriber)
    print(json.dumps({
        "bag_id": result.manifest.bag_id,
        "cache_hit": result.cache_hit,
        "frames_encoded": result.frames_encoded,
        "manifest_path": str(result.manifest_path),
        "manifest": result.manifest.to_json(),
    }, indent=1))
    for warning in result.manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_export_csv(args) -> int:
    dirs = _dirs(args)
    project = _load_project_or_empty(dirs, args.bag_id)
    sys.stdout.write(export_csv(project))
    return 0


def cmd_stats(args) -> int:
    dirs = _dirs(args)
    project = _load_project_or_empty(dirs, args.bag_id)
    overall, tiers = compute_all(
        project, include_transcript=not args.exclude_transcript)
    if args.format == "csv":
        sys.stdout.write(stats_to_csv(overall, tiers))
    else:
        print(json.dumps(stats_to_json(overall, tiers), indent=1))
    return 0


def cmd_serve(args) -> int:
    dirs = DataDirs.from_env(args.data_dir)
    if args.init:
        dirs.ensure()
    elif not dirs.root.is_dir():
        raise CliError(
            f"data directory {dirs.root} does not exist (use --init to create)"
        )
    import uvicorn

    from rosann.service.app import create_app

    static = Path(args.static) if args.static else None
    app = create_app(dirs, static_dir=static)
    port = args.port or int(os.environ.get(ENV_PORT, DEFAULT_PORT))
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="info")
    except OSError as exc:
        raise CliError(f"cannot bind {args.host}:{port}: {exc}") from exc
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rosann",
        description="Inspect bag recordings, extract media, export annotations.",
    )
    parser.add_argument("--data-dir", default=None,
                        help=f"data directory (default: ${ENV_DATA_DIR} or ./datas)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-topics", help="list the topics in a bag file")
    p.add_argument("bag", help="bag file path, or name under rosbag-data/")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_list_topics)

    p = sub.add_parser("process", help="extract media and manifest from a bag")
    p.add_argument("bag", help="bag file path, or name under rosbag-data/")
    p.add_argument("--video-topic", default="/image_raw")
    p.add_argument("--audio-topic", default="/audio")
    p.add_argument("--audio-format", default="mp3",
                   help="audio byte-stream hint, e.g. mp3 or pcm_s16le")
    p.add_argument("--transcribe", action="store_true")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("export-csv", help="write a project's annotations as CSV")
    p.add_argument("bag_id")
    p.set_defaults(func=cmd_export_csv)

    p = sub.add_parser("stats", help="compute annotation statistics")
    p.add_argument("bag_id")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--exclude-transcript", action="store_true",
                   help="leave transcript tiers out of the metrics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None,
                   help=f"port (default: ${ENV_PORT} or {DEFAULT_PORT})")
    p.add_argument("--init", action="store_true",
                   help="create the data directory tree first")
    p.add_argument("--static", default=None,
                   help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RosannError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
