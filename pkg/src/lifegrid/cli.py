"""Command-line interface.

``lifegrid serve`` runs the HTTP service; ``lifegrid synth`` writes a
synthetic dataset; the remaining subcommands are thin clients that call a
running server and print the JSON response.

Environment variables (LIFEGRID_DATASET, LIFEGRID_PORT, LIFEGRID_METHOD,
LIFEGRID_THETA, LIFEGRID_MIN_LEN, LIFEGRID_UNIFORM_RATE, LIFEGRID_VIEWPORT,
LIFEGRID_STATIC_DIR, LIFEGRID_HOST, LIFEGRID_SERVER) override the
corresponding flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import httpx

ENV_PREFIX = "LIFEGRID_"

_ENV_CASTS = {
    "dataset": str, "host": str, "port": int, "method": str, "theta": float,
    "min_len": int, "uniform_rate": int, "viewport": int, "static_dir": str,
    "server": str,
}


def _apply_env(args: argparse.Namespace) -> None:
    for attr, cast in _ENV_CASTS.items():
        if not hasattr(args, attr):
            continue
        raw = os.environ.get(ENV_PREFIX + attr.upper())
        if raw is not None:
            setattr(args, attr, cast(raw))


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _client(args) -> httpx.Client:
    return httpx.Client(base_url=args.server, timeout=60.0)


def _request(args, method: str, path: str, **kwargs) -> int:
    with _client(args) as client:
        resp = client.request(method, path, **kwargs)
    try:
        _print_json(resp.json())
    except ValueError:
        print(resp.text)
    return 0 if resp.is_success else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .engine import Engine, EngineConfig
    from .service import ManualClock, TaskManager, create_app, load_tasks

    cfg = EngineConfig(
        dataset=Path(args.dataset), method=args.method, theta=args.theta,
        min_len=args.min_len, uniform_rate=args.uniform_rate,
        viewport=args.viewport,
    )
    print(f"loading dataset from {cfg.dataset} ...", flush=True)
    t0 = time.monotonic()
    engine = Engine.load(cfg)
    print(f"engine ready in {time.monotonic() - t0:.1f}s: "
          f"{engine.summary()['days']} days, {engine.summary()['frames']} frames",
          flush=True)
    tasks = load_tasks(cfg.dataset, engine.store)
    clock = ManualClock() if args.test_clock else time.monotonic
    manager = TaskManager(tasks, clock=clock)
    static_dir = Path(args.static_dir) if args.static_dir else None
    app = create_app(engine, manager, static_dir=static_dir,
                     test_clock=clock if args.test_clock else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_synth(args) -> int:
    from .synth import generate_synthetic

    summary = generate_synthetic(
        seed=args.seed, days=args.days, frames_per_day=args.frames_per_day,
        out=args.out, width=args.width, height=args.height, noise=args.noise,
        vector_dim=args.vector_dim, task_count=args.tasks,
    )
    _print_json({
        "root": str(summary.root), "days": summary.days,
        "frames": summary.frames, "sensor_rows": summary.sensor_rows,
        "concept_rows": summary.concept_rows, "ocr_rows": summary.ocr_rows,
        "vector_rows": summary.vector_rows,
        "boundaries": sum(len(b) for b in summary.boundaries.values()),
        "tasks": summary.task_ids,
    })
    return 0


def cmd_health(args) -> int:
    return _request(args, "GET", "/api/health")


def cmd_query(args) -> int:
    body = {"dsl": args.text}
    if args.method:
        body["method"] = args.method
    return _request(args, "POST", "/api/query", json=body)


def cmd_similar(args) -> int:
    return _request(args, "GET", f"/api/similar/{args.segment_id}",
                    params={"metric": args.metric, "k": args.k})


def cmd_sketch(args) -> int:
    cells = []
    for part in args.cells.split(","):
        part = part.strip()
        cells.append(None if part in ("", "-") else int(part))
    if len(cells) != 16:
        print(f"need 16 cells, got {len(cells)}", file=sys.stderr)
        return 2
    body = {"cells": cells, "k": args.k}
    if args.method:
        body["method"] = args.method
    return _request(args, "POST", "/api/sketch", json=body)


def cmd_task_start(args) -> int:
    return _request(args, "POST", f"/api/tasks/{args.task_id}/start")


def cmd_task_hints(args) -> int:
    return _request(args, "GET", f"/api/tasks/{args.task_id}/hints")


def cmd_task_submit(args) -> int:
    return _request(args, "POST", f"/api/tasks/{args.task_id}/submit",
                    json={"day_id": args.day_id, "frame_index": args.frame_index})


def _add_server_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", default="http://127.0.0.1:8080",
                   help="base URL of a running lifegrid server")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lifegrid",
                                     description="lifelog exploration and retrieval")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="load a dataset and run the HTTP service")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--method", choices=["shot", "uniform"], default="shot",
                   help="default segmentation method")
    p.add_argument("--theta", type=float, default=0.3, help="shot boundary threshold")
    p.add_argument("--min-len", type=int, default=3, dest="min_len",
                   help="minimum shot length in frames")
    p.add_argument("--uniform-rate", type=int, default=10, dest="uniform_rate",
                   help="frames per uniform segment")
    p.add_argument("--viewport", type=int, default=8,
                   help="max rows/cols of the top pyramid level")
    p.add_argument("--static-dir", default=None, dest="static_dir",
                   help="directory with the browser UI bundle")
    p.add_argument("--test-clock", action="store_true", dest="test_clock",
                   help="use a manual task clock driven via /api/_test/advance")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--frames-per-day", type=int, required=True, dest="frames_per_day")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=24)
    p.add_argument("--height", type=int, default=18)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--vector-dim", type=int, default=8, dest="vector_dim")
    p.add_argument("--tasks", type=int, default=2)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("health", help="show the server's dataset summary")
    _add_server_arg(p)
    p.set_defaults(func=cmd_health)

    p = sub.add_parser("query", help="run a DSL query")
    p.add_argument("text")
    p.add_argument("--method", choices=["shot", "uniform"], default=None)
    _add_server_arg(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("similar", help="k nearest neighbors of a segment")
    p.add_argument("segment_id", type=int)
    p.add_argument("--metric", choices=["cosine_deep", "histmap_l1"],
                   default="cosine_deep")
    p.add_argument("-k", type=int, default=12)
    _add_server_arg(p)
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("sketch", help="sketch search from 16 comma-separated "
                                      "palette indices (empty = blank)")
    p.add_argument("cells")
    p.add_argument("-k", type=int, default=12)
    p.add_argument("--method", choices=["shot", "uniform"], default=None)
    _add_server_arg(p)
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("task-start", help="start a task session")
    p.add_argument("task_id")
    _add_server_arg(p)
    p.set_defaults(func=cmd_task_start)

    p = sub.add_parser("task-hints", help="list currently visible hints")
    p.add_argument("task_id")
    _add_server_arg(p)
    p.set_defaults(func=cmd_task_hints)

    p = sub.add_parser("task-submit", help="submit an answer frame")
    p.add_argument("task_id")
    p.add_argument("day_id")
    p.add_argument("frame_index", type=int)
    _add_server_arg(p)
    p.set_defaults(func=cmd_task_submit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_env(args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
