"""Command line: run the built-in models, export recorded data, render
animations offline, and serve the steering app.

A run writes a self-contained directory:

    <out>/
      manifest.json       model name, seed, steps, resolved parameters
      tapes/store.json    every recorded series of the run
      exports/plots.csv   the model's live-plot series

`animate` and `export` need only that directory: the model is rebuilt from
the manifest (its init is deterministic in the seed) and the stored tapes
are adopted — nothing is re-simulated. Exit codes: 0 success, 2 bad
invocation (names, flags, values), 1 failure while executing.
"""

from __future__ import annotations

import argparse
import json
import operator
import os
import socket
import sys
from pathlib import Path

from .core import DEFAULT_SEED, RecordStore, run_model
from .data import export_table, get_agent_data, get_agents_avg_props, \
    get_nodes_avg_props, get_nums_agents
from .errors import EngineError
from .gallery import get_entry, plot_series_frame
from .render import animate_sim

OUT_ENV = "ABMKIT_OUT"
UI_ENV = "ABMKIT_UI"

MANIFEST = "manifest.json"
STORE = "store.json"


class _UsageError(ValueError):
    pass


def _parse_overrides(entry, pairs) -> dict:
    overrides = {}
    for pair in pairs or ():
        key, sep, text = pair.partition("=")
        if not sep or not key:
            raise _UsageError(f"--param expects key=value, got {pair!r}")
        try:
            overrides[key] = entry.parse_param(key, text)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    return overrides


def _write_json(path: Path, obj, *, compact=False, sort_keys=True):
    # the store is dumped unsorted: reviving it must keep recording order
    if compact:
        text = json.dumps(obj, sort_keys=sort_keys, separators=(",", ":"))
    else:
        text = json.dumps(obj, sort_keys=sort_keys, indent=1)
    path.write_text(text + "\n")


def cmd_run(args) -> int:
    entry = get_entry(args.model)
    steps = entry.default_steps if args.steps is None else args.steps
    if steps < 1:
        raise _UsageError(f"--steps must be >= 1, got {steps}")
    overrides = _parse_overrides(entry, args.param)
    params = entry.params
    params.update(overrides)

    model = entry.build_model(seed=args.seed, **params)
    entry.init(model)
    run_model(model, steps, entry.step_rule)

    if args.out:
        out = Path(args.out)
    else:
        base = Path(os.environ.get(OUT_ENV, "runs"))
        out = base / f"{args.model}-seed{args.seed}-steps{steps}"
    (out / "tapes").mkdir(parents=True, exist_ok=True)
    (out / "exports").mkdir(parents=True, exist_ok=True)

    manifest = {
        "v": 1,
        "model": args.model,
        "seed": args.seed,
        "steps": steps,
        "params": _jsonable_params(params),
    }
    _write_json(out / MANIFEST, manifest)
    _write_json(out / "tapes" / STORE, model.record_store.to_jsonable(),
                compact=True, sort_keys=False)
    export_table(plot_series_frame(entry, model), "csv", out / "exports" / "plots.csv")

    print(f"ran {args.model} for {steps} steps (seed {args.seed})")
    print(f"wrote {out / MANIFEST}")
    print(f"wrote {out / 'tapes' / STORE}")
    print(f"wrote {out / 'exports' / 'plots.csv'}")
    return 0


def _jsonable_params(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def _load_run(run_dir):
    """Rebuild the model of a stored run and adopt its tapes."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / MANIFEST
    if not manifest_path.is_file():
        raise EngineError(f"{run_dir} is not a run directory (no {MANIFEST})")
    manifest = json.loads(manifest_path.read_text())
    entry = get_entry(manifest["model"])
    params = {}
    schema = entry.params
    for key, value in manifest["params"].items():
        if isinstance(schema.get(key), tuple) and isinstance(value, list):
            value = tuple(value)
        params[key] = value
    model = entry.build_model(seed=manifest["seed"], **params)
    entry.init(model)
    store_path = run_dir / "tapes" / STORE
    if not store_path.is_file():
        raise EngineError(f"run directory has no tapes ({store_path} missing)")
    store = RecordStore.from_jsonable(json.loads(store_path.read_text()))
    model.adopt_record_store(store)
    return manifest, entry, model


def cmd_animate(args) -> int:
    if args.fps <= 0:
        raise _UsageError(f"--fps must be positive, got {args.fps}")
    manifest, entry, model = _load_run(args.run_dir)
    run_dir = Path(args.run_dir)
    if args.out:
        out = Path(args.out)
    elif args.format == "gif":
        out = run_dir / "anim.gif"
    else:
        out = run_dir / "frames"
    animate_sim(model, out, fps=args.fps, projection_axis=args.axis)
    print(f"wrote {out} ({model.tick + 1} frames at {args.fps} fps)")
    return 0


def cmd_export(args) -> int:
    manifest, entry, model = _load_run(args.run_dir)
    fmt = args.format
    if args.agent is not None:
        frame = get_agent_data(model.agent_by_id(args.agent), model)
        name = f"agent-{args.agent}"
    elif args.avg is not None:
        key = args.avg
        frame = get_agents_avg_props(model, operator.attrgetter(key), labels=[key])
        name = f"avg-{key}"
    elif args.counts is not None:
        preds = entry.count_preds(model)
        if args.counts not in preds:
            raise _UsageError(
                f"unknown count {args.counts!r} for {entry.name}; "
                f"available: {sorted(preds) or 'none'}"
            )
        frame = get_nums_agents(model, preds[args.counts], labels=[args.counts])
        name = f"counts-{args.counts}"
    else:
        key = args.nodes_avg
        frame = get_nodes_avg_props(model, operator.attrgetter(key), labels=[key])
        name = f"nodes-avg-{key}"

    if args.out:
        out = Path(args.out)
    else:
        out = Path(args.run_dir) / "exports" / f"{name}.{fmt}"
        out.parent.mkdir(parents=True, exist_ok=True)
    export_table(frame, fmt, out)
    print(f"wrote {out} ({frame.n_rows} rows)")
    return 0


def _ui_dir(args):
    for candidate in (args.ui, os.environ.get(UI_ENV), "frontend/dist"):
        if candidate and Path(candidate).is_dir():
            return Path(candidate)
    return None


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    # fail fast with a readable message instead of uvicorn's log trace
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        raise EngineError(
            f"cannot listen on {args.host}:{args.port} ({exc.strerror})"
        ) from None
    finally:
        probe.close()

    ui = _ui_dir(args)
    app = create_app(ui_dir=ui)
    where = f"http://{args.host}:{args.port}"
    print(f"serving on {where} (ui: {ui if ui else 'api only'})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abmkit",
        description="run, export, animate and serve the built-in models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a model and store its tapes")
    p.add_argument("model")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", help=f"run directory (default: ${OUT_ENV}/<auto>)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("animate", help="render an animation from a stored run")
    p.add_argument("run_dir")
    p.add_argument("--fps", type=float, default=10.0)
    p.add_argument("--format", choices=("gif", "frames"), default="gif")
    p.add_argument("--axis", choices=("x", "y", "z"), default="z",
                   help="projection axis for 3D models")
    p.add_argument("--out")
    p.set_defaults(func=cmd_animate)

    p = sub.add_parser("export", help="evaluate a query over a stored run")
    p.add_argument("run_dir")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--agent", type=int, help="per-agent record by id")
    which.add_argument("--avg", metavar="KEY", help="per-tick mean of an agent property")
    which.add_argument("--counts", metavar="NAME", help="per-tick count predicate")
    which.add_argument("--nodes-avg", metavar="KEY", help="per-tick mean of a node property")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the interactive steering service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help=f"static bundle dir (default: ${UI_ENV} or frontend/dist)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:  # includes _UsageError and bad values
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: missing files, engine errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
