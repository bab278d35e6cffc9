"""Command line interface: parse, relations, match, detect, monitor, serve."""
from __future__ import annotations

import sys
import threading

import click

from . import cvml
from .errors import VersaError
from .events import evaluate_event, left_item, loitering_in
from .intervals import make_iset
from .kb import FactStore
from .monitor import ConsoleAction, FileLogAction, Monitor, MonitorConfig, WebhookAction
from .serde import detection_to_json, event_template_from_json
from .spatial import SpatialConfig
from .templates import iset_match, iset_match_bindings, match, parse_frame_template


def _build_store(cvml_path, cfg, mapping_path=None, statics=()):
    mapping = cvml.TypeMapping.from_file(mapping_path) if mapping_path else cvml.TypeMapping()
    with open(cvml_path, encoding="utf-8") as fh:
        dataset = cvml.parse_cvml(fh.read())
    store = FactStore()
    for static_id, box, orient in statics:
        store.assert_static_entity(static_id, box, orient)
    for _ in cvml.process_dataset(dataset, store, cfg, mapping=mapping):
        pass
    return dataset, store


def _parse_static(text):
    """`id:xc,yc,w,h[,orient]` -> (id, BoxSpec, orient)."""
    from .geometry import BoxSpec, Point

    name, _, rest = text.partition(":")
    parts = [float(p) for p in rest.split(",")]
    if len(parts) not in (4, 5):
        raise click.BadParameter(f"static spec {text!r}: expected id:xc,yc,w,h[,orient]")
    orient = parts[4] if len(parts) == 5 else 0.0
    return name, BoxSpec(Point(parts[0], parts[1]), parts[2], parts[3]), orient


@click.group()
@click.option(
    "--near-threshold",
    type=float,
    default=50.0,
    envvar="VERSA_NEAR_THRESHOLD",
    show_default=True,
    help="Distance in pixels below which two entities are near.",
)
@click.option("--type-mapping", type=click.Path(exists=True), default=None,
              help="Role-to-type mapping file (one `role = person|object` per line).")
@click.pass_context
def main(ctx, near_threshold, type_mapping):
    """Event recognition over CVML-annotated surveillance video."""
    if near_threshold <= 0:
        raise click.BadParameter("--near-threshold must be > 0")
    ctx.obj = {"cfg": SpatialConfig(near_threshold=near_threshold), "mapping": type_mapping}


@main.command()
@click.argument("cvml_file", type=click.Path(exists=True))
@click.pass_context
def parse(ctx, cvml_file):
    """Ingest a CVML file and print a summary."""
    dataset, store = _build_store(cvml_file, ctx.obj["cfg"], ctx.obj["mapping"])
    entities = set()
    fact_count = 0
    for frame in dataset.frames:
        for obj in frame.objects:
            entities.add(obj.id)
            fact_count += 5
    click.echo(
        f"{len(dataset.frames)} frames, {len(entities)} entities, {fact_count} basic facts"
    )
    click.echo(f"cached relation facts: {store.cached_fact_count()}")


@main.command()
@click.argument("cvml_file", type=click.Path(exists=True))
@click.option("--frame", "frame_num", type=int, required=True)
@click.pass_context
def relations(ctx, cvml_file, frame_num):
    """Dump the cached relation facts for one frame."""
    _, store = _build_store(cvml_file, ctx.obj["cfg"], ctx.obj["mapping"])
    for fact in store.cached_facts_for_frame(frame_num):
        click.echo(f"{fact.relation}_kb({fact.e1},{fact.e2},{fact.frame})")


@main.command("match")
@click.argument("cvml_file", type=click.Path(exists=True))
@click.option("--template", "template_file", type=click.Path(exists=True), required=True)
@click.option("--threshold", type=float, default=None,
              help="Match score threshold in [0,1]; overrides the template file.")
@click.option("--output", type=click.Choice(["frames", "iset", "bindings"]), default="iset")
@click.option("--static", "statics", multiple=True, help="id:xc,yc,w,h[,orient]")
@click.pass_context
def match_cmd(ctx, cvml_file, template_file, threshold, output, statics):
    """Run a frame template against a CVML file."""
    with open(template_file, encoding="utf-8") as fh:
        template, file_threshold = parse_frame_template(fh.read())
    threshold = threshold if threshold is not None else (file_threshold or 1.0)
    if not 0.0 <= threshold <= 1.0:
        raise click.BadParameter(f"threshold must be in [0,1], got {threshold}")
    static_specs = [_parse_static(s) for s in statics]
    _, store = _build_store(cvml_file, ctx.obj["cfg"], ctx.obj["mapping"], static_specs)
    if output == "frames":
        for result in match(store, template, threshold):
            binding = ", ".join(f"{k}={v}" for k, v in sorted(result.bindings.items()))
            click.echo(f"frame {result.frame}: {binding} (score {result.score:.2f})")
    elif output == "iset":
        click.echo(iset_match(store, template, threshold).render())
    else:
        for bindings, iset in iset_match_bindings(store, template, threshold):
            binding = ", ".join(f"{k}={v}" for k, v in sorted(bindings.items()))
            click.echo(f"[{binding}] -> {iset.render()}")


@main.command()
@click.argument("cvml_file", type=click.Path(exists=True))
@click.option("--event", required=True,
              help="`left_item`, `loitering`, or a path to an event template file.")
@click.option("--area", default=None, help="Static area id for loitering.")
@click.option("--area-box", default=None, help="Static area spec id:xc,yc,w,h[,orient].")
@click.option("--duration", type=int, default=500, show_default=True)
@click.option("--radius", type=int, default=1, show_default=True,
              help="Interval smoothing radius for loitering.")
@click.option("--mode", type=click.Choice(["first", "all"]), default="first")
@click.pass_context
def detect(ctx, cvml_file, event, area, area_box, duration, radius, mode):
    """Run a built-in or file-based event template."""
    statics = [_parse_static(area_box)] if area_box else []
    _, store = _build_store(cvml_file, ctx.obj["cfg"], ctx.obj["mapping"], statics)
    if event == "left_item":
        for p, o, f1, f2, f3 in left_item(store, mode):
            click.echo(f"left_item: P={p} O={o} F1={f1} F2={f2} F3={f3}")
    elif event == "loitering":
        if area is None:
            raise click.BadParameter("loitering needs --area (and --area-box unless preloaded)")
        for person, start, end in loitering_in(store, area, duration, radius, ctx.obj["cfg"]):
            click.echo(f"loitering: ID={person} Start={start} End={end}")
    else:
        import json

        with open(event, encoding="utf-8") as fh:
            template = event_template_from_json(json.load(fh))
        for det in evaluate_event(store, template, mode, cfg=ctx.obj["cfg"]):
            click.echo(json.dumps(detection_to_json(det), sort_keys=True))


@main.command()
@click.argument("cvml_file", type=click.Path(exists=True))
@click.option("--event-file", type=click.Path(exists=True), required=True,
              help="Event template JSON to watch for.")
@click.option("--poll-ms", type=int, default=1000, show_default=True)
@click.option("--log", "log_path", type=click.Path(), default=None)
@click.option("--webhook", default=None)
@click.option("--ticks", type=int, default=None, help="Stop after N ticks (default: run forever).")
@click.pass_context
def monitor(ctx, cvml_file, event_file, poll_ms, log_path, webhook, ticks):
    """Watch a CVML file and evaluate an event template incrementally."""
    import json

    with open(event_file, encoding="utf-8") as fh:
        template = event_template_from_json(json.load(fh))
    cfg = ctx.obj["cfg"]
    mapping = (
        cvml.TypeMapping.from_file(ctx.obj["mapping"]) if ctx.obj["mapping"] else cvml.TypeMapping()
    )
    store = FactStore()
    actions = [ConsoleAction()]
    if log_path:
        actions.append(FileLogAction(log_path))
    if webhook:
        actions.append(WebhookAction(webhook))
    mon = Monitor(store, MonitorConfig(poll_period_ms=poll_ms, actions=actions, cfg=cfg))
    mon.add_template(template)
    stop = threading.Event()
    tick_count = 0
    while not stop.is_set():
        with open(cvml_file, encoding="utf-8") as fh:
            dataset = cvml.parse_cvml(fh.read())
        for frame in dataset.frames:
            if frame.number > store.high_water:
                cvml.assert_frame(frame, store, cfg, mapping=mapping)
        mon.tick()
        tick_count += 1
        if ticks is not None and tick_count >= ticks:
            break
        stop.wait(poll_ms / 1000.0)


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--assets", type=click.Path(), default=None,
              help="Directory of per-frame images served at /assets.")
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Directory of built UI assets served at /.")
@click.pass_context
def serve(ctx, port, host, assets, ui_dir):
    """Serve the HTTP API (and optionally the authoring UI)."""
    import uvicorn

    from .service import AppState, create_app

    app = create_app(AppState(cfg=ctx.obj["cfg"]), assets_dir=assets)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port)


def run() -> int:
    try:
        main(standalone_mode=False)
    except VersaError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(run())
