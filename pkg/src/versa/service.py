"""HTTP API backing the CLI `serve` command and the authoring UI.

All request/response bodies are versioned JSON records. Reads are snapshot
consistent: no endpoint ever reports a frame above the dataset store's
high-water mark. Detection listing lazily ticks the monitors, so a polling
client drives incremental evaluation without a background thread.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import cvml
from .errors import VersaError
from .events import (
    TimelineBar,
    derive_temporal_constraints,
    evaluate_event,
    left_item,
    loitering_in,
)
from .geometry import BoxSpec, Point
from .kb import EntityType, FactStore
from .monitor import Monitor, MonitorConfig
from .serde import (
    detection_to_json,
    event_template_from_json,
    event_template_to_json,
    frame_template_to_json,
)
from .sketch import Sketch, SketchEntity, sketch_to_frame_template
from .spatial import SpatialConfig

API_VERSION = 1


@dataclass
class DatasetState:
    dataset: cvml.CvmlDataset
    store: FactStore


@dataclass
class AppState:
    cfg: SpatialConfig = field(default_factory=SpatialConfig)
    datasets: dict[str, DatasetState] = field(default_factory=dict)
    monitors: dict[str, Monitor] = field(default_factory=dict)
    _ids: itertools.count = field(default_factory=lambda: itertools.count(1))

    def add_dataset(self, dataset: cvml.CvmlDataset, store: FactStore) -> str:
        dataset_id = dataset.name or f"dataset-{next(self._ids)}"
        if dataset_id in self.datasets:
            dataset_id = f"{dataset_id}-{next(self._ids)}"
        self.datasets[dataset_id] = DatasetState(dataset, store)
        return dataset_id

    def require(self, dataset_id: str) -> DatasetState:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise HTTPException(404, detail=f"unknown dataset {dataset_id!r}") from None


class DatasetUpload(BaseModel):
    version: int = API_VERSION
    cvml: str
    statics: list[dict] = Field(default_factory=list)


class SketchBox(BaseModel):
    x: float
    y: float
    w: float = Field(ge=0)
    h: float = Field(ge=0)


class SketchEntityPayload(BaseModel):
    id: str
    type: str
    box: SketchBox
    orient: float = 0.0


class SketchPayload(BaseModel):
    version: int = API_VERSION
    template_id: str = "sketch"
    entities: list[SketchEntityPayload]
    not_exists: list[str] = Field(default_factory=list)
    near_threshold: float | None = None


class TimelineBarPayload(BaseModel):
    step_id: str
    x0: float
    x1: float


class EventTemplatePayload(BaseModel):
    version: int = API_VERSION
    id: str
    steps: list[dict]
    bars: list[TimelineBarPayload] = Field(default_factory=list)
    constraints: list[list] = Field(default_factory=list)


class DetectRequest(BaseModel):
    version: int = API_VERSION
    dataset: str
    event: str | dict
    mode: str = "first"
    cursor: int | None = None
    relation_mode: str = "cached"
    area: str | None = None
    duration: int | None = None
    smoothing_radius: int = 1


class MonitorTemplateRequest(BaseModel):
    version: int = API_VERSION
    dataset: str
    template: dict


def _entity_json(store: FactStore, entity, frame: int) -> dict:
    facts = store.frame_facts(entity, frame)
    return {
        "id": entity,
        "type": facts.type.value,
        "box": {
            "x": facts.loc.x,
            "y": facts.loc.y,
            "w": facts.bounds.width,
            "h": facts.bounds.height,
        },
        "bounds": [facts.bounds.min_x, facts.bounds.min_y, facts.bounds.max_x, facts.bounds.max_y],
        "orient": facts.orient,
    }


def create_app(state: AppState | None = None, assets_dir: str | None = None) -> FastAPI:
    state = state or AppState()
    app = FastAPI(title="versa")
    app.state.engine = state

    @app.exception_handler(VersaError)
    async def versa_error(request, exc: VersaError):  # noqa: ARG001
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"version": API_VERSION, "error": str(exc)})

    @app.get("/health")
    def health():
        return {"version": API_VERSION, "status": "ok", "datasets": sorted(state.datasets)}

    @app.post("/datasets")
    def upload_dataset(body: DatasetUpload):
        dataset = cvml.parse_cvml(body.cvml)
        store = FactStore()
        for static in body.statics:
            box = static["box"]
            store.assert_static_entity(
                static["id"],
                BoxSpec(Point(box["x"], box["y"]), box["w"], box["h"]),
                static.get("orient", 0.0),
            )
        for _ in cvml.process_dataset(dataset, store, state.cfg):
            pass
        dataset_id = state.add_dataset(dataset, store)
        return {
            "version": API_VERSION,
            "dataset_id": dataset_id,
            "frames": len(dataset.frames),
            "high_water": store.high_water,
        }

    @app.get("/datasets/{dataset_id}/frames/{n}")
    def get_frame(dataset_id: str, n: int):
        ds = state.require(dataset_id)
        if n > ds.store.high_water:
            raise HTTPException(404, detail=f"frame {n} not yet processed")
        entities = [
            _entity_json(ds.store, e, n) for e in ds.store.entities_in_frame(n)
        ]
        return {"version": API_VERSION, "frame": n, "entities": entities}

    @app.get("/datasets/{dataset_id}/range")
    def get_range(dataset_id: str):
        ds = state.require(dataset_id)
        frame_range = ds.store.frame_range()
        if frame_range is None:
            return {"version": API_VERSION, "min": None, "max": None}
        return {"version": API_VERSION, "min": frame_range[0], "max": frame_range[1]}

    @app.post("/templates/frame")
    def derive_frame_template(body: SketchPayload):
        cfg = (
            SpatialConfig(near_threshold=body.near_threshold)
            if body.near_threshold is not None
            else state.cfg
        )
        sketch = Sketch(
            entities=[
                SketchEntity(
                    id=e.id,
                    type=EntityType(e.type),
                    box=BoxSpec(Point(e.box.x, e.box.y), e.box.w, e.box.h),
                    orient=e.orient,
                )
                for e in body.entities
            ],
            not_exists=list(body.not_exists),
            template_id=body.template_id,
        )
        template = sketch_to_frame_template(sketch, cfg)
        return frame_template_to_json(template)

    @app.post("/templates/event")
    def derive_event_template(body: EventTemplatePayload):
        constraints = list(body.constraints)
        if body.bars:
            bars = [TimelineBar(b.step_id, b.x0, b.x1) for b in body.bars]
            constraints += [
                [c.relation, c.step_a, c.step_b] for c in derive_temporal_constraints(bars)
            ]
        event = event_template_from_json(
            {"id": body.id, "steps": body.steps, "constraints": constraints}
        )
        return event_template_to_json(event)

    @app.post("/detect")
    def detect(body: DetectRequest):
        ds = state.require(body.dataset)
        if body.event == "loitering_in":
            if body.area is None or body.duration is None:
                raise HTTPException(422, detail="loitering_in needs area and duration")
            hits = [
                {"id": person, "start": start, "end": end}
                for person, start, end in loitering_in(
                    ds.store, body.area, body.duration, body.smoothing_radius, state.cfg
                )
            ]
            return {"version": API_VERSION, "detections": hits}
        if body.event == "left_item":
            hits = [
                {"P": p, "O": o, "F1": f1, "F2": f2, "F3": f3}
                for p, o, f1, f2, f3 in left_item(
                    ds.store, body.mode, body.cursor, body.relation_mode, state.cfg
                )
            ]
            return {"version": API_VERSION, "detections": hits}
        event = event_template_from_json(body.event)
        detections = [
            detection_to_json(d)
            for d in evaluate_event(
                ds.store, event, body.mode, body.cursor, body.relation_mode, state.cfg
            )
        ]
        return {"version": API_VERSION, "detections": detections}

    @app.post("/monitor/templates")
    def register_template(body: MonitorTemplateRequest):
        ds = state.require(body.dataset)
        monitor = state.monitors.get(body.dataset)
        if monitor is None:
            monitor = Monitor(
                ds.store,
                MonitorConfig(dataset=body.dataset, cfg=state.cfg),
            )
            state.monitors[body.dataset] = monitor
        event = event_template_from_json(body.template)
        monitor.add_template(event)
        return {"version": API_VERSION, "registered": event.id, "dataset": body.dataset}

    @app.delete("/monitor/templates/{event_id}")
    def unregister_template(event_id: str):
        removed = []
        for dataset_id, monitor in state.monitors.items():
            if event_id in monitor.template_ids():
                monitor.remove_template(event_id)
                removed.append(dataset_id)
        if not removed:
            raise HTTPException(404, detail=f"template {event_id!r} not registered")
        return {"version": API_VERSION, "removed": event_id, "datasets": removed}

    @app.get("/monitor/detections")
    def list_detections(since: int = Query(default=0, ge=0)):
        records = []
        for dataset_id in sorted(state.monitors):
            monitor = state.monitors[dataset_id]
            monitor.tick()
            records.extend(monitor.records)
        records.sort(key=lambda r: r.timestamp)
        import json as _json

        return {
            "version": API_VERSION,
            "next": len(records),
            "detections": [_json.loads(r.to_line()) for r in records[since:]],
        }

    if assets_dir and Path(assets_dir).is_dir():
        app.mount("/assets", StaticFiles(directory=assets_dir), name="assets")

    return app
