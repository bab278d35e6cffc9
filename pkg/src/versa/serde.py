"""JSON codecs for templates, events, and detections (wire format v1)."""
from __future__ import annotations

from .errors import TemplateError
from .events import Detection, EventStep, EventTemplate, TemporalConstraint
from .kb import EntityType
from .templates import FrameTemplate, RelationTerm, normalize_relation

WIRE_VERSION = 1


def frame_template_to_json(t: FrameTemplate) -> dict:
    return {
        "version": WIRE_VERSION,
        "id": t.id,
        "types": [[etype.value, term] for etype, term in t.type_list],
        "relations": [[r.relation, r.arg1, r.arg2] for r in t.relations],
        "not_exists": list(t.not_exists),
    }


def frame_template_from_json(data: dict) -> FrameTemplate:
    try:
        return FrameTemplate(
            id=data["id"],
            type_list=tuple((EntityType(tn), term) for tn, term in data["types"]),
            relations=tuple(
                RelationTerm(normalize_relation(name), a, b)
                for name, a, b in data.get("relations", [])
            ),
            not_exists=tuple(data.get("not_exists", [])),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise TemplateError(f"bad frame template payload: {exc}") from exc


def event_template_to_json(ev: EventTemplate) -> dict:
    return {
        "version": WIRE_VERSION,
        "id": ev.id,
        "steps": [
            {
                "id": s.id,
                "template": frame_template_to_json(s.template),
                "mode": s.mode,
                "threshold": s.threshold,
            }
            for s in ev.steps
        ],
        "constraints": [[c.relation, c.step_a, c.step_b] for c in ev.constraints],
    }


def event_template_from_json(data: dict) -> EventTemplate:
    try:
        steps = tuple(
            EventStep(
                id=s["id"],
                template=frame_template_from_json(s["template"]),
                mode=s.get("mode", "instant"),
                threshold=float(s.get("threshold", 1.0)),
            )
            for s in data["steps"]
        )
        constraints = tuple(
            TemporalConstraint(rel, a, b) for rel, a, b in data.get("constraints", [])
        )
        return EventTemplate(id=data["id"], steps=steps, constraints=constraints)
    except (KeyError, ValueError, TypeError) as exc:
        raise TemplateError(f"bad event template payload: {exc}") from exc


def detection_to_json(det: Detection) -> dict:
    return {
        "version": WIRE_VERSION,
        "event": det.event_id,
        "bindings": {str(k): v for k, v in sorted(det.bindings.items())},
        "steps": {k: [v.begin, v.end] for k, v in sorted(det.step_results.items())},
        "detected_at": det.detected_at,
    }
