import pytest

from tests.conftest import OBJECT, PERSON, STATIC
from versa.errors import TemplateError
from versa.events import Detection, EventStep, EventTemplate, TemporalConstraint
from versa.serde import (
    detection_to_json,
    event_template_from_json,
    event_template_to_json,
    frame_template_from_json,
    frame_template_to_json,
)
from versa.templates import FrameTemplate, RelationTerm
from versa.temporal import TimeRef


def sample_frame_template():
    return FrameTemplate(
        id="f1",
        type_list=((PERSON, "P"), (OBJECT, "O"), (STATIC, "storefront")),
        relations=(RelationTerm("near", "P", "O"), RelationTerm("not_inside", "P", "storefront")),
        not_exists=(7,),
    )


def test_frame_template_round_trip():
    t = sample_frame_template()
    data = frame_template_to_json(t)
    assert data["version"] == 1
    assert frame_template_from_json(data) == t


def test_frame_template_accepts_kb_suffix_and_aliases():
    data = {
        "id": "t",
        "types": [["person", "P"], ["object", "O"]],
        "relations": [["near_kb", "P", "O"], ["more_left", "P", "O"]],
    }
    t = frame_template_from_json(data)
    assert t.relations == (RelationTerm("near", "P", "O"), RelationTerm("moreLeft", "P", "O"))


def test_frame_template_bad_payloads():
    with pytest.raises(TemplateError):
        frame_template_from_json({"id": "t"})  # missing types
    with pytest.raises(TemplateError):
        frame_template_from_json({"id": "t", "types": [["alien", "P"]]})


def test_event_template_round_trip():
    ev = EventTemplate(
        id="e1",
        steps=(
            EventStep("anchor", sample_frame_template(), mode="instant", threshold=0.85),
            EventStep("span", sample_frame_template(), mode="interval"),
        ),
        constraints=(TemporalConstraint("int_before", "anchor", "span"),),
    )
    data = event_template_to_json(ev)
    assert data["version"] == 1
    assert event_template_from_json(data) == ev


def test_event_template_defaults_and_errors():
    data = {
        "id": "e",
        "steps": [{"id": "s", "template": frame_template_to_json(sample_frame_template())}],
    }
    ev = event_template_from_json(data)
    assert ev.steps[0].mode == "instant" and ev.steps[0].threshold == 1.0
    with pytest.raises(TemplateError):
        event_template_from_json({"id": "e"})
    with pytest.raises(TemplateError):
        event_template_from_json({**data, "constraints": [["int_before", "s"]]})


def test_detection_to_json():
    det = Detection("e1", {"P": 1, "O": "bag"}, {"anchor": TimeRef(5, 5), "span": TimeRef(2, 9)}, 5)
    data = detection_to_json(det)
    assert data == {
        "version": 1,
        "event": "e1",
        "bindings": {"O": "bag", "P": 1},
        "steps": {"anchor": [5, 5], "span": [2, 9]},
        "detected_at": 5,
    }
