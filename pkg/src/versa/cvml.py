"""CVML parsing and frame processing.

CVML documents annotate each frame with an objectlist of entities carrying
an id, orientation, center/size bounding box, appearance string, and a list
of hypotheses. Group elements are parsed but never asserted, and only the
first hypothesis's role feeds the entity type mapping.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterator

from .errors import VersaError
from .geometry import BoxSpec, Point, rect_from_box
from .kb import EntityFrameFacts, EntityType, FactStore
from .spatial import CACHED_FUNCTORS, SpatialConfig, entail_frame


class CvmlParseError(VersaError, ValueError):
    """Malformed CVML: bad XML, missing or non-numeric mandatory attributes."""


@dataclass(frozen=True)
class Hypothesis:
    role: str = ""
    movement: str = ""
    context: str = ""
    situation: str = ""


@dataclass(frozen=True)
class CvmlObject:
    id: int
    orientation: int
    box: BoxSpec
    appearance: str = ""
    hypotheses: tuple[Hypothesis, ...] = ()


@dataclass(frozen=True)
class CvmlFrame:
    number: int
    objects: tuple[CvmlObject, ...] = ()


@dataclass
class CvmlDataset:
    name: str
    frames: list[CvmlFrame] = field(default_factory=list)


DEFAULT_PERSON_ROLES = frozenset({"walker", "browser", "fighter"})


@dataclass(frozen=True)
class TypeMapping:
    """role string -> entity type, total via a default for unmapped roles."""

    roles: tuple[tuple[str, EntityType], ...] = tuple(
        (role, EntityType.PERSON) for role in sorted(DEFAULT_PERSON_ROLES)
    )
    default: EntityType = EntityType.OBJECT

    def type_for(self, role: str | None) -> EntityType:
        if role is not None:
            for known, etype in self.roles:
                if known == role:
                    return etype
        return self.default

    @classmethod
    def from_file(cls, path) -> TypeMapping:
        """One `role = person|object` assignment per line; # starts a comment."""
        roles = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CvmlParseError(f"{path}:{lineno}: expected `role = type`")
                role, _, type_name = (part.strip() for part in line.partition("="))
                try:
                    etype = EntityType(type_name)
                except ValueError:
                    raise CvmlParseError(
                        f"{path}:{lineno}: unknown entity type {type_name!r}"
                    ) from None
                roles.append((role, etype))
        return cls(roles=tuple(roles))


def entity_type(obj: CvmlObject, mapping: TypeMapping = TypeMapping()) -> EntityType:
    """Type of the object's first hypothesis role; default when none."""
    role = obj.hypotheses[0].role if obj.hypotheses else None
    return mapping.type_for(role)


def _require_int(element: ET.Element, attr: str, context: str) -> int:
    value = element.get(attr)
    if value is None:
        raise CvmlParseError(f"{context}: missing mandatory attribute {attr!r}")
    try:
        return int(value)
    except ValueError:
        raise CvmlParseError(f"{context}: non-numeric {attr}={value!r}") from None


def _parse_object(el: ET.Element, frame_num: int) -> CvmlObject:
    obj_id = _require_int(el, "id", f"frame {frame_num} object")
    context = f"frame {frame_num} object {obj_id}"
    box_el = el.find("box")
    if box_el is None:
        raise CvmlParseError(f"{context}: missing box element")
    h = _require_int(box_el, "h", context)
    w = _require_int(box_el, "w", context)
    xc = _require_int(box_el, "xc", context)
    yc = _require_int(box_el, "yc", context)
    if min(h, w, xc, yc) < 0:
        raise CvmlParseError(f"{context}: negative box attribute")
    orient_el = el.find("orientation")
    orientation = int(orient_el.text.strip()) if orient_el is not None and orient_el.text else 0
    appearance_el = el.find("appearance")
    appearance = appearance_el.text.strip() if appearance_el is not None and appearance_el.text else ""
    hypotheses = []
    for hyp in el.iterfind("hypothesislist/hypothesis"):
        fields = {}
        for name in ("role", "movement", "context", "situation"):
            sub = hyp.find(name)
            fields[name] = sub.text.strip() if sub is not None and sub.text else ""
        hypotheses.append(Hypothesis(**fields))
    return CvmlObject(
        id=obj_id,
        orientation=orientation % 360,
        box=BoxSpec(Point(float(xc), float(yc)), float(w), float(h)),
        appearance=appearance,
        hypotheses=tuple(hypotheses),
    )


def _parse_frame(el: ET.Element) -> CvmlFrame:
    number = _require_int(el, "number", "frame")
    objects = tuple(
        _parse_object(obj_el, number) for obj_el in el.iterfind("objectlist/object")
    )
    seen = set()
    for obj in objects:
        if obj.id in seen:
            raise CvmlParseError(f"frame {number}: duplicate object id {obj.id}")
        seen.add(obj.id)
    return CvmlFrame(number=number, objects=objects)


def parse_cvml(document: str) -> CvmlDataset:
    """Parse a whole CVML document into a dataset model."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise CvmlParseError(f"malformed XML: {exc}") from exc
    if root.tag != "dataset":
        raise CvmlParseError(f"expected <dataset> root, got <{root.tag}>")
    frames = [_parse_frame(el) for el in root.iterfind("frame")]
    numbers = [f.number for f in frames]
    if len(set(numbers)) != len(numbers):
        raise CvmlParseError("duplicate frame numbers in dataset")
    if numbers != sorted(numbers):
        raise CvmlParseError("frames are not ascending by number")
    return CvmlDataset(name=root.get("name", ""), frames=frames)


def parse_frame_element(document: str) -> CvmlFrame:
    """Parse a single standalone <frame> element (streaming ingestion path)."""
    try:
        el = ET.fromstring(document)
    except ET.ParseError as exc:
        raise CvmlParseError(f"malformed XML: {exc}") from exc
    if el.tag != "frame":
        raise CvmlParseError(f"expected <frame> element, got <{el.tag}>")
    return _parse_frame(el)


def frame_data(dataset: CvmlDataset, n: int) -> CvmlFrame | None:
    """Exact frame-number lookup; None when the dataset skips that number."""
    for frame in dataset.frames:
        if frame.number == n:
            return frame
        if frame.number > n:
            return None
    return None


def assert_frame(
    frame: CvmlFrame,
    store: FactStore,
    cfg: SpatialConfig = SpatialConfig(),
    functors: tuple[str, ...] = CACHED_FUNCTORS,
    mapping: TypeMapping = TypeMapping(),
) -> None:
    """Assert one parsed frame's basic facts, entail relations, advance the mark."""
    for obj in frame.objects:
        bounds = rect_from_box(obj.box)
        store.assert_entity_facts(
            EntityFrameFacts(
                entity=obj.id,
                frame=frame.number,
                type=entity_type(obj, mapping),
                bounds=bounds,
                loc=bounds.center,
                orient=float(obj.orientation),
            )
        )
    entail_frame(store, frame.number, functors, cfg)
    store.set_high_water(frame.number)


def process_frame(
    dataset: CvmlDataset,
    n: int,
    store: FactStore,
    cfg: SpatialConfig = SpatialConfig(),
    functors: tuple[str, ...] = CACHED_FUNCTORS,
    mapping: TypeMapping = TypeMapping(),
) -> None:
    """Process frame n of the dataset (a missing number is an empty frame)."""
    frame = frame_data(dataset, n)
    if frame is None:
        frame = CvmlFrame(number=n)
    assert_frame(frame, store, cfg, functors, mapping)


def process_dataset(
    dataset: CvmlDataset,
    store: FactStore,
    cfg: SpatialConfig = SpatialConfig(),
    functors: tuple[str, ...] = CACHED_FUNCTORS,
    mapping: TypeMapping = TypeMapping(),
) -> Iterator[int]:
    """Process every annotated frame in order, yielding each frame number."""
    for frame in dataset.frames:
        assert_frame(frame, store, cfg, functors, mapping)
        yield frame.number
