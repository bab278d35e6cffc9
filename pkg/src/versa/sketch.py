"""Query-by-example: derive frame templates from sketched entity layouts."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TemplateError
from .geometry import BoxSpec, Point, rect_from_box
from .kb import EntityFrameFacts, EntityType, FactStore, entity_sort_key
from .spatial import CACHED_FUNCTORS, SpatialConfig, entail_frame
from .templates import FrameTemplate, RelationTerm


@dataclass(frozen=True)
class SketchEntity:
    id: object
    type: EntityType
    box: BoxSpec
    orient: float = 0.0


@dataclass
class Sketch:
    entities: list[SketchEntity]
    not_exists: list = field(default_factory=list)
    template_id: str = "sketch"


def variable_for(entity_id) -> str:
    """Entity id -> variable term (leading uppercase); numeric ids get an X prefix."""
    if isinstance(entity_id, int):
        return f"X{entity_id}"
    text = str(entity_id)
    return text[0].upper() + text[1:]


def sketch_to_frame_template(
    sketch: Sketch, cfg: SpatialConfig = SpatialConfig()
) -> FrameTemplate:
    """Entail the cached relation set over a sketch and emit a frame template.

    The sketch is asserted into a scratch store as one pseudo-frame; the
    relations that hold among sketched entities become the template's
    relation list, with entity ids rewritten as variables. Entities in the
    not-exists tray contribute no relations.
    """
    ids = [e.id for e in sketch.entities]
    if len(set(ids)) != len(ids):
        raise TemplateError("duplicate entity ids in sketch")
    drawn = set(ids)
    for absent in sketch.not_exists:
        if absent in drawn:
            raise TemplateError(f"not-exists entity {absent!r} is also drawn in the frame")

    scratch = FactStore()
    for ent in sketch.entities:
        bounds = rect_from_box(ent.box)
        scratch.assert_entity_facts(
            EntityFrameFacts(ent.id, 0, ent.type, bounds, bounds.center, ent.orient)
        )
    facts = entail_frame(scratch, 0, CACHED_FUNCTORS, cfg)

    ordered = sorted(sketch.entities, key=lambda e: (e.type.value, entity_sort_key(e.id)))
    type_list = tuple((e.type, variable_for(e.id)) for e in ordered)
    relations = tuple(
        RelationTerm(f.relation, variable_for(f.e1), variable_for(f.e2)) for f in facts
    )
    not_exists = tuple(variable_for(x) for x in sketch.not_exists)
    return FrameTemplate(
        id=sketch.template_id,
        type_list=type_list,
        relations=relations,
        not_exists=not_exists,
    )
