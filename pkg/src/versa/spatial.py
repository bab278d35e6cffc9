"""Entity-level spatial relations within a single frame.

Only a generating subset of the relation vocabulary is cached at ingestion
(CACHED_FUNCTORS); the converses are derived by argument swap, `outside` by
negating `overlapping`, and `not_<rel>` forms by negation-as-failure within
the frame's closed world.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import geometry
from .errors import UnknownRelationNameError

if TYPE_CHECKING:
    from .kb import FactStore

# Relations evaluated and cached at ingestion time.
CACHED_FUNCTORS = ("near", "overlapping", "inside", "higher", "moreLeft", "above", "leftOf")

# Derived at query time by swapping arguments.
CONVERSE_OF = {
    "lower": "higher",
    "below": "above",
    "moreRight": "moreLeft",
    "rightOf": "leftOf",
}

SYMMETRIC = frozenset({"near", "overlapping", "outside"})

ALL_RELATIONS = CACHED_FUNCTORS + tuple(CONVERSE_OF) + ("outside",)


@dataclass(frozen=True)
class SpatialConfig:
    """Tunables for relation entailment; near_threshold is in pixels."""

    near_threshold: float = 50.0

    def __post_init__(self) -> None:
        if self.near_threshold <= 0:
            raise ValueError("near_threshold must be > 0")


@dataclass(frozen=True)
class RelationFact:
    relation: str
    e1: object
    e2: object
    frame: int


def entity_dist(store: FactStore, e1, e2, frame: int) -> float:
    """Euclidean distance between the entities' center points in the frame."""
    f1 = store.frame_facts(e1, frame)
    f2 = store.frame_facts(e2, frame)
    return geometry.dist(f1.loc, f2.loc)


def eval_relation(store: FactStore, rel: str, e1, e2, frame: int, cfg: SpatialConfig) -> bool:
    """Evaluate one (possibly not_-prefixed) relation between two entities."""
    if rel.startswith("not_"):
        return not eval_relation(store, rel[4:], e1, e2, frame, cfg)
    if rel in CONVERSE_OF:
        return eval_relation(store, CONVERSE_OF[rel], e2, e1, frame, cfg)
    b1 = store.frame_facts(e1, frame).bounds
    b2 = store.frame_facts(e2, frame).bounds
    if rel == "near":
        return entity_dist(store, e1, e2, frame) < cfg.near_threshold
    if rel == "overlapping":
        return geometry.overlaps(b1, b2)
    if rel == "inside":
        return geometry.rect_inside(b1, b2)
    if rel == "outside":
        return not geometry.overlaps(b1, b2)
    if rel == "higher":
        return geometry.rect_higher(b1, b2)
    if rel == "moreLeft":
        return geometry.rect_left(b1, b2)
    if rel == "above":
        return geometry.rect_higher(b1, b2) and geometry.in_x_range(b1, b2)
    if rel == "leftOf":
        return geometry.rect_left(b1, b2) and geometry.in_y_range(b1, b2)
    raise UnknownRelationNameError(f"unknown spatial relation: {rel!r}")


def entail_frame(
    store: FactStore,
    frame: int,
    functors: tuple[str, ...] = CACHED_FUNCTORS,
    cfg: SpatialConfig = SpatialConfig(),
) -> list[RelationFact]:
    """Evaluate every functor on every ordered pair of distinct entities.

    The facts that hold are asserted into the store's cached-relation index
    (both ordered pairs of a symmetric relation are asserted independently).
    """
    entities = store.entities_in_frame(frame, include_static=True)
    produced: list[RelationFact] = []
    for e1 in entities:
        for e2 in entities:
            if e1 == e2:
                continue
            for rel in functors:
                if eval_relation(store, rel, e1, e2, frame, cfg):
                    produced.append(RelationFact(rel, e1, e2, frame))
    store.assert_relation_facts(produced, cfg)
    return produced
