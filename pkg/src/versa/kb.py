"""The fact store: per-frame basic facts, static entities, cached relations.

Concurrency model: single writer / multiple readers. All mutation goes
through a writer lock; readers see a consistent snapshot bounded by the
high-water mark (the highest fully-processed frame).
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    DuplicateFactError,
    FrameNotProcessedError,
    HighWaterRegressionError,
    StaleThresholdError,
    UnknownEntityError,
    UnknownRelationNameError,
)
from .geometry import BoxSpec, Point, Rect, rect_from_box
from .spatial import CACHED_FUNCTORS, CONVERSE_OF, RelationFact, SpatialConfig

SNAPSHOT_VERSION = 1


class EntityType(str, Enum):
    PERSON = "person"
    OBJECT = "object"
    STATIC = "static"


def entity_sort_key(entity) -> tuple:
    """Numeric ids sort ascending before symbolic ids, which sort lexically."""
    if isinstance(entity, bool):
        return (1, str(entity))
    if isinstance(entity, (int, float)):
        return (0, entity)
    return (1, str(entity))


@dataclass(frozen=True)
class EntityFrameFacts:
    """The five basic facts for one entity in one frame."""

    entity: object
    frame: int
    type: EntityType
    bounds: Rect
    loc: Point
    orient: float

    def __post_init__(self) -> None:
        if not (0 <= self.orient < 360):
            raise ValueError(f"orientation out of [0,360): {self.orient}")
        center = self.bounds.center
        if abs(center.x - self.loc.x) > 1e-9 or abs(center.y - self.loc.y) > 1e-9:
            raise ValueError(
                f"loc {self.loc} is not the center of bounds {self.bounds} "
                f"for entity {self.entity} in frame {self.frame}"
            )


@dataclass(frozen=True)
class StaticEntity:
    """A frame-independent scene region; answers basic facts for every frame."""

    entity: object
    bounds: Rect
    loc: Point
    orient: float

    def facts_for(self, frame: int) -> EntityFrameFacts:
        return EntityFrameFacts(self.entity, frame, EntityType.STATIC, self.bounds, self.loc, self.orient)


class FactStore:
    """In-memory knowledge base of basic facts and cached spatial relations."""

    def __init__(self) -> None:
        self._write_lock = threading.RLock()
        # frame -> entity -> facts
        self._frames: dict[int, dict[object, EntityFrameFacts]] = {}
        self._statics: dict[object, StaticEntity] = {}
        # (relation, e1, e2, frame) membership + per-(relation, frame) index
        self._cached: set[tuple[str, object, object, int]] = set()
        self._cached_by_rel_frame: dict[tuple[str, int], set[tuple[object, object]]] = {}
        self._high_water = -1
        self._cached_near_threshold: float | None = None

    # --- assertion -------------------------------------------------------

    def assert_entity_facts(self, facts: EntityFrameFacts) -> None:
        """Assert the five basic facts for one entity in one frame."""
        with self._write_lock:
            frame = self._frames.setdefault(facts.frame, {})
            if facts.entity in frame:
                raise DuplicateFactError(
                    f"facts for entity {facts.entity} in frame {facts.frame} already asserted"
                )
            if facts.entity in self._statics:
                raise DuplicateFactError(f"entity id {facts.entity} is registered as static")
            frame[facts.entity] = facts

    def assert_static_entity(self, entity, box: BoxSpec, orient: float = 0.0) -> None:
        """Register a frame-independent entity; it exists in every frame."""
        with self._write_lock:
            if entity in self._statics:
                raise DuplicateFactError(f"static entity {entity} already registered")
            bounds = rect_from_box(box)
            self._statics[entity] = StaticEntity(entity, bounds, bounds.center, orient)

    def assert_relation_facts(self, facts: Iterable[RelationFact], cfg: SpatialConfig) -> None:
        """Add entailed relation facts to the cache, recording the threshold used."""
        with self._write_lock:
            if self._cached_near_threshold is None:
                self._cached_near_threshold = cfg.near_threshold
            elif self._cached_near_threshold != cfg.near_threshold:
                raise StaleThresholdError(
                    f"cache was entailed with near_threshold={self._cached_near_threshold}, "
                    f"got {cfg.near_threshold}"
                )
            for fact in facts:
                if fact.e1 == fact.e2:
                    continue  # reflexive pairs are never asserted
                key = (fact.relation, fact.e1, fact.e2, fact.frame)
                if key not in self._cached:
                    self._cached.add(key)
                    self._cached_by_rel_frame.setdefault(
                        (fact.relation, fact.frame), set()
                    ).add((fact.e1, fact.e2))

    def set_high_water(self, frame: int) -> None:
        with self._write_lock:
            if frame < self._high_water:
                raise HighWaterRegressionError(
                    f"high-water mark cannot regress from {self._high_water} to {frame}"
                )
            self._high_water = frame

    # --- basic queries ---------------------------------------------------

    @property
    def high_water(self) -> int:
        return self._high_water

    @property
    def cached_near_threshold(self) -> float | None:
        return self._cached_near_threshold

    def is_static(self, entity) -> bool:
        return entity in self._statics

    def exists(self, entity, frame: int) -> bool:
        return entity in self._statics or entity in self._frames.get(frame, {})

    def frame_facts(self, entity, frame: int) -> EntityFrameFacts:
        """Basic facts for one entity in one frame (statics answer any frame)."""
        static = self._statics.get(entity)
        if static is not None:
            return static.facts_for(frame)
        try:
            return self._frames[frame][entity]
        except KeyError:
            raise UnknownEntityError(f"entity {entity!r} does not exist in frame {frame}") from None

    def entities_in_frame(self, frame: int, include_static: bool = False) -> list:
        """Entities present in the frame, ascending; statics excluded by default."""
        entities = sorted(self._frames.get(frame, {}), key=entity_sort_key)
        if include_static:
            entities += sorted(self._statics, key=entity_sort_key)
        return entities

    def frame_range(self) -> tuple[int, int] | None:
        """(min, max) processed frame numbers, or None when nothing is processed."""
        if self._high_water < 0:
            return None
        frames = self._frames.keys()
        return (min(frames, default=0), self._high_water)

    def query_basic(self, kind: str, entity=None, frame: int | None = None) -> Iterator[tuple]:
        """Yield (entity, frame, value) bindings for one kind of basic fact.

        `entity` and `frame` may each be None (wildcard). Wildcard frames
        enumerate ascending; statics answer every processed frame under a
        wildcard but any frame number when given exactly.
        """
        if kind not in ("exists", "type", "bounds", "loc", "orient"):
            raise ValueError(f"unknown basic fact kind: {kind!r}")

        def value_of(facts: EntityFrameFacts):
            if kind == "exists":
                return True
            return getattr(facts, kind if kind != "type" else "type")

        if frame is not None:
            frames: Iterable[int] = (frame,)
        else:
            upper = self._high_water
            frames = sorted(f for f in self._frames if f <= upper)
            if entity is not None and entity in self._statics:
                frames = range(0, upper + 1)
        for f in frames:
            in_frame = self._frames.get(f, {})
            if entity is not None:
                if entity in self._statics:
                    yield (entity, f, value_of(self._statics[entity].facts_for(f)))
                elif entity in in_frame:
                    yield (entity, f, value_of(in_frame[entity]))
            else:
                for e in sorted(in_frame, key=entity_sort_key):
                    yield (e, f, value_of(in_frame[e]))
                for e in sorted(self._statics, key=entity_sort_key):
                    yield (e, f, value_of(self._statics[e].facts_for(f)))

    # --- cached relation queries ------------------------------------------

    def _cached_holds(self, rel: str, e1, e2, frame: int) -> bool:
        if rel.startswith("not_"):
            base = rel[4:]
            return (
                self.exists(e1, frame)
                and self.exists(e2, frame)
                and e1 != e2
                and not self._cached_holds(base, e1, e2, frame)
            )
        if rel == "outside":
            return (
                self.exists(e1, frame)
                and self.exists(e2, frame)
                and e1 != e2
                and not self._cached_holds("overlapping", e1, e2, frame)
            )
        if rel in CONVERSE_OF:
            return self._cached_holds(CONVERSE_OF[rel], e2, e1, frame)
        if rel not in CACHED_FUNCTORS:
            raise UnknownRelationNameError(f"unknown relation name: {rel!r}")
        return (rel, e1, e2, frame) in self._cached

    def query_cached(
        self, relation: str, e1=None, e2=None, frame: int | None = None
    ) -> Iterator[tuple]:
        """Yield (e1, e2, frame) bindings from the cached-relation index.

        Converse names swap arguments; `not_`/`outside` forms answer via
        negation over pairs of entities that exist in the frame. Querying a
        frame above the high-water mark raises FrameNotProcessedError.
        """
        if frame is not None:
            if frame > self._high_water:
                raise FrameNotProcessedError(
                    f"frame {frame} is above the high-water mark {self._high_water}"
                )
            frames: Iterable[int] = (frame,)
        else:
            frames = sorted(f for f in self._frames if f <= self._high_water)
        for f in frames:
            candidates_1 = [e1] if e1 is not None else self.entities_in_frame(f, include_static=True)
            candidates_2 = [e2] if e2 is not None else self.entities_in_frame(f, include_static=True)
            for a in candidates_1:
                for b in candidates_2:
                    if a == b:
                        continue
                    if not (self.exists(a, f) and self.exists(b, f)):
                        continue
                    if self._cached_holds(relation, a, b, f):
                        yield (a, b, f)

    def cached_facts_for_frame(self, frame: int) -> list[RelationFact]:
        """All positively cached facts for one frame (generating subset only)."""
        out = []
        for rel in CACHED_FUNCTORS:
            for e1, e2 in sorted(
                self._cached_by_rel_frame.get((rel, frame), ()),
                key=lambda p: (entity_sort_key(p[0]), entity_sort_key(p[1])),
            ):
                out.append(RelationFact(rel, e1, e2, frame))
        return out

    def cached_fact_count(self) -> int:
        return len(self._cached)

    # --- snapshot ----------------------------------------------------------

    def to_snapshot(self) -> dict:
        """Versioned, deterministic JSON-serializable snapshot of the store."""
        def enc_entity(e):
            return ["i", e] if isinstance(e, int) else ["s", str(e)]

        frames = []
        for f in sorted(self._frames):
            ents = []
            for e in sorted(self._frames[f], key=entity_sort_key):
                facts = self._frames[f][e]
                ents.append(
                    {
                        "entity": enc_entity(e),
                        "type": facts.type.value,
                        "box": [facts.loc.x, facts.loc.y, facts.bounds.width, facts.bounds.height],
                        "orient": facts.orient,
                    }
                )
            frames.append({"frame": f, "entities": ents})
        statics = [
            {
                "entity": enc_entity(e),
                "box": [s.loc.x, s.loc.y, s.bounds.width, s.bounds.height],
                "orient": s.orient,
            }
            for e, s in sorted(self._statics.items(), key=lambda kv: entity_sort_key(kv[0]))
        ]
        cached = sorted(
            [[rel, enc_entity(e1), enc_entity(e2), f] for rel, e1, e2, f in self._cached],
            key=lambda r: (r[3], r[0], r[1], r[2]),
        )
        return {
            "version": SNAPSHOT_VERSION,
            "high_water": self._high_water,
            "near_threshold": self._cached_near_threshold,
            "frames": frames,
            "statics": statics,
            "cached": cached,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_snapshot(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_snapshot(cls, data: dict) -> FactStore:
        if data.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version: {data.get('version')!r}")

        def dec_entity(pair):
            tag, value = pair
            return int(value) if tag == "i" else str(value)

        store = cls()
        for frame_rec in data["frames"]:
            f = frame_rec["frame"]
            for ent in frame_rec["entities"]:
                x, y, w, h = ent["box"]
                box = BoxSpec(Point(x, y), w, h)
                store.assert_entity_facts(
                    EntityFrameFacts(
                        dec_entity(ent["entity"]), f, EntityType(ent["type"]),
                        rect_from_box(box), box.center, ent["orient"],
                    )
                )
        for ent in data["statics"]:
            x, y, w, h = ent["box"]
            store.assert_static_entity(dec_entity(ent["entity"]), BoxSpec(Point(x, y), w, h), ent["orient"])
        store._cached_near_threshold = data["near_threshold"]
        for rel, e1, e2, f in data["cached"]:
            key = (rel, dec_entity(e1), dec_entity(e2), f)
            store._cached.add(key)
            store._cached_by_rel_frame.setdefault((rel, f), set()).add((key[1], key[2]))
        store._high_water = data["high_water"]
        return store

    @classmethod
    def load(cls, path) -> FactStore:
        with open(path, encoding="utf-8") as fh:
            return cls.from_snapshot(json.load(fh))
