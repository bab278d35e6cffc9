"""Multi-keyframe event evaluation with shared bindings and temporal constraints.

An event template is an ordered list of steps, each referencing a frame
template with an evaluation mode (instant or interval) and a match score
threshold. The listed order is the search order, not the temporal order:
the first step is the existential anchor that grounds the variables any
later not-exists checks require. Temporal constraints relate step results
and are checked as soon as both operands are bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import TemplateError
from .intervals import IntervalSet, TimestampList, close_iset, iset_tsl
from .kb import EntityType, FactStore
from .spatial import SpatialConfig, eval_relation
from .temporal import (
    INSTANT_RELATIONS,
    INTERVAL_RELATIONS,
    TimeRef,
    interval_relation,
)
from .templates import FrameTemplate, is_variable, iset_match_bindings, match

# Functor set used when deriving constraints from timeline bar layouts.
# int_earlier is a historical alias for int_before.
TIMELINE_FUNCTORS = (
    "int_equals",
    "int_before",
    "int_during",
    "int_starts",
    "int_finishes",
    "int_meets",
    "int_overlaps",
)

_CONSTRAINT_ALIASES = {"int_earlier": "int_before"}


@dataclass(frozen=True)
class EventStep:
    id: str
    template: FrameTemplate
    mode: str = "instant"  # instant | interval
    threshold: float = 1.0

    def __post_init__(self) -> None:
        if self.mode not in ("instant", "interval"):
            raise TemplateError(f"step {self.id}: unknown mode {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise TemplateError(f"step {self.id}: threshold out of [0,1]")


@dataclass(frozen=True)
class TemporalConstraint:
    relation: str
    step_a: str
    step_b: str

    def __post_init__(self) -> None:
        name = _CONSTRAINT_ALIASES.get(self.relation, self.relation)
        if name not in INTERVAL_RELATIONS and name not in INSTANT_RELATIONS:
            raise TemplateError(f"unknown temporal relation: {self.relation!r}")

    @property
    def resolved_relation(self) -> str:
        return _CONSTRAINT_ALIASES.get(self.relation, self.relation)


@dataclass(frozen=True)
class EventTemplate:
    id: str
    steps: tuple[EventStep, ...]
    constraints: tuple[TemporalConstraint, ...] = ()

    def __post_init__(self) -> None:
        if not self.steps:
            raise TemplateError(f"event {self.id}: needs at least one step")
        ids = [s.id for s in self.steps]
        if len(set(ids)) != len(ids):
            raise TemplateError(f"event {self.id}: duplicate step ids")
        known = set(ids)
        for c in self.constraints:
            if c.step_a not in known or c.step_b not in known:
                raise TemplateError(
                    f"event {self.id}: constraint references undeclared step"
                )
        # a step's not-exists variables must be bound by an earlier step
        bound: set[str] = set()
        for step in self.steps:
            for term in step.template.not_exists:
                if is_variable(term) and term not in bound:
                    raise TemplateError(
                        f"event {self.id}: step {step.id} checks not-exists on "
                        f"{term!r} before any step binds it"
                    )
            bound.update(step.template.variables())


@dataclass(frozen=True)
class Detection:
    event_id: str
    bindings: dict
    step_results: dict  # step id -> TimeRef
    detected_at: int

    def binding_key(self) -> tuple:
        return tuple(sorted(self.bindings.items()))

    def idempotency_key(self) -> tuple:
        return (self.event_id, self.binding_key(), self.detected_at)


@dataclass
class EvaluationStats:
    """Instrumentation: anchor frames actually explored by evaluate_event."""

    anchor_frames: list[int] = field(default_factory=list)


def evaluate_event(
    store: FactStore,
    ev: EventTemplate,
    mode: str = "first",
    cursor: int | None = None,
    relation_mode: str = "cached",
    cfg: SpatialConfig | None = None,
    stats: EvaluationStats | None = None,
) -> Iterator[Detection]:
    """Depth-first search over step matches in listed order.

    Bindings unify across steps by shared variable names. With a cursor,
    only candidates whose first (anchor) step's frame or interval start
    exceeds the cursor are explored. In `all` mode, detections are
    deduplicated by binding, keeping the earliest anchor and the earliest
    frame for every other step.
    """
    if mode not in ("first", "all"):
        raise ValueError(f"unknown evaluation mode: {mode!r}")

    def candidates(step: EventStep, bindings: dict, first: bool) -> Iterator[tuple[TimeRef, dict]]:
        start = cursor + 1 if (first and cursor is not None) else 0
        if step.mode == "instant":
            results = match(
                store, step.template, step.threshold, relation_mode, cfg,
                pre_bindings=bindings, start_frame=start,
            )
            if first and stats is not None:
                results = _record_anchor_frames(results, stats)
            for r in results:
                yield TimeRef.instant(r.frame), r.bindings
        else:
            for group_bindings, iset in iset_match_bindings(
                store, step.template, step.threshold, relation_mode, cfg, pre_bindings=bindings
            ):
                for member in iset.members():
                    if first and member.begin <= start - 1:
                        continue
                    if first and stats is not None:
                        stats.anchor_frames.append(member.begin)
                    yield member, group_bindings

    def constraints_ok(results: dict[str, TimeRef]) -> bool:
        for c in ev.constraints:
            a = results.get(c.step_a)
            b = results.get(c.step_b)
            if a is None or b is None:
                continue
            name = c.resolved_relation
            if name in INSTANT_RELATIONS:
                if not INSTANT_RELATIONS[name](a, b):
                    return False
            elif not interval_relation(name, a, b):
                return False
        return True

    def search(index: int, bindings: dict, results: dict) -> Iterator[Detection]:
        if index == len(ev.steps):
            anchor = results[ev.steps[0].id]
            yield Detection(ev.id, dict(bindings), dict(results), anchor.begin)
            return
        step = ev.steps[index]
        for when, new_bindings in candidates(step, bindings, first=index == 0):
            merged = {**bindings, **new_bindings}
            trial = {**results, step.id: when}
            if not constraints_ok(trial):
                continue
            yield from search(index + 1, merged, trial)

    found = search(0, {}, {})
    if mode == "first":
        first_hit = next(found, None)
        if first_hit is not None:
            yield first_hit
        return

    # all mode: collapse trivial variants, one detection per binding with the
    # earliest anchor and earliest remaining step frames
    best: dict[tuple, Detection] = {}
    order: list[tuple] = []
    for det in found:
        key = det.binding_key()
        if key not in best:
            best[key] = det
            order.append(key)
            continue
        cur = best[key]
        anchor_id = ev.steps[0].id
        if det.step_results[anchor_id] < cur.step_results[anchor_id]:
            best[key] = det
        elif det.step_results[anchor_id] == cur.step_results[anchor_id]:
            merged = dict(cur.step_results)
            for sid, when in det.step_results.items():
                if when < merged[sid]:
                    merged[sid] = when
            best[key] = Detection(cur.event_id, cur.bindings, merged, cur.detected_at)
    for key in order:
        yield best[key]


def _record_anchor_frames(results, stats: EvaluationStats):
    for r in results:
        stats.anchor_frames.append(r.frame)
        yield r


# --- built-in event templates ------------------------------------------------


def left_item_template() -> EventTemplate:
    """Person leaves behind an object: near anchor, absent-before, far-after."""
    anchor = FrameTemplate(
        id="left_item_anchor",
        type_list=((EntityType.PERSON, "P"), (EntityType.OBJECT, "O")),
        relations=(_rel("near", "P", "O"),),
    )
    prior = FrameTemplate(
        id="left_item_prior",
        type_list=((EntityType.PERSON, "P"),),
        not_exists=("O",),
    )
    after = FrameTemplate(
        id="left_item_after",
        type_list=((EntityType.PERSON, "P"), (EntityType.OBJECT, "O")),
        relations=(_rel("not_near", "P", "O"),),
    )
    return EventTemplate(
        id="left_item",
        steps=(
            EventStep("anchor", anchor),
            EventStep("prior", prior),
            EventStep("after", after),
        ),
        constraints=(
            TemporalConstraint("before", "prior", "anchor"),
            TemporalConstraint("after", "after", "anchor"),
        ),
    )


def _rel(name, a, b):
    from .templates import RelationTerm

    return RelationTerm(name, a, b)


def left_item(
    store: FactStore,
    mode: str = "first",
    cursor: int | None = None,
    relation_mode: str = "cached",
    cfg: SpatialConfig | None = None,
    stats: EvaluationStats | None = None,
) -> Iterator[tuple]:
    """Yield (P, O, F1, F2, F3) tuples: prior, anchor, and after frames."""
    for det in evaluate_event(store, left_item_template(), mode, cursor, relation_mode, cfg, stats):
        yield (
            det.bindings["P"],
            det.bindings["O"],
            det.step_results["prior"].begin,
            det.step_results["anchor"].begin,
            det.step_results["after"].begin,
        )


def loitering_in(
    store: FactStore,
    area,
    duration: int,
    smoothing_radius: int = 1,
    cfg: SpatialConfig | None = None,
) -> Iterator[tuple]:
    """Yield (person, start, end) where the person overlaps the area too long.

    Per-person overlap frames are grouped into interval sets, smoothed with
    the closing operator, and filtered by the strict duration inequality
    end - start > duration.
    """
    if not store.is_static(area):
        raise TemplateError(f"area {area!r} is not a registered static entity")
    if duration <= 0:
        raise ValueError("duration must be > 0")
    cfg = cfg or SpatialConfig()
    entries = []
    for frame in range(0, store.high_water + 1):
        for entity in store.entities_in_frame(frame):
            facts = store.frame_facts(entity, frame)
            if facts.type is not EntityType.PERSON:
                continue
            if eval_relation(store, "overlapping", area, entity, frame, cfg):
                entries.append((entity, frame))
    for person, iset in iset_tsl(TimestampList(entries)):
        for start, end in close_iset(iset, smoothing_radius):
            if end - start > duration:
                yield (person, start, end)


# --- timeline-derived constraints --------------------------------------------


@dataclass(frozen=True)
class TimelineBar:
    step_id: str
    x0: float
    x1: float

    def __post_init__(self) -> None:
        if not self.x0 < self.x1:
            raise ValueError(f"timeline bar {self.step_id}: x0 must be < x1")


def derive_temporal_constraints(bars: list[TimelineBar]) -> list[TemporalConstraint]:
    """Emit every timeline functor that holds between pairs of bar layouts.

    Layout coordinates are treated purely relationally; the emitted
    constraints order the steps, they carry no metric meaning.
    """
    ids = [b.step_id for b in bars]
    if len(set(ids)) != len(ids):
        raise TemplateError("duplicate step ids among timeline bars")
    out = []
    for functor in TIMELINE_FUNCTORS:
        for b1 in bars:
            for b2 in bars:
                if b1.step_id == b2.step_id:
                    continue
                i1 = TimeRef(b1.x0, b1.x1)
                i2 = TimeRef(b2.x0, b2.x1)
                if interval_relation(functor, i1, i2):
                    out.append(TemporalConstraint(functor, b1.step_id, b2.step_id))
    return out
