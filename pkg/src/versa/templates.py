"""Frame signatures, frame templates, and the match query family.

Terms in a template are variables when they start with an uppercase letter
(`P1`, `O1`) and constants otherwise (numeric entity ids or symbolic names
like `storefront`). A match's score is the fraction of the template's
relations satisfied by the binding; entity existence and the not-exists
list are hard constraints, never scored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import (
    FrameNotProcessedError,
    StaleThresholdError,
    TemplateError,
    UnknownRelationNameError,
)
from .intervals import IntervalSet, make_iset
from .kb import EntityType, FactStore, entity_sort_key
from .spatial import ALL_RELATIONS, SpatialConfig, eval_relation

# snake_case aliases accepted in serialized templates
_RELATION_ALIASES = {
    "more_left": "moreLeft",
    "more_right": "moreRight",
    "left_of": "leftOf",
    "right_of": "rightOf",
}


def is_variable(term) -> bool:
    """Uppercase-leading strings are variables; everything else is a constant."""
    return isinstance(term, str) and bool(term) and term[0].isupper()


def normalize_relation(name: str) -> str:
    """Strip the `_kb` cache marker and resolve aliases; validate the base name."""
    negated = name.startswith("not_")
    base = name[4:] if negated else name
    if base.endswith("_kb"):
        base = base[:-3]
    base = _RELATION_ALIASES.get(base, base)
    if base not in ALL_RELATIONS:
        raise UnknownRelationNameError(f"unknown relation name: {name!r}")
    return f"not_{base}" if negated else base


@dataclass(frozen=True)
class RelationTerm:
    relation: str
    arg1: object
    arg2: object


@dataclass(frozen=True)
class FrameTemplate:
    id: str
    type_list: tuple[tuple[EntityType, object], ...]
    relations: tuple[RelationTerm, ...] = ()
    not_exists: tuple[object, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise TemplateError("frame template needs an id")
        terms = {term for _, term in self.type_list}
        if len(terms) != len(self.type_list):
            raise TemplateError(f"template {self.id}: duplicate terms in type list")
        for rel in self.relations:
            normalize_relation(rel.relation)
            for arg in (rel.arg1, rel.arg2):
                if is_variable(arg) and arg not in terms:
                    raise TemplateError(
                        f"template {self.id}: relation argument {arg!r} not in type list"
                    )

    def variables(self) -> list[str]:
        return [term for _, term in self.type_list if is_variable(term)]


@dataclass(frozen=True)
class FrameSignature:
    frame: int
    entries: tuple[tuple[EntityType, object], ...]


@dataclass(frozen=True)
class MatchResult:
    frame: int
    bindings: dict
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of [0,1]: {self.score}")

    def binding_key(self) -> tuple:
        return tuple(sorted(self.bindings.items()))


def frame_signature(store: FactStore, frame: int) -> FrameSignature:
    """Sorted (type, id) listing of the frame's dynamic entities."""
    if frame > store.high_water:
        raise FrameNotProcessedError(f"frame {frame} not yet processed")
    entries = sorted(
        ((store.frame_facts(e, frame).type, e) for e in store.entities_in_frame(frame)),
        key=lambda te: (te[0].value, entity_sort_key(te[1])),
    )
    return FrameSignature(frame, tuple(entries))


def _check_threshold(threshold: float) -> None:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"match threshold must be in [0,1], got {threshold}")


class _RelationEvaluator:
    """Answers relation queries either from the cache or by re-entailment."""

    def __init__(self, store: FactStore, mode: str, cfg: SpatialConfig | None):
        if mode not in ("cached", "entail"):
            raise ValueError(f"unknown relation mode: {mode!r}")
        if mode == "cached":
            recorded = store.cached_near_threshold
            if cfg is not None and recorded is not None and cfg.near_threshold != recorded:
                raise StaleThresholdError(
                    f"cached relations were entailed with near_threshold={recorded}, "
                    f"queried with {cfg.near_threshold}"
                )
        self.store = store
        self.mode = mode
        self.cfg = cfg or SpatialConfig()

    def holds(self, relation: str, e1, e2, frame: int) -> bool:
        if self.mode == "cached":
            return next(self.store.query_cached(relation, e1, e2, frame), None) is not None
        return eval_relation(self.store, relation, e1, e2, frame, self.cfg)


def match_frame(
    store: FactStore,
    t: FrameTemplate,
    frame: int,
    threshold: float,
    mode: str = "cached",
    cfg: SpatialConfig | None = None,
    pre_bindings: dict | None = None,
) -> Iterator[MatchResult]:
    """Yield every injective typed binding of the template scoring >= threshold.

    Bindings enumerate in ascending entity-id order per type-list slot.
    `pre_bindings` carries variables grounded by an enclosing evaluation;
    a not-exists variable left unbound is an error.
    """
    _check_threshold(threshold)
    if frame > store.high_water:
        raise FrameNotProcessedError(f"frame {frame} not yet processed")
    pre = pre_bindings or {}
    evaluator = _RelationEvaluator(store, mode, cfg)

    # Hard constraint: not-exists terms must be ground and absent.
    for term in t.not_exists:
        if is_variable(term):
            if term not in pre:
                raise TemplateError(
                    f"template {t.id}: not-exists variable {term!r} is unbound"
                )
            term = pre[term]
        if store.exists(term, frame):
            return

    slots: list[tuple[object, list]] = []
    for etype, term in t.type_list:
        if is_variable(term) and term in pre:
            required = pre[term]
        elif is_variable(term):
            dynamic = store.entities_in_frame(frame, include_static=etype is EntityType.STATIC)
            candidates = [
                e
                for e in dynamic
                if store.exists(e, frame) and store.frame_facts(e, frame).type is etype
            ]
            slots.append((term, candidates))
            continue
        else:
            required = term
        if not store.exists(required, frame):
            return
        if store.frame_facts(required, frame).type is not etype:
            return
        slots.append((term, [required]))

    def assignments(index: int, used: set, binding: dict) -> Iterator[dict]:
        if index == len(slots):
            yield dict(binding)
            return
        term, candidates = slots[index]
        for entity in candidates:
            if entity in used:
                continue
            binding[term] = entity
            used.add(entity)
            yield from assignments(index + 1, used, binding)
            used.discard(entity)
            del binding[term]

    total = len(t.relations)
    for binding in assignments(0, set(), {}):
        resolved = {**pre, **binding}
        if total == 0:
            score = 1.0
        else:
            satisfied = 0
            for rel in t.relations:
                e1 = resolved.get(rel.arg1, rel.arg1) if is_variable(rel.arg1) else rel.arg1
                e2 = resolved.get(rel.arg2, rel.arg2) if is_variable(rel.arg2) else rel.arg2
                if evaluator.holds(normalize_relation(rel.relation), e1, e2, frame):
                    satisfied += 1
            score = satisfied / total
        if score >= threshold:
            variables = {k: v for k, v in binding.items() if is_variable(k)}
            yield MatchResult(frame, variables, score)


def match(
    store: FactStore,
    t: FrameTemplate,
    threshold: float,
    mode: str = "cached",
    cfg: SpatialConfig | None = None,
    pre_bindings: dict | None = None,
    start_frame: int = 0,
) -> Iterator[MatchResult]:
    """Iterate frames ascending from start_frame to the high-water mark."""
    _check_threshold(threshold)
    for frame in range(start_frame, store.high_water + 1):
        yield from match_frame(store, t, frame, threshold, mode, cfg, pre_bindings)


def iset_match(
    store: FactStore,
    t: FrameTemplate,
    threshold: float,
    mode: str = "cached",
    cfg: SpatialConfig | None = None,
    pre_bindings: dict | None = None,
) -> IntervalSet:
    """Canonical interval set of all frames with at least one match."""
    return make_iset(r.frame for r in match(store, t, threshold, mode, cfg, pre_bindings))


def iset_match_bindings(
    store: FactStore,
    t: FrameTemplate,
    threshold: float,
    mode: str = "cached",
    cfg: SpatialConfig | None = None,
    pre_bindings: dict | None = None,
) -> Iterator[tuple[dict, IntervalSet]]:
    """Group matching frames by exact binding, yielding one interval set each.

    Bindings are yielded in first-match order.
    """
    groups: dict[tuple, tuple[dict, list[int]]] = {}
    for result in match(store, t, threshold, mode, cfg, pre_bindings):
        key = result.binding_key()
        if key not in groups:
            groups[key] = (result.bindings, [])
        groups[key][1].append(result.frame)
    for bindings, frames in groups.values():
        yield bindings, make_iset(frames)


# --- serialization ----------------------------------------------------------


def _render_term(term) -> str:
    return str(term)


def _parse_term(text: str):
    text = text.strip()
    if not text:
        raise TemplateError("empty term")
    try:
        return int(text)
    except ValueError:
        return text


def serialize_frame_template(t: FrameTemplate, threshold: float | None = None) -> str:
    """Textual form mirroring the engine's query syntax, `_kb` markers included."""
    lines = [f"id: {t.id}"]
    lines.append(
        "types: " + ", ".join(f"{etype.value}:{_render_term(term)}" for etype, term in t.type_list)
    )
    rels = []
    for rel in t.relations:
        name = normalize_relation(rel.relation)
        negated = name.startswith("not_")
        base = name[4:] if negated else name
        shown = f"not_{base}_kb" if negated else f"{base}_kb"
        rels.append(f"{shown}({_render_term(rel.arg1)},{_render_term(rel.arg2)})")
    lines.append("relations: " + ", ".join(rels))
    lines.append("not_exists: " + ", ".join(_render_term(x) for x in t.not_exists))
    if threshold is not None:
        lines.append(f"threshold: {threshold}")
    return "\n".join(lines) + "\n"


def parse_frame_template(text: str) -> tuple[FrameTemplate, float | None]:
    """Parse the textual template format; returns (template, threshold-or-None)."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise TemplateError(f"line {lineno}: expected `field: value`")
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    if "id" not in fields or "types" not in fields:
        raise TemplateError("template document needs `id` and `types` fields")
    type_list = []
    for part in filter(None, (p.strip() for p in fields["types"].split(","))):
        if ":" not in part:
            raise TemplateError(f"bad type entry: {part!r}")
        type_name, _, term = part.partition(":")
        type_list.append((EntityType(type_name.strip()), _parse_term(term)))
    relations = []
    rel_text = fields.get("relations", "")
    for part in filter(None, (p.strip() for p in _split_relations(rel_text))):
        if "(" not in part or not part.endswith(")"):
            raise TemplateError(f"bad relation entry: {part!r}")
        name, _, args = part[:-1].partition("(")
        arg_parts = [a.strip() for a in args.split(",")]
        if len(arg_parts) != 2:
            raise TemplateError(f"relation {name!r} needs exactly two arguments")
        relations.append(
            RelationTerm(normalize_relation(name.strip()), *(_parse_term(a) for a in arg_parts))
        )
    not_exists = tuple(
        _parse_term(p) for p in filter(None, (p.strip() for p in fields.get("not_exists", "").split(",")))
    )
    threshold = float(fields["threshold"]) if "threshold" in fields else None
    if threshold is not None:
        _check_threshold(threshold)
    template = FrameTemplate(
        id=fields["id"],
        type_list=tuple(type_list),
        relations=tuple(relations),
        not_exists=not_exists,
    )
    return template, threshold


def _split_relations(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts
