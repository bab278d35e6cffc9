"""Instant and interval relations over discrete frame numbers.

A TimeRef covers both instants (begin == end) and intervals; a proper
interval has begin strictly less than end. Intervals are inclusive of both
endpoint frames: meeting intervals share exactly one frame.
"""
from __future__ import annotations

from dataclasses import dataclass


class UnknownRelationError(ValueError):
    """Raised for a relation name this module does not define."""


@dataclass(frozen=True, order=True)
class TimeRef:
    begin: int
    end: int

    def __post_init__(self) -> None:
        if self.begin > self.end:
            raise ValueError(f"time ref begin must not exceed end: {self.begin}..{self.end}")

    @classmethod
    def instant(cls, frame: int) -> TimeRef:
        return cls(frame, frame)

    @property
    def is_instant(self) -> bool:
        return self.begin == self.end

    @property
    def is_proper(self) -> bool:
        return self.begin < self.end


def classify(t: TimeRef) -> str:
    """One of 'instant', 'interval', 'proper_interval' (every TimeRef is an interval)."""
    if t.begin == t.end:
        return "instant"
    return "proper_interval"


def is_interval(t: TimeRef) -> bool:
    return True


# --- instant-oriented relations ------------------------------------------


def begins(b: TimeRef, t: TimeRef) -> bool:
    return b.is_instant and b.begin == t.begin


def ends(e: TimeRef, t: TimeRef) -> bool:
    return e.is_instant and e.begin == t.end


def before(x: TimeRef, y: TimeRef) -> bool:
    """x ends strictly before y begins (works for instants and intervals)."""
    return x.end < y.begin


def after(x: TimeRef, y: TimeRef) -> bool:
    return before(y, x)


def inside(i: TimeRef, v: TimeRef) -> bool:
    """Instant i strictly between the endpoints of proper interval v."""
    return i.is_instant and v.is_proper and v.begin < i.begin < v.end


def begins_or_in(i: TimeRef, v: TimeRef) -> bool:
    """Instant i at v's begin or strictly inside (end excluded)."""
    return i.is_instant and v.begin <= i.begin < v.end


def time_between(i1: TimeRef, i2: TimeRef, v: TimeRef | None = None) -> TimeRef | bool:
    """Spanning interval between instants i1 < i2; checks v when given."""
    if not (i1.is_instant and i2.is_instant):
        raise ValueError("time_between takes two instants")
    if i1.begin >= i2.begin:
        raise ValueError("time_between requires the first instant strictly earlier")
    span = TimeRef(i1.begin, i2.begin)
    if v is None:
        return span
    return v == span


INSTANT_RELATIONS = {
    "begins": begins,
    "ends": ends,
    "before": before,
    "after": after,
    "inside": inside,
    "begins_or_in": begins_or_in,
}


# --- interval-interval relations ------------------------------------------


def int_equals(a: TimeRef, b: TimeRef) -> bool:
    return a.begin == b.begin and a.end == b.end


def int_before(a: TimeRef, b: TimeRef) -> bool:
    return a.end < b.begin


def int_after(a: TimeRef, b: TimeRef) -> bool:
    return int_before(b, a)


def int_meets(a: TimeRef, b: TimeRef) -> bool:
    return a.end == b.begin


def int_met_by(a: TimeRef, b: TimeRef) -> bool:
    return int_meets(b, a)


def int_overlaps(a: TimeRef, b: TimeRef) -> bool:
    return a.begin < b.begin < a.end < b.end


def int_overlapped_by(a: TimeRef, b: TimeRef) -> bool:
    return int_overlaps(b, a)


def int_starts(a: TimeRef, b: TimeRef) -> bool:
    return a.begin == b.begin and a.end < b.end


def int_started_by(a: TimeRef, b: TimeRef) -> bool:
    return int_starts(b, a)


def int_during(a: TimeRef, b: TimeRef) -> bool:
    return b.begin < a.begin and a.end < b.end


def int_contains(a: TimeRef, b: TimeRef) -> bool:
    return int_during(b, a)


def int_finishes(a: TimeRef, b: TimeRef) -> bool:
    return a.end == b.end and b.begin < a.begin


def int_finished_by(a: TimeRef, b: TimeRef) -> bool:
    return int_finishes(b, a)


def starts_or_during(a: TimeRef, b: TimeRef) -> bool:
    """int_starts or int_during; excludes equality."""
    return int_starts(a, b) or int_during(a, b)


def nonoverlap(a: TimeRef, b: TimeRef) -> bool:
    """No shared frame; meeting intervals do NOT count as non-overlapping."""
    return a.end < b.begin or b.end < a.begin


ALLEN_RELATIONS = (
    "int_equals",
    "int_before",
    "int_after",
    "int_meets",
    "int_met_by",
    "int_overlaps",
    "int_overlapped_by",
    "int_starts",
    "int_started_by",
    "int_during",
    "int_contains",
    "int_finishes",
    "int_finished_by",
)

INTERVAL_RELATIONS = {
    name: fn
    for name, fn in (
        ("int_equals", int_equals),
        ("int_before", int_before),
        ("int_after", int_after),
        ("int_meets", int_meets),
        ("int_met_by", int_met_by),
        ("int_overlaps", int_overlaps),
        ("int_overlapped_by", int_overlapped_by),
        ("int_starts", int_starts),
        ("int_started_by", int_started_by),
        ("int_during", int_during),
        ("int_contains", int_contains),
        ("int_finishes", int_finishes),
        ("int_finished_by", int_finished_by),
        ("starts_or_during", starts_or_during),
        ("nonoverlap", nonoverlap),
    )
}


def interval_relation(name: str, a: TimeRef, b: TimeRef) -> bool:
    """Evaluate a named interval-interval relation."""
    try:
        fn = INTERVAL_RELATIONS[name]
    except KeyError:
        raise UnknownRelationError(f"unknown interval relation: {name!r}") from None
    return fn(a, b)


def instant_relation(name: str, x: TimeRef, y: TimeRef) -> bool:
    """Evaluate a named instant-oriented relation."""
    try:
        fn = INSTANT_RELATIONS[name]
    except KeyError:
        raise UnknownRelationError(f"unknown instant relation: {name!r}") from None
    return fn(x, y)
