"""Canonical interval sets over frame numbers, relation search, and smoothing.

An IntervalSet is a sorted list of inclusive integer intervals that are
pairwise disjoint and non-adjacent (consecutive frames always merge). The
textual rendering uses the `a--b` notation.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .temporal import TimeRef, interval_relation


def _sort_key(key):
    """Numeric keys sort ascending before string keys, which sort lexically."""
    if isinstance(key, bool):
        return (1, str(key))
    if isinstance(key, (int, float)):
        return (0, key)
    return (1, str(key))


@dataclass(frozen=True)
class IntervalSet:
    """Canonical set of inclusive frame intervals."""

    intervals: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        prev_end = None
        for a, b in self.intervals:
            if a > b:
                raise ValueError(f"interval {a}--{b} has begin > end")
            if prev_end is not None and a <= prev_end + 1:
                raise ValueError(f"intervals not disjoint/non-adjacent at {a}--{b}")
            prev_end = b

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def members(self) -> Iterator[TimeRef]:
        for a, b in self.intervals:
            yield TimeRef(a, b)

    def coverage(self) -> int:
        """Total number of frames covered."""
        return sum(b - a + 1 for a, b in self.intervals)

    def render(self) -> str:
        """`[a--b, c--d]` notation."""
        return "[" + ", ".join(f"{a}--{b}" for a, b in self.intervals) + "]"

    def __str__(self) -> str:
        return self.render()


def make_iset(frames: Iterable[int]) -> IntervalSet:
    """Build the canonical interval set covering exactly the given frames."""
    uniq = sorted(set(frames))
    if not uniq:
        return IntervalSet()
    runs: list[tuple[int, int]] = []
    start = prev = uniq[0]
    for f in uniq[1:]:
        if f == prev + 1:
            prev = f
            continue
        runs.append((start, prev))
        start = prev = f
    runs.append((start, prev))
    return IntervalSet(tuple(runs))


def expand(iset: IntervalSet) -> list[int]:
    """Sorted list of every frame covered by the set."""
    out: list[int] = []
    for a, b in iset:
        out.extend(range(a, b + 1))
    return out


def find_intervals(
    relation: str, s1: IntervalSet, s2: IntervalSet
) -> Iterator[tuple[TimeRef, TimeRef]]:
    """Yield every member pair (i1 in s1, i2 in s2) satisfying the relation."""
    for i1 in s1.members():
        for i2 in s2.members():
            if interval_relation(relation, i1, i2):
                yield i1, i2


def close_iset(iset: IntervalSet, radius: int = 1) -> IntervalSet:
    """Morphological closing: dilate each interval by `radius`, merge, erode.

    Fills exactly the gaps of length <= 2*radius; never shrinks coverage.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0 or not iset:
        return iset
    dilated: list[list[int]] = []
    for a, b in iset:
        a, b = a - radius, b + radius
        if dilated and a <= dilated[-1][1] + 1:
            dilated[-1][1] = max(dilated[-1][1], b)
        else:
            dilated.append([a, b])
    eroded = tuple((a + radius, b - radius) for a, b in dilated)
    return IntervalSet(eroded)


@dataclass
class TimestampList:
    """Unordered (key, frame) entries; duplicates and any order allowed."""

    entries: list[tuple[object, int]] = field(default_factory=list)


def tsl_sort_group(tsl: TimestampList) -> TimestampList:
    """Entries sorted by key then frame; stable for equal pairs."""
    return TimestampList(sorted(tsl.entries, key=lambda e: (_sort_key(e[0]), e[1])))


def iset_tsl(tsl: TimestampList) -> list[tuple[object, IntervalSet]]:
    """Group entries by key into per-key canonical interval sets, keys ascending."""
    by_key: dict[object, list[int]] = {}
    for key, frame in tsl.entries:
        by_key.setdefault(key, []).append(frame)
    return [(key, make_iset(by_key[key])) for key in sorted(by_key, key=_sort_key)]


def render_iset_tsl(grouped: list[tuple[object, IntervalSet]]) -> str:
    """`[key-[a--b, ...], ...]` notation for grouped timestamp lists."""
    return "[" + ", ".join(f"{key}-{iset.render()}" for key, iset in grouped) + "]"
