"""Axis-aligned 2D geometry over points and rectangles in the image plane.

Image coordinate convention: origin top-left, y grows downward, so "higher"
means a smaller center y. All containment and range predicates are closed
(inclusive of edges).
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite: ({self.x}, {self.y})")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle as min/max extents (min_x <= max_x, min_y <= max_y)."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self) -> None:
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError(f"degenerate rect extents: {self}")

    @property
    def center(self) -> Point:
        return Point((self.min_x + self.max_x) / 2, (self.min_y + self.max_y) / 2)

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y


@dataclass(frozen=True)
class BoxSpec:
    """Center-plus-size box description, as carried by annotation streams."""

    center: Point
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width < 0 or self.height < 0:
            raise ValueError(f"box size must be non-negative: {self.width}x{self.height}")


def rect_from_box(box: BoxSpec) -> Rect:
    """Convert a center/size box to min/max extents (center +/- size/2)."""
    return Rect(
        box.center.x - box.width / 2,
        box.center.y - box.height / 2,
        box.center.x + box.width / 2,
        box.center.y + box.height / 2,
    )


def box_from_rect(rect: Rect) -> BoxSpec:
    """Inverse of rect_from_box."""
    return BoxSpec(rect.center, rect.width, rect.height)


def dist(p1: Point, p2: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p1.x - p2.x, p1.y - p2.y)


def pt_inside(p: Point, r: Rect) -> bool:
    """Point inside or on the bounds of the rectangle."""
    return r.min_x <= p.x <= r.max_x and r.min_y <= p.y <= r.max_y


def rect_inside(a: Rect, b: Rect) -> bool:
    """a entirely inside b, equal bounds allowed."""
    return (
        b.min_x <= a.min_x
        and a.max_x <= b.max_x
        and b.min_y <= a.min_y
        and a.max_y <= b.max_y
    )


def overlaps(a: Rect, b: Rect) -> bool:
    """Closed rectangles share at least one point (shared edge/corner counts)."""
    return in_x_range(a, b) and in_y_range(a, b)


def rect_higher(a: Rect, b: Rect) -> bool:
    """a's center is higher on the image (smaller y) than b's."""
    return a.center.y < b.center.y


def rect_lower(a: Rect, b: Rect) -> bool:
    return b.center.y < a.center.y


def rect_left(a: Rect, b: Rect) -> bool:
    """a's center is left (smaller x) of b's."""
    return a.center.x < b.center.x


def rect_right(a: Rect, b: Rect) -> bool:
    return b.center.x < a.center.x


def in_x_range(a: Point | Rect, b: Rect) -> bool:
    """Point form: b.min_x <= a.x <= b.max_x. Rect form: x-projections intersect."""
    if isinstance(a, Point):
        return b.min_x <= a.x <= b.max_x
    return a.min_x <= b.max_x and b.min_x <= a.max_x


def in_y_range(a: Point | Rect, b: Rect) -> bool:
    """Point form: b.min_y <= a.y <= b.max_y. Rect form: y-projections intersect."""
    if isinstance(a, Point):
        return b.min_y <= a.y <= b.max_y
    return a.min_y <= b.max_y and b.min_y <= a.max_y
