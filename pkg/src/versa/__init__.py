"""Event recognition over annotated surveillance video streams."""

from .geometry import BoxSpec, Point, Rect, rect_from_box
from .intervals import IntervalSet, close_iset, iset_tsl, make_iset
from .kb import EntityFrameFacts, EntityType, FactStore
from .spatial import SpatialConfig, entail_frame, eval_relation
from .temporal import TimeRef, interval_relation
from .templates import FrameTemplate, iset_match, iset_match_bindings, match, match_frame

__all__ = [
    "BoxSpec",
    "EntityFrameFacts",
    "EntityType",
    "FactStore",
    "FrameTemplate",
    "IntervalSet",
    "Point",
    "Rect",
    "SpatialConfig",
    "TimeRef",
    "close_iset",
    "entail_frame",
    "eval_relation",
    "interval_relation",
    "iset_match",
    "iset_match_bindings",
    "iset_tsl",
    "make_iset",
    "match",
    "match_frame",
    "rect_from_box",
]
