"""Exception types shared across the engine."""


class VersaError(Exception):
    """Base class for engine errors."""


class UnknownEntityError(VersaError, KeyError):
    """An entity does not exist in the requested frame."""


class UnknownRelationNameError(VersaError, ValueError):
    """A relation name is not part of the spatial vocabulary."""


class DuplicateFactError(VersaError, ValueError):
    """A basic fact for this (entity, frame) was already asserted."""


class FrameNotProcessedError(VersaError, LookupError):
    """A cached-relation query targeted a frame above the high-water mark."""


class StaleThresholdError(VersaError, ValueError):
    """Cached near facts were entailed under a different threshold."""


class HighWaterRegressionError(VersaError, ValueError):
    """Attempted to move the high-water mark backwards."""


class TemplateError(VersaError, ValueError):
    """A frame or event template violates its invariants."""
