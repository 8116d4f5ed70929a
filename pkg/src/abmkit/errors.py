"""Exception types raised by the engine."""


class EngineError(Exception):
    """Base class for all engine-level failures."""


class SpaceMismatchError(EngineError):
    """An operation was applied to the wrong space kind (e.g. a spatial
    neighbor query on a graph model, or an agent whose kind does not match
    the model's space)."""


class StaticModelError(EngineError):
    """Birth or death was requested on a model with a fixed population."""


class ImmutableGraphError(EngineError):
    """Topology mutation was attempted on a static graph."""


class StepError(EngineError):
    """The step rule raised; ``step`` is the 1-based step that failed."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class DataQueryError(EngineError):
    """A data extraction callback failed or referenced unrecorded data."""
