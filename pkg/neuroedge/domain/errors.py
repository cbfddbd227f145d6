class NeuroEdgeError(Exception):
    """Base class for every error raised by neuroedge."""


class DimensionMismatch(NeuroEdgeError):
    pass


class SingularSystem(NeuroEdgeError):
    pass


class NotStabilizable(NeuroEdgeError):
    pass


class NoConvergence(NeuroEdgeError):
    pass


class InvalidDimension(NeuroEdgeError):
    pass


class NonFiniteState(NeuroEdgeError):
    pass


class InsideObstacle(NeuroEdgeError):
    """Plant position is on or inside an obstacle surface."""

    def __init__(self, distance: float, t: float) -> None:
        super().__init__(f"collision at t={t:.3f}s, surface distance {distance:.6g} m")
        self.distance = distance
        self.t = t


class MalformedMessage(NeuroEdgeError):
    pass


class LinkClosed(NeuroEdgeError):
    pass


class DegenerateTarget(NeuroEdgeError):
    pass


class InvalidSpikeCount(NeuroEdgeError):
    pass


class ParseError(NeuroEdgeError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class ValidationError(NeuroEdgeError):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("invalid configuration: " + "; ".join(violations))
        self.violations = violations


class IoError(NeuroEdgeError):
    pass
