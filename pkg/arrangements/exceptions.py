class GeometryError(ValueError):
    """Base class for every error raised by the arrangement tools."""


class DegenerateShapeError(GeometryError):
    """A rectangle or polygon without positive area."""


class InvalidPolygonError(GeometryError):
    """A vertex list that is not a valid rectilinear or convex polygon."""


class ArrangementError(GeometryError):
    """An arrangement that breaks its invariants or an operation's precondition."""


class UnsupportedCakeError(ArrangementError):
    """The operation does not handle this cake variant."""


class DecodeError(GeometryError):
    """Malformed interchange file; remembers where parsing stopped."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NotMaximalError(ArrangementError):
    """Raised when an operation needs a maximal arrangement and gets another one."""

    def __init__(self, index, larger, direction=None):
        self.index = index
        self.larger = larger
        self.direction = direction
        detail = f" towards {direction}" if direction else ""
        super().__init__(f"topping {index} can expand{detail} to {larger}")


class ContractionError(ArrangementError):
    """A hole that cannot be contracted to a 4-vertex."""


class BoundDomainError(GeometryError):
    """Arguments outside the domain where a bound is stated."""
