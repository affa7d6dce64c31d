"""
Exact geometry primitives.

Every coordinate is a ``Fraction``; no predicate in this package ever
touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

from arrangements.exceptions import DegenerateShapeError, InvalidPolygonError

Rational = Fraction
Number = Union[int, Fraction, str]


def to_rational(value: Number) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a canonical Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact coordinate {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    text = str(value).strip()
    num, sep, den = text.partition("/")
    try:
        numerator = int(num)
        denominator = int(den) if sep else 1
    except ValueError as exc:
        raise ValueError(f"invalid rational {text!r}") from exc
    if denominator == 0:
        raise ValueError(f"invalid rational {text!r}: zero denominator")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", to_rational(self.x))
        object.__setattr__(self, "y", to_rational(self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """Orientation of the turn o -> a -> b: positive for counter-clockwise."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        cross(a, b, p) == 0
        and min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True iff the closed segments ab and cd share at least one point."""
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return (
        on_segment(a, c, d)
        or on_segment(b, c, d)
        or on_segment(c, a, b)
        or on_segment(d, a, b)
    )


@dataclass(frozen=True, order=True)
class Rect:
    """Axis-parallel rectangle with positive area."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if not (self.lo.x < self.hi.x and self.lo.y < self.hi.y):
            raise DegenerateShapeError(f"degenerate rectangle {self.lo} -> {self.hi}")

    @classmethod
    def from_bounds(cls, x0: Number, y0: Number, x1: Number, y1: Number) -> "Rect":
        return cls(Point(x0, y0), Point(x1, y1))

    @property
    def x0(self) -> Fraction:
        return self.lo.x

    @property
    def y0(self) -> Fraction:
        return self.lo.y

    @property
    def x1(self) -> Fraction:
        return self.hi.x

    @property
    def y1(self) -> Fraction:
        return self.hi.y

    @property
    def bounds(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.lo.x, self.lo.y, self.hi.x, self.hi.y)

    @property
    def width(self) -> Fraction:
        return self.hi.x - self.lo.x

    @property
    def height(self) -> Fraction:
        return self.hi.y - self.lo.y

    @property
    def area(self) -> Fraction:
        return self.width * self.height

    def corners(self) -> Tuple[Point, Point, Point, Point]:
        """Counter-clockwise from the lower-left corner."""
        return (
            self.lo,
            Point(self.hi.x, self.lo.y),
            self.hi,
            Point(self.lo.x, self.hi.y),
        )

    def contains_point(self, p: Point) -> bool:
        return self.lo.x <= p.x <= self.hi.x and self.lo.y <= p.y <= self.hi.y

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.lo.x <= other.lo.x
            and self.lo.y <= other.lo.y
            and other.hi.x <= self.hi.x
            and other.hi.y <= self.hi.y
        )

    def translate(self, dx: Number, dy: Number) -> "Rect":
        dx, dy = to_rational(dx), to_rational(dy)
        return Rect.from_bounds(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def to_polygon(self) -> "RectilinearPolygon":
        return RectilinearPolygon(self.corners())

    def __repr__(self):
        return "[{},{}]->[{},{}]".format(*(format_rational(v) for v in self.bounds))


def interior_disjoint(a: Rect, b: Rect) -> bool:
    """Open interiors do not meet; shared edges and corners are allowed."""
    return a.x1 <= b.x0 or b.x1 <= a.x0 or a.y1 <= b.y0 or b.y1 <= a.y0


def _signed_area(points: Tuple[Point, ...]) -> Fraction:
    total = Fraction(0)
    for i, p in enumerate(points):
        q = points[(i + 1) % len(points)]
        total += p.x * q.y - q.x * p.y
    return total / 2


def _canonical_cycle(points: Iterable[Point]) -> Tuple[Point, ...]:
    pts = []
    for p in points:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    # drop vertices lying on a straight run
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            prev, cur, nxt = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if cross(prev, cur, nxt) == 0:
                del pts[i]
                changed = True
                break
    if len(pts) >= 3 and _signed_area(tuple(pts)) < 0:
        pts.reverse()
    if pts:
        start = min(range(len(pts)), key=lambda i: (pts[i].y, pts[i].x))
        pts = pts[start:] + pts[:start]
    return tuple(pts)


@dataclass(frozen=True)
class RectilinearPolygon:
    """Simple, simply-connected axis-parallel polygon.

    Vertices are stored counter-clockwise starting from the lowest
    (then leftmost) vertex, without collinear runs.
    """

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        pts = _canonical_cycle(self.vertices)
        object.__setattr__(self, "vertices", pts)
        if len(pts) < 4:
            raise DegenerateShapeError("rectilinear polygon needs at least 4 vertices")
        for a, b in self.edges():
            if a.x != b.x and a.y != b.y:
                raise InvalidPolygonError(f"edge {a} -> {b} is not axis-parallel")
        edges = self.edges()
        n = len(edges)
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if segments_intersect(*edges[i], *edges[j]):
                    raise InvalidPolygonError("rectilinear polygon is not simple")

    @classmethod
    def from_coords(cls, coords: Iterable[Tuple[Number, Number]]) -> "RectilinearPolygon":
        return cls(tuple(Point(x, y) for x, y in coords))

    def edges(self) -> Tuple[Tuple[Point, Point], ...]:
        pts = self.vertices
        return tuple((pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))

    @property
    def area(self) -> Fraction:
        return _signed_area(self.vertices)

    def is_reflex(self, index: int) -> bool:
        pts = self.vertices
        return cross(pts[index - 1], pts[index], pts[(index + 1) % len(pts)]) < 0

    def reflex_vertices(self) -> list:
        return [p for i, p in enumerate(self.vertices) if self.is_reflex(i)]

    @property
    def reflex_count(self) -> int:
        return len(self.reflex_vertices())

    def bounding_box(self) -> Rect:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return Rect.from_bounds(min(xs), min(ys), max(xs), max(ys))

    def is_rectangle(self) -> bool:
        return len(self.vertices) == 4

    def on_boundary(self, p: Point) -> bool:
        return any(on_segment(p, a, b) for a, b in self.edges())

    def contains_point(self, p: Point) -> bool:
        """Closed containment (boundary counts as inside)."""
        if self.on_boundary(p):
            return True
        inside = False
        for a, b in self.edges():
            if a.x != b.x:
                continue
            lo, hi = min(a.y, b.y), max(a.y, b.y)
            if a.x > p.x and lo <= p.y < hi:
                inside = not inside
        return inside

    def __repr__(self):
        return "Poly" + repr(list(self.vertices))


@dataclass(frozen=True)
class RectilinearRegion:
    """A rectilinear polygon with rectilinear holes cut out of it."""

    outer: RectilinearPolygon
    holes: Tuple[RectilinearPolygon, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(sorted(self.holes, key=lambda h: (h.vertices[0].y, h.vertices[0].x))))
        for hole in self.holes:
            if not all(self.outer.contains_point(p) for p in hole.vertices):
                raise InvalidPolygonError(f"hole {hole} is not inside {self.outer}")

    @property
    def vertices(self) -> Tuple[Point, ...]:
        return self.outer.vertices

    @property
    def area(self) -> Fraction:
        return self.outer.area - sum((h.area for h in self.holes), Fraction(0))

    def bounding_box(self) -> Rect:
        return self.outer.bounding_box()

    def contains_point(self, p: Point) -> bool:
        if not self.outer.contains_point(p):
            return False
        return not any(h.contains_point(p) and not h.on_boundary(p) for h in self.holes)

    def __repr__(self):
        return f"Region({self.outer!r} - {list(self.holes)!r})"


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices counter-clockwise."""

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        pts = list(self.vertices)
        if len(pts) >= 3 and _signed_area(tuple(pts)) < 0:
            pts.reverse()
        pts = tuple(pts)
        object.__setattr__(self, "vertices", pts)
        if len(pts) < 3:
            raise DegenerateShapeError("convex polygon needs at least 3 vertices")
        for i in range(len(pts)):
            if cross(pts[i - 1], pts[i], pts[(i + 1) % len(pts)]) <= 0:
                raise InvalidPolygonError(f"vertex {pts[i]} is not a strictly convex turn")

    @classmethod
    def from_coords(cls, coords: Iterable[Tuple[Number, Number]]) -> "ConvexPolygon":
        return cls(tuple(Point(x, y) for x, y in coords))

    def edges(self) -> Tuple[Tuple[Point, Point], ...]:
        pts = self.vertices
        return tuple((pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))

    @property
    def area(self) -> Fraction:
        return _signed_area(self.vertices)

    def bounding_box(self) -> Rect:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return Rect.from_bounds(min(xs), min(ys), max(xs), max(ys))

    def contains_point(self, p: Point, strict: bool = False) -> bool:
        for a, b in self.edges():
            turn = cross(a, b, p)
            if turn < 0 or (strict and turn == 0):
                return False
        return True

    def boundaries_meet(self, other: "ConvexPolygon") -> bool:
        return any(
            segments_intersect(a, b, c, d)
            for a, b in self.edges()
            for c, d in other.edges()
        )

    def interiors_overlap(self, other: "ConvexPolygon") -> bool:
        """Separating-axis test on the edge normals of both polygons."""
        for poly, against in ((self, other), (other, self)):
            for a, b in poly.edges():
                if all(cross(a, b, q) <= 0 for q in against.vertices):
                    return False
        return True

    def __repr__(self):
        return "Convex" + repr(list(self.vertices))


def convex_hull(points: Iterable[Point]) -> Tuple[Point, ...]:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return tuple(pts)
    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


Shape = Union[Rect, RectilinearPolygon]


def contains(outer: Shape, inner: Rect) -> bool:
    """True iff ``inner`` lies in the closure of ``outer``."""
    if isinstance(outer, Rect):
        return outer.contains_rect(inner)
    if not outer.bounding_box().contains_rect(inner):
        return False
    xs = sorted({p.x for p in outer.vertices} | {inner.x0, inner.x1})
    ys = sorted({p.y for p in outer.vertices} | {inner.y0, inner.y1})
    xs = [x for x in xs if inner.x0 <= x <= inner.x1]
    ys = [y for y in ys if inner.y0 <= y <= inner.y1]
    for x_lo, x_hi in zip(xs, xs[1:]):
        for y_lo, y_hi in zip(ys, ys[1:]):
            centre = Point((x_lo + x_hi) / 2, (y_lo + y_hi) / 2)
            if not outer.contains_point(centre):
                return False
    return True
