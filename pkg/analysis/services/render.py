"""
SVG figures of arrangements and reports.

Toppings and pieces are gray with their labels, blanks are hatched, the
cake outline is black and reflex cake vertices are circled. Coordinates
are exact rationals scaled onto a lattice that fits the requested width
and written as exact decimals, so equal inputs give byte-identical files.
"""

import logging
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from django.conf import settings

from analysis.services.holes import convex_holes
from arrangements.models import Arrangement, Cake, CakeKind, PartitionReport
from arrangements.services.geometry import ConvexPolygon, Point, Rect, RectilinearRegion
from arrangements.services.grid import cell_owner_grid, free_components, trace_region

logger = logging.getLogger(__name__)

MARGIN = 12
LABEL_SIZE = 11

_HEADER = (
    '<defs><pattern id="hatch" patternUnits="userSpaceOnUse" width="6" height="6">'
    '<path d="M0,6 L6,0" stroke="#333" stroke-width="0.8"/></pattern></defs>'
)


def _decimal(value: Fraction) -> str:
    """Exact decimal form of a value whose denominator divides a power of ten."""
    rest = value.denominator
    for prime in (2, 5):
        while rest % prime == 0:
            rest //= prime
    if rest != 1:
        raise ValueError(f"{value} has no finite decimal expansion")
    digits = 0
    while (value * 10 ** digits).denominator != 1:
        digits += 1
    scaled = int(value * 10 ** digits)
    if not digits:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    whole, part = divmod(abs(scaled), 10 ** digits)
    return f"{sign}{whole}.{part:0{digits}d}"


def _pixel_scale(box: Rect, width: int, points: Iterable[Point]) -> Fraction:
    """Pixels per cake unit such that every point lands on a finite decimal.

    The common denominator of the coordinates is a lattice the drawing
    snaps to; each lattice step gets a whole number of pixels when the
    width allows it and a power-of-ten fraction of a pixel otherwise.
    """
    denominator = 1
    for p in (box.lo, box.hi, *points):
        denominator = lcm(denominator, p.x.denominator, p.y.denominator)
    steps = max(box.width, box.height) * denominator
    available = width - 2 * MARGIN
    if available <= 0:
        raise ValueError(f"width {width} leaves no room inside the margins")
    digits = 0
    while available * 10 ** digits < steps:
        digits += 1
    per_step = Fraction(int(available * 10 ** digits / steps), 10 ** digits)
    return per_step * denominator


class _Canvas:
    """Maps cake coordinates to SVG pixels, y pointing down."""

    def __init__(self, box: Rect, width: int, points: Iterable[Point] = ()):
        self.box = box
        self.scale = _pixel_scale(box, width, points)
        self.width = width
        self.height = int(box.height * self.scale) + 2 * MARGIN + 1
        self.out: List[str] = []

    def xy(self, p: Point) -> Tuple[str, str]:
        x = (p.x - self.box.x0) * self.scale + MARGIN
        y = (self.box.y1 - p.y) * self.scale + MARGIN
        return _decimal(x), _decimal(y)

    def path(self, loops: Sequence[Sequence[Point]]) -> str:
        parts = []
        for loop in loops:
            coords = [",".join(self.xy(p)) for p in loop]
            parts.append("M" + " L".join(coords) + " Z")
        return " ".join(parts)

    def shape(self, loops, css: str, fill: str, stroke: str = "#000", width: str = "1"):
        self.out.append(
            f'<path class="{css}" d="{self.path(loops)}" fill="{fill}" fill-rule="evenodd" '
            f'stroke="{stroke}" stroke-width="{width}"/>'
        )

    def label(self, at: Point, text: str):
        x, y = self.xy(at)
        self.out.append(
            f'<text x="{x}" y="{y}" font-family="sans-serif" font-size="{LABEL_SIZE}" '
            f'text-anchor="middle" dominant-baseline="middle">{text}</text>'
        )

    def circle(self, at: Point, css: str):
        x, y = self.xy(at)
        self.out.append(f'<circle class="{css}" cx="{x}" cy="{y}" r="5" fill="none" stroke="#c00" stroke-width="1.5"/>')

    def document(self) -> bytes:
        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            _HEADER,
            *self.out,
            "</svg>",
        ]
        return ("\n".join(lines) + "\n").encode("utf-8")


def _loops(shape) -> List[Tuple[Point, ...]]:
    if isinstance(shape, Rect):
        return [shape.corners()]
    if isinstance(shape, RectilinearRegion):
        return [shape.outer.vertices, *(h.vertices for h in shape.holes)]
    return [shape.vertices]


def _label_point(shape) -> Point:
    if isinstance(shape, ConvexPolygon):
        n = len(shape.vertices)
        return Point(sum(p.x for p in shape.vertices) / n, sum(p.y for p in shape.vertices) / n)
    if isinstance(shape, Rect):
        box = shape
    else:
        box = shape.bounding_box()
    return Point((box.x0 + box.x1) / 2, (box.y0 + box.y1) / 2)


def _bounds(cake: Optional[Cake], shapes) -> Rect:
    if cake is not None and cake.kind == CakeKind.CONVEX:
        return cake.shape.bounding_box()
    if cake is not None and cake.kind != CakeKind.PLANE:
        return cake.bounding_box()
    points = [p for s in shapes for loop in _loops(s) for p in loop]
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return Rect.from_bounds(min(xs) - 1, min(ys) - 1, max(xs) + 1, max(ys) + 1)


def _arrangement_blanks(arrangement: Arrangement) -> list:
    cake = arrangement.cake
    if cake.is_bounded_rectilinear:
        grid, owner = cell_owner_grid(list(arrangement.toppings), cake.region())
        return [trace_region(grid, cells) for cells in free_components(grid, owner)]
    if cake.kind == CakeKind.CONVEX:
        blanks = []
        for hole in convex_holes(arrangement.toppings, cake.shape):
            if hole.convex:
                blanks.append(hole.outline)
            else:
                blanks.extend(ConvexPolygon(t) for t in _distinct(hole.trapezoids))
        return blanks
    return []


def _distinct(trapezoids):
    for corners in trapezoids:
        unique = tuple(dict.fromkeys(corners))
        if len(unique) >= 3:
            yield unique


def render_svg(obj: Union[Arrangement, PartitionReport], width: Optional[int] = None) -> bytes:
    """SVG bytes for an arrangement (holes hatched) or a report (blanks hatched)."""
    width = width or settings.BLANKS_SVG_WIDTH
    if isinstance(obj, Arrangement):
        cake = obj.cake
        pieces = list(zip(obj.labels, obj.toppings))
        blanks = _arrangement_blanks(obj)
    else:
        cake = obj.cake
        pieces = list(obj.pieces)
        blanks = list(obj.blanks)
    outline = ()
    if cake is not None and cake.kind != CakeKind.PLANE:
        outline = cake.shape.vertices if cake.kind == CakeKind.CONVEX else cake.polygon().vertices
    points = [*outline, *(_label_point(s) for _, s in pieces)]
    points += [p for shape in [*(s for _, s in pieces), *blanks] for loop in _loops(shape) for p in loop]
    canvas = _Canvas(_bounds(cake, [s for _, s in pieces]), width, points)
    if outline:
        canvas.shape([outline], "cake", "#fff", width="2")
    for _, shape in pieces:
        canvas.shape(_loops(shape), "topping", "#bbb")
    for blank in blanks:
        canvas.shape(_loops(blank), "blank", "url(#hatch)", stroke="#333", width="0.5")
    for label, shape in pieces:
        canvas.label(_label_point(shape), label)
    if cake is not None and cake.kind == CakeKind.RECTILINEAR:
        for vertex in cake.shape.reflex_vertices():
            canvas.circle(vertex, "reflex")
    logger.debug("rendered %d pieces and %d blanks at width %d", len(pieces), len(blanks), width)
    return canvas.document()
