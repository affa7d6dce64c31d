"""
Transforms that rebuild an arrangement: hole contraction, saturation
of a perfect partition to a grid, rectangular partition of rectilinear
regions and absorption of holes into toppings.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Set, Tuple, Union

from django.db import models

from analysis.services.bounds import (
    check_bound,
    meeting_counts,
    partition_of,
    require_perfect_partition,
)
from analysis.services.expansion import is_maximal
from analysis.services.holes import Hole, Orientation, extract_holes, hole_windmill
from arrangements.exceptions import (
    ArrangementError,
    ContractionError,
    NotMaximalError,
    UnsupportedCakeError,
)
from arrangements.models import Arrangement, BoundName, CakeKind, PartitionReport, validate
from arrangements.services.geometry import Point, Rect, RectilinearPolygon
from arrangements.services.grid import (
    FREE,
    Cell,
    CompressedGrid,
    UnionFind,
    cell_owner_grid,
    free_components,
    trace_region,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContractionFrame:
    """Coordinates of one contraction.

    For a counter-clockwise windmill the frame is given in the mirrored
    coordinates x -> (cake.x0 + cake.x1) - x, where the windmill turns
    clockwise.
    """

    x0: Fraction
    x1: Fraction
    x2: Fraction
    y0: Fraction
    y1: Fraction
    y2: Fraction
    orientation: str

    def vertical(self, y: Fraction) -> Fraction:
        if self.y0 <= y <= self.y2:
            return self.y0 + (self.y1 - self.y0) / (self.y2 - self.y0) * (y - self.y0)
        return y

    def horizontal(self, x: Fraction) -> Fraction:
        if self.x0 <= x <= self.x2:
            return self.x0 + (self.x1 - self.x0) / (self.x2 - self.x0) * (x - self.x0)
        return x


def _mirror(rect: Rect, axis: Fraction) -> Rect:
    return Rect.from_bounds(axis - rect.x1, rect.y0, axis - rect.x0, rect.y1)


def _lower_left(hole: Hole) -> Tuple[Fraction, Fraction]:
    box = hole.region.bounding_box()
    return box.x0, box.y0


def _windmill_in_frame(arrangement: Arrangement, hole: Hole):
    """Toppings in clockwise coordinates, the hole rectangle and the windmill roles."""
    if arrangement.cake.kind != CakeKind.RECTANGLE:
        raise UnsupportedCakeError("hole contraction needs a rectangle cake")
    windmill = hole_windmill(arrangement, hole)
    toppings = list(arrangement.toppings)
    hole_rect = hole.rect
    left, right = windmill.left, windmill.right
    axis = None
    if windmill.orientation == Orientation.COUNTERCLOCKWISE:
        cake = arrangement.cake.shape
        axis = cake.x0 + cake.x1
        toppings = [_mirror(t, axis) for t in toppings]
        hole_rect = _mirror(hole_rect, axis)
        left, right = right, left
    return toppings, hole_rect, windmill, left, right, axis


def hole_frame(arrangement: Arrangement, hole: Hole) -> ContractionFrame:
    toppings, hole_rect, windmill, left, _, _ = _windmill_in_frame(arrangement, hole)
    return ContractionFrame(
        x0=toppings[left].x0,
        x1=hole_rect.x0,
        x2=hole_rect.x1,
        y0=toppings[windmill.bottom].y0,
        y1=hole_rect.y0,
        y2=hole_rect.y1,
        orientation=windmill.orientation,
    )


def _map_rect(rect: Rect, fx: Callable, fy: Callable) -> Rect:
    return Rect.from_bounds(fx(rect.x0), fy(rect.y0), fx(rect.x1), fy(rect.y1))


def _identity(value):
    return value


def contract_hole(arrangement: Arrangement, hole: Optional[Hole] = None) -> Arrangement:
    """Shrink one rectangular inner hole to a single 4-vertex.

    Without an explicit hole the one with the lowest-leftmost corner is
    taken. The vertical step squeezes everything right of the hole,
    between the bottom topping's floor and the hole's ceiling, under the
    hole's floor and lets the topping above come down; the horizontal
    step then squeezes everything below the hole's floor, between the
    left topping's side and the hole's right side, left of the hole's
    left side.
    """
    holes = extract_holes(arrangement)
    if not holes:
        raise ContractionError("no contractible hole")
    if hole is None:
        hole = min(holes, key=_lower_left)
    frame = hole_frame(arrangement, hole)
    toppings, _, windmill, _, _, axis = _windmill_in_frame(arrangement, hole)

    moved = []
    for index, rect in enumerate(toppings):
        if index == windmill.top:
            rect = Rect.from_bounds(rect.x0, frame.y1, rect.x1, rect.y1)
        elif rect.x0 >= frame.x2:
            rect = _map_rect(rect, _identity, frame.vertical)
        moved.append(rect)
    moved = [
        _map_rect(rect, frame.horizontal, _identity) if rect.y1 <= frame.y1 else rect
        for rect in moved
    ]
    if axis is not None:
        moved = [_mirror(rect, axis) for rect in moved]

    result = arrangement.with_toppings(moved)
    violations = validate(result)
    if violations:
        raise ContractionError(
            f"contracting hole {hole.region} broke the arrangement: {', '.join(map(str, violations))}"
        )
    remaining = len(extract_holes(result))
    if remaining != len(holes) - 1:
        raise ContractionError(
            f"contracting hole {hole.region} left {remaining} holes, expected {len(holes) - 1}"
        )
    logger.debug("contracted %s hole %s, %d holes left", frame.orientation, hole.region, remaining)
    return result


def contract_all(arrangement: Arrangement) -> Tuple[Arrangement, int]:
    """Contract holes in lower-left order until a perfect partition remains."""
    if arrangement.cake.kind != CakeKind.RECTANGLE:
        raise UnsupportedCakeError("hole contraction needs a rectangle cake")
    verdict = is_maximal(arrangement)
    if not verdict:
        index, larger = verdict.counterexample
        raise NotMaximalError(index, larger, verdict.direction)
    contracted = 0
    while extract_holes(arrangement):
        arrangement = contract_hole(arrangement)
        contracted += 1
    return arrangement, contracted


class SplitCase(models.TextChoices):
    BOUNDARY = 'a', 'Segment ends on the cake boundary'
    FRESH = 'b', 'Segment ends inside a side, creating a 3-vertex'
    MERGE = 'c', 'Segment ends at an existing 3-vertex'


@dataclass(frozen=True)
class GridSummary:
    k1: int
    k2: int
    t: int
    added_segments: Tuple[Tuple[Point, Point], ...] = ()
    cases: Tuple[str, ...] = ()
    rects: Tuple[Rect, ...] = ()

    @property
    def m(self) -> int:
        return self.k1 * self.k2 - self.t


def _side_owner(rects: Sequence[Rect], v: Point) -> int:
    """The rectangle that has ``v`` inside one of its sides, not at a corner."""
    for index, r in enumerate(rects):
        on_horizontal = v.y in (r.y0, r.y1) and r.x0 < v.x < r.x1
        on_vertical = v.x in (r.x0, r.x1) and r.y0 < v.y < r.y1
        if on_horizontal or on_vertical:
            return index
    raise ArrangementError(f"no rectangle has {v} inside a side")


def _four_vertices(counts) -> int:
    return sum(1 for c in counts.values() if c == 4)


def saturate_to_grid(partition) -> GridSummary:
    """Split rectangles at 3-vertices until the partition is a full grid.

    ``partition`` is a rectangle-cake arrangement covering its cake, or a
    ``(cake, rects)`` pair. 3-vertices are handled lowest point first.
    """
    cake, rects = partition_of(partition)
    require_perfect_partition(cake, rects)
    rects = list(rects)
    counts = meeting_counts(cake, rects)
    segments, cases = [], []
    while True:
        threes = sorted(p for p, c in counts.items() if c == 3)
        if not threes:
            break
        v = threes[0]
        index = _side_owner(rects, v)
        r = rects[index]
        if v.y in (r.y0, r.y1):
            halves = (Rect.from_bounds(r.x0, r.y0, v.x, r.y1), Rect.from_bounds(v.x, r.y0, r.x1, r.y1))
            w = Point(v.x, r.y1 if v.y == r.y0 else r.y0)
        else:
            halves = (Rect.from_bounds(r.x0, r.y0, r.x1, v.y), Rect.from_bounds(r.x0, v.y, r.x1, r.y1))
            w = Point(r.x1 if v.x == r.x0 else r.x0, v.y)
        if not (cake.x0 < w.x < cake.x1 and cake.y0 < w.y < cake.y1):
            case = SplitCase.BOUNDARY
        elif counts.get(w) == 3:
            case = SplitCase.MERGE
        else:
            case = SplitCase.FRESH
        rects[index:index + 1] = halves
        before = _four_vertices(counts)
        counts = meeting_counts(cake, rects)
        gained = _four_vertices(counts) - before
        if gained < 1:
            raise ArrangementError(f"splitting at {v} gained {gained} 4-vertices")
        logger.debug("split %s at %s towards %s (case %s, +%d 4-vertices)", r, v, w, case, gained)
        segments.append((v, w))
        cases.append(case)
    k1 = len({x for r in rects for x in (r.x0, r.x1)}) - 1
    k2 = len({y for r in rects for y in (r.y0, r.y1)}) - 1
    if len(rects) != k1 * k2 or _four_vertices(counts) != (k1 - 1) * (k2 - 1):
        raise ArrangementError(f"saturation ended with {len(rects)} rectangles, not a {k1}x{k2} grid")
    return GridSummary(k1, k2, len(segments), tuple(segments), tuple(cases), tuple(rects))


def _horizontal_partition(grid: CompressedGrid, inside: Iterable[Cell]) -> List[Rect]:
    """Cut a set of grid cells into rectangles with horizontal chords through reflex corners."""
    inside: Set[Cell] = set(inside)
    blocked: Set[Cell] = set()
    corners = {(i + di, j + dj) for i, j in inside for di in (0, 1) for dj in (0, 1)}
    for i, j in corners:
        quadrants = {(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)}
        missing = quadrants - inside
        if len(missing) != 1:
            continue
        missing_column = next(iter(missing))[0]
        # the chord leaves the corner on the side away from the missing cell
        step = -1 if missing_column == i else 1
        k = i - 1 if step == -1 else i
        while (k, j - 1) in inside and (k, j) in inside:
            blocked.add((k, j))
            k += step
    uf = UnionFind()
    for cell in inside:
        uf.add(cell)
    for i, j in inside:
        if (i + 1, j) in inside:
            uf.union((i, j), (i + 1, j))
        if (i, j + 1) in inside and (i, j + 1) not in blocked:
            uf.union((i, j), (i, j + 1))
    rects = []
    for face in uf.groups():
        lo_i, hi_i = min(c[0] for c in face), max(c[0] for c in face)
        lo_j, hi_j = min(c[1] for c in face), max(c[1] for c in face)
        if len(face) != (hi_i - lo_i + 1) * (hi_j - lo_j + 1):
            raise ArrangementError(f"face at cell {face[0]} is not a rectangle")
        rects.append(Rect.from_bounds(grid.xs[lo_i], grid.ys[lo_j], grid.xs[hi_i + 1], grid.ys[hi_j + 1]))
    rects.sort(key=lambda r: (r.y0, r.x0))
    return rects


def partition_rectilinear(poly: Union[Rect, RectilinearPolygon]) -> List[Rect]:
    """At most reflex_count + 1 rectangles covering ``poly`` exactly."""
    if isinstance(poly, Rect):
        return [poly]
    grid = CompressedGrid.around([poly])
    owner = grid.owners([], poly)
    inside = [(i, j) for i in range(grid.nx) for j in range(grid.ny) if owner[i, j] == FREE]
    rects = _horizontal_partition(grid, inside)
    if len(rects) > poly.reflex_count + 1:
        raise ArrangementError(f"{len(rects)} rectangles for a polygon with {poly.reflex_count} reflex vertices")
    if sum((r.area for r in rects), Fraction(0)) != poly.area:
        raise ArrangementError("rectangle partition does not preserve the area")
    return rects


def _labelled_toppings(arrangement: Arrangement):
    return tuple(zip(arrangement.labels, arrangement.toppings))


def partition_holes(arrangement: Arrangement) -> PartitionReport:
    """Blanks: every hole cut into rectangles; checked against the rectangle bounds."""
    if not arrangement.cake.is_bounded_rectilinear:
        raise UnsupportedCakeError(f"cannot cut holes of a {arrangement.cake.kind} cake into rectangles")
    grid, owner = cell_owner_grid(list(arrangement.toppings), arrangement.cake.region())
    blanks = []
    for cells in free_components(grid, owner):
        blanks.extend(_horizontal_partition(grid, cells))
    blanks.sort(key=lambda r: (r.y0, r.x0))
    T = arrangement.cake.reflex_count
    name = BoundName.THM3 if arrangement.cake.kind == CakeKind.RECTANGLE else BoundName.THM8
    verdict = check_bound(name, arrangement.m, T, len(blanks))
    return PartitionReport(
        pieces=_labelled_toppings(arrangement),
        blanks=tuple(blanks),
        m=arrangement.m,
        T=T,
        bound_name=verdict.bound_name,
        bound_value=verdict.limit,
        observed=verdict.observed,
        satisfied=verdict.satisfied,
        cake=arrangement.cake,
    )


def absorb_holes(arrangement: Arrangement) -> PartitionReport:
    """Unite every hole with the lowest-indexed topping it shares a side with."""
    if not arrangement.cake.is_bounded_rectilinear:
        raise UnsupportedCakeError(f"cannot absorb holes of a {arrangement.cake.kind} cake")
    toppings = list(arrangement.toppings)
    grid, owner = cell_owner_grid(toppings, arrangement.cake.region())
    absorbed = {index: [] for index in range(len(toppings))}
    for cells in free_components(grid, owner):
        neighbours = {int(owner[n]) for c in cells for n in grid.neighbours(c) if owner[n] >= 0}
        if not neighbours:
            raise ArrangementError(f"hole at cell {cells[0]} touches no topping")
        absorbed[min(neighbours)].extend(cells)

    pieces = []
    for index, topping in enumerate(toppings):
        if not absorbed[index]:
            pieces.append((arrangement.labels[index], topping))
            continue
        own = [(i, j) for i in grid.x_span(topping.x0, topping.x1) for j in grid.y_span(topping.y0, topping.y1)]
        region = trace_region(grid, own + absorbed[index])
        pieces.append((arrangement.labels[index], region if region.holes else region.outer))
    covered = sum((piece.area for _, piece in pieces), Fraction(0))
    if covered != arrangement.cake.area:
        raise ArrangementError(f"pieces cover area {covered} of a cake of area {arrangement.cake.area}")
    verdict = check_bound(BoundName.THM1, arrangement.m, 0, 0)
    return PartitionReport(
        pieces=tuple(pieces),
        blanks=(),
        m=arrangement.m,
        T=arrangement.cake.reflex_count,
        bound_name=verdict.bound_name,
        bound_value=verdict.limit,
        observed=verdict.observed,
        satisfied=verdict.satisfied,
        cake=arrangement.cake,
    )
