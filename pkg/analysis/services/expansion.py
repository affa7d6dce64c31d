"""
Area-maximal expansion of rectangular toppings.

The best rectangle around a topping always has its sides on event
coordinates (the cake box or an obstacle side), so candidate left and
right sides come from those events and, for each horizontal span, the
vertical span is pushed out until it meets an obstacle or the box.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from django.db import models

from arrangements.exceptions import ArrangementError, UnsupportedCakeError
from arrangements.models import Arrangement, CakeKind
from arrangements.services.geometry import Point, Rect
from arrangements.services.grid import OUTSIDE, CompressedGrid

logger = logging.getLogger(__name__)


class Direction(models.TextChoices):
    LEFT = 'left', 'Left'
    RIGHT = 'right', 'Right'
    UP = 'up', 'Up'
    DOWN = 'down', 'Down'


class TieBreak(models.TextChoices):
    LEXICOGRAPHIC = 'lex', 'Smallest (lo.x, lo.y, hi.x, hi.y)'
    LEFT = 'left', 'Prefer growing left'
    RIGHT = 'right', 'Prefer growing right'
    UP = 'up', 'Prefer growing up'
    DOWN = 'down', 'Prefer growing down'


_TIE_KEYS = {
    TieBreak.LEXICOGRAPHIC: lambda r: (r.x0, r.y0, r.x1, r.y1),
    TieBreak.LEFT: lambda r: (r.x0, r.y0, r.x1, r.y1),
    TieBreak.RIGHT: lambda r: (-r.x1, r.y0, r.x0, r.y1),
    TieBreak.UP: lambda r: (-r.y1, r.x0, r.y0, r.x1),
    TieBreak.DOWN: lambda r: (r.y0, r.x0, r.y1, r.x1),
}

CAKE_BOUNDARY = "cake_boundary"


@dataclass(frozen=True)
class BlockWitness:
    """Why topping ``topping_index`` cannot grow in ``direction``."""

    topping_index: int
    direction: str
    blocker: Union[str, int]
    contact: Tuple[Point, Point]


def phantom_obstacles(arrangement: Arrangement) -> List[Rect]:
    """Rectangles covering the cake's bounding box outside the cake."""
    cake = arrangement.cake
    if cake.kind == CakeKind.RECTANGLE:
        return []
    polygon = cake.polygon()
    grid = CompressedGrid.around([polygon])
    owner = grid.owners([], polygon)
    phantoms = []
    for i in range(grid.nx):
        j = 0
        while j < grid.ny:
            if owner[i, j] != OUTSIDE:
                j += 1
                continue
            start = j
            while j < grid.ny and owner[i, j] == OUTSIDE:
                j += 1
            phantoms.append(Rect.from_bounds(grid.xs[i], grid.ys[start], grid.xs[i + 1], grid.ys[j]))
    return phantoms


def _require_rectilinear(arrangement: Arrangement):
    if not arrangement.cake.is_bounded_rectilinear:
        raise UnsupportedCakeError(
            f"expansion needs a rectangle or rectilinear cake, not {arrangement.cake.kind}"
        )


def best_rect(
    topping: Rect,
    box: Rect,
    obstacles: Sequence[Rect],
    tie_break: str = TieBreak.LEXICOGRAPHIC,
) -> Rect:
    """Largest rectangle inside ``box`` containing ``topping`` and avoiding ``obstacles``."""
    lefts = sorted({box.x0} | {o.x1 for o in obstacles if o.x1 <= topping.x0})
    rights = sorted({box.x1} | {o.x0 for o in obstacles if o.x0 >= topping.x1})
    key = _TIE_KEYS[TieBreak(tie_break)]
    best: Optional[Rect] = None
    best_area = None
    by_x0 = sorted(obstacles, key=lambda o: o.x0)
    for left in lefts:
        # obstacles enter the horizontal span in x0 order as the right side moves out
        active = [o for o in by_x0 if o.x1 > left]
        bottom, top = box.y0, box.y1
        entered = 0
        for right in rights:
            blocked = False
            while entered < len(active) and active[entered].x0 < right:
                o = active[entered]
                entered += 1
                if o.y1 <= topping.y0:
                    bottom = max(bottom, o.y1)
                elif o.y0 >= topping.y1:
                    top = min(top, o.y0)
                else:
                    blocked = True
                    break
            if blocked:
                break
            candidate = Rect.from_bounds(left, bottom, right, top)
            area = candidate.area
            if best is None or area > best_area or (area == best_area and key(candidate) < key(best)):
                best, best_area = candidate, area
    return best


def max_expansion(
    arrangement: Arrangement,
    index: int,
    tie_break: str = TieBreak.LEXICOGRAPHIC,
) -> Rect:
    """Area-maximal rectangle for topping ``index`` against all the other toppings."""
    _require_rectilinear(arrangement)
    if not 0 <= index < arrangement.m:
        raise ArrangementError(f"topping index {index} out of range 0..{arrangement.m - 1}")
    obstacles = arrangement.others(index) + phantom_obstacles(arrangement)
    return best_rect(
        arrangement.toppings[index],
        arrangement.cake.bounding_box(),
        obstacles,
        tie_break,
    )


def greedy_expand(
    arrangement: Arrangement,
    order: Optional[Sequence[int]] = None,
    tie_break: str = TieBreak.LEXICOGRAPHIC,
) -> Arrangement:
    """Replace each topping, in ``order``, by its maximal expansion against the current state."""
    _require_rectilinear(arrangement)
    order = list(range(arrangement.m)) if order is None else list(order)
    if sorted(order) != list(range(arrangement.m)):
        raise ArrangementError(f"order {order} is not a permutation of 0..{arrangement.m - 1}")
    phantoms = phantom_obstacles(arrangement)
    box = arrangement.cake.bounding_box()
    current = arrangement
    for index in order:
        grown = best_rect(current.toppings[index], box, current.others(index) + phantoms, tie_break)
        if grown != current.toppings[index]:
            logger.debug("%s grows %s -> %s", current.labels[index], current.toppings[index], grown)
            current = current.replace_topping(index, grown)
    return current


def _growth_direction(original: Rect, larger: Rect) -> str:
    if larger.x0 < original.x0:
        return Direction.LEFT
    if larger.x1 > original.x1:
        return Direction.RIGHT
    if larger.y0 < original.y0:
        return Direction.DOWN
    return Direction.UP


def _side(rect: Rect, direction: str):
    """(fixed coordinate, span lo, span hi, vertical side?) of one side."""
    if direction == Direction.LEFT:
        return rect.x0, rect.y0, rect.y1, True
    if direction == Direction.RIGHT:
        return rect.x1, rect.y0, rect.y1, True
    if direction == Direction.DOWN:
        return rect.y0, rect.x0, rect.x1, False
    return rect.y1, rect.x0, rect.x1, False


def _contact(rect: Rect, direction: str, other: Rect) -> Optional[Tuple[Point, Point]]:
    fixed, lo, hi, vertical = _side(rect, direction)
    if vertical:
        facing = other.x1 if direction == Direction.LEFT else other.x0
        o_lo, o_hi = other.y0, other.y1
    else:
        facing = other.y1 if direction == Direction.DOWN else other.y0
        o_lo, o_hi = other.x0, other.x1
    start, end = max(lo, o_lo), min(hi, o_hi)
    if facing != fixed or start >= end:
        return None
    if vertical:
        return Point(fixed, start), Point(fixed, end)
    return Point(start, fixed), Point(end, fixed)


class _FacingSides:
    """Obstacles keyed by the coordinate of the side they turn towards a topping."""

    def __init__(self, arrangement: Arrangement):
        self.entries = {}
        blockers = [(CAKE_BOUNDARY, p) for p in phantom_obstacles(arrangement)]
        blockers += list(enumerate(arrangement.toppings))
        for blocker, rect in blockers:
            for direction, coordinate in (
                (Direction.LEFT, rect.x1), (Direction.RIGHT, rect.x0),
                (Direction.DOWN, rect.y1), (Direction.UP, rect.y0),
            ):
                self.entries.setdefault((direction, coordinate), []).append((blocker, rect))

    def facing(self, direction: str, coordinate) -> List[Tuple[Union[str, int], Rect]]:
        return self.entries.get((direction, coordinate), [])


def block_witness(
    arrangement: Arrangement,
    index: int,
    direction: str,
    sides: Optional[_FacingSides] = None,
) -> Optional[BlockWitness]:
    """Positive-length contact stopping topping ``index`` from growing in ``direction``."""
    rect = arrangement.toppings[index]
    box = arrangement.cake.bounding_box()
    fixed, lo, hi, vertical = _side(rect, direction)
    box_side = {
        Direction.LEFT: box.x0, Direction.RIGHT: box.x1,
        Direction.DOWN: box.y0, Direction.UP: box.y1,
    }[direction]
    if fixed == box_side:
        ends = (Point(fixed, lo), Point(fixed, hi)) if vertical else (Point(lo, fixed), Point(hi, fixed))
        return BlockWitness(index, direction, CAKE_BOUNDARY, ends)
    if sides is None:
        sides = _FacingSides(arrangement)
    for blocker, other in sides.facing(direction, fixed):
        if blocker == index:
            continue
        contact = _contact(rect, direction, other)
        if contact:
            return BlockWitness(index, direction, blocker, contact)
    return None


@dataclass(frozen=True)
class MaximalityVerdict:
    maximal: bool
    witnesses: Tuple[BlockWitness, ...] = ()
    counterexample: Optional[Tuple[int, Rect]] = None
    direction: Optional[str] = None

    def __bool__(self):
        return self.maximal


def is_maximal(arrangement: Arrangement) -> MaximalityVerdict:
    """Maximal iff every topping touches an obstacle along a segment on all four sides.

    A side without such contact leaves a free strip beyond it, so the
    topping can grow; the area-maximal expansion then serves as the
    counterexample.
    """
    _require_rectilinear(arrangement)
    sides = _FacingSides(arrangement)
    witnesses = []
    for index, topping in enumerate(arrangement.toppings):
        for direction in (Direction.LEFT, Direction.RIGHT, Direction.DOWN, Direction.UP):
            witness = block_witness(arrangement, index, direction, sides)
            if witness is None:
                larger = max_expansion(arrangement, index)
                return MaximalityVerdict(
                    maximal=False,
                    counterexample=(index, larger),
                    direction=_growth_direction(topping, larger),
                )
            witnesses.append(witness)
    return MaximalityVerdict(maximal=True, witnesses=tuple(witnesses))
