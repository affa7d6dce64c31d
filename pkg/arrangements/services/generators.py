"""
Constructions with many blanks, small hand-checked fixtures and the
seeded random arrangements used by the fuzz harness.

Grid constructions work on a perfect partition in unit coordinates and
scale it by 3: every 4-vertex becomes a unit windmill hole, and a side
is moved by one unit whenever the windmill at one of its ends asks for
it. Windmills alternate orientation like a checkerboard, which keeps
every line segment between two 4-vertices straight.
"""

import logging
from collections import Counter, defaultdict
from fractions import Fraction
from math import isqrt
from typing import Dict, Iterator, List, Literal, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from arrangements.exceptions import ArrangementError
from arrangements.models import Arrangement, Cake
from arrangements.services.geometry import (
    ConvexPolygon,
    Point,
    Rect,
    RectilinearPolygon,
    convex_hull,
)

logger = logging.getLogger(__name__)

SCALE = 3

Cells = List[Tuple[int, int, int, int]]


def _square_partition(m: int) -> Tuple[int, int, Cells]:
    """k x k unit squares, then a right column, then a top row, m cells in all."""
    k = isqrt(m - 1)
    cells = [(i, j, i + 1, j + 1) for i in range(k) for j in range(k)]
    extra = m - k * k
    if extra <= k:
        cells += [(k, j, k + 1, j + 1) for j in range(extra - 1)]
        cells.append((k, extra - 1, k + 1, k))
        return k + 1, k, cells
    cells += [(k, j, k + 1, j + 1) for j in range(k)]
    s = extra - k
    cells += [(i, k, i + 1, k + 1) for i in range(s - 1)]
    cells.append((s - 1, k, k + 1, k + 1))
    return k + 1, k + 1, cells


def _four_vertices(cells: Cells) -> List[Tuple[int, int]]:
    corners = Counter(
        p for x0, y0, x1, y1 in cells for p in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
    )
    return sorted(p for p, n in corners.items() if n == 4)


class _Shifts:
    """Per-line offsets (0 or 1) of the scaled partition."""

    def __init__(self, fours: Sequence[Tuple[int, int]]):
        self.columns: Dict[int, List[int]] = defaultdict(list)
        self.rows: Dict[int, List[int]] = defaultdict(list)
        for i, j in fours:
            self.columns[i].append(j)
            self.rows[j].append(i)

    @staticmethod
    def _around(stops: List[int], lo: int, hi: int):
        below = [s for s in stops if s <= lo]
        if below:
            return below[-1], True
        above = [s for s in stops if s >= hi]
        if above:
            return above[0], False
        return None, None

    def vertical(self, i: int, lo: int, hi: int) -> int:
        j, after = self._around(sorted(self.columns.get(i, [])), lo, hi)
        if j is None:
            return 0
        # clockwise windmills (i + j even) keep the line left above and right below
        return (i + j) % 2 if after else (i + j + 1) % 2

    def horizontal(self, j: int, lo: int, hi: int) -> int:
        i, after = self._around(sorted(self.rows.get(j, [])), lo, hi)
        if i is None:
            return 0
        return (i + j + 1) % 2 if after else (i + j) % 2


def _windmill_rects(cells: Cells) -> List[Rect]:
    shifts = _Shifts(_four_vertices(cells))
    rects = []
    for x0, y0, x1, y1 in cells:
        rects.append(Rect.from_bounds(
            SCALE * x0 + shifts.vertical(x0, y0, y1),
            SCALE * y0 + shifts.horizontal(y0, x0, x1),
            SCALE * x1 + shifts.vertical(x1, y0, y1),
            SCALE * y1 + shifts.horizontal(y1, x0, x1),
        ))
    return rects


def gen_grid(m: int) -> Arrangement:
    """Maximal arrangement of m rectangles in a square with m - doubleroot(m) holes."""
    if m < 1:
        raise ArrangementError(f"gen_grid needs m >= 1, got {m}")
    width, height, cells = _square_partition(m)
    cake = Rect.from_bounds(0, 0, SCALE * width, SCALE * height)
    logger.debug("grid construction for m=%d on a %dx%d partition", m, width, height)
    return Arrangement(Cake.rectangle(cake), tuple(_windmill_rects(cells)))


def _staircase_outline(right: Fraction, top: Fraction, T: int) -> List[Point]:
    heights = [Fraction(T - k, T) for k in range(T)]
    points = [Point(0, 0), Point(right + T, 0)]
    for c in range(T, 0, -1):
        points.append(Point(right + c, heights[c - 1]))
        points.append(Point(right + c - 1, heights[c - 1]))
    points += [Point(right, top), Point(0, top)]
    return points


def gen_staircase(m: int, T: int) -> Arrangement:
    """gen_grid(m) with a unit-wide staircase of T steps glued to its lower right."""
    if T < 1:
        raise ArrangementError(f"gen_staircase needs T >= 1, got {T}")
    grid = gen_grid(m)
    box = grid.cake.shape
    cake = RectilinearPolygon(tuple(_staircase_outline(box.x1, box.y1, T)))
    return Arrangement(Cake.rectilinear(cake), grid.toppings)


def gen_plane_longbox(m: int) -> List[Rect]:
    """Four rectangles forming a long box with m - 4 separators inside."""
    if m < 5:
        raise ArrangementError(f"the long box needs m >= 5, got {m}")
    n = m - 4
    length = 2 * n + 3
    box = [
        Rect.from_bounds(0, 0, length, 1),
        Rect.from_bounds(length - 1, 1, length, 3),
        Rect.from_bounds(0, 3, length, 4),
        Rect.from_bounds(0, 1, 1, 3),
    ]
    return box + [Rect.from_bounds(2 + 2 * j, 1, 3 + 2 * j, 3) for j in range(n)]


_CONVEX_CAKE = ((0, 0), (24, 0), (0, 24))

_CONVEX_FIXTURES = {
    3: (
        ((0, 0), (24, 0), (8, 8)),
        (("40/3", "16/3"), (24, 0), (0, 24)),
        ((0, 0), (10, 10), (0, 24)),
    ),
    4: (
        ((0, 0), (24, 0), (9, 6), (4, 6)),
        ((24, 0), (0, 24), (9, 9), (14, 4)),
        ((0, 24), (0, 0), (6, 9), (6, 14)),
        ((6, 6), (12, 6), (6, 12)),
    ),
    5: (
        ((0, 0), (24, 0), (10, 6), ("16/3", 6)),
        ((24, 0), (0, 24), ("149/24", "25/2"), ("64/7", "62/7"), ("27/2", "9/2")),
        ((0, 24), (0, 0), (6, "27/4"), (6, 10), ("149/32", "123/8")),
        ((6, 6), (12, 6), (8, 10), (6, "22/3")),
        ((5, 14), ("13/2", 8), ("227/28", "71/7")),
    ),
}


def gen_convex_fixture(m: int) -> Arrangement:
    """Triangle cake with m convex toppings leaving 2m - 5 triangular holes."""
    if m not in _CONVEX_FIXTURES:
        raise ArrangementError(f"convex fixtures exist for m in 3, 4, 5; got {m}")
    return Arrangement(
        Cake.convex(ConvexPolygon.from_coords(_CONVEX_CAKE)),
        tuple(ConvexPolygon.from_coords(c) for c in _CONVEX_FIXTURES[m]),
    )


def _rect_arrangement(cake: Tuple[int, int, int, int], rects) -> Arrangement:
    return Arrangement(
        Cake.rectangle(Rect.from_bounds(*cake)),
        tuple(Rect.from_bounds(*r) for r in rects),
    )


def gen_pinwheel() -> Arrangement:
    return _rect_arrangement((0, 0, 3, 3), [(0, 0, 2, 1), (2, 0, 3, 2), (1, 2, 3, 3), (0, 1, 1, 3)])


def grid_fixture(k1: int, k2: int) -> Arrangement:
    """Perfect partition of [0, k1] x [0, k2] into unit squares."""
    if k1 < 1 or k2 < 1:
        raise ArrangementError(f"grid_fixture needs k1, k2 >= 1, got ({k1}, {k2})")
    return _rect_arrangement(
        (0, 0, k1, k2),
        [(i, j, i + 1, j + 1) for j in range(k2) for i in range(k1)],
    )


def gen_lemma6_fixture() -> Arrangement:
    """Perfect partition of [0, 3] x [0, 4] with four 3-vertices.

    Saturating it takes five splits (two fresh, one against the boundary,
    one merging into a 3-vertex, one more against the boundary) and ends
    on the 3 x 4 grid.
    """
    return _rect_arrangement((0, 0, 3, 4), [
        (0, 0, 2, 1), (2, 0, 3, 1), (0, 1, 3, 2), (0, 2, 2, 3),
        (2, 2, 3, 3), (0, 3, 1, 4), (1, 3, 3, 4),
    ])


def gen_nonmaximal_fixture() -> Arrangement:
    """Z3 can grow to the right into the hole [1, 3] x [1, 2]."""
    return _rect_arrangement((0, 0, 3, 3), [(0, 0, 3, 1), (0, 2, 3, 3), (0, 1, 1, 2)])


GREEDY_ORDER = (3, 0, 1, 2)


def gen_greedy_fixture() -> Arrangement:
    """Z4 can grow left or down by the same area.

    Expanded first (``GREEDY_ORDER``), growing left leaves room for Z3 and
    no blank; growing down closes a windmill around [1, 2] x [1, 2].
    """
    return _rect_arrangement((0, 0, 3, 3), [(1, 2, 3, 3), (0, 1, 1, 3), (0, 0, 2, 1), (2, 1, 3, 2)])


# Random arrangements

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class Xorshift64:
    """Marsaglia's xorshift64 with shifts (13, 7, 17).

    Item ``i`` of a stream seeded with ``s`` starts from splitmix64 of
    ``s + (i + 1) * 0x9E3779B97F4A7C15``, so items can be produced in
    any order.
    """

    def __init__(self, seed: int):
        self.state = (seed & _MASK) or _GOLDEN

    @classmethod
    def for_item(cls, seed: int, index: int) -> "Xorshift64":
        z = (seed + (index + 1) * _GOLDEN) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return cls(z ^ (z >> 31))

    def next(self) -> int:
        x = self.state
        x ^= (x << 13) & _MASK
        x ^= x >> 7
        x ^= (x << 17) & _MASK
        self.state = x
        return x

    def below(self, n: int) -> int:
        return self.next() % n

    def sample(self, population: Sequence, k: int) -> list:
        pool = list(population)
        picked = []
        for _ in range(k):
            picked.append(pool.pop(self.below(len(pool))))
        return picked


class FuzzConfig(BaseModel):
    """Parameters of one deterministic stream of random arrangements."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(ge=0, le=_MASK)
    m: int = Field(ge=1)
    grid_extent: int = Field(12, ge=1, description="Cakes live in [0, grid_extent]^2")
    cake_kind: Literal["rectangle", "rectilinear", "plane", "convex"] = "rectangle"
    T: int = Field(0, ge=0, description="Reflex vertices of rectilinear cakes")
    iterations: int = Field(100, ge=0)

    @model_validator(mode="after")
    def check_room(self):
        if self.m > self.grid_extent ** 2:
            raise ValueError(f"{self.m} toppings do not fit a {self.grid_extent}x{self.grid_extent} grid")
        if self.cake_kind == "rectilinear" and not 1 <= self.T < self.grid_extent:
            raise ValueError(f"rectilinear cakes need 1 <= T < {self.grid_extent}, got T={self.T}")
        return self


def _guillotine(rng: Xorshift64, start: List[Rect], m: int) -> List[Rect]:
    """Cut integer cells until there are m, then keep m of them."""
    cells = list(start)
    while len(cells) < m:
        splittable = [i for i, c in enumerate(cells) if c.width > 1 or c.height > 1]
        if not splittable:
            raise ArrangementError(f"cannot cut {len(cells)} unit cells into {m}")
        cell = cells.pop(splittable[rng.below(len(splittable))])
        vertical = cell.width > 1 and (cell.height == 1 or rng.below(2) == 0)
        if vertical:
            x = cell.x0 + 1 + rng.below(int(cell.width) - 1)
            cells += [Rect.from_bounds(cell.x0, cell.y0, x, cell.y1), Rect.from_bounds(x, cell.y0, cell.x1, cell.y1)]
        else:
            y = cell.y0 + 1 + rng.below(int(cell.height) - 1)
            cells += [Rect.from_bounds(cell.x0, cell.y0, cell.x1, y), Rect.from_bounds(cell.x0, y, cell.x1, cell.y1)]
    if len(cells) > m:
        cells = rng.sample(cells, m)
    return cells


def _margins(rng: Xorshift64, length: int) -> Tuple[int, int]:
    before = rng.below(length)
    return before, rng.below(length - before)


def _shrink(rng: Xorshift64, cell: Rect) -> Rect:
    left, right = _margins(rng, int(cell.width))
    bottom, top = _margins(rng, int(cell.height))
    return Rect.from_bounds(cell.x0 + left, cell.y0 + bottom, cell.x1 - right, cell.y1 - top)


def _convex_in(rng: Xorshift64, cell: Rect) -> ConvexPolygon:
    lattice = [
        Point(x, y)
        for x in range(int(cell.x0), int(cell.x1) + 1)
        for y in range(int(cell.y0), int(cell.y1) + 1)
    ]
    for _ in range(64):
        hull = convex_hull(rng.sample(lattice, 3 + rng.below(2)))
        if len(hull) >= 3:
            return ConvexPolygon(hull)
    return ConvexPolygon((Point(cell.x0, cell.y0), Point(cell.x1, cell.y0), Point(cell.x0, cell.y1)))


def _staircase_cake(rng: Xorshift64, extent: int, T: int) -> Tuple[RectilinearPolygon, List[Rect]]:
    """Square with a T-step staircase cut off its upper right, and its vertical strips."""
    xs = sorted(rng.sample(range(1, extent), T), reverse=True)
    ys = sorted(rng.sample(range(1, extent), T))
    points = [Point(0, 0), Point(extent, 0), Point(extent, ys[0])]
    for i in range(T):
        points.append(Point(xs[i], ys[i]))
        points.append(Point(xs[i], ys[i + 1] if i + 1 < T else extent))
    points.append(Point(0, extent))
    strips = []
    for i in range(T + 1):
        left = xs[i] if i < T else 0
        right = extent if i == 0 else xs[i - 1]
        top = ys[i] if i < T else extent
        strips.append(Rect.from_bounds(left, 0, right, top))
    return RectilinearPolygon(tuple(points)), strips


def arrangement_at(cfg: FuzzConfig, index: int) -> Arrangement:
    """Item ``index`` of the stream described by ``cfg``."""
    rng = Xorshift64.for_item(cfg.seed, index)
    square = Rect.from_bounds(0, 0, cfg.grid_extent, cfg.grid_extent)
    if cfg.cake_kind == "rectilinear":
        polygon, strips = _staircase_cake(rng, cfg.grid_extent, cfg.T)
        cells = _guillotine(rng, strips, cfg.m)
        return Arrangement(Cake.rectilinear(polygon), tuple(_shrink(rng, c) for c in cells))
    cells = _guillotine(rng, [square], cfg.m)
    if cfg.cake_kind == "convex":
        cake = Cake.convex(ConvexPolygon((
            Point(0, 0), Point(cfg.grid_extent, 0),
            Point(cfg.grid_extent, cfg.grid_extent), Point(0, cfg.grid_extent),
        )))
        return Arrangement(cake, tuple(_convex_in(rng, c) for c in cells))
    cake = Cake.plane() if cfg.cake_kind == "plane" else Cake.rectangle(square)
    return Arrangement(cake, tuple(_shrink(rng, c) for c in cells))


def gen_random(cfg: FuzzConfig) -> Iterator[Arrangement]:
    for index in range(cfg.iterations):
        yield arrangement_at(cfg, index)
