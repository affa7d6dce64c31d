"""
Coordinate-compressed grid over an arrangement.

All x- and y-coordinates of the cake and the toppings cut the bounding
box into cells; a cell is either fully covered by one topping, fully
free, or outside the cake. Connected components of free cells (joined
across shared edges only, never across a single corner) are the holes.
"""

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from arrangements.services.geometry import Point, Rect, RectilinearPolygon, RectilinearRegion

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
OUTSIDE = -2
FREE = -1


class UnionFind:
    """Union-find with path compression, keyed by cell."""

    def __init__(self):
        self.parents: Dict[Cell, Cell] = {}

    def add(self, item: Cell):
        self.parents.setdefault(item, item)

    def find(self, item: Cell) -> Cell:
        root = item
        while root != self.parents[root]:
            root = self.parents[root]
        while item != root:
            self.parents[item], item = root, self.parents[item]
        return root

    def union(self, a: Cell, b: Cell):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # smaller root wins so results do not depend on insertion order
        if rb < ra:
            ra, rb = rb, ra
        self.parents[rb] = ra

    def groups(self) -> List[List[Cell]]:
        by_root: Dict[Cell, List[Cell]] = {}
        for item in sorted(self.parents):
            by_root.setdefault(self.find(item), []).append(item)
        return list(by_root.values())


class CompressedGrid:
    """Cells between consecutive distinct coordinates."""

    def __init__(self, xs: Iterable[Fraction], ys: Iterable[Fraction]):
        self.xs: List[Fraction] = sorted(set(xs))
        self.ys: List[Fraction] = sorted(set(ys))
        self.nx = len(self.xs) - 1
        self.ny = len(self.ys) - 1

    @classmethod
    def around(cls, shapes: Sequence[Union[Rect, RectilinearPolygon]]) -> "CompressedGrid":
        xs, ys = [], []
        for shape in shapes:
            for p in _points_of(shape):
                xs.append(p.x)
                ys.append(p.y)
        return cls(xs, ys)

    def x_span(self, lo: Fraction, hi: Fraction) -> range:
        return range(bisect_left(self.xs, lo), bisect_left(self.xs, hi))

    def y_span(self, lo: Fraction, hi: Fraction) -> range:
        return range(bisect_left(self.ys, lo), bisect_left(self.ys, hi))

    def cell_rect(self, cell: Cell) -> Rect:
        i, j = cell
        return Rect.from_bounds(self.xs[i], self.ys[j], self.xs[i + 1], self.ys[j + 1])

    def cell_centre(self, cell: Cell) -> Point:
        i, j = cell
        return Point((self.xs[i] + self.xs[i + 1]) / 2, (self.ys[j] + self.ys[j + 1]) / 2)

    def corner(self, vertex: Cell) -> Point:
        return Point(self.xs[vertex[0]], self.ys[vertex[1]])

    def neighbours(self, cell: Cell):
        i, j = cell
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if 0 <= ni < self.nx and 0 <= nj < self.ny:
                yield (ni, nj)

    def owners(self, rects: Sequence[Rect], clip=None) -> np.ndarray:
        """Per-cell owner: topping index, FREE, or OUTSIDE the clip region."""
        owner = np.full((self.nx, self.ny), FREE, dtype=np.int64)
        if isinstance(clip, RectilinearPolygon) and not clip.is_rectangle():
            for i in range(self.nx):
                for j in range(self.ny):
                    if not clip.contains_point(self.cell_centre((i, j))):
                        owner[i, j] = OUTSIDE
        elif clip is not None:
            box = clip if isinstance(clip, Rect) else clip.bounding_box()
            xr, yr = self.x_span(box.x0, box.x1), self.y_span(box.y0, box.y1)
            mask = np.ones((self.nx, self.ny), dtype=bool)
            mask[xr.start:xr.stop, yr.start:yr.stop] = False
            owner[mask] = OUTSIDE
        for index, rect in enumerate(rects):
            xr, yr = self.x_span(rect.x0, rect.x1), self.y_span(rect.y0, rect.y1)
            owner[xr.start:xr.stop, yr.start:yr.stop] = index
        return owner


def _points_of(shape) -> Iterable[Point]:
    if isinstance(shape, Rect):
        return (shape.lo, shape.hi)
    return shape.vertices


@dataclass
class GridComponent:
    """A connected set of free cells and the region they cover.

    ``region`` is a plain polygon for a simply connected component and a
    :class:`RectilinearRegion` with the surrounded pockets cut out otherwise.
    """

    cells: List[Cell]
    region: Optional[Union[RectilinearPolygon, RectilinearRegion]]
    enclosed_cells: List[Cell] = field(default_factory=list)
    unbounded: bool = False

    @property
    def simply_connected(self) -> bool:
        return not self.enclosed_cells

    @property
    def outline(self) -> Optional[RectilinearPolygon]:
        """Outer boundary with the surrounded pockets filled in."""
        if isinstance(self.region, RectilinearRegion):
            return self.region.outer
        return self.region


def free_components(grid: CompressedGrid, owner: np.ndarray) -> List[List[Cell]]:
    uf = UnionFind()
    free = list(zip(*np.nonzero(owner == FREE)))
    for i, j in free:
        cell = (int(i), int(j))
        uf.add(cell)
        for other in ((cell[0] - 1, cell[1]), (cell[0], cell[1] - 1)):
            if other in uf.parents:
                uf.union(cell, other)
    return uf.groups()


def enclosed_by(grid: CompressedGrid, cells: Sequence[Cell]) -> List[Cell]:
    """Cells outside ``cells`` that cannot reach the grid border without crossing them."""
    blocked = set(cells)
    seen = set()
    stack = []
    for i in range(grid.nx):
        for j in (0, grid.ny - 1):
            stack.append((i, j))
    for j in range(grid.ny):
        for i in (0, grid.nx - 1):
            stack.append((i, j))
    while stack:
        cell = stack.pop()
        if cell in seen or cell in blocked:
            continue
        seen.add(cell)
        stack.extend(grid.neighbours(cell))
    return sorted(
        (i, j)
        for i in range(grid.nx)
        for j in range(grid.ny)
        if (i, j) not in seen and (i, j) not in blocked
    )


def trace_boundary(grid: CompressedGrid, cells: Iterable[Cell]) -> RectilinearPolygon:
    """Outer boundary of an edge-connected cell set without holes."""
    filled = set(cells)
    step: Dict[Cell, Cell] = {}
    for i, j in filled:
        if (i, j - 1) not in filled:
            step[(i, j)] = (i + 1, j)
        if (i + 1, j) not in filled:
            step[(i + 1, j)] = (i + 1, j + 1)
        if (i, j + 1) not in filled:
            step[(i + 1, j + 1)] = (i, j + 1)
        if (i - 1, j) not in filled:
            step[(i, j + 1)] = (i, j)
    start = min(step, key=lambda v: (v[1], v[0]))
    cycle = [start]
    vertex = step[start]
    while vertex != start:
        cycle.append(vertex)
        vertex = step[vertex]
    if len(cycle) != len(step):
        raise AssertionError("cell set boundary is not a single cycle")
    return RectilinearPolygon(tuple(grid.corner(v) for v in cycle))


def _pockets(grid: CompressedGrid, enclosed: Sequence[Cell]) -> Tuple[RectilinearPolygon, ...]:
    uf = UnionFind()
    pocket = set(enclosed)
    for cell in enclosed:
        uf.add(cell)
        for other in ((cell[0] - 1, cell[1]), (cell[0], cell[1] - 1)):
            if other in pocket:
                uf.union(cell, other)
    # nested pockets lie inside the outline of the pocket around them
    filled_groups = sorted(
        (list(group) + enclosed_by(grid, group) for group in uf.groups()),
        key=len,
        reverse=True,
    )
    holes = []
    covered = set()
    for filled in filled_groups:
        if filled[0] in covered:
            continue
        covered.update(filled)
        holes.append(trace_boundary(grid, filled))
    return tuple(holes)


def _component(grid: CompressedGrid, cells: List[Cell]) -> GridComponent:
    enclosed = enclosed_by(grid, cells)
    outer = trace_boundary(grid, list(cells) + enclosed)
    if not enclosed:
        return GridComponent(cells=cells, region=outer)
    logger.debug("component at %s encloses %d cells", outer.vertices[0], len(enclosed))
    region = RectilinearRegion(outer, _pockets(grid, enclosed))
    return GridComponent(cells=cells, region=region, enclosed_cells=enclosed)


def components_of(grid: CompressedGrid, owner: np.ndarray) -> List[GridComponent]:
    """Free components of an owner array, ordered by the lower-left of their outline."""
    result = [_component(grid, cells) for cells in free_components(grid, owner)]
    result.sort(key=lambda c: (c.region.bounding_box().y0, c.region.bounding_box().x0))
    return result


def component_analysis(
    rects: Sequence[Rect],
    clip: Union[Rect, RectilinearPolygon],
) -> List[GridComponent]:
    """Free components of ``clip`` minus the rectangles, with enclosure data."""
    grid, owner = cell_owner_grid(rects, clip)
    return components_of(grid, owner)


def union_components(
    rects: Sequence[Rect],
    clip: Union[Rect, RectilinearPolygon],
) -> List[Union[RectilinearPolygon, RectilinearRegion]]:
    """Closures of the connected components of ``clip`` minus the rectangles.

    The regions are pairwise interior-disjoint and their areas add up to the
    area of ``clip`` minus the area of the rectangles.
    """
    return [component.region for component in component_analysis(rects, clip)]


def plane_components(rects: Sequence[Rect]) -> List[GridComponent]:
    """Components of the plane minus the rectangles; exactly one is unbounded."""
    grid = CompressedGrid.around(rects)
    pad = Fraction(1)
    grid = CompressedGrid(
        grid.xs + [grid.xs[0] - pad, grid.xs[-1] + pad],
        grid.ys + [grid.ys[0] - pad, grid.ys[-1] + pad],
    )
    owner = grid.owners(rects)
    result = []
    for cells in free_components(grid, owner):
        if (0, 0) in cells:
            result.append(GridComponent(cells=cells, region=None, unbounded=True))
        else:
            result.append(_component(grid, cells))
    return result


def trace_region(grid: CompressedGrid, cells: Sequence[Cell]) -> RectilinearRegion:
    """Outline of an edge-connected cell set together with the holes it surrounds."""
    enclosed = enclosed_by(grid, cells)
    outer = trace_boundary(grid, list(cells) + enclosed)
    if not enclosed:
        return RectilinearRegion(outer)
    return RectilinearRegion(outer, _pockets(grid, enclosed))


def cell_owner_grid(rects: Sequence[Rect], clip) -> Tuple[CompressedGrid, np.ndarray]:
    grid = CompressedGrid.around([clip, *rects])
    return grid, grid.owners(rects, clip)
