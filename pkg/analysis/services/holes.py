"""
Holes of an arrangement and their vertex/edge taxonomy.

A hole is a connected component of the cake minus the toppings. Its
boundary is walked counter-clockwise; every topping or cake vertex on
that walk is a hole-vertex, and the stretch between two consecutive
hole-vertices is a hole-edge.
"""

import logging
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx
from django.db import models

from analysis.services.bounds import euler_face_bound
from analysis.services.expansion import CAKE_BOUNDARY, is_maximal
from arrangements.exceptions import (
    ArrangementError,
    ContractionError,
    InvalidPolygonError,
    NotMaximalError,
    UnsupportedCakeError,
)
from arrangements.models import Arrangement, CakeKind
from arrangements.services.geometry import (
    ConvexPolygon,
    Point,
    Rect,
    RectilinearPolygon,
    RectilinearRegion,
    convex_hull,
    cross,
    on_segment,
)
from arrangements.services.grid import (
    FREE,
    OUTSIDE,
    CompressedGrid,
    cell_owner_grid,
    components_of,
    plane_components,
)

logger = logging.getLogger(__name__)


class HoleKind(models.TextChoices):
    INNER = 'inner', 'Inner hole'
    BOUNDARY = 'boundary', 'Boundary hole'


class Locus(models.TextChoices):
    INNER = 'inner', 'Interior of the cake'
    BOUNDARY = 'boundary', 'Cake boundary'


class Convexity(models.TextChoices):
    CONVEX = 'convex', 'Convex (90 degrees)'
    NONCONVEX = 'nonconvex', 'Nonconvex (180 or 270 degrees)'


class VertexRole(models.TextChoices):
    BLOCKING = 'blocking_vertex', 'Blocks an inner edge'
    CONNECTION_REFLEX = 'connection_reflex_c_vertex', 'Reflex cake vertex between inner and boundary edges'
    BOUNDARY_REFLEX = 'boundary_reflex_c_vertex', 'Reflex cake vertex between boundary edges'


class Orientation(models.TextChoices):
    CLOCKWISE = 'clockwise', 'Clockwise'
    COUNTERCLOCKWISE = 'counterclockwise', 'Counter-clockwise'


Owner = Union[int, str]


@dataclass(frozen=True)
class HoleEdge:
    segment: Tuple[Point, Point]
    locus: str
    owner: Owner

    @property
    def horizontal(self) -> bool:
        return self.segment[0].y == self.segment[1].y


@dataclass(frozen=True)
class HoleVertex:
    point: Point
    angle: int
    locus: str
    roles: FrozenSet[str] = frozenset()
    blocks: Tuple[int, ...] = ()

    @property
    def convexity(self) -> str:
        return Convexity.CONVEX if self.angle == 90 else Convexity.NONCONVEX


@dataclass(frozen=True)
class Hole:
    """Edge ``i`` runs from vertex ``i`` to vertex ``i + 1``."""

    region: Union[RectilinearPolygon, RectilinearRegion]
    kind: str
    vertices: Tuple[HoleVertex, ...]
    edges: Tuple[HoleEdge, ...]
    simply_connected: bool = True
    enclosed_toppings: Tuple[int, ...] = ()

    @property
    def outline(self) -> RectilinearPolygon:
        if isinstance(self.region, RectilinearRegion):
            return self.region.outer
        return self.region

    @property
    def is_rectangle(self) -> bool:
        return (
            self.simply_connected
            and len(self.vertices) == 4
            and all(v.angle == 90 for v in self.vertices)
        )

    @property
    def rect(self) -> Rect:
        if not self.is_rectangle:
            raise ArrangementError(f"hole {self.region} is not a rectangle")
        return self.region.bounding_box()

    def count_edges(self, locus: str) -> int:
        return sum(1 for e in self.edges if e.locus == locus)

    def count_vertices(self, locus: str, convexity: Optional[str] = None) -> int:
        return sum(
            1 for v in self.vertices
            if v.locus == locus and (convexity is None or v.convexity == convexity)
        )

    def count_role(self, role: str) -> int:
        return sum(1 for v in self.vertices if role in v.roles)

    @property
    def reflex_hole_vertices(self) -> int:
        inner = self.count_vertices(Locus.INNER, Convexity.NONCONVEX)
        boundary = sum(1 for v in self.vertices if v.locus == Locus.BOUNDARY and v.angle == 270)
        return inner + boundary

    @property
    def reflex_cake_vertices(self) -> int:
        return self.count_role(VertexRole.CONNECTION_REFLEX) + self.count_role(VertexRole.BOUNDARY_REFLEX)


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _direction(a: Point, b: Point) -> Tuple[int, int]:
    return _sign(b.x - a.x), _sign(b.y - a.y)


class _OwnerLookup:
    """Owner of the grid cell in a given quadrant around a grid corner."""

    def __init__(self, grid: CompressedGrid, owner):
        self.grid = grid
        self.owner = owner

    def cell(self, i: int, j: int) -> int:
        if 0 <= i < self.grid.nx and 0 <= j < self.grid.ny:
            return int(self.owner[i, j])
        return OUTSIDE

    def quadrant(self, p: Point, sx: int, sy: int) -> int:
        i = bisect_left(self.grid.xs, p.x)
        j = bisect_left(self.grid.ys, p.y)
        return self.cell(i if sx > 0 else i - 1, j if sy > 0 else j - 1)

    def across(self, a: Point, b: Point) -> int:
        """Owner on the right of the directed boundary edge a -> b."""
        dx, dy = _direction(a, b)
        # right-hand normal of (dx, dy) is (dy, -dx)
        return self.quadrant(a, dx if dx else dy, dy if dy else -dx)


def _walk(region: RectilinearPolygon, corner_points: Sequence[Point]) -> List[Point]:
    points: List[Point] = []
    for a, b in region.edges():
        between = [p for p in corner_points if p != a and p != b and on_segment(p, a, b)]
        between.sort(key=lambda p: abs(p.x - a.x) + abs(p.y - a.y))
        points.append(a)
        points.extend(between)
    return points


def _taxonomy(
    region: RectilinearPolygon,
    lookup: _OwnerLookup,
    cake: RectilinearPolygon,
    corner_points: Sequence[Point],
) -> Tuple[Tuple[HoleVertex, ...], Tuple[HoleEdge, ...]]:
    points = _walk(region, corner_points)
    n = len(points)
    cake_reflex = set(cake.reflex_vertices())
    edges = []
    for k in range(n):
        a, b = points[k], points[(k + 1) % n]
        middle = Point((a.x + b.x) / 2, (a.y + b.y) / 2)
        locus = Locus.BOUNDARY if cake.on_boundary(middle) else Locus.INNER
        across = lookup.across(a, b)
        edges.append(HoleEdge((a, b), locus, CAKE_BOUNDARY if across == OUTSIDE else across))

    vertices = []
    for k in range(n):
        prev, cur, nxt = points[k - 1], points[k], points[(k + 1) % n]
        turn = cross(prev, cur, nxt)
        angle = 90 if turn > 0 else (180 if turn == 0 else 270)
        e_in, e_out = (k - 1) % n, k
        roles = set()
        blocks = []
        if angle == 90:
            din, dout = _direction(prev, cur), _direction(cur, nxt)
            diagonal = lookup.quadrant(cur, din[0] - dout[0], din[1] - dout[1])
            across_in = lookup.quadrant(cur, -din[0] - dout[0], -din[1] - dout[1])
            across_out = lookup.quadrant(cur, din[0] + dout[0], din[1] + dout[1])
            if diagonal != FREE:
                if edges[e_in].locus == Locus.INNER and across_in == diagonal:
                    blocks.append(e_in)
                if edges[e_out].locus == Locus.INNER and across_out == diagonal:
                    blocks.append(e_out)
        if blocks:
            roles.add(VertexRole.BLOCKING)
        if cur in cake_reflex:
            loci = {edges[e_in].locus, edges[e_out].locus}
            if loci == {Locus.INNER, Locus.BOUNDARY}:
                roles.add(VertexRole.CONNECTION_REFLEX)
            else:
                roles.add(VertexRole.BOUNDARY_REFLEX)
        locus = Locus.BOUNDARY if cake.on_boundary(cur) else Locus.INNER
        vertices.append(HoleVertex(cur, angle, locus, frozenset(roles), tuple(blocks)))
    return tuple(vertices), tuple(edges)


def _require_bounded_rectilinear(arrangement: Arrangement):
    if not arrangement.cake.is_bounded_rectilinear:
        raise UnsupportedCakeError(
            f"hole analysis needs a rectangle or rectilinear cake, not {arrangement.cake.kind}"
        )


def extract_holes(arrangement: Arrangement) -> List[Hole]:
    """Components of the cake minus the toppings, each with its taxonomy."""
    _require_bounded_rectilinear(arrangement)
    cake = arrangement.cake.polygon()
    grid, owner = cell_owner_grid(list(arrangement.toppings), arrangement.cake.region())
    lookup = _OwnerLookup(grid, owner)
    corner_points = sorted(
        {p for t in arrangement.toppings for p in t.corners()} | set(cake.vertices)
    )
    holes = []
    for component in components_of(grid, owner):
        vertices, edges = _taxonomy(component.outline, lookup, cake, corner_points)
        kind = HoleKind.BOUNDARY if any(e.locus == Locus.BOUNDARY for e in edges) else HoleKind.INNER
        enclosed = tuple(sorted({int(owner[c]) for c in component.enclosed_cells if owner[c] >= 0}))
        if not component.simply_connected:
            logger.warning(
                "hole at %s is not simply connected; it surrounds toppings %s",
                component.outline.vertices[0], list(enclosed),
            )
        holes.append(Hole(
            region=component.region,
            kind=kind,
            vertices=vertices,
            edges=edges,
            simply_connected=component.simply_connected,
            enclosed_toppings=enclosed,
        ))
    return holes


@dataclass(frozen=True)
class Windmill:
    """The four toppings around a rectangular inner hole."""

    bottom: int
    right: int
    top: int
    left: int
    orientation: str


def hole_windmill(arrangement: Arrangement, hole: Hole) -> Windmill:
    if hole.kind != HoleKind.INNER or not hole.is_rectangle:
        raise ContractionError(f"hole {hole.region} is not an inner rectangle")
    owners = [e.owner for e in hole.edges]
    if any(o == CAKE_BOUNDARY for o in owners):
        raise ContractionError(f"hole {hole.region} touches the cake boundary")
    bottom, right, top, left = owners
    x1, y1, x2, y2 = hole.rect.bounds
    t = arrangement.toppings
    if t[top].x0 == x1 and t[bottom].x1 == x2 and t[right].y0 < y1 and t[left].y1 > y2:
        orientation = Orientation.CLOCKWISE
    elif t[top].x1 == x2 and t[bottom].x0 == x1 and t[right].y1 > y2 and t[left].y0 < y1:
        orientation = Orientation.COUNTERCLOCKWISE
    else:
        raise ContractionError(f"windmill orientation of hole {hole.region} is undetectable")
    return Windmill(bottom, right, top, left, orientation)


class StructureRule(models.TextChoices):
    SIMPLY_CONNECTED = 'simply_connected', 'Every hole is simply connected'
    INNER_EDGES_BLOCKED = 'inner_edges_blocked', 'Every inner edge has a blocking vertex'
    SINGLE_BLOCK = 'single_block', 'A blocking vertex is convex and blocks one edge'
    EDGES_MATCH_VERTICES = 'edges_match_vertices', 'Inner holes have as many edges as vertices'
    INNER_RECTANGLE = 'inner_rectangle', 'Every inner hole is a rectangle'
    NO_BOUNDARY_HOLES = 'no_boundary_holes', 'A rectangle cake has no boundary holes'
    BOUNDARY_VERTEX_SURPLUS = 'boundary_vertex_surplus', 'Boundary vertices exceed boundary edges'
    REFLEX_SURPLUS = 'reflex_surplus', 'Reflex hole vertices + 1 <= reflex cake vertices'
    REFLEX_NOT_SHARED = 'reflex_not_shared', 'A reflex cake vertex touches at most one boundary hole'


@dataclass(frozen=True)
class StructureCheck:
    rule: str
    passed: bool
    hole: Optional[int] = None
    counts: Dict[str, int] = field(default_factory=dict)

    def __str__(self):
        where = f" hole {self.hole}" if self.hole is not None else ""
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        return f"{'ok' if self.passed else 'FAIL'} {self.rule}{where} {counts}".rstrip()


@dataclass(frozen=True)
class StructureReport:
    cake_kind: str
    holes: Tuple[Hole, ...]
    checks: Tuple[StructureCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> List[StructureCheck]:
        return [c for c in self.checks if not c.passed]


def _hole_checks(index: int, hole: Hole, rectilinear: bool) -> List[StructureCheck]:
    checks = [StructureCheck(StructureRule.SIMPLY_CONNECTED, hole.simply_connected, index)]
    inner_edges = hole.count_edges(Locus.INNER)
    blocked = {e for v in hole.vertices for e in v.blocks}
    unblocked = [k for k, e in enumerate(hole.edges) if e.locus == Locus.INNER and k not in blocked]
    blockers = hole.count_vertices(Locus.INNER, Convexity.CONVEX)
    if rectilinear:
        blockers += hole.count_role(VertexRole.CONNECTION_REFLEX)
    checks.append(StructureCheck(
        StructureRule.INNER_EDGES_BLOCKED,
        not unblocked and blockers >= inner_edges,
        index,
        {"inner_edges": inner_edges, "blockers": blockers, "unblocked": len(unblocked)},
    ))
    bad_blockers = [v for v in hole.vertices if v.blocks and (v.angle != 90 or len(v.blocks) != 1)]
    checks.append(StructureCheck(
        StructureRule.SINGLE_BLOCK, not bad_blockers, index,
        {"blocking_vertices": hole.count_role(VertexRole.BLOCKING)},
    ))
    if hole.kind == HoleKind.INNER:
        inner_vertices = hole.count_vertices(Locus.INNER)
        checks.append(StructureCheck(
            StructureRule.EDGES_MATCH_VERTICES, inner_edges == inner_vertices, index,
            {"inner_edges": inner_edges, "inner_vertices": inner_vertices},
        ))
        checks.append(StructureCheck(
            StructureRule.INNER_RECTANGLE, hole.is_rectangle, index,
            {"vertices": len(hole.vertices)},
        ))
    elif not rectilinear:
        checks.append(StructureCheck(StructureRule.NO_BOUNDARY_HOLES, False, index))
    else:
        boundary_vertices = hole.count_vertices(Locus.BOUNDARY)
        boundary_edges = hole.count_edges(Locus.BOUNDARY)
        checks.append(StructureCheck(
            StructureRule.BOUNDARY_VERTEX_SURPLUS, boundary_vertices >= boundary_edges + 1, index,
            {"boundary_vertices": boundary_vertices, "boundary_edges": boundary_edges},
        ))
        checks.append(StructureCheck(
            StructureRule.REFLEX_SURPLUS,
            hole.reflex_hole_vertices + 1 <= hole.reflex_cake_vertices,
            index,
            {"reflex_hole_vertices": hole.reflex_hole_vertices,
             "reflex_cake_vertices": hole.reflex_cake_vertices},
        ))
    return checks


def verify_structure(arrangement: Arrangement) -> StructureReport:
    """Check the shape of every hole of a maximal arrangement."""
    _require_bounded_rectilinear(arrangement)
    verdict = is_maximal(arrangement)
    if not verdict:
        index, larger = verdict.counterexample
        raise NotMaximalError(index, larger, verdict.direction)
    rectilinear = arrangement.cake.kind == CakeKind.RECTILINEAR
    holes = extract_holes(arrangement)
    checks: List[StructureCheck] = []
    for index, hole in enumerate(holes):
        checks.extend(_hole_checks(index, hole, rectilinear))
    if not rectilinear:
        boundary = sum(1 for h in holes if h.kind == HoleKind.BOUNDARY)
        checks.append(StructureCheck(StructureRule.NO_BOUNDARY_HOLES, boundary == 0, None,
                                     {"boundary_holes": boundary}))
    else:
        seen: Dict[Point, int] = {}
        for hole in holes:
            if hole.kind != HoleKind.BOUNDARY:
                continue
            for v in hole.vertices:
                if VertexRole.CONNECTION_REFLEX in v.roles or VertexRole.BOUNDARY_REFLEX in v.roles:
                    seen[v.point] = seen.get(v.point, 0) + 1
        shared = sum(1 for count in seen.values() if count > 1)
        checks.append(StructureCheck(StructureRule.REFLEX_NOT_SHARED, shared == 0, None,
                                     {"shared_reflex_vertices": shared}))
    report = StructureReport(arrangement.cake.kind, tuple(holes), tuple(checks))
    for failed in report.violations:
        logger.info("structure check failed: %s", failed)
    return report


def plane_hole_count(toppings: Sequence[Rect]) -> int:
    """Components of the plane minus the rectangles, the unbounded one included."""
    if len(toppings) < 3:
        raise ArrangementError(f"plane hole count needs m >= 3, got {len(toppings)}")
    return len(plane_components(list(toppings)))


def rect_contact_graph(toppings: Sequence[Rect]) -> nx.Graph:
    """Toppings as nodes, joined when their closed rectangles meet."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(toppings)))
    for i, a in enumerate(toppings):
        for j in range(i + 1, len(toppings)):
            b = toppings[j]
            if a.x0 <= b.x1 and b.x0 <= a.x1 and a.y0 <= b.y1 and b.y0 <= a.y1:
                graph.add_edge(i, j)
    return graph


def convex_contact_graph(toppings: Sequence[ConvexPolygon]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(toppings)))
    for i, a in enumerate(toppings):
        for j in range(i + 1, len(toppings)):
            if a.boundaries_meet(toppings[j]):
                graph.add_edge(i, j)
    return graph


@dataclass(frozen=True)
class ContactGraphSummary:
    vertices: int
    edges: int
    components: int

    @property
    def faces(self) -> int:
        """Faces of a plane embedding, from Euler's formula with several components."""
        return self.edges - self.vertices + 1 + self.components

    @property
    def face_limit(self) -> Optional[int]:
        """Most faces allowed by 2|E| >= 3|F|; the inequality needs three or more edges."""
        if self.vertices < 3 or self.edges < 3:
            return None
        return euler_face_bound(self.vertices, self.edges)

    @property
    def consistent(self) -> bool:
        return self.face_limit is None or self.faces <= self.face_limit

    @classmethod
    def of(cls, graph: nx.Graph) -> "ContactGraphSummary":
        return cls(graph.number_of_nodes(), graph.number_of_edges(), nx.number_connected_components(graph))


@dataclass
class ConvexHole:
    """A free component found by the vertical decomposition."""

    trapezoids: List[Tuple[Point, ...]]
    unbounded: bool = False
    area: Fraction = Fraction(0)
    outline: Optional[ConvexPolygon] = None

    @property
    def convex(self) -> bool:
        return self.outline is not None and self.outline.area == self.area


def _chain_at(poly: ConvexPolygon, x_lo: Fraction, x_hi: Fraction):
    """Lower and upper boundary lines of ``poly`` over the slab, as y at both ends."""
    spans = []
    mid = (x_lo + x_hi) / 2
    for a, b in poly.edges():
        if a.x == b.x or not (min(a.x, b.x) <= x_lo and x_hi <= max(a.x, b.x)):
            continue
        slope = (b.y - a.y) / (b.x - a.x)
        at = lambda x, a=a, slope=slope: a.y + slope * (x - a.x)
        spans.append((at(mid), at(x_lo), at(x_hi)))
    spans.sort()
    lower, upper = spans[0], spans[-1]
    return (lower[1], lower[2]), (upper[1], upper[2]), (lower[0], upper[0])


def _vertical_decomposition(
    obstacles: Sequence[ConvexPolygon],
    container: ConvexPolygon,
) -> nx.Graph:
    """Free trapezoids of ``container`` minus ``obstacles`` joined across slab walls."""
    xs = sorted({p.x for poly in (*obstacles, container) for p in poly.vertices})
    graph = nx.Graph()
    previous: List[Tuple[int, Tuple[Fraction, Fraction]]] = []
    node = 0
    for x_lo, x_hi in zip(xs, xs[1:]):
        stack = []
        for poly in obstacles:
            box = poly.bounding_box()
            if box.x0 <= x_lo and x_hi <= box.x1:
                lower, upper, mids = _chain_at(poly, x_lo, x_hi)
                stack.append((mids[0], lower, upper))
        stack.sort()
        c_lower, c_upper, _ = _chain_at(container, x_lo, x_hi)
        floors = [c_lower] + [upper for _, _, upper in stack]
        ceilings = [lower for _, lower, _ in stack] + [c_upper]
        current = []
        for floor, ceiling in zip(floors, ceilings):
            if floor[0] + floor[1] >= ceiling[0] + ceiling[1]:
                continue
            corners = (
                Point(x_lo, floor[0]), Point(x_hi, floor[1]),
                Point(x_hi, ceiling[1]), Point(x_lo, ceiling[0]),
            )
            area = ((ceiling[0] - floor[0]) + (ceiling[1] - floor[1])) * (x_hi - x_lo) / 2
            graph.add_node(node, corners=corners, area=area,
                           touches_container=floor is c_lower or ceiling is c_upper,
                           x_lo=x_lo)
            left = (floor[0], ceiling[0])
            for other, right in previous:
                if max(left[0], right[0]) < min(left[1], right[1]):
                    graph.add_edge(node, other)
            current.append((node, (floor[1], ceiling[1])))
            node += 1
        previous = current
    return graph


def convex_holes(
    toppings: Sequence[ConvexPolygon],
    container: Optional[ConvexPolygon] = None,
) -> List[ConvexHole]:
    """Components of ``container`` (or the plane) minus disjoint convex toppings."""
    plane = container is None
    if plane:
        xs = [p.x for t in toppings for p in t.vertices]
        ys = [p.y for t in toppings for p in t.vertices]
        container = ConvexPolygon.from_coords([
            (min(xs) - 1, min(ys) - 1), (max(xs) + 1, min(ys) - 1),
            (max(xs) + 1, max(ys) + 1), (min(xs) - 1, max(ys) + 1),
        ])
    graph = _vertical_decomposition(toppings, container)
    holes = []
    for members in nx.connected_components(graph):
        members = sorted(members)
        data = [graph.nodes[n] for n in members]
        hole = ConvexHole(
            trapezoids=[d["corners"] for d in data],
            unbounded=plane and any(d["touches_container"] for d in data),
            area=sum((d["area"] for d in data), Fraction(0)),
        )
        if not hole.unbounded:
            hull = convex_hull([p for d in data for p in d["corners"]])
            if len(hull) >= 3:
                hole.outline = ConvexPolygon(hull)
        holes.append(hole)
    holes.sort(key=lambda h: (not h.unbounded, min(p for t in h.trapezoids for p in t)))
    return holes


def convex_hole_count(toppings: Sequence[ConvexPolygon]) -> Tuple[int, ContactGraphSummary]:
    """Holes of the plane minus convex toppings, with the contact-graph cross-check."""
    if len(toppings) < 3:
        raise ArrangementError(f"convex hole count needs m >= 3, got {len(toppings)}")
    for i, a in enumerate(toppings):
        if not isinstance(a, ConvexPolygon):
            raise InvalidPolygonError(f"topping {i} is not a convex polygon")
        for j in range(i + 1, len(toppings)):
            if a.interiors_overlap(toppings[j]):
                raise ArrangementError(f"toppings {i} and {j} overlap")
    holes = convex_holes(toppings)
    summary = ContactGraphSummary.of(convex_contact_graph(toppings))
    if not summary.consistent:
        logger.warning("contact graph has %d faces, more than 2|E| >= 3|F| allows", summary.faces)
    if len(holes) > summary.faces:
        logger.warning("%d holes but the contact graph only has %d faces", len(holes), summary.faces)
    return len(holes), summary
