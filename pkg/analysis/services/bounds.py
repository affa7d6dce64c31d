"""
Blank-count bounds.

``doubleroot(m)`` is the ceiling of 2*sqrt(m) - 1, computed with integer
arithmetic only.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from math import isqrt
from typing import Dict, Optional, Sequence, Tuple

from arrangements.exceptions import ArrangementError, BoundDomainError
from arrangements.models import Arrangement, BoundName, CakeKind
from arrangements.services.geometry import Point, Rect, interior_disjoint

logger = logging.getLogger(__name__)

_MEETING = {2: 3, 4: 4}


def doubleroot(m: int) -> int:
    """ceil(2*sqrt(m) - 1): 2k when k^2 < m <= k^2 + k, 2k + 1 when k^2 + k < m <= (k + 1)^2."""
    if m < 1:
        raise BoundDomainError(f"doubleroot needs m >= 1, got {m}")
    k = isqrt(m - 1)
    return 2 * k if m <= k * k + k else 2 * k + 1


def lemma_k1k2_holds(k1: int, k2: int, t: int) -> bool:
    """(k1 - 1)(k2 - 1) - t <= k1*k2 - t - doubleroot(k1*k2 - t)."""
    if k1 < 1 or k2 < 1 or t < 0:
        raise BoundDomainError(f"need k1, k2 >= 1 and t >= 0, got ({k1}, {k2}, {t})")
    n = k1 * k2 - t
    if n < 1:
        raise BoundDomainError(f"k1*k2 - t must be positive, got {n}")
    return (k1 - 1) * (k2 - 1) - t <= n - doubleroot(n)


def require_perfect_partition(cake: Rect, rects: Sequence[Rect]) -> None:
    """Raise unless ``rects`` cover ``cake`` exactly, without overlaps."""
    for i, rect in enumerate(rects):
        if not cake.contains_rect(rect):
            raise ArrangementError(f"rectangle {i} {rect} leaves the cake")
        for j in range(i + 1, len(rects)):
            if not interior_disjoint(rect, rects[j]):
                raise ArrangementError(f"rectangles {i} and {j} overlap")
    covered = sum((r.area for r in rects), 0)
    if covered != cake.area:
        raise ArrangementError(f"rectangles cover area {covered} of a cake of area {cake.area}")


def partition_of(partition) -> Tuple[Rect, Tuple[Rect, ...]]:
    if isinstance(partition, Arrangement):
        if partition.cake.kind != CakeKind.RECTANGLE:
            raise ArrangementError("a perfect partition needs a rectangle cake")
        return partition.cake.shape, tuple(partition.toppings)
    cake, rects = partition
    return cake, tuple(rects)


def meeting_counts(cake: Rect, rects: Sequence[Rect]) -> Dict[Point, int]:
    """For every rectangle corner inside the cake, how many rectangles meet there.

    In a perfect partition an interior point that is a corner of two
    rectangles lies on the side of a third, and a corner of four is a
    4-vertex.
    """
    corners = Counter(
        p for rect in rects for p in rect.corners()
        if cake.x0 < p.x < cake.x1 and cake.y0 < p.y < cake.y1
    )
    return {p: _MEETING.get(n, n) for p, n in corners.items()}


@dataclass(frozen=True)
class VertexCensus:
    three_vertices: int
    four_vertices: int


def four_vertex_census(partition) -> VertexCensus:
    """Interior points where exactly three / four rectangles of a perfect partition meet."""
    cake, rects = partition_of(partition)
    require_perfect_partition(cake, rects)
    counts = meeting_counts(cake, rects).values()
    return VertexCensus(
        three_vertices=sum(1 for c in counts if c == 3),
        four_vertices=sum(1 for c in counts if c == 4),
    )


_MIN_M = {
    BoundName.THM1: 1,
    BoundName.THM2: 3,
    BoundName.THM2_PRIME: 3,
    BoundName.THM3: 1,
    BoundName.THM3_PRIME: 3,
    BoundName.THM8: 1,
    BoundName.LEMMA6: 1,
}


def bound_limit(name: str, m: int, T: int = 0) -> int:
    name = BoundName(name)
    if m < _MIN_M[name]:
        raise BoundDomainError(f"{name} is stated for m >= {_MIN_M[name]}, got m={m}")
    if T < 0:
        raise BoundDomainError(f"T must be nonnegative, got {T}")
    if name == BoundName.THM1:
        return 0
    if name == BoundName.THM2:
        return 2 * m - 5
    if name == BoundName.THM2_PRIME:
        return 2 * m - 4
    if name == BoundName.THM3_PRIME:
        return m - 2
    if name == BoundName.THM8:
        return m + T - doubleroot(m)
    return m - doubleroot(m)


@dataclass(frozen=True)
class BoundVerdict:
    bound_name: str
    m: int
    T: int
    observed: int
    limit: int

    @property
    def satisfied(self) -> bool:
        return self.observed <= self.limit

    @property
    def tight(self) -> bool:
        return self.observed == self.limit

    def __str__(self):
        state = "tight" if self.tight else ("ok" if self.satisfied else "VIOLATED")
        return f"{self.bound_name}: observed {self.observed} <= {self.limit} ({state})"


def check_bound(name: str, m: int, T: int, observed: int) -> BoundVerdict:
    limit = bound_limit(name, m, T)
    verdict = BoundVerdict(str(BoundName(name)), m, T if name == BoundName.THM8 else 0, observed, limit)
    if not verdict.satisfied:
        logger.warning("bound %s violated: m=%d T=%d observed=%d limit=%d", name, m, T, observed, limit)
    return verdict


def bound_table(m: int, T: int = 0) -> Dict[str, int]:
    """Every bound that is stated for this m."""
    return {
        str(name): bound_limit(name, m, T)
        for name in BoundName
        if m >= _MIN_M[name]
    }


def euler_face_bound(vertices: int, edges: Optional[int] = None, min_face_degree: int = 3) -> int:
    """Most faces a connected plane graph can have when every face has degree >= d.

    From |V| - |E| + |F| = 2 and 2|E| >= d|F|: |F| <= 2(|V| - 2) / (d - 2),
    which is 2|V| - 4 for d = 3 and |V| - 2 for d = 4.
    """
    if vertices < 3 or min_face_degree < 3:
        raise BoundDomainError("the face bound needs |V| >= 3 and face degree >= 3")
    limit = 2 * (vertices - 2) // (min_face_degree - 2)
    if edges is not None:
        limit = min(limit, 2 * edges // min_face_degree)
    return limit
