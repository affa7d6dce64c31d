"""
Arrangement value objects.

Nothing here is persisted: arrangements live in ``.arr.json`` files and
reports in ``.report.json`` files (see ``arrangements.schemas``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from django.db import models

from arrangements.exceptions import ArrangementError, UnsupportedCakeError
from arrangements.services.geometry import (
    ConvexPolygon,
    Rect,
    RectilinearPolygon,
    RectilinearRegion,
    contains,
    interior_disjoint,
)

Topping = Union[Rect, ConvexPolygon]
Region = Union[Rect, RectilinearPolygon]
Piece = Union[Rect, RectilinearPolygon, RectilinearRegion, ConvexPolygon]


class CakeKind(models.TextChoices):
    RECTANGLE = 'rectangle', 'Rectangle'
    RECTILINEAR = 'rectilinear', 'Rectilinear polygon'
    PLANE = 'plane', 'Unbounded plane'
    CONVEX = 'convex', 'Convex container'


class BoundName(models.TextChoices):
    THM1 = 'thm1', 'Polygonal pieces: no blanks'
    THM2 = 'thm2', 'Convex pieces: b <= 2m-5'
    THM2_PRIME = 'thm2prime', 'Convex plane: holes <= 2m-4'
    THM3 = 'thm3', 'Rectangles: b <= m-doubleroot(m)'
    THM3_PRIME = 'thm3prime', 'Rectangle plane: holes <= m-2'
    THM8 = 'thm8', 'Rectilinear cake: b <= m+T-doubleroot(m)'
    LEMMA6 = 'lemma6', 'Perfect partition: 4-vertices <= m-doubleroot(m)'


@dataclass(frozen=True)
class Cake:
    kind: str
    shape: Optional[Union[Rect, RectilinearPolygon, ConvexPolygon]] = None

    @classmethod
    def rectangle(cls, rect: Rect) -> "Cake":
        return cls(CakeKind.RECTANGLE, rect)

    @classmethod
    def rectilinear(cls, poly: RectilinearPolygon) -> "Cake":
        return cls(CakeKind.RECTILINEAR, poly)

    @classmethod
    def plane(cls) -> "Cake":
        return cls(CakeKind.PLANE, None)

    @classmethod
    def convex(cls, poly: ConvexPolygon) -> "Cake":
        return cls(CakeKind.CONVEX, poly)

    @property
    def is_bounded_rectilinear(self) -> bool:
        return self.kind in (CakeKind.RECTANGLE, CakeKind.RECTILINEAR)

    def region(self) -> Region:
        """The cake as a rectangle or rectilinear polygon."""
        if not self.is_bounded_rectilinear:
            raise UnsupportedCakeError(f"{self.kind} cake has no rectilinear region")
        return self.shape

    def polygon(self) -> RectilinearPolygon:
        shape = self.region()
        return shape.to_polygon() if isinstance(shape, Rect) else shape

    def bounding_box(self) -> Rect:
        shape = self.region()
        return shape if isinstance(shape, Rect) else shape.bounding_box()

    @property
    def area(self) -> Fraction:
        return self.region().area

    @property
    def reflex_count(self) -> int:
        if self.kind == CakeKind.RECTILINEAR:
            return self.shape.reflex_count
        return 0


@dataclass(frozen=True)
class Arrangement:
    """A cake and its toppings, in processing order."""

    cake: Cake
    toppings: Tuple[Topping, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "toppings", tuple(self.toppings))
        labels = tuple(self.labels) or tuple(f"Z{i + 1}" for i in range(len(self.toppings)))
        if len(labels) != len(self.toppings):
            raise ArrangementError("one label per topping is required")
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.toppings)

    def replace_topping(self, index: int, topping: Topping) -> "Arrangement":
        toppings = list(self.toppings)
        toppings[index] = topping
        return replace(self, toppings=tuple(toppings))

    def with_toppings(self, toppings: Sequence[Topping]) -> "Arrangement":
        return replace(self, toppings=tuple(toppings))

    def others(self, index: int) -> List[Topping]:
        return [t for j, t in enumerate(self.toppings) if j != index]


@dataclass(frozen=True)
class Violation:
    rule: str
    indices: Tuple[int, ...]
    message: str

    def __str__(self):
        return f"{self.rule}({','.join(map(str, self.indices))})"


def validate(arrangement: Arrangement) -> List[Violation]:
    """All invariant violations of an arrangement; empty when it is valid."""
    violations: List[Violation] = []
    cake = arrangement.cake
    toppings = arrangement.toppings
    if not toppings:
        violations.append(Violation("empty", (), "an arrangement needs at least one topping"))
    if cake.kind == CakeKind.CONVEX:
        expected = ConvexPolygon
    elif cake.kind == CakeKind.PLANE and toppings and isinstance(toppings[0], ConvexPolygon):
        expected = ConvexPolygon
    else:
        expected = Rect
    for index, topping in enumerate(toppings):
        if not isinstance(topping, expected):
            violations.append(Violation(
                "kind-mismatch", (index,),
                f"topping {index} is not a {expected.__name__} as the {cake.kind} cake requires",
            ))
    if any(v.rule == "kind-mismatch" for v in violations):
        return violations
    for i, j in _overlapping_pairs(toppings):
        violations.append(Violation(
            "overlap", (i, j), f"toppings {i} and {j} have intersecting interiors",
        ))
    if cake.kind != CakeKind.PLANE:
        for index, topping in enumerate(toppings):
            if not _inside(cake, topping):
                violations.append(Violation(
                    "not-contained", (index,), f"topping {index} leaves the cake",
                ))
    return violations


def _overlap(a: Topping, b: Topping) -> bool:
    if isinstance(a, Rect):
        return not interior_disjoint(a, b)
    return a.interiors_overlap(b)


def _overlapping_pairs(toppings: Sequence[Topping]) -> List[Tuple[int, int]]:
    """Index pairs with intersecting interiors, swept left to right by bounding box."""
    boxes = [t if isinstance(t, Rect) else t.bounding_box() for t in toppings]
    order = sorted(range(len(toppings)), key=lambda k: boxes[k].x0)
    pairs = []
    for position, i in enumerate(order):
        for j in order[position + 1:]:
            if boxes[j].x0 >= boxes[i].x1:
                break
            if _overlap(toppings[i], toppings[j]):
                pairs.append((min(i, j), max(i, j)))
    return sorted(pairs)


def _inside(cake: Cake, topping: Topping) -> bool:
    if cake.kind == CakeKind.CONVEX:
        return all(cake.shape.contains_point(p) for p in topping.vertices)
    return contains(cake.shape, topping)


@dataclass(frozen=True)
class PartitionReport:
    """Pieces and blanks covering a cake, with the checked bound."""

    pieces: Tuple[Tuple[str, Piece], ...]
    blanks: Tuple[Union[Rect, ConvexPolygon], ...]
    m: int
    T: int
    bound_name: str
    bound_value: int
    observed: int
    satisfied: bool
    cake: Optional[Cake] = None
    notes: Tuple[str, ...] = field(default=())

    @property
    def b(self) -> int:
        return len(self.blanks)

    @property
    def tight(self) -> bool:
        return self.observed == self.bound_value
