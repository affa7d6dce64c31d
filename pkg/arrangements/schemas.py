# arrangements/schemas.py

import re
from math import gcd
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator


_RATIONAL = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def _canonical_rational(value):
    """Accept "p" or "p/q" in lowest terms; ints are taken as they are."""
    if isinstance(value, bool):
        raise ValueError("invalid rational: boolean")
    if isinstance(value, int):
        return str(value)
    if not isinstance(value, str):
        raise ValueError(f"invalid rational {value!r}: expected a \"p/q\" string")
    match = _RATIONAL.match(value.strip())
    if not match:
        raise ValueError(f"invalid rational {value!r}")
    num = int(match.group(1))
    if match.group(2) is None:
        return str(num)
    den = int(match.group(2))
    if den == 0:
        raise ValueError(f"invalid rational {value!r}: zero denominator")
    g = gcd(abs(num), den)
    if g != 1 or den == 1:
        normal = f"{num // g}" if den // g == 1 else f"{num // g}/{den // g}"
        raise ValueError(f"non-canonical rational {value!r} (normalizes to {normal})")
    return f"{num}/{den}"


RationalText = Annotated[str, BeforeValidator(_canonical_rational)]
RectBounds = Tuple[RationalText, RationalText, RationalText, RationalText]
Vertex = Tuple[RationalText, RationalText]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CakeSchema(_Strict):
    """Cake geometry; which field is present depends on ``type``"""
    type: Literal["rectangle", "rectilinear", "plane", "convex"]
    rect: Optional[RectBounds] = Field(None, description="Rectangle cake [lox, loy, hix, hiy]")
    vertices: Optional[List[Vertex]] = Field(None, description="Polygon vertex list")

    @model_validator(mode="after")
    def check_geometry(self):
        if self.type == "rectangle" and (self.rect is None or self.vertices is not None):
            raise ValueError("rectangle cake needs exactly a 'rect' field")
        if self.type in ("rectilinear", "convex") and (self.vertices is None or self.rect is not None):
            raise ValueError(f"{self.type} cake needs exactly a 'vertices' field")
        if self.type == "plane" and (self.rect is not None or self.vertices is not None):
            raise ValueError("plane cake has no geometry")
        return self


class ShapeSchema(_Strict):
    """A labelled rectangle or polygon (topping or piece)"""
    label: str = Field(description="Display name, Z1..Zm by default")
    rect: Optional[RectBounds] = None
    vertices: Optional[List[Vertex]] = None
    holes: Optional[List[List[Vertex]]] = Field(None, description="Inner boundaries of a piece with holes")

    @model_validator(mode="after")
    def check_one_shape(self):
        if (self.rect is None) == (self.vertices is None):
            raise ValueError("give exactly one of 'rect' or 'vertices'")
        if self.holes is not None and self.vertices is None:
            raise ValueError("'holes' needs an outer 'vertices' boundary")
        return self


class ArrangementFile(_Strict):
    """Top level of an ``.arr.json`` file"""
    kind: Literal["arrangement"]
    cake: CakeSchema
    toppings: List[ShapeSchema] = Field(min_length=1)


class BoundSchema(_Strict):
    name: Literal["thm1", "thm2", "thm2prime", "thm3", "thm3prime", "thm8", "lemma6"]
    value: int
    observed: int = Field(ge=0)
    satisfied: bool


class ReportFile(_Strict):
    """Top level of a ``.report.json`` file"""
    kind: Literal["report"]
    cake: Optional[CakeSchema] = None
    m: int = Field(ge=0)
    T: int = Field(ge=0)
    b: int = Field(ge=0)
    bound: BoundSchema
    pieces: List[ShapeSchema] = Field(default_factory=list)
    blanks: List[Union[RectBounds, List[Vertex]]] = Field(
        default_factory=list, description="Rectangles, or vertex lists for convex blanks",
    )
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_blank_count(self):
        if self.b != len(self.blanks):
            raise ValueError(f"b={self.b} but {len(self.blanks)} blanks are listed")
        return self


class StructureCheckSchema(_Strict):
    rule: str
    passed: bool
    hole: Optional[int] = None
    counts: Dict[str, int] = Field(default_factory=dict)


class HoleSchema(_Strict):
    kind: Literal["inner", "boundary"]
    vertices: List[Vertex] = Field(description="Outline, counter-clockwise")
    simply_connected: bool = True
    enclosed_toppings: List[int] = Field(default_factory=list)


class StructureReportFile(_Strict):
    """Top level of a ``.structure.json`` file written by ``verify``"""
    kind: Literal["structure"]
    cake: CakeSchema
    ok: bool
    holes: List[HoleSchema] = Field(default_factory=list)
    checks: List[StructureCheckSchema] = Field(default_factory=list)

