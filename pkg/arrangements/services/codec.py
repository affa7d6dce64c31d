"""
Interchange format: UTF-8 JSON, rationals as "p/q" strings.

``encode`` is deterministic (sorted keys, fixed indent, trailing
newline) so golden files can be diffed byte for byte.
"""

import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from arrangements.exceptions import DecodeError
from arrangements.models import Arrangement, Cake, CakeKind, PartitionReport
from arrangements.schemas import ArrangementFile, CakeSchema, ReportFile, ShapeSchema
from arrangements.services.geometry import (
    ConvexPolygon,
    Point,
    Rect,
    RectilinearPolygon,
    RectilinearRegion,
    format_rational,
    to_rational,
)

logger = logging.getLogger(__name__)

Decoded = Union[Arrangement, PartitionReport]


def _rect_out(rect: Rect):
    return [format_rational(v) for v in rect.bounds]


def vertices_document(points):
    return [[format_rational(p.x), format_rational(p.y)] for p in points]


def _rect_in(bounds) -> Rect:
    return Rect.from_bounds(*(to_rational(v) for v in bounds))


def _points_in(vertices):
    return tuple(Point(to_rational(x), to_rational(y)) for x, y in vertices)


def cake_document(cake: Cake) -> dict:
    if cake.kind == CakeKind.RECTANGLE:
        return {"type": "rectangle", "rect": _rect_out(cake.shape)}
    if cake.kind == CakeKind.PLANE:
        return {"type": "plane"}
    return {"type": str(cake.kind), "vertices": vertices_document(cake.shape.vertices)}


def _cake_in(schema: CakeSchema) -> Cake:
    if schema.type == "rectangle":
        return Cake.rectangle(_rect_in(schema.rect))
    if schema.type == "rectilinear":
        return Cake.rectilinear(RectilinearPolygon(_points_in(schema.vertices)))
    if schema.type == "convex":
        return Cake.convex(ConvexPolygon(_points_in(schema.vertices)))
    return Cake.plane()


def _shape_out(label: str, shape) -> dict:
    if isinstance(shape, Rect):
        return {"label": label, "rect": _rect_out(shape)}
    if isinstance(shape, RectilinearRegion):
        document = {"label": label, "vertices": vertices_document(shape.outer.vertices)}
        if shape.holes:
            document["holes"] = [vertices_document(h.vertices) for h in shape.holes]
        return document
    return {"label": label, "vertices": vertices_document(shape.vertices)}


def _axis_parallel(points) -> bool:
    return all(a.x == b.x or a.y == b.y for a, b in zip(points, points[1:] + points[:1]))


def _shape_in(schema: ShapeSchema, convex: bool):
    if schema.rect is not None:
        return _rect_in(schema.rect)
    points = _points_in(schema.vertices)
    if schema.holes is not None:
        holes = tuple(RectilinearPolygon(_points_in(h)) for h in schema.holes)
        return RectilinearRegion(RectilinearPolygon(points), holes)
    return ConvexPolygon(points) if convex else RectilinearPolygon(points)


def _piece_in(schema: ShapeSchema):
    """Report pieces are rectilinear unless some edge is slanted."""
    convex = schema.vertices is not None and not _axis_parallel(_points_in(schema.vertices))
    return _shape_in(schema, convex=convex)


def _blank_out(blank):
    if isinstance(blank, Rect):
        return _rect_out(blank)
    return vertices_document(blank.vertices)


def _blank_in(blank):
    if isinstance(blank[0], str):
        return _rect_in(blank)
    return ConvexPolygon(_points_in(blank))


def to_document(obj: Decoded) -> dict:
    if isinstance(obj, Arrangement):
        return {
            "kind": "arrangement",
            "cake": cake_document(obj.cake),
            "toppings": [_shape_out(label, t) for label, t in zip(obj.labels, obj.toppings)],
        }
    document = {
        "kind": "report",
        "m": obj.m,
        "T": obj.T,
        "b": obj.b,
        "bound": {
            "name": str(obj.bound_name),
            "value": obj.bound_value,
            "observed": obj.observed,
            "satisfied": obj.satisfied,
        },
        "pieces": [_shape_out(label, region) for label, region in obj.pieces],
        "blanks": [_blank_out(r) for r in obj.blanks],
        "notes": list(obj.notes),
    }
    if obj.cake is not None:
        document["cake"] = cake_document(obj.cake)
    return document


def dumps(document: dict) -> bytes:
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def encode(obj: Decoded) -> bytes:
    return dumps(to_document(obj))


def _line_of(text: str, token):
    if token is None:
        return None
    needle = json.dumps(token) if not isinstance(token, str) else f'"{token}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def decode(data: Union[bytes, str]) -> Decoded:
    """Parse an arrangement or report file; reject anything non-canonical."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"malformed JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(raw, dict):
        raise DecodeError("top level must be an object", line=1)
    kind = raw.get("kind")
    model = {"arrangement": ArrangementFile, "report": ReportFile}.get(kind)
    if model is None:
        raise DecodeError(f"unknown kind {kind!r}", line=_line_of(text, "kind"), field="kind")
    try:
        document = model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        token = first.get("input")
        if isinstance(token, (dict, list)):
            token = None
        raise DecodeError(
            f"{first['msg']} at field {location}",
            line=_line_of(text, token),
            field=location,
        ) from exc
    try:
        return _from_document(document)
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc


def _from_document(document) -> Decoded:
    if isinstance(document, ArrangementFile):
        cake = _cake_in(document.cake)
        return Arrangement(
            cake=cake,
            toppings=tuple(_shape_in(t, convex=True) for t in document.toppings),
            labels=tuple(t.label for t in document.toppings),
        )
    return PartitionReport(
        pieces=tuple((p.label, _piece_in(p)) for p in document.pieces),
        blanks=tuple(_blank_in(r) for r in document.blanks),
        m=document.m,
        T=document.T,
        bound_name=document.bound.name,
        bound_value=document.bound.value,
        observed=document.bound.observed,
        satisfied=document.bound.satisfied,
        cake=_cake_in(document.cake) if document.cake is not None else None,
        notes=tuple(document.notes),
    )


def read_file(path: Union[str, Path]) -> Decoded:
    logger.debug("reading %s", path)
    return decode(Path(path).read_bytes())


def write_file(path: Union[str, Path], obj: Decoded) -> None:
    Path(path).write_bytes(encode(obj))
    logger.debug("wrote %s", path)
