"""
One entry point per bound: pick the right hole analysis for the cake
and wrap the count in a ``PartitionReport``.
"""

import logging
from typing import Optional

from analysis.services.bounds import check_bound, four_vertex_census
from analysis.services.expansion import is_maximal
from analysis.services.holes import (
    ContactGraphSummary,
    StructureReport,
    convex_hole_count,
    convex_holes,
    plane_hole_count,
    rect_contact_graph,
)
from analysis.services.transforms import absorb_holes, contract_all, partition_holes
from arrangements.exceptions import ArrangementError, UnsupportedCakeError
from arrangements.models import Arrangement, BoundName, CakeKind, PartitionReport, validate
from arrangements.schemas import StructureReportFile
from arrangements.services.codec import cake_document, dumps, vertices_document
from arrangements.services.geometry import ConvexPolygon, Rect

logger = logging.getLogger(__name__)

_CAKES = {
    BoundName.THM1: (CakeKind.RECTANGLE, CakeKind.RECTILINEAR),
    BoundName.THM2: (CakeKind.CONVEX,),
    BoundName.THM2_PRIME: (CakeKind.PLANE, CakeKind.CONVEX),
    BoundName.THM3: (CakeKind.RECTANGLE,),
    BoundName.THM3_PRIME: (CakeKind.PLANE,),
    BoundName.THM8: (CakeKind.RECTANGLE, CakeKind.RECTILINEAR),
    BoundName.LEMMA6: (CakeKind.RECTANGLE,),
}


def default_bound(arrangement: Arrangement) -> str:
    kind = arrangement.cake.kind
    if kind == CakeKind.RECTANGLE:
        return BoundName.THM3
    if kind == CakeKind.RECTILINEAR:
        return BoundName.THM8
    if kind == CakeKind.CONVEX:
        return BoundName.THM2
    if all(isinstance(t, Rect) for t in arrangement.toppings):
        return BoundName.THM3_PRIME
    return BoundName.THM2_PRIME


def _report(arrangement: Arrangement, name: str, observed: int, blanks=(), pieces=None, notes=()):
    verdict = check_bound(name, arrangement.m, arrangement.cake.reflex_count, observed)
    if pieces is None:
        pieces = tuple(zip(arrangement.labels, arrangement.toppings))
    return PartitionReport(
        pieces=tuple(pieces),
        blanks=tuple(blanks),
        m=arrangement.m,
        T=verdict.T,
        bound_name=verdict.bound_name,
        bound_value=verdict.limit,
        observed=verdict.observed,
        satisfied=verdict.satisfied,
        cake=arrangement.cake,
        notes=tuple(notes),
    )


def _maximality_note(arrangement: Arrangement) -> Optional[str]:
    if not arrangement.cake.is_bounded_rectilinear:
        return None
    verdict = is_maximal(arrangement)
    if verdict:
        return None
    index, larger = verdict.counterexample
    return f"not maximal: {arrangement.labels[index]} can grow {verdict.direction} to {larger}"


def _contact_note(summary: ContactGraphSummary) -> str:
    note = f"observed counts the unbounded hole; contact graph has {summary.faces} faces"
    if summary.face_limit is not None:
        note += f" of at most {summary.face_limit}"
    if not summary.consistent:
        logger.warning("contact graph breaks 2|E| >= 3|F|: %s", summary)
    return note


def analyze(arrangement: Arrangement, bound: Optional[str] = None) -> PartitionReport:
    """Count blanks (or holes, or 4-vertices) and check them against ``bound``."""
    violations = validate(arrangement)
    if violations:
        raise ArrangementError("invalid arrangement: " + ", ".join(map(str, violations)))
    name = BoundName(bound) if bound else BoundName(default_bound(arrangement))
    kind = arrangement.cake.kind
    if kind not in _CAKES[name]:
        raise UnsupportedCakeError(f"bound {name} does not apply to a {kind} cake")
    notes = []
    note = _maximality_note(arrangement)
    if note:
        notes.append(note)

    if name == BoundName.THM1:
        report = absorb_holes(arrangement)
        return _report(arrangement, name, report.observed, pieces=report.pieces, notes=notes)
    if name in (BoundName.THM3, BoundName.THM8):
        report = partition_holes(arrangement)
        return _report(arrangement, name, report.b, report.blanks, notes=notes)
    if name == BoundName.LEMMA6:
        partition, contracted = contract_all(arrangement)
        census = four_vertex_census(partition)
        notes.append(f"contracted {contracted} holes; {census.three_vertices} 3-vertices remain")
        return _report(
            arrangement, name, census.four_vertices,
            pieces=zip(partition.labels, partition.toppings), notes=notes,
        )
    if name == BoundName.THM3_PRIME:
        if not all(isinstance(t, Rect) for t in arrangement.toppings):
            raise UnsupportedCakeError("thm3prime counts holes of rectangles")
        holes = plane_hole_count(arrangement.toppings)
        summary = ContactGraphSummary.of(rect_contact_graph(arrangement.toppings))
        notes.append(_contact_note(summary))
        return _report(arrangement, name, holes, notes=notes)
    if not all(isinstance(t, ConvexPolygon) for t in arrangement.toppings):
        raise UnsupportedCakeError(f"{name} counts holes of convex polygons")
    if name == BoundName.THM2_PRIME:
        holes, summary = convex_hole_count(arrangement.toppings)
        notes.append(_contact_note(summary))
        return _report(arrangement, name, holes, notes=notes)

    holes = convex_holes(arrangement.toppings, arrangement.cake.shape)
    blanks = [h.outline for h in holes if h.convex]
    if len(blanks) < len(holes):
        notes.append(f"{len(holes) - len(blanks)} holes are not convex and are not listed as blanks")
        logger.warning("%d of %d holes are not convex", len(holes) - len(blanks), len(holes))
    return _report(arrangement, name, len(holes), blanks, notes=notes)


def structure_document(arrangement: Arrangement, report: StructureReport) -> bytes:
    """Encode a structure report the way arrangement files are encoded."""
    document = StructureReportFile.model_validate({
        "kind": "structure",
        "cake": cake_document(arrangement.cake),
        "ok": report.ok,
        "holes": [
            {
                "kind": str(h.kind),
                "vertices": vertices_document(h.outline.vertices),
                "simply_connected": h.simply_connected,
                "enclosed_toppings": list(h.enclosed_toppings),
            }
            for h in report.holes
        ],
        "checks": [
            {"rule": str(c.rule), "passed": c.passed, "hole": c.hole, "counts": dict(c.counts)}
            for c in report.checks
        ],
    })
    return dumps(document.model_dump(mode="json"))
