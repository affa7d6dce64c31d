"""
Seeded fuzzing of the blank bounds.

Every item of a ``FuzzConfig`` stream is checked independently, so the
items run on a thread pool; results are read back in index order and
the first failure is always the one with the smallest index.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional, Union

from django.conf import settings

from analysis.services.bounds import BoundVerdict, check_bound, four_vertex_census
from analysis.services.expansion import greedy_expand
from analysis.services.holes import HoleKind, convex_hole_count, extract_holes, plane_hole_count
from analysis.services.transforms import absorb_holes, contract_all, partition_holes, saturate_to_grid
from arrangements.exceptions import BoundDomainError, GeometryError, UnsupportedCakeError
from arrangements.models import Arrangement, BoundName
from arrangements.services.codec import write_file
from arrangements.services.generators import FuzzConfig, arrangement_at

logger = logging.getLogger(__name__)

_DEFAULT_BOUND = {
    "rectangle": BoundName.THM3,
    "rectilinear": BoundName.THM8,
    "plane": BoundName.THM3_PRIME,
    "convex": BoundName.THM2_PRIME,
}

_ALLOWED = {
    "rectangle": (BoundName.THM1, BoundName.THM3, BoundName.THM8, BoundName.LEMMA6),
    "rectilinear": (BoundName.THM1, BoundName.THM8),
    "plane": (BoundName.THM3_PRIME,),
    "convex": (BoundName.THM2_PRIME,),
}


@dataclass(frozen=True)
class FuzzResult:
    index: int
    arrangement: Arrangement
    verdict: Optional[BoundVerdict] = None
    problem: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.problem is not None or (self.verdict is not None and not self.verdict.satisfied)

    def describe(self) -> str:
        if self.problem:
            return self.problem
        return str(self.verdict)


@dataclass(frozen=True)
class FuzzOutcome:
    checked: int
    tight: int
    failure: Optional[FuzzResult] = None
    failure_path: Optional[Path] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _rectangle_holes(arrangement: Arrangement) -> Union[int, str]:
    holes = extract_holes(arrangement)
    for hole in holes:
        if hole.kind != HoleKind.INNER or not hole.is_rectangle:
            return f"hole {hole.region} of a maximal arrangement is not an inner rectangle"
    return len(holes)


def check_instance(cfg: FuzzConfig, bound: str, index: int) -> FuzzResult:
    """Expand item ``index`` greedily (bounded cakes) and check it against ``bound``."""
    arrangement = arrangement_at(cfg, index)
    m = arrangement.m
    try:
        if cfg.cake_kind == "plane":
            return FuzzResult(index, arrangement, check_bound(bound, m, 0, plane_hole_count(arrangement.toppings)))
        if cfg.cake_kind == "convex":
            holes, _ = convex_hole_count(arrangement.toppings)
            return FuzzResult(index, arrangement, check_bound(bound, m, 0, holes))
        arrangement = greedy_expand(arrangement)
        if bound == BoundName.THM3:
            holes = _rectangle_holes(arrangement)
            if isinstance(holes, str):
                return FuzzResult(index, arrangement, problem=holes)
            return FuzzResult(index, arrangement, check_bound(bound, m, 0, holes))
        if bound == BoundName.THM8:
            report = partition_holes(arrangement)
            return FuzzResult(index, arrangement, check_bound(bound, m, report.T, report.b))
        if bound == BoundName.THM1:
            report = absorb_holes(arrangement)
            if len(report.pieces) != m or report.b:
                return FuzzResult(index, arrangement, problem=f"{len(report.pieces)} pieces and {report.b} blanks")
            return FuzzResult(index, arrangement, check_bound(bound, m, 0, report.b))
        partition, contracted = contract_all(arrangement)
        census = four_vertex_census(partition)
        summary = saturate_to_grid(partition)
        if summary.m != m or census.four_vertices < contracted:
            return FuzzResult(index, arrangement, problem=(
                f"contracted {contracted} holes into {census.four_vertices} 4-vertices; "
                f"grid {summary.k1}x{summary.k2} - {summary.t} for m={m}"
            ))
        return FuzzResult(index, arrangement, check_bound(bound, m, 0, census.four_vertices))
    except GeometryError as exc:
        return FuzzResult(index, arrangement, problem=f"{type(exc).__name__}: {exc}")


def run_fuzz(
    cfg: FuzzConfig,
    bound: Optional[str] = None,
    workers: Optional[int] = None,
    failure_dir: Optional[Path] = None,
) -> FuzzOutcome:
    bound = BoundName(bound) if bound else _DEFAULT_BOUND[cfg.cake_kind]
    if bound not in _ALLOWED[cfg.cake_kind]:
        raise UnsupportedCakeError(f"cannot fuzz {bound} on {cfg.cake_kind} cakes")
    workers = max(1, min(workers or settings.BLANKS_FUZZ_WORKERS, cfg.iterations or 1))
    if cfg.cake_kind in ("plane", "convex") and cfg.m < 3:
        raise BoundDomainError(f"{bound} is stated for m >= 3, got m={cfg.m}")
    logger.info(
        "fuzzing %s: seed=%d m=%d iterations=%d workers=%d",
        bound, cfg.seed, cfg.m, cfg.iterations, workers,
    )
    checked = tight = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for result in pool.map(partial(check_instance, cfg, bound), range(cfg.iterations)):
            checked += 1
            if result.failed:
                path = _write_failure(cfg, result, failure_dir)
                logger.warning("iteration %d failed: %s", result.index, result.describe())
                return FuzzOutcome(checked, tight, result, path)
            if result.verdict.tight:
                tight += 1
            if checked % 100 == 0:
                logger.info("%d/%d instances ok", checked, cfg.iterations)
    return FuzzOutcome(checked, tight)


def _write_failure(cfg: FuzzConfig, result: FuzzResult, failure_dir: Optional[Path]) -> Path:
    directory = Path(failure_dir or settings.BLANKS_FAILURE_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"fuzz-{cfg.cake_kind}-{cfg.seed}-{result.index}.arr.json"
    write_file(path, result.arrangement)
    return path
