import json
import tempfile
from io import StringIO
from math import isqrt
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings
from hypothesis import strategies as st

from analysis.services.bounds import (
    bound_limit,
    bound_table,
    check_bound,
    doubleroot,
    euler_face_bound,
    four_vertex_census,
    lemma_k1k2_holds,
)
from analysis.services.expansion import (
    CAKE_BOUNDARY,
    TieBreak,
    block_witness,
    greedy_expand,
    is_maximal,
    max_expansion,
)
from analysis.services.fuzzing import run_fuzz
from analysis.services.holes import (
    ContactGraphSummary,
    HoleKind,
    Orientation,
    convex_contact_graph,
    convex_holes,
    extract_holes,
    hole_windmill,
    plane_hole_count,
    rect_contact_graph,
    verify_structure,
)
from analysis.services.render import render_svg
from analysis.services.reports import analyze, structure_document
from analysis.services.transforms import (
    SplitCase,
    absorb_holes,
    contract_all,
    contract_hole,
    partition_holes,
    partition_rectilinear,
    saturate_to_grid,
)
from arrangements.exceptions import BoundDomainError, NotMaximalError, UnsupportedCakeError
from arrangements.models import Arrangement, BoundName, Cake, validate
from arrangements.services import generators
from arrangements.services.codec import read_file
from arrangements.services.generators import FuzzConfig, arrangement_at, gen_random
from arrangements.services.geometry import Point, Rect, RectilinearPolygon

L_SHAPE = RectilinearPolygon.from_coords([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])


TIE_ORDERS = {
    TieBreak.LEXICOGRAPHIC: lambda b: b,
    TieBreak.RIGHT: lambda b: (-b[2], b[1], b[0], b[3]),
    TieBreak.DOWN: lambda b: (b[1], b[0], b[3], b[2]),
}


def _brute_force_expansion(arrangement: Arrangement, index: int, tie_break: str) -> Rect:
    """Every quadruple of event coordinates, kept when it avoids all other toppings."""
    box = tuple(int(v) for v in arrangement.cake.bounding_box().bounds)
    x0, y0, x1, y1 = (int(v) for v in arrangement.toppings[index].bounds)
    others = [tuple(int(v) for v in o.bounds) for o in arrangement.others(index)]
    lefts = {box[0]} | {o[2] for o in others if o[2] <= x0}
    bottoms = {box[1]} | {o[3] for o in others if o[3] <= y0}
    rights = {box[2]} | {o[0] for o in others if o[0] >= x1}
    tops = {box[3]} | {o[1] for o in others if o[1] >= y1}
    order = TIE_ORDERS[tie_break]
    best, best_area = None, -1
    for left in lefts:
        for bottom in bottoms:
            for right in rights:
                for top in tops:
                    if not all(right <= o[0] or o[2] <= left or top <= o[1] or o[3] <= bottom for o in others):
                        continue
                    candidate = (left, bottom, right, top)
                    area = (right - left) * (top - bottom)
                    if area > best_area or (area == best_area and order(candidate) < order(best)):
                        best, best_area = candidate, area
    return Rect.from_bounds(*best)


class BoundTests(SimpleTestCase):

    def test_doubleroot_values(self):
        expected = {1: 1, 2: 2, 3: 3, 4: 3, 5: 4, 6: 4, 7: 5, 9: 5, 10: 6, 12: 6, 13: 7, 16: 7}
        for m, d in expected.items():
            self.assertEqual(doubleroot(m), d, m)

    @given(st.integers(min_value=1, max_value=10 ** 12))
    def test_doubleroot_is_the_ceiling(self, m):
        d = doubleroot(m)
        self.assertGreater(4 * m, d * d)
        self.assertGreaterEqual((d + 1) ** 2, 4 * m)

    def test_doubleroot_domain(self):
        with self.assertRaises(BoundDomainError):
            doubleroot(0)

    @given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=30))
    def test_full_grid_meets_the_bound(self, k1, k2):
        self.assertTrue(lemma_k1k2_holds(k1, k2, 0))

    def test_doubleroot_matches_integer_square_root(self):
        # smallest d with (d + 1)^2 >= 4m
        mismatches = [m for m in range(1, 10 ** 6 + 1) if doubleroot(m) != isqrt(4 * m - 1)]
        self.assertEqual(mismatches, [])

    def test_grid_bound_for_every_deletion_count(self):
        failures, loose_squares = [], []
        for k1 in range(1, 51):
            for k2 in range(1, 51):
                for t in range(k1 * k2):
                    if not lemma_k1k2_holds(k1, k2, t):
                        failures.append((k1, k2, t))
                n = k1 * k2
                if abs(k1 - k2) <= 1 and (k1 - 1) * (k2 - 1) != n - doubleroot(n):
                    loose_squares.append((k1, k2))
        self.assertEqual(failures, [])
        self.assertEqual(loose_squares, [])

    def test_limits(self):
        self.assertEqual(bound_limit(BoundName.THM3, 16), 9)
        self.assertEqual(bound_limit(BoundName.THM8, 16, 4), 13)
        self.assertEqual(bound_limit(BoundName.THM2, 5), 5)
        self.assertEqual(bound_limit(BoundName.THM2_PRIME, 5), 6)
        self.assertEqual(bound_limit(BoundName.THM3_PRIME, 9), 7)
        self.assertEqual(bound_limit(BoundName.THM1, 7), 0)
        with self.assertRaises(BoundDomainError):
            bound_limit(BoundName.THM2, 2)

    def test_bound_table_skips_small_m(self):
        self.assertNotIn("thm2", bound_table(2))
        self.assertEqual(bound_table(16)["lemma6"], 9)

    def test_check_bound(self):
        verdict = check_bound(BoundName.THM3, 16, 0, 9)
        self.assertTrue(verdict.satisfied)
        self.assertTrue(verdict.tight)
        self.assertFalse(check_bound(BoundName.THM3, 16, 0, 10).satisfied)
        self.assertEqual(check_bound(BoundName.THM3, 16, 5, 3).T, 0)

    def test_euler_face_bound(self):
        self.assertEqual(euler_face_bound(5), 6)
        self.assertEqual(euler_face_bound(5, min_face_degree=4), 3)
        self.assertEqual(euler_face_bound(5, edges=3), 2)

    def test_census_of_a_grid(self):
        census = four_vertex_census(generators.grid_fixture(3, 4))
        self.assertEqual((census.four_vertices, census.three_vertices), (6, 0))


class ExpansionTests(SimpleTestCase):

    def test_pinwheel_is_maximal(self):
        verdict = is_maximal(generators.gen_pinwheel())
        self.assertTrue(verdict)
        self.assertEqual(len(verdict.witnesses), 16)

    def test_block_witnesses(self):
        pinwheel = generators.gen_pinwheel()
        self.assertEqual(block_witness(pinwheel, 0, "left").blocker, CAKE_BOUNDARY)
        right = block_witness(pinwheel, 0, "right")
        self.assertEqual(right.blocker, 1)
        self.assertEqual(right.contact, (Point(2, 0), Point(2, 1)))

    def test_counterexample(self):
        verdict = is_maximal(generators.gen_nonmaximal_fixture())
        self.assertFalse(verdict)
        self.assertEqual(verdict.counterexample, (2, Rect.from_bounds(0, 1, 3, 2)))
        self.assertEqual(verdict.direction, "right")

    def test_tie_break_decides_the_holes(self):
        fixture = generators.gen_greedy_fixture()
        lex = greedy_expand(fixture, generators.GREEDY_ORDER, TieBreak.LEXICOGRAPHIC)
        down = greedy_expand(fixture, generators.GREEDY_ORDER, TieBreak.DOWN)
        self.assertEqual(lex.toppings[3], Rect.from_bounds(1, 1, 3, 2))
        self.assertEqual(down.toppings[3], Rect.from_bounds(2, 0, 3, 2))
        self.assertEqual(extract_holes(lex), [])
        holes = extract_holes(down)
        self.assertEqual([h.rect for h in holes], [Rect.from_bounds(1, 1, 2, 2)])
        self.assertEqual(hole_windmill(down, holes[0]).orientation, Orientation.CLOCKWISE)

    def test_rectilinear_cake_blocks_expansion(self):
        arrangement = Arrangement(Cake.rectilinear(L_SHAPE), (Rect.from_bounds(0, 0, 1, 1),))
        self.assertEqual(max_expansion(arrangement, 0), Rect.from_bounds(0, 0, 2, 4))
        self.assertEqual(max_expansion(arrangement, 0, TieBreak.RIGHT), Rect.from_bounds(0, 0, 4, 2))

    def test_plane_has_no_expansion(self):
        arrangement = Arrangement(Cake.plane(), tuple(generators.gen_plane_longbox(5)))
        with self.assertRaises(UnsupportedCakeError):
            max_expansion(arrangement, 0)

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2 ** 32),
        m=st.integers(min_value=1, max_value=5),
        tie_break=st.sampled_from(sorted(TIE_ORDERS)),
    )
    def test_expansion_matches_brute_force(self, seed, m, tie_break):
        arrangement = arrangement_at(FuzzConfig(seed=seed, m=m, grid_extent=5), 0)
        for index in range(m):
            grown = max_expansion(arrangement, index, tie_break)
            self.assertEqual(grown, _brute_force_expansion(arrangement, index, tie_break))

    def test_expansion_oracle_on_a_seeded_stream(self):
        for m in range(1, 9):
            stream = FuzzConfig(seed=20 + m, m=m, grid_extent=12, iterations=63)
            for item, arrangement in enumerate(gen_random(stream)):
                for index in range(m):
                    with self.subTest(m=m, item=item, index=index):
                        self.assertEqual(
                            max_expansion(arrangement, index),
                            _brute_force_expansion(arrangement, index, TieBreak.LEXICOGRAPHIC),
                        )

    def test_greedy_expansion_is_idempotent_and_grows_every_topping(self):
        for m in range(1, 11):
            for arrangement in gen_random(FuzzConfig(seed=m, m=m, iterations=20)):
                expanded = greedy_expand(arrangement)
                self.assertEqual(greedy_expand(expanded), expanded)
                for topping, piece in zip(arrangement.toppings, expanded.toppings):
                    self.assertTrue(piece.contains_rect(topping), (topping, piece))

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2 ** 32), m=st.integers(min_value=1, max_value=8))
    def test_greedy_expansion_is_maximal(self, seed, m):
        arrangement = greedy_expand(arrangement_at(FuzzConfig(seed=seed, m=m, grid_extent=8), 0))
        self.assertEqual(validate(arrangement), [])
        self.assertTrue(is_maximal(arrangement))


class HoleTests(SimpleTestCase):

    def test_grid_holes_are_inner_rectangles(self):
        holes = extract_holes(generators.gen_grid(16))
        self.assertEqual(len(holes), 9)
        self.assertTrue(all(h.kind == HoleKind.INNER and h.is_rectangle for h in holes))

    def test_windmills_alternate(self):
        arrangement = generators.gen_grid(6)
        holes = extract_holes(arrangement)
        self.assertEqual([h.rect for h in holes], [Rect.from_bounds(3, 3, 4, 4), Rect.from_bounds(6, 3, 7, 4)])
        orientations = [hole_windmill(arrangement, h).orientation for h in holes]
        self.assertEqual(orientations, [Orientation.CLOCKWISE, Orientation.COUNTERCLOCKWISE])

    def test_grid_structure(self):
        report = verify_structure(generators.gen_grid(16))
        self.assertTrue(report.ok, [str(c) for c in report.violations])
        self.assertEqual(len(report.holes), 9)

    def test_staircase_structure(self):
        report = verify_structure(generators.gen_staircase(16, 4))
        self.assertTrue(report.ok, [str(c) for c in report.violations])
        boundary = [h for h in report.holes if h.kind == HoleKind.BOUNDARY]
        self.assertEqual(len(boundary), 1)

    def test_hole_around_a_topping_keeps_its_pocket(self):
        ring = [Rect.from_bounds(*b) for b in [(1, 1, 8, 3), (6, 3, 8, 8), (1, 6, 6, 8), (1, 3, 3, 6)]]
        arrangement = Arrangement(
            Cake.rectangle(Rect.from_bounds(0, 0, 9, 9)), tuple(ring + [Rect.from_bounds(4, 4, 5, 5)]),
        )
        holes = extract_holes(arrangement)
        self.assertEqual([h.region.area for h in holes], [32, 8])
        self.assertEqual(holes[1].enclosed_toppings, (4,))
        self.assertEqual(holes[1].outline, Rect.from_bounds(3, 3, 6, 6).to_polygon())
        self.assertFalse(holes[1].simply_connected)
        self.assertFalse(holes[1].is_rectangle)

    def test_structure_needs_maximality(self):
        with self.assertRaises(NotMaximalError) as caught:
            verify_structure(generators.gen_nonmaximal_fixture())
        self.assertEqual(caught.exception.index, 2)

    def test_structure_document(self):
        arrangement = generators.gen_pinwheel()
        document = json.loads(structure_document(arrangement, verify_structure(arrangement)))
        self.assertEqual(document["kind"], "structure")
        self.assertTrue(document["ok"])
        self.assertEqual(document["holes"][0]["vertices"][0], ["1", "1"])

    def test_plane_hole_count(self):
        self.assertEqual(plane_hole_count(generators.gen_pinwheel().toppings), 2)
        self.assertEqual(plane_hole_count(generators.gen_plane_longbox(9)), 7)

    def test_pinwheel_contact_graph_is_a_cycle(self):
        summary = ContactGraphSummary.of(rect_contact_graph(generators.gen_pinwheel().toppings))
        self.assertEqual((summary.vertices, summary.edges, summary.components), (4, 4, 1))
        self.assertEqual(summary.faces, 2)

    def test_contact_graph_face_limit(self):
        summary = ContactGraphSummary.of(rect_contact_graph(generators.gen_pinwheel().toppings))
        self.assertEqual(summary.face_limit, 2)
        self.assertTrue(summary.consistent)
        self.assertIsNone(ContactGraphSummary(vertices=3, edges=0, components=3).face_limit)
        self.assertFalse(ContactGraphSummary(vertices=3, edges=3, components=2).consistent)

    def test_fixture_contact_graphs_are_consistent(self):
        for m in range(5, 13):
            summary = ContactGraphSummary.of(rect_contact_graph(generators.gen_plane_longbox(m)))
            self.assertTrue(summary.consistent, m)
        for m in (3, 4, 5):
            summary = ContactGraphSummary.of(convex_contact_graph(generators.gen_convex_fixture(m).toppings))
            self.assertTrue(summary.consistent, m)

    def test_convex_hole_of_the_smallest_fixture(self):
        arrangement = generators.gen_convex_fixture(3)
        holes = convex_holes(arrangement.toppings, arrangement.cake.shape)
        self.assertEqual(len(holes), 1)
        self.assertTrue(holes[0].convex)
        self.assertEqual(holes[0].area, 8)


class TransformTests(SimpleTestCase):

    def test_contract_pinwheel(self):
        contracted = contract_hole(generators.gen_pinwheel())
        self.assertEqual(contracted.toppings, tuple(Rect.from_bounds(*b) for b in [
            (0, 0, 1, 1), (1, 0, 3, 1), (1, 1, 3, 3), (0, 1, 1, 3),
        ]))
        self.assertEqual(four_vertex_census(contracted).four_vertices, 1)

    def test_contract_all_keeps_one_vertex_per_hole(self):
        partition, contracted = contract_all(generators.gen_grid(16))
        self.assertEqual(contracted, 9)
        self.assertEqual(extract_holes(partition), [])
        self.assertGreaterEqual(four_vertex_census(partition).four_vertices, 9)

    def test_contract_all_needs_maximality(self):
        with self.assertRaises(NotMaximalError):
            contract_all(generators.gen_nonmaximal_fixture())

    def test_saturation(self):
        summary = saturate_to_grid(generators.gen_lemma6_fixture())
        self.assertEqual((summary.k1, summary.k2, summary.t), (3, 4, 5))
        self.assertEqual(summary.cases, (
            SplitCase.FRESH, SplitCase.FRESH, SplitCase.BOUNDARY, SplitCase.MERGE, SplitCase.BOUNDARY,
        ))
        self.assertEqual(summary.m, 7)

    def test_contracting_one_hole_keeps_every_topping(self):
        contracted = 0
        for m in range(4, 13):
            for arrangement in gen_random(FuzzConfig(seed=40 + m, m=m, iterations=15)):
                expanded = greedy_expand(arrangement)
                holes = extract_holes(expanded)
                if not holes:
                    continue
                result = contract_hole(expanded)
                self.assertEqual(result.m, expanded.m)
                self.assertEqual(result.labels, expanded.labels)
                self.assertEqual(len(extract_holes(result)), len(holes) - 1)
                self.assertEqual(validate(result), [])
                contracted += 1
        self.assertGreater(contracted, 0)

    def test_saturated_grid_has_every_four_vertex(self):
        partition, _ = contract_all(generators.gen_grid(16))
        for arrangement in (partition, generators.gen_lemma6_fixture(), generators.grid_fixture(3, 4)):
            summary = saturate_to_grid(arrangement)
            census = four_vertex_census((arrangement.cake.shape, summary.rects))
            self.assertEqual(len(summary.rects), summary.k1 * summary.k2)
            self.assertEqual(census.four_vertices, (summary.k1 - 1) * (summary.k2 - 1))
            self.assertEqual(census.three_vertices, 0)
            self.assertEqual(summary.m, arrangement.m)

    def test_absorbed_pieces_cover_the_cake(self):
        configs = [FuzzConfig(seed=60 + m, m=m, iterations=20) for m in range(1, 13)]
        configs += [FuzzConfig(seed=80 + T, m=8, cake_kind="rectilinear", T=T, iterations=20) for T in range(1, 7)]
        for cfg in configs:
            for arrangement in gen_random(cfg):
                report = absorb_holes(arrangement)
                self.assertEqual((len(report.pieces), report.b), (arrangement.m, 0))
                self.assertEqual(sum(piece.area for _, piece in report.pieces), arrangement.cake.area)
                for topping, (_, piece) in zip(arrangement.toppings, report.pieces):
                    centre = Point((topping.x0 + topping.x1) / 2, (topping.y0 + topping.y1) / 2)
                    for p in (*topping.corners(), centre):
                        self.assertTrue(piece.contains_point(p), (topping, piece))

    def test_saturated_grid_is_unchanged(self):
        summary = saturate_to_grid(generators.grid_fixture(3, 4))
        self.assertEqual((summary.k1, summary.k2, summary.t), (3, 4, 0))

    def test_partition_rectilinear(self):
        self.assertEqual(partition_rectilinear(L_SHAPE), [
            Rect.from_bounds(0, 0, 4, 2), Rect.from_bounds(0, 2, 2, 4),
        ])
        staircase = generators.gen_staircase(4, 3).cake.shape
        rects = partition_rectilinear(staircase)
        self.assertLessEqual(len(rects), staircase.reflex_count + 1)
        self.assertEqual(sum(r.area for r in rects), staircase.area)

    def test_partition_holes(self):
        report = partition_holes(generators.gen_grid(16))
        self.assertEqual((report.b, report.bound_value), (9, 9))
        self.assertTrue(report.tight)

    def test_absorb_holes(self):
        report = absorb_holes(generators.gen_pinwheel())
        self.assertEqual(len(report.pieces), 4)
        self.assertEqual(report.b, 0)
        label, piece = report.pieces[0]
        self.assertEqual(label, "Z1")
        self.assertEqual(piece.area, 3)


class AnalyzeTests(SimpleTestCase):

    def test_pinwheel(self):
        report = analyze(generators.gen_pinwheel())
        self.assertEqual(report.bound_name, "thm3")
        self.assertEqual((report.b, report.bound_value), (1, 1))
        self.assertTrue(report.tight)
        self.assertEqual(report.notes, ())

    def test_grid_is_tight(self):
        for m in (4, 10, 16):
            report = analyze(generators.gen_grid(m))
            self.assertEqual(report.b, m - doubleroot(m))
            self.assertTrue(report.tight)

    def test_grid_construction_is_tight_up_to_two_hundred(self):
        for m in range(1, 201):
            report = analyze(generators.gen_grid(m), BoundName.THM3)
            self.assertEqual(report.b, m - doubleroot(m), m)
            self.assertTrue(report.tight, m)
            self.assertEqual(report.notes, (), m)

    def test_staircase_is_tight(self):
        report = analyze(generators.gen_staircase(16, 4))
        self.assertEqual(report.bound_name, "thm8")
        self.assertEqual((report.T, report.b, report.bound_value), (4, 13, 13))

    def test_small_staircases(self):
        for (m, T), blanks in {(1, 1): 1, (4, 2): 3}.items():
            report = analyze(generators.gen_staircase(m, T))
            self.assertEqual((report.T, report.b), (T, blanks))
            self.assertTrue(report.satisfied)

    def test_four_vertices(self):
        report = analyze(generators.gen_grid(16), BoundName.LEMMA6)
        self.assertEqual(report.observed, 9)
        self.assertIn("contracted 9 holes", report.notes[0])

    def test_no_blanks_with_polygonal_pieces(self):
        report = analyze(generators.gen_grid(10), BoundName.THM1)
        self.assertEqual((report.b, len(report.pieces)), (0, 10))
        self.assertTrue(report.satisfied)

    def test_longbox(self):
        for m in range(5, 41):
            report = analyze(Arrangement(Cake.plane(), tuple(generators.gen_plane_longbox(m))))
            self.assertEqual(report.bound_name, "thm3prime")
            self.assertEqual(report.observed, m - 2)
            self.assertTrue(report.tight)

    def test_convex_fixtures(self):
        for m in (3, 4, 5):
            report = analyze(generators.gen_convex_fixture(m))
            self.assertEqual(report.bound_name, "thm2")
            self.assertEqual(report.observed, 2 * m - 5)
            self.assertTrue(report.tight)

    def test_convex_plane_count(self):
        report = analyze(generators.gen_convex_fixture(3), BoundName.THM2_PRIME)
        self.assertEqual(report.observed, 2)

    def test_non_maximal_input_gets_a_note(self):
        report = analyze(generators.gen_nonmaximal_fixture())
        self.assertTrue(report.notes[0].startswith("not maximal: Z3 can grow right"))

    def test_bound_must_fit_the_cake(self):
        with self.assertRaises(UnsupportedCakeError):
            analyze(generators.gen_pinwheel(), BoundName.THM2)


class RenderTests(SimpleTestCase):

    def test_grid_figure(self):
        svg = render_svg(generators.gen_grid(16), width=400).decode("utf-8")
        self.assertTrue(svg.startswith("<svg "))
        self.assertEqual(svg.count('class="topping"'), 16)
        self.assertEqual(svg.count('class="blank"'), 9)
        self.assertEqual(svg.count("<text "), 16)

    def test_integral_coordinates_land_on_whole_pixels(self):
        svg = render_svg(generators.gen_pinwheel()).decode("utf-8")
        self.assertIn('class="cake" d="M12,468 L468,468 L468,12 L12,12 Z"', svg)
        self.assertIn('<text x="164" y="392"', svg)

    def test_thirds_are_exact(self):
        arrangement = Arrangement(
            Cake.rectangle(Rect.from_bounds(0, 0, 1, 1)), (Rect.from_bounds(0, 0, "1/3", 1),),
        )
        svg = render_svg(arrangement).decode("utf-8")
        self.assertIn('class="topping" d="M12,468 L164,468 L164,12 L12,12 Z"', svg)
        self.assertIn('<text x="88" y="240"', svg)

    def test_fine_lattice_is_capped_at_the_width(self):
        arrangement = Arrangement(
            Cake.rectangle(Rect.from_bounds(0, 0, 1, 1)), (Rect.from_bounds(0, 0, "1/1000", 1),),
        )
        svg = render_svg(arrangement).decode("utf-8")
        self.assertIn('<text x="12.2" y="212"', svg)
        self.assertIn("L12.4,412", svg)

    def test_reflex_vertices_are_circled(self):
        svg = render_svg(generators.gen_staircase(16, 4)).decode("utf-8")
        self.assertEqual(svg.count('class="reflex"'), 4)

    def test_rendering_is_deterministic(self):
        report = analyze(generators.gen_staircase(9, 2))
        self.assertEqual(render_svg(report), render_svg(report))
        self.assertIn('width="480"', render_svg(report).decode("utf-8"))


class FuzzTests(SimpleTestCase):

    def assertStreamsPass(self, configs, bound=None, total=None):
        checked = 0
        with tempfile.TemporaryDirectory() as tmp:
            for cfg in configs:
                outcome = run_fuzz(cfg, bound, failure_dir=Path(tmp))
                self.assertTrue(outcome.ok, (cfg, outcome.failure and outcome.failure.describe()))
                checked += outcome.checked
        if total is not None:
            self.assertGreaterEqual(checked, total)

    def test_rectangle_bound_over_a_thousand_instances(self):
        self.assertStreamsPass(
            [FuzzConfig(seed=1000 + m, m=m, iterations=84) for m in range(1, 13)], total=1000,
        )

    def test_rectilinear_bound(self):
        configs = [
            FuzzConfig(seed=300 + 10 * T + m, m=m, cake_kind="rectilinear", T=T, iterations=25)
            for T in range(1, 7)
            for m in (3, 10)
        ]
        self.assertStreamsPass(configs, total=300)

    def test_plane_bound(self):
        self.assertStreamsPass(
            [FuzzConfig(seed=500 + m, m=m, cake_kind="plane", iterations=50) for m in range(3, 13)], total=500,
        )

    def test_convex_bound(self):
        self.assertStreamsPass(
            [FuzzConfig(seed=200 + m, m=m, cake_kind="convex", iterations=25) for m in range(3, 11)], total=200,
        )

    def test_four_vertex_pipeline(self):
        self.assertStreamsPass(
            [FuzzConfig(seed=700 + m, m=m, iterations=50) for m in range(1, 11)], BoundName.LEMMA6, total=500,
        )

    def test_absorption_leaves_no_blanks(self):
        configs = [FuzzConfig(seed=900 + m, m=m, iterations=20) for m in range(1, 13)]
        configs += [FuzzConfig(seed=950 + T, m=6, cake_kind="rectilinear", T=T, iterations=20) for T in range(1, 7)]
        self.assertStreamsPass(configs, BoundName.THM1, total=360)

    def test_rectangle_stream(self):
        with tempfile.TemporaryDirectory() as tmp:
            outcome = run_fuzz(FuzzConfig(seed=11, m=6, iterations=8), failure_dir=Path(tmp))
        self.assertTrue(outcome.ok)
        self.assertEqual(outcome.checked, 8)

    def test_plane_stream_on_threads(self):
        outcome = run_fuzz(FuzzConfig(seed=5, m=5, cake_kind="plane", iterations=6), workers=3)
        self.assertTrue(outcome.ok)
        self.assertEqual(outcome.checked, 6)

    def test_bound_must_fit_the_cake(self):
        with self.assertRaises(UnsupportedCakeError):
            run_fuzz(FuzzConfig(seed=1, m=4, cake_kind="plane", iterations=1), BoundName.THM3)


@override_settings(BLANKS_SEED=None)
class CommandTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def run_command(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def generate(self, construction, **options):
        path = self.dir / f"{construction}.arr.json"
        self.run_command("generate", construction=construction, output=str(path), **options)
        return path

    def test_generate_and_analyze(self):
        path = self.generate("grid", m=16)
        self.assertEqual(read_file(path).m, 16)
        report_path = self.dir / "grid.report.json"
        out = self.run_command("analyze", input=str(path), output=str(report_path))
        self.assertIn("thm3: m=16 T=0 b=9 observed=9 limit=9 (tight)", out)
        self.assertEqual(read_file(report_path).b, 9)

    def test_staircase_analysis(self):
        path = self.generate("staircase", m=16, T=4)
        out = self.run_command("analyze", input=str(path))
        self.assertIn("thm8: m=16 T=4 b=13 observed=13 limit=13 (tight)", out)

    def test_verify(self):
        path = self.generate("grid", m=10)
        out = self.run_command("verify", input=str(path), output=str(self.dir / "grid.structure.json"))
        self.assertIn("structure ok: 4 holes", out)

    def test_verify_rejects_non_maximal(self):
        path = self.generate("nonmaximal")
        with self.assertRaises(CommandError) as caught:
            self.run_command("verify", input=str(path))
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn("not maximal: Z3 can grow right", str(caught.exception))

    def test_expand_then_partition(self):
        path = self.generate("greedy")
        expanded = self.dir / "greedy-down.arr.json"
        self.run_command("expand", input=str(path), output=str(expanded), order="3,0,1,2", tie_break="down")
        report = self.dir / "greedy.report.json"
        self.run_command("partition_holes", input=str(expanded), output=str(report))
        self.assertEqual(read_file(report).b, 1)

    def test_contract(self):
        path = self.generate("pinwheel")
        out = self.run_command("contract", input=str(path), output=str(self.dir / "contracted.arr.json"))
        self.assertIn("contracted 1 holes: 1 4-vertices", out)

    def test_absorb(self):
        path = self.generate("pinwheel")
        target = self.dir / "absorbed.report.json"
        self.run_command("absorb", input=str(path), output=str(target))
        self.assertEqual(read_file(target).b, 0)

    def test_render_width_is_checked(self):
        path = self.generate("pinwheel")
        with self.assertRaises(CommandError) as caught:
            self.run_command("render", input=str(path), output=str(self.dir / "p.svg"), width=40)
        self.assertEqual(caught.exception.returncode, 2)

    def test_report_is_not_an_arrangement(self):
        path = self.generate("pinwheel")
        report = self.dir / "p.report.json"
        self.run_command("analyze", input=str(path), output=str(report))
        with self.assertRaises(CommandError) as caught:
            self.run_command("verify", input=str(report))
        self.assertEqual(caught.exception.returncode, 2)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as caught:
            self.run_command("analyze", input=str(self.dir / "missing.arr.json"))
        self.assertEqual(caught.exception.returncode, 2)

    def test_fuzz(self):
        out = self.run_command("fuzz", m=5, iters=4, seed=3)
        self.assertIn("4 instances ok", out)
