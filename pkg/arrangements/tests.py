import json
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from arrangements.exceptions import DecodeError, DegenerateShapeError, InvalidPolygonError
from arrangements.models import Arrangement, Cake, CakeKind, PartitionReport, validate
from arrangements.services import generators
from arrangements.services.codec import decode, encode
from arrangements.services.generators import FuzzConfig, Xorshift64, arrangement_at, gen_random
from arrangements.services.geometry import (
    ConvexPolygon,
    Point,
    Rect,
    RectilinearPolygon,
    contains,
    convex_hull,
    interior_disjoint,
)
from arrangements.services.grid import CompressedGrid, component_analysis, union_components

PINWHEEL = [Rect.from_bounds(*b) for b in [(0, 0, 2, 1), (2, 0, 3, 2), (1, 2, 3, 3), (0, 1, 1, 3)]]
L_SHAPE = RectilinearPolygon.from_coords([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])
SMALL_RECTS = st.builds(
    lambda x, y, w, h: Rect.from_bounds(x, y, x + w, y + h),
    st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 4), st.integers(1, 4),
)


class GeometryTests(SimpleTestCase):

    def test_degenerate_rectangle_is_rejected(self):
        with self.assertRaises(DegenerateShapeError):
            Rect.from_bounds(0, 0, 0, 1)

    def test_rationals_are_exact(self):
        r = Rect.from_bounds("1/3", 0, "2/3", 1)
        self.assertEqual(r.width, Fraction(1, 3))
        with self.assertRaises(TypeError):
            Point(0.5, 0)

    def test_touching_rectangles_are_interior_disjoint(self):
        self.assertTrue(interior_disjoint(PINWHEEL[0], PINWHEEL[1]))
        self.assertTrue(interior_disjoint(Rect.from_bounds(0, 0, 1, 1), Rect.from_bounds(1, 1, 2, 2)))
        self.assertFalse(interior_disjoint(Rect.from_bounds(0, 0, 2, 2), Rect.from_bounds(1, 1, 3, 3)))

    @settings(max_examples=100, deadline=None)
    @given(
        ra=SMALL_RECTS,
        rb=SMALL_RECTS,
        shift=st.tuples(st.fractions(min_value=-10, max_value=10), st.fractions(min_value=-10, max_value=10)),
    )
    def test_interior_disjoint_is_symmetric_and_translation_invariant(self, ra, rb, shift):
        expected = interior_disjoint(ra, rb)
        self.assertEqual(interior_disjoint(rb, ra), expected)
        self.assertEqual(interior_disjoint(ra.translate(*shift), rb.translate(*shift)), expected)

    def test_containment_in_a_rectilinear_polygon(self):
        self.assertTrue(contains(L_SHAPE, Rect.from_bounds(0, 0, 4, 2)))
        self.assertTrue(contains(L_SHAPE, Rect.from_bounds(0, 0, 2, 4)))
        self.assertFalse(contains(L_SHAPE, Rect.from_bounds(1, 1, 3, 3)))

    def test_reflex_vertices(self):
        self.assertEqual(L_SHAPE.reflex_vertices(), [Point(2, 2)])
        self.assertEqual(Rect.from_bounds(0, 0, 1, 1).to_polygon().reflex_count, 0)

    def test_polygon_vertices_are_canonical(self):
        clockwise = RectilinearPolygon.from_coords([(0, 4), (2, 4), (2, 2), (4, 2), (4, 0), (1, 0), (0, 0)])
        self.assertEqual(clockwise, L_SHAPE)

    def test_slanted_edge_is_rejected(self):
        with self.assertRaises(InvalidPolygonError):
            RectilinearPolygon.from_coords([(0, 0), (2, 0), (1, 2), (0, 2)])

    def test_convex_polygon_checks_strict_convexity(self):
        triangle = ConvexPolygon.from_coords([(0, 0), (0, 2), (2, 0)])
        self.assertEqual(triangle.area, 2)
        self.assertEqual(set(triangle.vertices), {Point(0, 0), Point(2, 0), Point(0, 2)})
        with self.assertRaises(InvalidPolygonError):
            ConvexPolygon.from_coords([(0, 0), (1, 0), (2, 0), (1, 1)])

    def test_convex_hull_drops_inner_and_collinear_points(self):
        hull = convex_hull([Point(x, y) for x in range(3) for y in range(3)])
        self.assertEqual(hull, (Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2)))


class GridTests(SimpleTestCase):

    def test_pinwheel_leaves_the_centre_square(self):
        components = union_components(PINWHEEL, Rect.from_bounds(0, 0, 3, 3))
        self.assertEqual(components, [Rect.from_bounds(1, 1, 2, 2).to_polygon()])

    def test_components_are_clipped_to_a_polygon(self):
        components = union_components([Rect.from_bounds(0, 0, 4, 2)], L_SHAPE)
        self.assertEqual(components, [RectilinearPolygon.from_coords([(0, 2), (2, 2), (2, 4), (0, 4)])])

    def assertPartitions(self, rects, clip):
        """The components tile ``clip`` minus the rectangles without overlap."""
        regions = union_components(rects, clip)
        covered = sum((r.area for r in rects), Fraction(0))
        self.assertEqual(sum((r.area for r in regions), Fraction(0)), clip.area - covered)
        grid = CompressedGrid.around([clip, *rects])
        for i in range(grid.nx):
            for j in range(grid.ny):
                centre = grid.cell_centre((i, j))
                free = clip.contains_point(centre) and not any(r.contains_point(centre) for r in rects)
                inside = sum(1 for region in regions if region.contains_point(centre))
                self.assertEqual(inside, int(free), centre)
        return regions

    def test_enclosed_topping_is_cut_out(self):
        regions = self.assertPartitions([Rect.from_bounds(2, 2, 3, 3)], Rect.from_bounds(0, 0, 5, 5))
        self.assertEqual(len(regions), 1)
        self.assertEqual(regions[0].area, 24)
        self.assertEqual(regions[0].outer, Rect.from_bounds(0, 0, 5, 5).to_polygon())
        self.assertEqual(regions[0].holes, (Rect.from_bounds(2, 2, 3, 3).to_polygon(),))

    def test_ring_and_island_are_interior_disjoint(self):
        ring = [Rect.from_bounds(*b) for b in [(1, 1, 8, 3), (6, 3, 8, 8), (1, 6, 6, 8), (1, 3, 3, 6)]]
        island = Rect.from_bounds(4, 4, 5, 5)
        regions = self.assertPartitions(ring + [island], Rect.from_bounds(0, 0, 9, 9))
        self.assertEqual(sorted(r.area for r in regions), [8, 32])
        component = component_analysis(ring + [island], Rect.from_bounds(0, 0, 9, 9))[1]
        self.assertFalse(component.simply_connected)
        self.assertEqual(component.outline, Rect.from_bounds(3, 3, 6, 6).to_polygon())

    def test_random_streams_conserve_area(self):
        configs = [
            FuzzConfig(seed=5, m=8),
            FuzzConfig(seed=5, m=3, grid_extent=6),
            FuzzConfig(seed=9, m=6, cake_kind="rectilinear", T=3),
        ]
        for cfg in configs:
            for arrangement in gen_random(cfg):
                with self.subTest(cfg=cfg, arrangement=arrangement):
                    self.assertPartitions(list(arrangement.toppings), arrangement.cake.region())


class ValidateTests(SimpleTestCase):

    def test_pinwheel_is_valid(self):
        self.assertEqual(validate(generators.gen_pinwheel()), [])

    def test_overlap_and_containment(self):
        arrangement = Arrangement(
            Cake.rectangle(Rect.from_bounds(0, 0, 3, 3)),
            (Rect.from_bounds(0, 0, 2, 2), Rect.from_bounds(1, 1, 4, 2)),
        )
        rules = sorted(str(v) for v in validate(arrangement))
        self.assertEqual(rules, ["not-contained(1)", "overlap(0,1)"])

    def test_convex_topping_in_rectangle_cake(self):
        arrangement = Arrangement(
            Cake.rectangle(Rect.from_bounds(0, 0, 3, 3)),
            (ConvexPolygon.from_coords([(0, 0), (1, 0), (0, 1)]),),
        )
        self.assertEqual([v.rule for v in validate(arrangement)], ["kind-mismatch"])

    def test_labels_default_to_z(self):
        self.assertEqual(generators.gen_pinwheel().labels, ("Z1", "Z2", "Z3", "Z4"))


class CodecTests(SimpleTestCase):

    def assertRoundTrips(self, obj):
        data = encode(obj)
        self.assertEqual(decode(data), obj)
        self.assertEqual(encode(decode(data)), data)

    def test_generators_round_trip(self):
        self.assertRoundTrips(generators.gen_pinwheel())
        self.assertRoundTrips(generators.gen_grid(10))
        self.assertRoundTrips(generators.gen_staircase(4, 3))
        self.assertRoundTrips(generators.gen_convex_fixture(5))
        self.assertRoundTrips(Arrangement(Cake.plane(), tuple(generators.gen_plane_longbox(6))))

    def test_report_round_trips(self):
        report = PartitionReport(
            pieces=(("Z1", L_SHAPE),),
            blanks=(Rect.from_bounds(2, 2, 4, 4), ConvexPolygon.from_coords([(4, 0), (5, 0), (4, 1)])),
            m=1, T=1, bound_name="thm8", bound_value=1, observed=2, satisfied=False,
            cake=Cake.rectangle(Rect.from_bounds(0, 0, 5, 4)),
            notes=("hand made",),
        )
        self.assertRoundTrips(report)

    def test_encoding_is_canonical_text(self):
        text = encode(generators.gen_pinwheel()).decode("utf-8")
        self.assertTrue(text.endswith("}\n"))
        document = json.loads(text)
        self.assertEqual(document["cake"], {"type": "rectangle", "rect": ["0", "0", "3", "3"]})
        self.assertEqual(document["toppings"][0], {"label": "Z1", "rect": ["0", "0", "2", "1"]})

    def test_fractions_are_written_as_strings(self):
        document = json.loads(encode(generators.gen_convex_fixture(3)))
        self.assertIn(["40/3", "16/3"], document["toppings"][1]["vertices"])

    def _document(self, topping=("0", "0", "1", "1"), **cake):
        return json.dumps({
            "kind": "arrangement",
            "cake": {"type": "rectangle", "rect": ["0", "0", "3", "3"], **cake},
            "toppings": [{"label": "Z1", "rect": list(topping)}],
        }, indent=2)

    def test_non_canonical_rational_is_rejected(self):
        with self.assertRaises(DecodeError) as caught:
            decode(self._document(rect=["0", "0", "6/2", "3"]))
        self.assertTrue(caught.exception.field.startswith("cake.rect"))
        self.assertIsNotNone(caught.exception.line)

    def test_unknown_field_is_rejected(self):
        with self.assertRaises(DecodeError):
            decode(self._document(colour="red"))

    def test_malformed_json_reports_the_line(self):
        with self.assertRaises(DecodeError) as caught:
            decode('{\n  "kind": "arrangement",\n  oops\n}')
        self.assertEqual(caught.exception.line, 3)

    def test_degenerate_topping_is_a_decode_error(self):
        with self.assertRaises(DecodeError):
            decode(self._document(topping=("0", "0", "0", "1")))


class GridConstructionTests(SimpleTestCase):

    def test_square_grid(self):
        arrangement = generators.gen_grid(4)
        self.assertEqual(arrangement.cake.shape, Rect.from_bounds(0, 0, 6, 6))
        self.assertEqual(arrangement.toppings, (
            Rect.from_bounds(0, 0, 4, 3), Rect.from_bounds(4, 0, 6, 4),
            Rect.from_bounds(0, 3, 3, 6), Rect.from_bounds(3, 4, 6, 6),
        ))

    def test_glued_column(self):
        arrangement = generators.gen_grid(6)
        self.assertEqual(arrangement.cake.shape, Rect.from_bounds(0, 0, 9, 6))
        self.assertIn(Rect.from_bounds(6, 0, 9, 3), arrangement.toppings)
        self.assertIn(Rect.from_bounds(7, 3, 9, 6), arrangement.toppings)

    def test_single_topping_fills_the_cake(self):
        arrangement = generators.gen_grid(1)
        self.assertEqual(arrangement.toppings, (arrangement.cake.shape,))

    def test_every_grid_is_valid_and_integral(self):
        for m in range(1, 41):
            arrangement = generators.gen_grid(m)
            self.assertEqual(arrangement.m, m)
            self.assertEqual(validate(arrangement), [], m)
            self.assertTrue(all(v.denominator == 1 for t in arrangement.toppings for v in t.bounds))

    def test_staircase_cake(self):
        arrangement = generators.gen_staircase(16, 4)
        self.assertEqual(arrangement.cake.kind, CakeKind.RECTILINEAR)
        self.assertEqual(arrangement.cake.reflex_count, 4)
        self.assertEqual(arrangement.toppings, generators.gen_grid(16).toppings)
        self.assertEqual(validate(arrangement), [])

    def test_longbox(self):
        rects = generators.gen_plane_longbox(9)
        self.assertEqual(len(rects), 9)
        self.assertEqual(validate(Arrangement(Cake.plane(), tuple(rects))), [])

    def test_convex_fixtures_are_valid(self):
        for m in (3, 4, 5):
            arrangement = generators.gen_convex_fixture(m)
            self.assertEqual(arrangement.m, m)
            self.assertEqual(validate(arrangement), [])
            area = sum((t.area for t in arrangement.toppings), Fraction(0))
            self.assertLess(area, arrangement.cake.shape.area)

    def test_fixtures_are_valid(self):
        for fixture in (
            generators.gen_lemma6_fixture(), generators.gen_greedy_fixture(),
            generators.gen_nonmaximal_fixture(), generators.grid_fixture(3, 4),
        ):
            self.assertEqual(validate(fixture), [])


class RandomGeneratorTests(SimpleTestCase):

    def test_xorshift_is_deterministic(self):
        a, b = Xorshift64(42), Xorshift64(42)
        self.assertEqual([a.next() for _ in range(5)], [b.next() for _ in range(5)])
        self.assertNotEqual(Xorshift64(0).next(), 0)

    def test_same_seed_same_stream(self):
        cfg = FuzzConfig(seed=7, m=6, iterations=5)
        first = b"".join(encode(a) for a in gen_random(cfg))
        second = b"".join(encode(a) for a in gen_random(cfg))
        self.assertEqual(first, second)

    def test_items_do_not_depend_on_order(self):
        cfg = FuzzConfig(seed=3, m=5, iterations=4)
        self.assertEqual(list(gen_random(cfg))[3], arrangement_at(cfg, 3))

    def test_single_topping(self):
        arrangement = arrangement_at(FuzzConfig(seed=1, m=1), 0)
        self.assertEqual(arrangement.m, 1)
        self.assertEqual(validate(arrangement), [])

    def test_config_rejects_overfull_grid(self):
        with self.assertRaises(ValueError):
            FuzzConfig(seed=1, m=10, grid_extent=3)
        with self.assertRaises(ValueError):
            FuzzConfig(seed=1, m=4, cake_kind="rectilinear", T=0)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
        m=st.integers(min_value=1, max_value=12),
        kind=st.sampled_from(["rectangle", "plane", "convex"]),
    )
    def test_random_arrangements_are_valid(self, seed, m, kind):
        arrangement = arrangement_at(FuzzConfig(seed=seed, m=m, cake_kind=kind), 0)
        self.assertEqual(arrangement.m, m)
        self.assertEqual(validate(arrangement), [])

    @settings(max_examples=30, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2 ** 32),
        m=st.integers(min_value=1, max_value=10),
        T=st.integers(min_value=1, max_value=6),
    )
    def test_random_rectilinear_cakes(self, seed, m, T):
        arrangement = arrangement_at(FuzzConfig(seed=seed, m=m, cake_kind="rectilinear", T=T), 0)
        self.assertEqual(arrangement.cake.reflex_count, T)
        self.assertEqual(arrangement.m, m)
        self.assertEqual(validate(arrangement), [])
