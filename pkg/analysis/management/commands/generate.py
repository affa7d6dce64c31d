from django.conf import settings

from analysis.management.commands._common import ArrangementCommand
from arrangements.models import Arrangement, Cake
from arrangements.services import generators
from arrangements.services.generators import FuzzConfig

CONSTRUCTIONS = (
    "grid", "staircase", "longbox", "convex", "random",
    "pinwheel", "lemma6", "greedy", "nonmaximal",
)


class Command(ArrangementCommand):
    help = "Write a constructed or random arrangement file"

    def add_arguments(self, parser):
        parser.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
        parser.add_argument("--m", type=int, default=16, help="Number of toppings")
        parser.add_argument("--T", type=int, default=1, help="Staircase steps / reflex vertices")
        parser.add_argument("--seed", type=int, default=0, help="Seed of the random construction")
        parser.add_argument("--cake", choices=["rectangle", "rectilinear", "plane", "convex"], default="rectangle")
        parser.add_argument("--extent", type=int, default=12, help="Grid size of random cakes")
        self.add_output(parser)

    def build(self, options) -> Arrangement:
        name, m, T = options["construction"], options["m"], options["T"]
        if name == "grid":
            return generators.gen_grid(m)
        if name == "staircase":
            return generators.gen_staircase(m, T)
        if name == "longbox":
            return Arrangement(Cake.plane(), tuple(generators.gen_plane_longbox(m)))
        if name == "convex":
            return generators.gen_convex_fixture(m)
        if name == "random":
            seed = int(settings.BLANKS_SEED) if settings.BLANKS_SEED else options["seed"]
            cfg = FuzzConfig(
                seed=seed, m=m, grid_extent=options["extent"], cake_kind=options["cake"],
                T=T if options["cake"] == "rectilinear" else 0, iterations=1,
            )
            return generators.arrangement_at(cfg, 0)
        return {
            "pinwheel": generators.gen_pinwheel,
            "lemma6": generators.gen_lemma6_fixture,
            "greedy": generators.gen_greedy_fixture,
            "nonmaximal": generators.gen_nonmaximal_fixture,
        }[name]()

    def handle(self, *args, **options):
        with self.library_errors():
            arrangement = self.build(options)
        self.save(options["output"], arrangement)
