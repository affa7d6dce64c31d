from django.conf import settings
from django.core.management.base import CommandError

from analysis.management.commands._common import VERIFICATION_FAILED, ArrangementCommand
from analysis.services.fuzzing import run_fuzz
from arrangements.models import BoundName
from arrangements.services.generators import FuzzConfig


class Command(ArrangementCommand):
    help = "Check a bound on a seeded stream of random arrangements"

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="Overridden by BLANKS_SEED")
        parser.add_argument("--m", type=int, required=True)
        parser.add_argument("--iters", type=int, default=100)
        parser.add_argument("--cake", choices=["rectangle", "rectilinear", "plane", "convex"], default="rectangle")
        parser.add_argument("--T", type=int, default=0, help="Reflex vertices of rectilinear cakes")
        parser.add_argument("--extent", type=int, default=12)
        parser.add_argument("--bound", choices=BoundName.values)
        parser.add_argument("--workers", type=int, help="Threads; BLANKS_FUZZ_WORKERS by default")

    def handle(self, *args, **options):
        seed = int(settings.BLANKS_SEED) if settings.BLANKS_SEED else options["seed"]
        with self.library_errors():
            cfg = FuzzConfig(
                seed=seed, m=options["m"], grid_extent=options["extent"],
                cake_kind=options["cake"], T=options["T"], iterations=options["iters"],
            )
            outcome = run_fuzz(cfg, options["bound"], options["workers"])
        if not outcome.ok:
            failure = outcome.failure
            raise CommandError(
                f"iteration {failure.index} failed: {failure.describe()}; arrangement written to {outcome.failure_path}",
                returncode=VERIFICATION_FAILED,
            )
        self.stdout.write(f"{outcome.checked} instances ok, {outcome.tight} tight")
