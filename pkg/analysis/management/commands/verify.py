from django.core.management.base import CommandError

from analysis.management.commands._common import USAGE_ERROR, VERIFICATION_FAILED, ArrangementCommand
from analysis.services.expansion import is_maximal
from analysis.services.holes import verify_structure
from analysis.services.reports import structure_document


class Command(ArrangementCommand):
    help = "Check maximality and the shape of every hole"

    def add_arguments(self, parser):
        self.add_input(parser)
        parser.add_argument("--out", dest="output", help="Write the structure report here")

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        with self.library_errors():
            verdict = is_maximal(arrangement)
        if not verdict:
            index, larger = verdict.counterexample
            raise CommandError(
                f"not maximal: {arrangement.labels[index]} can grow {verdict.direction} to {larger}",
                returncode=VERIFICATION_FAILED,
            )
        self.stdout.write(f"maximal: {len(verdict.witnesses)} blocking witnesses")
        with self.library_errors():
            report = verify_structure(arrangement)
        if options["output"]:
            try:
                with open(options["output"], "wb") as handle:
                    handle.write(structure_document(arrangement, report))
            except OSError as exc:
                raise CommandError(f"cannot write {options['output']}: {exc.strerror}", returncode=USAGE_ERROR) from exc
        for check in report.checks:
            self.stdout.write(str(check))
        if not report.ok:
            raise CommandError(f"{len(report.violations)} structure checks failed", returncode=VERIFICATION_FAILED)
        self.stdout.write(f"structure ok: {len(report.holes)} holes")
