from django.core.management.base import CommandError

from analysis.management.commands._common import VERIFICATION_FAILED, ArrangementCommand
from analysis.services.reports import analyze
from arrangements.models import BoundName


class Command(ArrangementCommand):
    help = "Count blanks and check them against one of the bounds"

    def add_arguments(self, parser):
        self.add_input(parser)
        parser.add_argument("--bound", choices=BoundName.values, help="Defaults to the bound of the cake kind")
        self.add_output(parser, required=False)

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        with self.library_errors():
            report = analyze(arrangement, options["bound"])
        if options["output"]:
            self.save(options["output"], report)
        for note in report.notes:
            self.stdout.write(f"note: {note}")
        line = self.report_line(report)
        if not report.satisfied:
            raise CommandError(line, returncode=VERIFICATION_FAILED)
        self.stdout.write(line)
