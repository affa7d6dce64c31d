from analysis.management.commands._common import ArrangementCommand
from analysis.services.transforms import absorb_holes


class Command(ArrangementCommand):
    help = "Merge every hole into a neighbouring topping, leaving no blanks"

    def add_arguments(self, parser):
        self.add_input(parser)
        self.add_output(parser)

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        with self.library_errors():
            report = absorb_holes(arrangement)
        self.save(options["output"], report)
        self.stdout.write(self.report_line(report))
