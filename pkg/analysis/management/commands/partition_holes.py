from analysis.management.commands._common import ArrangementCommand
from analysis.services.transforms import partition_holes


class Command(ArrangementCommand):
    help = "Cut every hole into rectangles and write the report"

    def add_arguments(self, parser):
        self.add_input(parser)
        self.add_output(parser)

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        with self.library_errors():
            report = partition_holes(arrangement)
        self.save(options["output"], report)
        self.stdout.write(self.report_line(report))
