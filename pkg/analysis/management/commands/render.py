from pathlib import Path

from django.core.management.base import CommandError

from analysis.management.commands._common import USAGE_ERROR, ArrangementCommand
from analysis.services.render import render_svg


class Command(ArrangementCommand):
    help = "Draw an arrangement or report as SVG"

    def add_arguments(self, parser):
        self.add_input(parser)
        self.add_output(parser)
        parser.add_argument("--width", type=int, help="Pixels; BLANKS_SVG_WIDTH by default")

    def handle(self, *args, **options):
        document = self.load(options["input"])
        if options["width"] is not None and options["width"] <= 50:
            raise CommandError("--width must be more than 50 pixels", returncode=USAGE_ERROR)
        with self.library_errors():
            svg = render_svg(document, options["width"])
            Path(options["output"]).write_bytes(svg)
        self.stdout.write(f"wrote {options['output']}")
