from django.core.management.base import CommandError

from analysis.management.commands._common import USAGE_ERROR, ArrangementCommand
from analysis.services.expansion import TieBreak, greedy_expand


def _order(text):
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise CommandError(f"--order must be comma-separated indices, got {text!r}", returncode=USAGE_ERROR) from exc


class Command(ArrangementCommand):
    help = "Expand every topping to its largest rectangle, one after the other"

    def add_arguments(self, parser):
        self.add_input(parser)
        self.add_output(parser)
        parser.add_argument("--order", help="Processing order as 0-based indices, e.g. 3,0,1,2")
        parser.add_argument("--tie-break", dest="tie_break", choices=TieBreak.values, default=TieBreak.LEXICOGRAPHIC)

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        order = _order(options["order"]) if options["order"] else None
        with self.library_errors():
            expanded = greedy_expand(arrangement, order, options["tie_break"])
        self.save(options["output"], expanded)
