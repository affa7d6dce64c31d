from analysis.management.commands._common import ArrangementCommand
from analysis.services.bounds import four_vertex_census
from analysis.services.transforms import contract_all


class Command(ArrangementCommand):
    help = "Contract every hole of a maximal arrangement into a 4-vertex"

    def add_arguments(self, parser):
        self.add_input(parser)
        self.add_output(parser)

    def handle(self, *args, **options):
        arrangement = self.load_arrangement(options["input"])
        with self.library_errors():
            partition, contracted = contract_all(arrangement)
            census = four_vertex_census(partition)
        self.save(options["output"], partition)
        self.stdout.write(
            f"contracted {contracted} holes: {census.four_vertices} 4-vertices, "
            f"{census.three_vertices} 3-vertices"
        )
