from django.core.management.base import CommandError

from spectra.optimizer import OptimizerConfig, maximize_lambda1
from spectra.reports import optimization_table
from spectra.serializers import OptimizationReportSerializer

from ._common import USAGE_ERROR, RunConfig, SpectraCommand, add_graph_arguments


class Command(SpectraCommand):
    help = "Multi-start ascent of lambda1 * (sum m0)**2 over edge lengths, with divergence detection."

    def add_arguments(self, parser):
        add_graph_arguments(parser)
        parser.add_argument('--budget', type=int, help="iterations per start")
        parser.add_argument('--cap', type=float, help="objective value that counts as divergence")
        parser.add_argument('--seed', type=int, help="seed for the random starts")
        parser.add_argument('--starts', type=int, help="number of starts")

    def run(self, options):
        config = RunConfig.from_options(options)
        g, _ = self.load_graph(options)
        try:
            optimizer_config = OptimizerConfig.from_settings(
                budget=options['budget'],
                cap=options['cap'],
                seed=config.seed,
                starts=options['starts'],
            )
        except ValueError as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)
        report = maximize_lambda1(g, optimizer_config)
        self.emit(config, OptimizationReportSerializer(report).data, optimization_table(report))
