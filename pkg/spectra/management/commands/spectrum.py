from spectra.reports import spectrum_report, spectrum_table
from spectra.serializers import SpectrumReportSerializer

from ._common import RunConfig, SpectraCommand, add_graph_arguments


class Command(SpectraCommand):
    help = "Full Laplacian spectrum, lambda1 and lambda1_normalized of a length-weighted graph."

    def add_arguments(self, parser):
        add_graph_arguments(parser)
        parser.add_argument('--normalize', action='store_true', help="rescale lengths so that sum m0 = 1 first")

    def run(self, options):
        config = RunConfig.from_options(options)
        g, l = self.load_graph(options)
        report = spectrum_report(g, l, normalize=options['normalize'])
        self.emit(config, SpectrumReportSerializer(report).data, spectrum_table(report))
