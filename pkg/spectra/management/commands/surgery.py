import re

from django.core.management.base import CommandError

from spectra import surgery
from spectra.conf import spectra_settings
from spectra.cycles import default_t_grid
from spectra.models import fujiwara_weights
from spectra.reports import convergence_table, lengths_table, structure_table, trace_table
from spectra.serializers import (
    ConvergenceReportSerializer, GraphField, LengthsField, ReductionTraceSerializer, StructureReportSerializer,
)

from ._common import (
    USAGE_ERROR, RunConfig, SpectraCommand, add_graph_arguments, parse_decades, positive_float,
)

EDGE = re.compile(r'^\s*(\d+)\s*[,-]\s*(\d+)\s*$')


def parse_edge(text):
    match = EDGE.match(text)
    if match is None:
        raise CommandError(f"--keep expects an edge 'u,v', got {text!r}", returncode=USAGE_ERROR)
    return int(match[1]), int(match[2])


def graph_document(g, l, **extra):
    return {'graph': GraphField().to_representation(g), 'lengths': LengthsField().to_representation(l), **extra}


class Command(SpectraCommand):
    help = "Pendant attach/contract, vertex cuts, convergence tables and the reduction to a cycle."

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest='action', required=True)

        attach = actions.add_parser('attach', help="attach a pendant edge of length t")
        add_graph_arguments(attach)
        attach.add_argument('--at', type=int, required=True)
        attach.add_argument('--t', required=True)

        contract = actions.add_parser('contract', help="contract a degree-one vertex")
        add_graph_arguments(contract)
        contract.add_argument('--vertex', type=int, required=True)

        cut = actions.add_parser('cut', help="cut a vertex, keeping one incident edge")
        add_graph_arguments(cut)
        cut.add_argument('--at', type=int, required=True)
        cut.add_argument('--keep', required=True, help="kept edge, e.g. 2,3")

        converge = actions.add_parser('converge', help="eigenvalue convergence as the pendant length shrinks")
        add_graph_arguments(converge)
        converge.add_argument('--at', type=int, required=True)
        converge.add_argument('--t-decades', default='1e-2:1e-6')
        converge.add_argument('--per-decade', type=int, default=1)

        structure = actions.add_parser('structure', help="perturbed Laplacian entries against their expansion")
        add_graph_arguments(structure)
        structure.add_argument('--at', type=int, required=True)
        structure.add_argument('--t', default='1e-2')

        reducer = actions.add_parser('reduce', help="reduce to the girth cycle by cuts and contractions")
        add_graph_arguments(reducer)
        reducer.add_argument('--seed', type=int, help="seed of the random length function used as evidence")

    def run(self, options):
        config = RunConfig.from_options(options)
        g, l = self.load_graph(options)
        return getattr(self, f"run_{options['action']}")(config, g, l, options)

    def run_attach(self, config, g, l, options):
        t = positive_float(options['t'])
        extended, lengths = surgery.attach_pendant(g, l, options['at'], t)
        m0 = fujiwara_weights(extended, lengths).m0
        summary = [('pendant', extended.n), ('m0_at', m0[options['at'] - 1]), ('m0_pendant', m0[-1])]
        data = graph_document(extended, lengths, pendant=extended.n, m0_at=m0[options['at'] - 1], m0_pendant=m0[-1])
        self.emit(config, data, lengths_table(extended, lengths, summary))

    def run_contract(self, config, g, l, options):
        contraction = surgery.contract_pendant(g, l, options['vertex'])
        relabel = [[old, new] for old, new in sorted(contraction.relabel.items())]
        data = graph_document(contraction.graph, contraction.lengths, relabel=relabel)
        summary = [('removed', contraction.pendant), ('neighbor', contraction.neighbor)]
        self.emit(config, data, lengths_table(contraction.graph, contraction.lengths, summary))

    def run_cut(self, config, g, l, options):
        keep = parse_edge(options['keep'])
        cut = surgery.cut_at_vertex(g, options['at'], keep)
        check = surgery.cut_monotonicity_check(g, l, options['at'], keep)
        lengths = cut.lengths(l)
        summary = [
            ('clone', cut.clone),
            ('kept_edge', cut.kept_edge),
            ('lambda1_before', check.before),
            ('lambda1_after', check.after),
            ('extension_quotient', check.extension_quotient),
            ('holds', check.holds),
        ]
        data = graph_document(cut.graph, lengths, **{
            key: (list(value) if isinstance(value, tuple) else value) for key, value in summary
        })
        self.emit(config, data, lengths_table(cut.graph, lengths, summary))
        if not check.holds:
            self.fail_checks(f"cut at vertex {cut.vertex}", ['lambda1 monotonicity'])

    def run_converge(self, config, g, l, options):
        start, stop = parse_decades(options['t_decades'])
        if options['per_decade'] < 1:
            raise CommandError("--per-decade must be positive", returncode=USAGE_ERROR)
        report = surgery.eigen_convergence_check(g, l, options['at'], default_t_grid(start, stop, options['per_decade']))
        self.emit(config, ConvergenceReportSerializer(report).data, convergence_table(report))
        if not report.converged:
            self.fail_checks(f"pendant convergence at vertex {report.at}", ['decreasing deviations'])

    def run_structure(self, config, g, l, options):
        report = surgery.verify_perturbed_structure(g, l, options['at'], positive_float(options['t']))
        self.emit(config, StructureReportSerializer(report).data, structure_table(report))
        failed = [e.name for e in report.entries if not e.holds]
        if failed:
            self.fail_checks("perturbed structure", failed)

    def run_reduce(self, config, g, l, options):
        trace = surgery.reduce_to_cycle(g, seed=config.seed, grid_scales=spectra_settings.CONVERGENCE_GRID)
        self.emit(config, ReductionTraceSerializer(trace).data, trace_table(trace))
        failed = [f"step {e.step} ({e.kind})" for e in trace.inequality_chain if not e.holds]
        if failed:
            self.fail_checks("reduction", failed)
