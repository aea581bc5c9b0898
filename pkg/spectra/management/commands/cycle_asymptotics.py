from django.core.management.base import CommandError

from spectra.conf import spectra_settings
from spectra.cycles import default_t_grid, sweep_asymptotics
from spectra.reports import sweep_table
from spectra.serializers import SweepReportSerializer

from ._common import USAGE_ERROR, RunConfig, SpectraCommand, add_output_arguments, parse_decades


class Command(SpectraCommand):
    help = "Sweep the collapsing length family on C_n and check the 1/t and 1/t**2 divergence rates."

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True, help="cycle order, at least 3")
        parser.add_argument('--t-decades', help="START:STOP of the geometric t grid, e.g. 1e-2:1e-6")
        parser.add_argument('--per-decade', type=int, help="grid points per decade")
        parser.add_argument('--drop', type=int, help="leading grid points left out of the slope fits")
        add_output_arguments(parser)

    def run(self, options):
        config = RunConfig.from_options(options)
        n = options['n']
        if n < 3:
            raise CommandError(f"--n must be at least 3, got {n}", returncode=USAGE_ERROR)
        per_decade = options['per_decade']
        if per_decade is not None and per_decade < 1:
            raise CommandError(f"--per-decade must be positive, got {per_decade}", returncode=USAGE_ERROR)
        if options['t_decades']:
            start, stop = parse_decades(options['t_decades'])
        else:
            start, stop = spectra_settings.T_GRID_START, spectra_settings.T_GRID_STOP
        t_grid = default_t_grid(start, stop, per_decade)
        drop = spectra_settings.SLOPE_DROP if options['drop'] is None else options['drop']
        if drop < 0:
            raise CommandError(f"--drop must be non-negative, got {drop}", returncode=USAGE_ERROR)
        # slope fits need three points
        if drop > len(t_grid) - 3:
            raise CommandError(
                f"--drop {drop} leaves fewer than 3 of {len(t_grid)} grid points for the slope fits",
                returncode=USAGE_ERROR,
            )

        report = sweep_asymptotics(n, t_grid, drop=drop)
        self.emit(config, SweepReportSerializer(report).data, sweep_table(report))
        failed = [name for name, ok in report.checks().items() if not ok]
        if failed:
            self.fail_checks(f"C_{n} asymptotics", failed)
