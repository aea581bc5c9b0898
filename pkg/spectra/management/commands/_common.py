import logging
from dataclasses import dataclass

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from spectra.conf import spectra_settings
from spectra.exceptions import SpectraError
from spectra.models import LengthFunction, named_graph
from spectra.reports import render_csv, render_json
from spectra.serializers import parse_graph_text

logger = logging.getLogger('spectra')

LOG_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}
FORMATS = ('csv', 'json')

# exit statuses
DOMAIN_ERROR = 1
USAGE_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    format: str
    output: str = None
    seed: int = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise CommandError(f"unknown format '{self.format}'", returncode=USAGE_ERROR)
        if self.seed is not None and not isinstance(self.seed, int):
            raise CommandError(f"seed must be an integer, got {self.seed!r}", returncode=USAGE_ERROR)

    @classmethod
    def from_options(cls, options):
        seed = options.get('seed')
        return cls(
            format=options['format'],
            output=options.get('output'),
            seed=spectra_settings.SEED if seed is None else seed,
        )


def flatten_errors(detail, prefix=''):
    if isinstance(detail, dict):
        return [msg for key, value in detail.items() for msg in flatten_errors(value, f"{prefix}{key}: ")]
    if isinstance(detail, list):
        return [msg for value in detail for msg in flatten_errors(value, prefix)]
    return [f"{prefix}{detail}"]


def add_graph_arguments(parser):
    parser.add_argument('input', nargs='?', help="graph file: JSON document or whitespace edge list")
    parser.add_argument('--graph', help="catalog graph name instead of a file, e.g. paw or cycle-5")
    add_output_arguments(parser)


def add_output_arguments(parser):
    parser.add_argument('--format', choices=FORMATS, default='csv')
    parser.add_argument('--output', help="report path; stdout when omitted")


def positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise CommandError(f"not a number: {text!r}", returncode=USAGE_ERROR)
    if not value > 0:
        raise CommandError(f"expected a positive number, got {text!r}", returncode=USAGE_ERROR)
    return value


def parse_decades(text):
    """'1e-2:1e-6' -> (1e-2, 1e-6)."""
    parts = text.split(':')
    if len(parts) != 2:
        raise CommandError(f"--t-decades expects START:STOP, got {text!r}", returncode=USAGE_ERROR)
    start, stop = (positive_float(p) for p in parts)
    if not stop < start:
        raise CommandError(f"--t-decades needs STOP < START, got {text!r}", returncode=USAGE_ERROR)
    return start, stop


class SpectraCommand(BaseCommand):
    requires_system_checks = []

    def handle(self, *args, **options):
        logger.setLevel(LOG_LEVELS.get(options['verbosity'], logging.DEBUG))
        try:
            return self.run(options)
        except SpectraError as e:
            logger.error(f"{self.__module__.rsplit('.', 1)[-1]} failed: {str(e)}")
            raise CommandError(str(e), returncode=DOMAIN_ERROR)

    def run(self, options):
        raise NotImplementedError

    def load_graph(self, options):
        if bool(options.get('input')) == bool(options.get('graph')):
            raise CommandError("give exactly one of an input file or --graph NAME", returncode=USAGE_ERROR)
        if options.get('graph'):
            try:
                g = named_graph(options['graph'])
            except SpectraError as e:
                raise CommandError(str(e), returncode=USAGE_ERROR)
            return g, LengthFunction.uniform(g)
        path = options['input']
        try:
            with open(path, encoding='utf-8') as handle:
                text = handle.read()
        except OSError as e:
            raise CommandError(f"cannot read {path}: {e.strerror}", returncode=USAGE_ERROR)
        try:
            return parse_graph_text(text)
        except serializers.ValidationError as e:
            raise CommandError(f"{path}: " + "; ".join(flatten_errors(e.detail)), returncode=USAGE_ERROR)

    def emit(self, config, data, table):
        if config.format == 'json':
            text = render_json(data)
        else:
            text = render_csv(*table)
        if config.output:
            with open(config.output, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            logger.info(f"Report written to {config.output}")
        else:
            self.stdout.write(text, ending='')

    def fail_checks(self, what, failed):
        raise CommandError(f"{what} failed: {', '.join(failed)}", returncode=DOMAIN_ERROR)
