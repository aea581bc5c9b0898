import csv
import io
import logging
from dataclasses import dataclass

import numpy as np
from rest_framework.renderers import JSONRenderer

from .conf import spectra_settings
from .models import fujiwara_weights, normalize_lengths
from .spectral import first_eigenpair

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    graph: object
    lengths: object
    normalized: bool
    eigenvalues: np.ndarray
    lambda1: float
    lambda1_normalized: float
    multiple: bool
    residual: float


def spectrum_report(g, l, normalize=False):
    if normalize:
        l = normalize_lengths(l)
    pair = first_eigenpair(g, l)
    total = fujiwara_weights(g, l).total_m0
    return SpectrumReport(
        graph=g,
        lengths=l,
        normalized=normalize,
        eigenvalues=pair.spectrum.eigenvalues,
        lambda1=pair.value,
        lambda1_normalized=pair.value * total**2,
        multiple=pair.multiple,
        residual=pair.spectrum.residual,
    )


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format(float(value), spectra_settings.CSV_FLOAT_FORMAT)
    if isinstance(value, tuple):
        return '-'.join(str(x) for x in value)
    return str(value)


def render_csv(header, rows, summary=()):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(x) for x in row])
    if summary:
        writer.writerow([])
        writer.writerow(["SUMMARY"])
        for key, value in summary:
            writer.writerow([key, format_cell(value)])
    return buffer.getvalue()


def render_json(data):
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8') + '\n'


def spectrum_table(report):
    rows = [(k, value) for k, value in enumerate(report.eigenvalues)]
    summary = [
        ('lambda1', report.lambda1),
        ('lambda1_normalized', report.lambda1_normalized),
        ('multiple', report.multiple),
        ('normalized', report.normalized),
        ('residual', report.residual),
    ]
    return ['k', 'eigenvalue'], rows, summary


def lengths_table(g, l, summary=()):
    return ['u', 'v', 'length'], [(u, v, x) for (u, v), x in zip(l.edges, l.values)], [
        ('n', g.n), ('m', g.m), *summary,
    ]


def sweep_table(report):
    header = ['t', 'lambda1', 'lambda2', 'lambda_max', 'lambda1_t', 'total_m0', 'lambda1_normalized']
    rows = [
        (r.t, r.lambda1, r.lambda2, r.lambda_max, r.lambda1_t, r.total_m0, r.lambda1_normalized)
        for r in report.records
    ]
    summary = [
        ('n', report.n),
        ('slope_lambda1', report.slope_lambda1.slope),
        ('slope_lambda2', report.slope_lambda2.slope),
        ('limit_estimate', report.limit_estimate),
        ('limit_target', report.limit_target),
        *report.checks().items(),
        ('passed', report.passed),
    ]
    return header, rows, summary


def convergence_table(report):
    count = len(report.base_eigenvalues)
    header = ['t', 'lambda1', 'max_deviation', 'largest', 'noise_floor'] + [f'deviation_{k}' for k in range(count)]
    rows = [
        (p.t, p.lambda1, p.max_deviation, p.largest, p.noise_floor, *p.deviations)
        for p in report.points
    ]
    fit = report.largest_fit
    summary = [
        ('at', report.at),
        ('base_lambda1', report.base_eigenvalues[1]),
        ('constant', report.constant),
        ('largest_slope', None if fit is None else fit.slope),
        ('decreasing', report.decreasing),
        ('converged', report.converged),
    ]
    return header, rows, summary


def structure_table(report):
    header = ['entry', 'value', 'expansion', 'residual', 'half_step_residual', 'expected_order',
              'observed_order', 'holds']
    rows = [
        (e.name, e.value, e.expansion, e.residual, e.half_step_residual, e.expected_order,
         e.observed_order, e.holds)
        for e in report.entries
    ]
    return header, rows, [('at', report.at), ('t', report.t), ('alpha', report.alpha), ('passed', report.passed)]


def trace_table(trace):
    rows = []
    for index, (step, evidence) in enumerate(zip(trace.steps, trace.inequality_chain)):
        rows.append((index, step.kind, step.vertex, step.kept_edge, evidence.before, evidence.after, evidence.holds))
    summary = [
        ('cycle', tuple(trace.cycle)),
        ('final_n', trace.final.n),
        ('final_m', trace.final.m),
        ('passed', trace.passed),
    ]
    return ['step', 'kind', 'vertex', 'kept_edge', 'lambda1_before', 'lambda1_after', 'holds'], rows, summary


def optimization_table(report):
    edges = report.best.edges
    header = ['iteration', 'objective', 'step_size', 'gradient_norm', 'simplex_diameter', 'multiple'] + [
        f'l_{u}_{v}' for u, v in edges
    ]
    rows = [
        (s.iteration, s.objective, s.step_size, s.gradient_norm, s.simplex_diameter, s.multiple, *s.lengths.values)
        for s in report.iterations
    ]
    summary = [
        ('verdict', report.verdict),
        ('best_objective', report.best_objective),
        ('start', report.start),
    ]
    return header, rows, summary
