import io
import logging
import math

from rest_framework import serializers
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser

from .exceptions import SpectraError
from .models import LengthFunction, build_graph

logger = logging.getLogger(__name__)


class GraphDocumentSerializer(serializers.Serializer):
    """`{"n": 3, "edges": [[1, 2, 0.5], [2, 3], ...]}`; a missing length means 1.0."""

    n = serializers.IntegerField(min_value=1, required=False)
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=3),
    )

    def validate_edges(self, edges):
        cleaned = []
        for i, entry in enumerate(edges):
            if not all(math.isfinite(x) for x in entry):
                raise serializers.ValidationError(f"edges[{i}]: entries must be finite numbers, got {entry}")
            u, v = entry[0], entry[1]
            if u != int(u) or v != int(v):
                raise serializers.ValidationError(f"edges[{i}]: vertex labels must be integers, got {entry}")
            length = entry[2] if len(entry) == 3 else 1.0
            if not length > 0:
                raise serializers.ValidationError(f"edges[{i}]: length must be positive and finite, got {length}")
            cleaned.append((int(u), int(v), float(length)))
        return cleaned

    def validate(self, data):
        edges = data['edges']
        labels = [label for u, v, _ in edges for label in (u, v)]
        n = data.get('n', max(labels, default=1))
        try:
            graph = build_graph(n, [(u, v) for u, v, _ in edges])
        except SpectraError as e:
            raise serializers.ValidationError({"edges": str(e)})
        data['n'] = n
        data['graph'] = graph
        data['lengths'] = LengthFunction.from_mapping({(u, v): length for u, v, length in edges})
        logger.debug(f"Validated graph document with n={n} and {len(edges)} edges")
        return data


def parse_edge_list(text):
    """Whitespace edge list, one `u v [length]` per line; `#` starts a comment."""
    edges = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise serializers.ValidationError(
                {f"line {number}": f"expected 'u v [length]', got {len(fields)} fields: {raw.strip()!r}"}
            )
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise serializers.ValidationError(
                {f"line {number}": f"vertex labels must be integers, got {fields[0]!r} {fields[1]!r}"}
            )
        entry = [u, v]
        if len(fields) == 3:
            try:
                entry.append(float(fields[2]))
            except ValueError:
                raise serializers.ValidationError({f"line {number}": f"length is not a number: {fields[2]!r}"})
        edges.append(entry)
    return {'edges': edges}


def parse_graph_text(text):
    if text.lstrip().startswith('{'):
        try:
            document = JSONParser().parse(io.BytesIO(text.encode('utf-8')))
        except ParseError as e:
            raise serializers.ValidationError({"document": str(e.detail)})
    else:
        document = parse_edge_list(text)
    serializer = GraphDocumentSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data['graph'], serializer.validated_data['lengths']


class GraphField(serializers.Field):
    def to_representation(self, g):
        return {'n': g.n, 'edges': [[u, v] for u, v in g.edges]}


class LengthsField(serializers.Field):
    def to_representation(self, l):
        return [[u, v, float(x)] for (u, v), x in zip(l.edges, l.values)]


def float_list(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), **kwargs)


class SpectrumReportSerializer(serializers.Serializer):
    graph = GraphField()
    lengths = LengthsField()
    normalized = serializers.BooleanField()
    eigenvalues = float_list()
    lambda1 = serializers.FloatField()
    lambda1_normalized = serializers.FloatField()
    multiple = serializers.BooleanField()
    residual = serializers.FloatField()


class LogLogFitSerializer(serializers.Serializer):
    slope = serializers.FloatField()
    intercept = serializers.FloatField()
    max_residual = serializers.FloatField()
    points = serializers.IntegerField()


class SweepRecordSerializer(serializers.Serializer):
    t = serializers.FloatField()
    lambda1 = serializers.FloatField()
    lambda2 = serializers.FloatField()
    lambda_max = serializers.FloatField()
    lambda1_t = serializers.FloatField()
    total_m0 = serializers.FloatField()
    lambda1_normalized = serializers.FloatField()


class SweepReportSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    t_grid = float_list()
    dropped = serializers.IntegerField()
    records = SweepRecordSerializer(many=True)
    skipped = float_list()
    slope_lambda1 = LogLogFitSerializer()
    slope_lambda2 = LogLogFitSerializer()
    limit_estimate = serializers.FloatField()
    limit_target = serializers.FloatField()
    limit_error = serializers.FloatField()
    checks = serializers.SerializerMethodField()
    passed = serializers.BooleanField()

    def get_checks(self, report):
        return report.checks()


class ConvergencePointSerializer(serializers.Serializer):
    t = serializers.FloatField()
    lambda1 = serializers.FloatField()
    deviations = float_list()
    max_deviation = serializers.FloatField()
    largest = serializers.FloatField()
    noise_floor = serializers.FloatField()


class ConvergenceReportSerializer(serializers.Serializer):
    at = serializers.IntegerField()
    base_eigenvalues = float_list()
    points = ConvergencePointSerializer(many=True)
    failures = float_list()
    constant = serializers.FloatField()
    decreasing = serializers.BooleanField()
    converged = serializers.BooleanField()
    largest_slope = serializers.SerializerMethodField()

    def get_largest_slope(self, report):
        fit = report.largest_fit
        return None if fit is None else fit.slope


class StructureEntrySerializer(serializers.Serializer):
    name = serializers.CharField()
    value = serializers.FloatField()
    expansion = serializers.FloatField()
    residual = serializers.FloatField()
    half_step_residual = serializers.FloatField()
    expected_order = serializers.IntegerField()
    observed_order = serializers.FloatField(allow_null=True)
    holds = serializers.BooleanField()


class StructureReportSerializer(serializers.Serializer):
    at = serializers.IntegerField()
    t = serializers.FloatField()
    alpha = serializers.FloatField()
    entries = StructureEntrySerializer(many=True)
    passed = serializers.BooleanField()


class CutCheckSerializer(serializers.Serializer):
    before = serializers.FloatField()
    after = serializers.FloatField()
    extension_quotient = serializers.FloatField()
    holds = serializers.BooleanField()


class SurgeryStepSerializer(serializers.Serializer):
    kind = serializers.CharField()
    vertex = serializers.IntegerField()
    kept_edge = serializers.ListField(child=serializers.IntegerField(), allow_null=True)
    evidence = serializers.SerializerMethodField()

    def get_evidence(self, step):
        if step.kind == 'cut':
            return CutCheckSerializer(step.evidence).data
        return ConvergenceReportSerializer(step.evidence).data


class InequalityEvidenceSerializer(serializers.Serializer):
    step = serializers.IntegerField()
    kind = serializers.CharField()
    before = serializers.FloatField()
    after = serializers.FloatField()
    holds = serializers.BooleanField()


class ReductionTraceSerializer(serializers.Serializer):
    initial = GraphField()
    cycle = serializers.ListField(child=serializers.IntegerField())
    steps = SurgeryStepSerializer(many=True)
    final = GraphField()
    inequality_chain = InequalityEvidenceSerializer(many=True)
    passed = serializers.BooleanField()


class OptimizationStepSerializer(serializers.Serializer):
    iteration = serializers.IntegerField()
    lengths = LengthsField()
    objective = serializers.FloatField()
    step_size = serializers.FloatField()
    gradient_norm = serializers.FloatField(allow_null=True)
    simplex_diameter = serializers.FloatField(allow_null=True)
    multiple = serializers.BooleanField()


class OptimizerConfigSerializer(serializers.Serializer):
    budget = serializers.IntegerField()
    cap = serializers.FloatField()
    seed = serializers.IntegerField()
    starts = serializers.IntegerField()
    conditioning_floor = serializers.FloatField()
    gradient_tol = serializers.FloatField()
    simplex_iterations = serializers.IntegerField()


class RunSummarySerializer(serializers.Serializer):
    start = serializers.IntegerField()
    verdict = serializers.CharField()
    best_objective = serializers.FloatField()
    iterations = serializers.IntegerField()


class OptimizationReportSerializer(serializers.Serializer):
    verdict = serializers.CharField()
    best_objective = serializers.FloatField()
    best = LengthsField()
    start = serializers.IntegerField()
    config = OptimizerConfigSerializer()
    runs = RunSummarySerializer(many=True)
    iterations = OptimizationStepSerializer(many=True)
