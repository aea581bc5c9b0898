import json

from django.test import SimpleTestCase
from rest_framework import serializers

from .models import LengthFunction, cycle_graph, named_graph, path_graph
from .reports import format_cell, render_csv, render_json, spectrum_report, spectrum_table
from .serializers import (
    GraphDocumentSerializer, ReductionTraceSerializer, SpectrumReportSerializer, parse_edge_list, parse_graph_text,
)
from .surgery import reduce_to_cycle


class GraphDocumentSerializerTestCase(SimpleTestCase):
    def test_valid_document(self):
        serializer = GraphDocumentSerializer(data={'n': 3, 'edges': [[1, 2, 0.5], [2, 3]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['graph'], path_graph(3))
        self.assertEqual(serializer.validated_data['lengths'].values, (0.5, 1.0))

    def test_order_defaults_to_largest_label(self):
        serializer = GraphDocumentSerializer(data={'edges': [[1, 2], [2, 3], [3, 1]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['n'], 3)
        self.assertEqual(serializer.validated_data['graph'], cycle_graph(3))

    def test_nonpositive_length(self):
        serializer = GraphDocumentSerializer(data={'edges': [[1, 2], [2, 3, -1]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("edges[1]", str(serializer.errors['edges'][0]))

    def test_non_integer_label(self):
        serializer = GraphDocumentSerializer(data={'edges': [[1.5, 2]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("edges[0]: vertex labels must be integers", str(serializer.errors['edges'][0]))

    def test_malformed_entry_names_its_index(self):
        serializer = GraphDocumentSerializer(data={'edges': [[1, 2], [2, 3, 1, 4]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn(1, serializer.errors['edges'])

    def test_graph_errors(self):
        for edges, message in (([[1, 1]], "loop"), ([[1, 2], [2, 1]], "duplicate")):
            serializer = GraphDocumentSerializer(data={'edges': edges})
            self.assertFalse(serializer.is_valid())
            self.assertIn(message, str(serializer.errors['edges'][0]))
        serializer = GraphDocumentSerializer(data={'n': 2, 'edges': [[1, 3]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("out of range", str(serializer.errors['edges'][0]))


class GraphTextTestCase(SimpleTestCase):
    # Test the whitespace edge list format
    def test_edge_list(self):
        g, l = parse_graph_text("# paw\n1 2\n2 3 0.5\n\n1 3  # chord\n3 4 2\n")
        self.assertEqual(g, named_graph('paw'))
        self.assertEqual(l.as_dict(), {(1, 2): 1.0, (1, 3): 1.0, (2, 3): 0.5, (3, 4): 2.0})

    def test_line_diagnostics(self):
        with self.assertRaises(serializers.ValidationError) as e:
            parse_edge_list("1 2\n2 x\n")
        self.assertIn("line 2", e.exception.detail)
        with self.assertRaises(serializers.ValidationError) as e:
            parse_edge_list("1 2\n\n2 3 4 5\n")
        self.assertIn("line 3", e.exception.detail)
        with self.assertRaises(serializers.ValidationError) as e:
            parse_edge_list("1 2 long\n")
        self.assertIn("line 1", e.exception.detail)

    def test_json_document(self):
        g, l = parse_graph_text('{"n": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1]]}')
        self.assertEqual(g, cycle_graph(4))
        self.assertEqual(l, LengthFunction.uniform(g))

    def test_malformed_json(self):
        with self.assertRaises(serializers.ValidationError) as e:
            parse_graph_text('{"edges": [[1, 2]')
        self.assertIn("document", e.exception.detail)

    def test_edge_list_errors_surface_from_validation(self):
        with self.assertRaises(serializers.ValidationError) as e:
            parse_graph_text("1 2 0\n")
        self.assertIn("edges", e.exception.detail)


class ReportSerializerTestCase(SimpleTestCase):
    def test_spectrum_report(self):
        g = cycle_graph(3)
        data = SpectrumReportSerializer(spectrum_report(g, LengthFunction.uniform(g), normalize=True)).data
        self.assertEqual(data['graph'], {'n': 3, 'edges': [[1, 2], [1, 3], [2, 3]]})
        self.assertAlmostEqual(data['lambda1'], 54.0, places=9)
        self.assertTrue(data['multiple'])
        self.assertEqual(len(data['eigenvalues']), 3)
        self.assertAlmostEqual(data['lengths'][0][2], 1 / 6, places=15)

    def test_reduction_trace(self):
        data = ReductionTraceSerializer(reduce_to_cycle(named_graph('paw'), seed=1)).data
        self.assertEqual(data['cycle'], [1, 2, 3])
        self.assertEqual(data['final']['n'], 3)
        self.assertEqual(data['steps'][0]['kind'], 'contract')
        self.assertIsNone(data['steps'][0]['kept_edge'])
        self.assertEqual(len(data['steps'][0]['evidence']['points']), 3)
        self.assertTrue(data['passed'])


class RenderTestCase(SimpleTestCase):
    def test_format_cell(self):
        self.assertEqual(format_cell(0.1), '0.10000000000000001')
        self.assertEqual(format_cell(0.01), '0.01')
        self.assertEqual(format_cell(True), 'true')
        self.assertEqual(format_cell(None), '')
        self.assertEqual(format_cell((2, 3)), '2-3')
        self.assertEqual(format_cell(7), '7')

    def test_csv_with_summary(self):
        text = render_csv(['k', 'value'], [(0, 0.5), (1, 2.0)], [('passed', False)])
        self.assertEqual(text, "k,value\n0,0.5\n1,2\n\nSUMMARY\npassed,false\n")

    def test_spectrum_table(self):
        g = path_graph(2)
        header, rows, summary = spectrum_table(spectrum_report(g, LengthFunction.uniform(g, 0.5)))
        self.assertEqual(header, ['k', 'eigenvalue'])
        self.assertEqual(len(rows), 2)
        self.assertAlmostEqual(dict(summary)['lambda1'], 8.0, places=12)

    def test_json(self):
        text = render_json({'a': 1, 'b': [0.5, None]})
        self.assertTrue(text.endswith('}\n'))
        self.assertEqual(json.loads(text), {'a': 1, 'b': [0.5, None]})
        self.assertIn('\n  "a": 1', text)
