import csv
import io
import json
import tempfile
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

SAMPLES = settings.BASE_DIR / 'sample_graphs'


def run(*args):
    out = io.StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def summary(text):
    rows = list(csv.reader(io.StringIO(text)))
    return {row[0]: row[1] for row in rows[rows.index(['SUMMARY']) + 1:]}


class SpectrumCommandTestCase(SimpleTestCase):
    def test_triangle(self):
        text = run('spectrum', '--graph', 'cycle-3', '--normalize')
        self.assertTrue(text.startswith('k,eigenvalue\n0,'))
        values = summary(text)
        self.assertAlmostEqual(float(values['lambda1']), 54.0, places=9)
        self.assertEqual(values['multiple'], 'true')

    def test_edge_list_file(self):
        data = json.loads(run('spectrum', str(SAMPLES / 'paw.txt'), '--format', 'json'))
        self.assertEqual(data['graph']['n'], 4)
        self.assertEqual(data['lengths'][-1], [3, 4, 0.5])
        self.assertEqual(len(data['eigenvalues']), 4)
        self.assertFalse(data['normalized'])

    def test_output_is_reproducible(self):
        path = str(SAMPLES / 'triangle_tail.json')
        self.assertEqual(run('spectrum', path), run('spectrum', path))

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp) / 'a.json', Path(tmp) / 'b.json'
            self.assertEqual(run('spectrum', '--graph', 'bowtie', '--format', 'json', '--output', str(first)), '')
            run('spectrum', '--graph', 'bowtie', '--format', 'json', '--output', str(second))
            self.assertEqual(first.read_bytes(), second.read_bytes())
            self.assertEqual(json.loads(first.read_text())['graph']['n'], 5)

    def test_malformed_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.txt'
            path.write_text("1 2\n2 three\n")
            with self.assertRaises(CommandError) as e:
                run('spectrum', str(path))
        self.assertEqual(e.exception.returncode, 2)
        self.assertIn("line 2", str(e.exception))

    def test_missing_file(self):
        with self.assertRaises(CommandError) as e:
            run('spectrum', str(SAMPLES / 'missing.txt'))
        self.assertEqual(e.exception.returncode, 2)

    def test_graph_source_is_required_once(self):
        with self.assertRaises(CommandError) as e:
            run('spectrum')
        self.assertEqual(e.exception.returncode, 2)
        with self.assertRaises(CommandError) as e:
            run('spectrum', str(SAMPLES / 'paw.txt'), '--graph', 'paw')
        self.assertEqual(e.exception.returncode, 2)
        with self.assertRaises(CommandError) as e:
            run('spectrum', '--graph', 'wheel-5')
        self.assertEqual(e.exception.returncode, 2)


class CycleAsymptoticsCommandTestCase(SimpleTestCase):
    def test_sweep_passes(self):
        data = json.loads(run('cycle_asymptotics', '--n', '4', '--t-decades', '1e-3:1e-6', '--per-decade', '4',
                              '--drop', '0', '--format', 'json'))
        self.assertTrue(data['passed'], data['checks'])
        self.assertEqual(len(data['records']), 13)
        self.assertAlmostEqual(data['slope_lambda1']['slope'], -1.0, delta=0.05)

    def test_default_grid_csv(self):
        text = run('cycle_asymptotics', '--n', '4')
        self.assertTrue(text.startswith('t,lambda1,lambda2,lambda_max,lambda1_t,total_m0,lambda1_normalized\n'))
        self.assertEqual(summary(text)['passed'], 'true')

    def test_order_too_small(self):
        with self.assertRaises(CommandError) as e:
            run('cycle_asymptotics', '--n', '2')
        self.assertEqual(e.exception.returncode, 2)

    def test_bad_decades(self):
        with self.assertRaises(CommandError) as e:
            run('cycle_asymptotics', '--n', '4', '--t-decades', '1e-6:1e-2')
        self.assertEqual(e.exception.returncode, 2)

    def test_drop_leaves_too_few_points(self):
        # 1e-3:1e-5 at 2 per decade is a 5 point grid
        for drop in ('3', '5', '9'):
            with self.assertRaises(CommandError) as e:
                run('cycle_asymptotics', '--n', '4', '--t-decades', '1e-3:1e-5', '--per-decade', '2',
                    '--drop', drop)
            self.assertEqual(e.exception.returncode, 2)
            self.assertIn("--drop", str(e.exception))


class MaximizeCommandTestCase(SimpleTestCase):
    def test_single_edge(self):
        values = summary(run('maximize', '--graph', 'path-2', '--starts', '2'))
        self.assertEqual(values['verdict'], 'converged')
        self.assertAlmostEqual(float(values['best_objective']), 8.0, delta=1e-9)

    def test_triangle_json(self):
        data = json.loads(run('maximize', '--graph', 'cycle-3', '--starts', '1', '--format', 'json'))
        self.assertEqual(data['verdict'], 'divergence_suspected')
        self.assertEqual(data['config']['starts'], 1)
        self.assertEqual(data['iterations'][0]['iteration'], 0)

    def test_invalid_budget(self):
        with self.assertRaises(CommandError) as e:
            run('maximize', '--graph', 'paw', '--budget', '-1')
        self.assertEqual(e.exception.returncode, 2)


class SurgeryCommandTestCase(SimpleTestCase):
    def test_attach(self):
        text = run('surgery', 'attach', '--graph', 'path-2', '--at', '2', '--t', '0.01')
        self.assertEqual(
            text, "u,v,length\n1,2,1\n2,3,0.01\n\nSUMMARY\nn,3\nm,2\npendant,3\nm0_at,1.01\nm0_pendant,0.01\n"
        )

    def test_contract(self):
        data = json.loads(run('surgery', 'contract', str(SAMPLES / 'paw.txt'), '--vertex', '4', '--format', 'json'))
        self.assertEqual(data['graph'], {'n': 3, 'edges': [[1, 2], [1, 3], [2, 3]]})
        self.assertEqual(data['relabel'], [[1, 1], [2, 2], [3, 3]])

    def test_contract_needs_a_pendant(self):
        with self.assertLogs('spectra', level='ERROR'):
            with self.assertRaises(CommandError) as e:
                run('surgery', 'contract', '--graph', 'cycle-4', '--vertex', '1')
        self.assertEqual(e.exception.returncode, 1)

    def test_cut(self):
        values = summary(run('surgery', 'cut', '--graph', 'cycle-3', '--at', '3', '--keep', '2,3'))
        self.assertEqual(values['clone'], '4')
        self.assertEqual(values['kept_edge'], '2-3')
        self.assertEqual(values['holds'], 'true')
        self.assertLess(float(values['lambda1_after']), float(values['lambda1_before']))

    def test_invalid_cut(self):
        with self.assertLogs('spectra', level='ERROR'):
            with self.assertRaises(CommandError) as e:
                run('surgery', 'cut', '--graph', 'paw', '--at', '3', '--keep', '3,4')
        self.assertEqual(e.exception.returncode, 1)
        self.assertIn("invalid cut", str(e.exception))

    def test_converge(self):
        text = run('surgery', 'converge', '--graph', 'path-2', '--at', '2')
        self.assertTrue(text.startswith('t,lambda1,max_deviation,largest,noise_floor,deviation_0,deviation_1\n'))
        values = summary(text)
        self.assertEqual(values['converged'], 'true')
        self.assertAlmostEqual(float(values['base_lambda1']), 8.0, places=9)

    def test_structure(self):
        data = json.loads(run('surgery', 'structure', '--graph', 'path-2', '--at', '2', '--format', 'json'))
        self.assertTrue(data['passed'])
        self.assertEqual([e['name'] for e in data['entries']],
                         ['corner', 'diagonal', 'coupling', 'row', 'untouched', 'zero_column'])

    def test_reduce(self):
        data = json.loads(run('surgery', 'reduce', str(SAMPLES / 'bowtie.json'), '--seed', '5', '--format', 'json'))
        self.assertTrue(data['passed'])
        self.assertEqual(data['final'], {'n': 3, 'edges': [[1, 2], [1, 3], [2, 3]]})
        self.assertEqual([step['kind'] for step in data['steps']], ['cut', 'contract', 'contract', 'contract'])
        self.assertEqual(data['steps'][0]['kept_edge'], [3, 4])

    def test_reduce_tree(self):
        with self.assertLogs('spectra', level='ERROR'):
            with self.assertRaises(CommandError) as e:
                run('surgery', 'reduce', '--graph', 'star-4')
        self.assertEqual(e.exception.returncode, 1)

    def test_bad_keep_edge(self):
        with self.assertRaises(CommandError) as e:
            run('surgery', 'cut', '--graph', 'paw', '--at', '3', '--keep', 'three')
        self.assertEqual(e.exception.returncode, 2)
