import unittest

import math
import sys
import tempfile
from pathlib import Path
sys.path.append('..')
import numpy as np

from ewglab.enums import Provenance
from ewglab.execution import JobManager
from ewglab.oscillator import OscillatorSpec, PacketSpec, classical_gap_bound, classical_orbit, x3p_closed_form
from ewglab.plots import asymmetry_figure, build_figures, emit_plots, x3p_figure
from ewglab.report import CHECK_COLUMNS, Check, RunReport, ScenarioResult, Series, collect, format_cell
from ewglab.scenarios import Scenario


def _sample_report() -> RunReport:
    result = ScenarioResult(Scenario.RELPOS, series=Series(Scenario.RELPOS))
    for m in (16.0, 32.0, 64.0):
        result.series.add(m, 0.1, 0.0, 0.5, 0.0, 1e-3 / m**2, 1e-2 / m**2)
    result.add(Check.close('slope', 'relpos', -2.001, -2.0, 0.1, Provenance.derived))
    result.add(Check.holds('monotone', 'relpos', True, Provenance.paper))
    report = collect([result])
    report.config_text = 'scenario = "relpos"\n'
    return report


class TestCells(unittest.TestCase):

    def test_format_cell(self):
        self.assertEqual(format_cell(None), '')
        self.assertEqual(format_cell(True), 'true')
        self.assertEqual(format_cell(3), '3')
        self.assertEqual(format_cell(0.1), '0.10000000000000001')
        self.assertEqual(format_cell(1.5 - 2j), '1.5-2j')
        self.assertEqual(format_cell('up'), 'up')
        self.assertEqual(float(format_cell(math.pi)), math.pi)


class TestChecks(unittest.TestCase):

    def test_close(self):
        check = Check.close('x', 'measurement', 1.0 + 1e-12, 1.0, 1e-10, Provenance.trivial)
        self.assertTrue(check.passed)
        check = Check.close('x', 'measurement', 2.0, 1.0, 1e-3, Provenance.paper, scale=100.0)
        self.assertFalse(check.passed)
        self.assertAlmostEqual(check.tolerance, 0.1)
        self.assertIn('relative to 100', check.detail)
        self.assertFalse(Check.close('x', 's', math.nan, 1.0, 1.0, Provenance.trivial).passed)
        self.assertTrue(Check.close('z', 's', 1j, 1j + 1e-14, 1e-12, Provenance.trivial).passed)

    def test_bounds(self):
        self.assertTrue(Check.at_most('gap', 's', 1e-12, 1e-10, Provenance.trivial).passed)
        self.assertFalse(Check.at_most('gap', 's', math.inf, 1e-10, Provenance.trivial).passed)
        self.assertTrue(Check.exceeds('witness', 's', 1e-2, 1e-3, Provenance.derived).passed)
        self.assertFalse(Check.exceeds('witness', 's', 1e-3, 1e-3, Provenance.derived).passed)
        self.assertFalse(Check.holds('flag', 's', False, Provenance.paper).passed)

    def test_row(self):
        row = Check.holds('flag', 'relpos', True, Provenance.paper, detail='ok').row()
        self.assertEqual(tuple(row), CHECK_COLUMNS)
        self.assertEqual(row['provenance'], 'PAPER')
        self.assertEqual(row['passed'], 'true')

    def test_failed_check_logged(self):
        result = ScenarioResult(Scenario.RELSTATE)
        with self.assertLogs('ewglab.report', level='ERROR'):
            result.add(Check.holds('flag', 'relstate', False, Provenance.trivial))
        self.assertEqual(len(result.checks), 1)


class TestSeries(unittest.TestCase):

    def test_cells(self):
        series = Series(Scenario.RELSTATE)
        series.add(0, 4, 2, 1e-15, 0.3)
        with self.assertRaises(ValueError):
            series.add(0, 4)
        self.assertEqual(series.column('dim'), [4])
        self.assertEqual(len(series), 1)


class TestRunReport(unittest.TestCase):

    def test_summary(self):
        report = _sample_report()
        self.assertTrue(report.passed)
        self.assertEqual(len(report.checks_for(Scenario.RELPOS)), 2)
        self.assertEqual(report.find('monotone').provenance, Provenance.paper)
        with self.assertRaises(KeyError):
            report.find('missing')
        report.merge(ScenarioResult(Scenario.OSCILLATOR, error='boom'))
        self.assertFalse(report.passed)
        self.assertIn('ERROR oscillator: boom', report.summary())
        # empty series are dropped
        report.merge(ScenarioResult(Scenario.X3P_EIGEN, series=Series(Scenario.X3P_EIGEN)))
        self.assertNotIn(Scenario.X3P_EIGEN, report.series)

    def test_write_is_byte_stable(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = _sample_report().write(Path(tmp) / 'a')
            second = _sample_report().write(Path(tmp) / 'b')
            self.assertEqual([p.name for p in first], ['checks.csv', 'relpos.csv', 'config.toml'])
            for a, b in zip(first, second):
                self.assertEqual(a.read_bytes(), b.read_bytes())
            header = first[0].read_text(encoding='utf-8').splitlines()[0]
            self.assertEqual(header, ','.join(CHECK_COLUMNS))
            lines = first[1].read_text(encoding='utf-8').splitlines()
            self.assertEqual(len(lines), 4)
            self.assertTrue(lines[1].startswith('16,'))


class TestPlots(unittest.TestCase):

    def test_empty_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(emit_plots(RunReport(), tmp), [])
            self.assertEqual(list(Path(tmp).iterdir()), [])

    def test_figures(self):
        report = _sample_report()
        figures = build_figures(report)
        self.assertEqual(list(figures), ['asymmetry.svg'])
        texts = [t.get_text() for t in asymmetry_figure(report.series[Scenario.RELPOS]).axes[0].texts]
        self.assertEqual(texts, ['slope -2.000'])

    def test_x3p_curves(self):
        spec = OscillatorSpec()
        packet = PacketSpec.create(spec, 10 * spec.sigma)
        series = Series(Scenario.OSCILLATOR)
        for t in np.linspace(0.0, 2 * spec.period, 81):
            t = float(t)
            series.add(t, 0.0, 0.0, x3p_closed_form(spec, packet, t), classical_orbit(spec, packet, t).x3p, 0.0)
        quantum, classical = x3p_figure(series).axes[0].get_lines()
        gap = float(np.max(np.abs(np.asarray(classical.get_ydata()) - np.asarray(quantum.get_ydata()))))
        bound = classical_gap_bound(spec, packet)
        self.assertAlmostEqual(gap / bound, 1.0, places=9)

    def test_emit(self):
        report = _sample_report()
        with tempfile.TemporaryDirectory() as tmp:
            paths = emit_plots(report, tmp)
            self.assertEqual([p.name for p in paths], ['asymmetry.svg'])
            self.assertIn('<svg', paths[0].read_text(encoding='utf-8'))
        self.assertEqual(report.artifacts, paths)


class TestJobManager(unittest.TestCase):

    def test_order_and_errors(self):
        def boom():
            raise RuntimeError('boom')

        manager = JobManager(max_workers=3)
        with self.assertLogs('ewglab.execution', level='ERROR'):
            outcomes = manager.run([('a', lambda: 1), ('b', boom), ('c', lambda: 3)])
        self.assertEqual([o.key for o in outcomes], ['a', 'b', 'c'])
        self.assertEqual(outcomes[0].result, 1)
        self.assertFalse(outcomes[1].ok)
        self.assertIsInstance(outcomes[1].error, RuntimeError)
        with self.assertRaises(ValueError):
            JobManager(max_workers=0)


if __name__ == '__main__':
    unittest.main()
