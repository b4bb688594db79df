import unittest

import math
import sys
import tempfile
from pathlib import Path
sys.path.append('..')

from ewglab.config import (DEFAULT_OUTPUT_DIR, DEFAULT_SEED, OUTPUT_ENV, ScenarioConfig, Tolerances,
                           apply_overrides, config_from_dict, load_config, loads_config, parse_tolerance,
                           serialize_config)
from ewglab.enums import ScenarioKind
from ewglab.errors import ConfigError


class TestLoad(unittest.TestCase):

    def test_minimal(self):
        config = loads_config('scenario = "all"\n')
        self.assertEqual(config, ScenarioConfig())
        self.assertEqual(config.scenario, ScenarioKind.all)
        self.assertEqual(config.seed, DEFAULT_SEED)
        self.assertEqual(config.output_dir, DEFAULT_OUTPUT_DIR)
        self.assertEqual(len(config.measurement.thetas), 5)
        self.assertEqual(config.measurement.times().size, 33)
        self.assertEqual(config.tolerances.oracle, 10 * config.tolerances.exact)

    def test_sections(self):
        text = '\n'.join([
            'scenario = "x3p-eigen"',
            'seed = 7',
            '[x3p_eigen]',
            'lambdas = [1, 3.5]',
            '[relpos]',
            'masses = [1, 2, 4]',
            '[tolerances]',
            'exact = 1e-9',
        ])
        config = loads_config(text)
        self.assertEqual(config.scenario, ScenarioKind.x3p_eigen)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.x3p_eigen.lambdas, (1.0, 3.5))
        self.assertEqual(config.relpos.masses, (1.0, 2.0, 4.0))
        self.assertEqual(config.tolerances.exact, 1e-9)
        self.assertEqual(config.tolerances.quadrature, Tolerances().quadrature)

    def test_case_insensitive_kind(self):
        self.assertEqual(loads_config('scenario = "RELPOS"').scenario, ScenarioKind.relpos)

    def test_range_errors(self):
        cases = {
            '[measurement]\nthetas = [-1.0]': 'measurement.thetas',
            '[measurement]\nthetas = [7.0]': 'measurement.thetas',
            '[measurement]\nT_m = 0': 'measurement.T_m',
            '[measurement]\ntime_points = 1': 'measurement.time_points',
            '[measurement]\nt_start = 1.0\nt_stop = 0.5': 'measurement.t_stop',
            '[measurement]\nenergies = [1.0]': 'measurement.energies',
            '[relstate]\nmax_dim = 100': 'relstate.max_dim',
            '[relstate]\nmax_dim = 4\nmax_blocks = 5': 'relstate.max_blocks',
            '[oscillator]\nm = -1.0': 'oscillator.m',
            '[oscillator]\nsteps_per_period = 10': 'oscillator.steps_per_period',
            '[x3p_eigen]\nlambdas = []': 'x3p_eigen.lambdas',
            '[relpos]\nmasses = [4, 2]': 'relpos.masses',
            'seed = -3': 'seed',
            'plots = "yes"': 'plots',
            'scenario = "everything"': 'scenario',
            '[oscillator]\nm = true': 'oscillator.m',
        }
        for text, field in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(ConfigError) as cm:
                    loads_config(text)
                self.assertEqual(cm.exception.field, field)

    def test_unknown_keys(self):
        for text in ('colour = 1', '[measurement]\nthetaz = [0.0]', '[plotting]\nx = 1'):
            with self.subTest(text=text):
                with self.assertRaises(ConfigError):
                    loads_config(text)
        with self.assertRaises(ConfigError):
            config_from_dict({'measurement': 3})

    def test_syntax_error(self):
        with self.assertRaises(ConfigError) as cm:
            loads_config('scenario = "all"\nseed = = 3\n')
        self.assertEqual(cm.exception.line, 2)
        self.assertIsNotNone(cm.exception.column)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config('/nonexistent/ewglab.toml')

    def test_load_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.toml'
            path.write_text('scenario = "measurement"\n[measurement]\nthetas = [0.0, 0.7853981633974483]\n',
                            encoding='utf-8')
            with self.assertLogs('ewglab.config', level='INFO'):
                config = load_config(path)
        self.assertEqual(config.measurement.thetas, (0.0, math.pi / 4))


class TestSerialize(unittest.TestCase):

    def test_round_trip(self):
        config = loads_config('scenario = "oscillator"\nseed = 18446744073709551615\n'
                              '[oscillator]\nratios = [0.1, 0.3]\n[measurement]\nthetas = [0.1]\n')
        text = serialize_config(config)
        again = loads_config(text)
        self.assertEqual(again, config)
        self.assertEqual(serialize_config(again), text)

    def test_defaults_round_trip(self):
        self.assertEqual(loads_config(serialize_config(ScenarioConfig())), ScenarioConfig())


class TestOverrides(unittest.TestCase):

    def test_parse_tolerance(self):
        self.assertEqual(parse_tolerance('exact=1e-8'), ('exact', 1e-8))
        self.assertEqual(parse_tolerance(' weight = 1e-14'), ('weight', 1e-14))
        for bad in ('exact', 'loose=1', 'exact=abc', 'exact=-1', 'exact=nan'):
            with self.subTest(text=bad):
                with self.assertRaises(ConfigError):
                    parse_tolerance(bad)

    def test_precedence(self):
        config = ScenarioConfig()
        env = {OUTPUT_ENV: 'from-env'}
        self.assertEqual(apply_overrides(config, environ=env).output_dir, 'from-env')
        self.assertEqual(apply_overrides(config, output_dir='from-flag', environ=env).output_dir, 'from-flag')
        self.assertEqual(apply_overrides(config, environ={}).output_dir, DEFAULT_OUTPUT_DIR)

    def test_seed_and_tolerances(self):
        config = apply_overrides(ScenarioConfig(), seed=5, tolerances={'quadrature': 1e-5}, environ={})
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.tolerances.quadrature, 1e-5)
        self.assertEqual(config.tolerances.exact, Tolerances().exact)
        with self.assertRaises(ConfigError):
            apply_overrides(ScenarioConfig(), seed=2**64, environ={})


if __name__ == '__main__':
    unittest.main()
