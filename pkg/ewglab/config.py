"""Scenario documents: TOML in, validated frozen dataclasses out.

A document holds the top level keys ``scenario``, ``seed``, ``output_dir`` and
``plots`` and one optional table per scenario kind plus ``[tolerances]``.
Missing keys take their defaults, unknown keys are rejected.
"""
from __future__ import annotations

import logging
import math
import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import sys
if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
del sys

import numpy as np
import tomli_w

from .enums import ScenarioKind
from .errors import ConfigError
from .linalg import EXACT_TOL, QUADRATURE_TOL, WEIGHT_THRESHOLD
from .typed import ConfigPayload
from .utils import MISSING

_log = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
DEFAULT_OUTPUT_DIR = 'ewglab-out'
OUTPUT_ENV = 'EWGLAB_OUT'
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class Tolerances:
    """Run wide tolerances. ``oracle`` comparisons use ten times ``exact``."""
    exact: float = EXACT_TOL
    quadrature: float = QUADRATURE_TOL
    weight: float = WEIGHT_THRESHOLD

    @property
    def oracle(self) -> float:
        return 10 * self.exact


@dataclass(frozen=True)
class MeasurementConfig:
    thetas: Tuple[float, ...] = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
    T_m: float = 1.0
    time_points: int = 33
    t_start: float = -0.25
    t_stop: float = 2.0
    energies: Tuple[float, float] = (0.0, 0.0)

    def times(self) -> np.ndarray:
        """Evenly spaced sample times on [t_start·T_m, t_stop·T_m]."""
        return np.linspace(self.t_start * self.T_m, self.t_stop * self.T_m, self.time_points)


@dataclass(frozen=True)
class RelstateConfig:
    samples: int = 200
    max_dim: int = 16
    max_blocks: int = 4


@dataclass(frozen=True)
class OscillatorConfig:
    m: float = 1.0
    k: float = 1.0
    hbar: float = 1.0
    amplitude_ratio: float = 10.0
    periods: float = 2.0
    samples: int = 81
    ratios: Tuple[float, ...] = (0.04, 0.01, 0.0025)
    steps_per_period: int = 8000


@dataclass(frozen=True)
class X3PEigenConfig:
    lambdas: Tuple[float, ...] = (0.5, 1.0, 2.0)
    hbar: float = 1.0


@dataclass(frozen=True)
class RelposConfig:
    masses: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    p0: float = 0.2
    width: float = 0.2
    hbar: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario document.

    Attributes:
        scenario: which scenarios to run
        seed: seed of every random draw in the run
        output_dir: directory receiving CSV and SVG files
        plots: whether SVG plots are written
    """
    scenario: ScenarioKind = ScenarioKind.all
    seed: int = DEFAULT_SEED
    output_dir: str = DEFAULT_OUTPUT_DIR
    plots: bool = True
    tolerances: Tolerances = field(default_factory=Tolerances)
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    relstate: RelstateConfig = field(default_factory=RelstateConfig)
    oscillator: OscillatorConfig = field(default_factory=OscillatorConfig)
    x3p_eigen: X3PEigenConfig = field(default_factory=X3PEigenConfig)
    relpos: RelposConfig = field(default_factory=RelposConfig)


def _reject_unknown(table: Mapping[str, Any], section: str, allowed: Tuple[str, ...]) -> None:
    for key in table:
        if key not in allowed:
            name = f'{section}.{key}' if section else key
            raise ConfigError(f'unknown key "{name}"', field=name)


def _name(section: str, key: str) -> str:
    return f'{section}.{key}' if section else key


def _float(
    table: Mapping[str, Any],
    section: str,
    key: str,
    default: float,
    *,
    positive: bool = False
) -> float:
    value = table.get(key, default)
    name = _name(section, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'{name} must be a number, got {value!r}', field=name)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f'{name} must be finite', field=name)
    if positive and value <= 0:
        raise ConfigError(f'{name} must be positive, got {value}', field=name)
    return value


def _int(table: Mapping[str, Any], section: str, key: str, default: int, *, low: int, high: int) -> int:
    value = table.get(key, default)
    name = _name(section, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f'{name} must be an integer, got {value!r}', field=name)
    if not low <= value <= high:
        raise ConfigError(f'{name} must be in [{low}, {high}], got {value}', field=name)
    return value


def _floats(
    table: Mapping[str, Any],
    section: str,
    key: str,
    default: Tuple[float, ...],
    *,
    positive: bool = False,
    length: Optional[int] = None
) -> Tuple[float, ...]:
    value = table.get(key, default)
    name = _name(section, key)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f'{name} must be a non empty list of numbers', field=name)
    if length is not None and len(value) != length:
        raise ConfigError(f'{name} must hold {length} numbers, got {len(value)}', field=name)
    items = {f'{i}': v for i, v in enumerate(value)}
    return tuple(_float(items, name, f'{i}', 0.0, positive=positive) for i in range(len(value)))


def _table(data: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    table = data.get(key, {})
    if not isinstance(table, Mapping):
        raise ConfigError(f'"{key}" must be a table', field=key)
    return table


def _tolerances(table: Mapping[str, Any]) -> Tolerances:
    _reject_unknown(table, 'tolerances', ('exact', 'quadrature', 'weight'))
    d = Tolerances()
    return Tolerances(
        exact=_float(table, 'tolerances', 'exact', d.exact, positive=True),
        quadrature=_float(table, 'tolerances', 'quadrature', d.quadrature, positive=True),
        weight=_float(table, 'tolerances', 'weight', d.weight, positive=True),
    )


def _measurement(table: Mapping[str, Any]) -> MeasurementConfig:
    s = 'measurement'
    _reject_unknown(table, s, ('thetas', 'T_m', 'time_points', 't_start', 't_stop', 'energies'))
    d = MeasurementConfig()
    thetas = _floats(table, s, 'thetas', d.thetas)
    for theta in thetas:
        if not 0 <= theta < 2 * math.pi:
            raise ConfigError(f'{s}.thetas must lie in [0, 2π), got {theta}', field=f'{s}.thetas')
    config = MeasurementConfig(
        thetas=thetas,
        T_m=_float(table, s, 'T_m', d.T_m, positive=True),
        time_points=_int(table, s, 'time_points', d.time_points, low=2, high=4097),
        t_start=_float(table, s, 't_start', d.t_start),
        t_stop=_float(table, s, 't_stop', d.t_stop),
        energies=_floats(table, s, 'energies', d.energies, length=2),  # type: ignore[arg-type]
    )
    if config.t_stop <= config.t_start:
        raise ConfigError(f'{s}.t_stop must exceed {s}.t_start', field=f'{s}.t_stop')
    return config


def _relstate(table: Mapping[str, Any]) -> RelstateConfig:
    s = 'relstate'
    _reject_unknown(table, s, ('samples', 'max_dim', 'max_blocks'))
    d = RelstateConfig()
    config = RelstateConfig(
        samples=_int(table, s, 'samples', d.samples, low=1, high=10000),
        max_dim=_int(table, s, 'max_dim', d.max_dim, low=2, high=64),
        max_blocks=_int(table, s, 'max_blocks', d.max_blocks, low=2, high=64),
    )
    if config.max_blocks > config.max_dim:
        raise ConfigError(f'{s}.max_blocks cannot exceed {s}.max_dim', field=f'{s}.max_blocks')
    return config


def _oscillator(table: Mapping[str, Any]) -> OscillatorConfig:
    s = 'oscillator'
    _reject_unknown(table, s, ('m', 'k', 'hbar', 'amplitude_ratio', 'periods', 'samples', 'ratios',
                               'steps_per_period'))
    d = OscillatorConfig()
    return OscillatorConfig(
        m=_float(table, s, 'm', d.m, positive=True),
        k=_float(table, s, 'k', d.k, positive=True),
        hbar=_float(table, s, 'hbar', d.hbar, positive=True),
        amplitude_ratio=_float(table, s, 'amplitude_ratio', d.amplitude_ratio, positive=True),
        periods=_float(table, s, 'periods', d.periods, positive=True),
        samples=_int(table, s, 'samples', d.samples, low=1, high=10000),
        ratios=_floats(table, s, 'ratios', d.ratios, positive=True),
        steps_per_period=_int(table, s, 'steps_per_period', d.steps_per_period, low=200, high=1_000_000),
    )


def _x3p_eigen(table: Mapping[str, Any]) -> X3PEigenConfig:
    s = 'x3p_eigen'
    _reject_unknown(table, s, ('lambdas', 'hbar'))
    d = X3PEigenConfig()
    return X3PEigenConfig(
        lambdas=_floats(table, s, 'lambdas', d.lambdas, positive=True),
        hbar=_float(table, s, 'hbar', d.hbar, positive=True),
    )


def _relpos(table: Mapping[str, Any]) -> RelposConfig:
    s = 'relpos'
    _reject_unknown(table, s, ('masses', 'p0', 'width', 'hbar'))
    d = RelposConfig()
    masses = _floats(table, s, 'masses', d.masses, positive=True)
    if any(b <= a for a, b in zip(masses, masses[1:])):
        raise ConfigError(f'{s}.masses must be ascending, got {list(masses)}', field=f'{s}.masses')
    return RelposConfig(
        masses=masses,
        p0=_float(table, s, 'p0', d.p0),
        width=_float(table, s, 'width', d.width, positive=True),
        hbar=_float(table, s, 'hbar', d.hbar, positive=True),
    )


def config_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    """Validates a parsed document and fills in the defaults.

    Raises:
        ConfigError: naming the offending field
    """
    _reject_unknown(data, '', ('scenario', 'seed', 'output_dir', 'plots', 'tolerances', 'measurement',
                               'relstate', 'oscillator', 'x3p_eigen', 'relpos'))
    raw_kind = data.get('scenario', str(ScenarioKind.all))
    if not isinstance(raw_kind, str) or raw_kind not in ScenarioKind:
        choices = ', '.join(str(k) for k in ScenarioKind)
        raise ConfigError(f'scenario must be one of {choices}, got {raw_kind!r}', field='scenario')
    seed = _int(data, '', 'seed', DEFAULT_SEED, low=0, high=MAX_SEED)
    output_dir = data.get('output_dir', DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError('output_dir must be a non empty string', field='output_dir')
    plots = data.get('plots', True)
    if not isinstance(plots, bool):
        raise ConfigError('plots must be true or false', field='plots')
    return ScenarioConfig(
        scenario=ScenarioKind(raw_kind),
        seed=seed,
        output_dir=output_dir,
        plots=plots,
        tolerances=_tolerances(_table(data, 'tolerances')),
        measurement=_measurement(_table(data, 'measurement')),
        relstate=_relstate(_table(data, 'relstate')),
        oscillator=_oscillator(_table(data, 'oscillator')),
        x3p_eigen=_x3p_eigen(_table(data, 'x3p_eigen')),
        relpos=_relpos(_table(data, 'relpos')),
    )


_POSITION = re.compile(r'line (\d+), column (\d+)')


def loads_config(text: str) -> ScenarioConfig:
    """Parses and validates a TOML document.

    Raises:
        ConfigError: with line and column for syntax errors, with the field
            name for invalid values
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, 'lineno', None)
        column = getattr(e, 'colno', None)
        if line is None:
            match = _POSITION.search(str(e))
            if match:
                line, column = int(match.group(1)), int(match.group(2))
        raise ConfigError(f'invalid TOML: {e}', line=line, column=column) from e
    return config_from_dict(data)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Reads a scenario document from ``path``.

    Raises:
        ConfigError: if the file cannot be read, parsed or validated
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'cannot read {path}: {e.strerror}') from e
    config = loads_config(text)
    _log.info(f'loaded scenario document {path} (scenario "{config.scenario}")')
    return config


def config_to_dict(config: ScenarioConfig) -> ConfigPayload:
    m, r, o, x, p, t = (config.measurement, config.relstate, config.oscillator, config.x3p_eigen,
                        config.relpos, config.tolerances)
    return {
        'scenario': str(config.scenario),
        'seed': config.seed,
        'output_dir': config.output_dir,
        'plots': config.plots,
        'tolerances': {'exact': t.exact, 'quadrature': t.quadrature, 'weight': t.weight},
        'measurement': {'thetas': list(m.thetas), 'T_m': m.T_m, 'time_points': m.time_points,
                        't_start': m.t_start, 't_stop': m.t_stop, 'energies': list(m.energies)},
        'relstate': {'samples': r.samples, 'max_dim': r.max_dim, 'max_blocks': r.max_blocks},
        'oscillator': {'m': o.m, 'k': o.k, 'hbar': o.hbar, 'amplitude_ratio': o.amplitude_ratio,
                       'periods': o.periods, 'samples': o.samples, 'ratios': list(o.ratios),
                       'steps_per_period': o.steps_per_period},
        'x3p_eigen': {'lambdas': list(x.lambdas), 'hbar': x.hbar},
        'relpos': {'masses': list(p.masses), 'p0': p.p0, 'width': p.width, 'hbar': p.hbar},
    }


def serialize_config(config: ScenarioConfig) -> str:
    """TOML text with every key spelled out; ``loads_config`` gives back an equal config."""
    return tomli_w.dumps(config_to_dict(config))


def parse_tolerance(text: str) -> Tuple[str, float]:
    """Parses a ``name=value`` tolerance override.

    Raises:
        ConfigError: if the name is unknown or the value is not a positive number
    """
    name, sep, raw = text.partition('=')
    name = name.strip()
    if not sep or name not in ('exact', 'quadrature', 'weight'):
        raise ConfigError(f'tolerance override must be exact|quadrature|weight=<value>, got {text!r}',
                          field='tolerances')
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f'tolerance {name} must be a number, got {raw!r}', field=f'tolerances.{name}') from None
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(f'tolerance {name} must be positive', field=f'tolerances.{name}')
    return name, value


def apply_overrides(
    config: ScenarioConfig,
    *,
    output_dir: Optional[str] = None,
    seed: Optional[int] = None,
    tolerances: Mapping[str, float] = MISSING,
    environ: Mapping[str, str] = MISSING
) -> ScenarioConfig:
    """Applies the environment and command line overrides.

    ``EWGLAB_OUT`` replaces the document's output directory and ``output_dir``
    replaces both.

    Raises:
        ConfigError: if the seed is out of range
    """
    env = os.environ if environ is MISSING else environ
    changes: Dict[str, Any] = {}
    if env.get(OUTPUT_ENV):
        changes['output_dir'] = env[OUTPUT_ENV]
    if output_dir:
        changes['output_dir'] = output_dir
    if seed is not None:
        if not 0 <= seed <= MAX_SEED:
            raise ConfigError(f'seed must be in [0, {MAX_SEED}], got {seed}', field='seed')
        changes['seed'] = seed
    if tolerances:
        changes['tolerances'] = replace(config.tolerances, **dict(tolerances))
    for key, value in changes.items():
        _log.info(f'override "{key}" set to {value}')
    return replace(config, **changes)
