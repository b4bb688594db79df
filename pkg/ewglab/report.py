"""Check records, scenario series and the run report with its CSV files."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from .enums import Provenance
from .scenarios import Scenario
from .typed import CheckRow

_log = logging.getLogger(__name__)

Cell = Union[None, bool, int, float, str]
Number = Union[float, complex]

CHECK_COLUMNS = ('scenario', 'name', 'computed', 'expected', 'tolerance', 'passed', 'provenance', 'detail')


def format_cell(value: Union[Cell, complex]) -> str:
    """Text of one CSV cell. Floats use 17 significant digits so that equal
    numbers always give equal bytes; ``None`` is the empty string."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        return f'{format(value.real, ".17g")}{format(value.imag, "+.17g")}j'
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)


@dataclass(frozen=True)
class Check:
    """Outcome of one comparison.

    Attributes:
        name: what is compared
        scenario: scenario key
        computed: the value obtained
        expected: the reference value
        tolerance: the accepted deviation
        provenance: where the reference value comes from
        passed: whether the deviation is within tolerance
        detail: free text shown in the report
    """
    name: str
    scenario: str
    computed: Number
    expected: Number
    tolerance: float
    provenance: Provenance
    passed: bool
    detail: str = ''

    @classmethod
    def close(
        cls,
        name: str,
        scenario: str,
        computed: Number,
        expected: Number,
        tolerance: float,
        provenance: Provenance,
        *,
        scale: float = 1.0,
        detail: str = ''
    ) -> Check:
        """|computed - expected| <= tolerance·scale."""
        error = abs(computed - expected)
        passed = bool(math.isfinite(error) and error <= tolerance * scale)
        if scale != 1.0:
            detail = (detail + ' ' if detail else '') + f'relative to {format(scale, ".6g")}'
        return cls(name, scenario, computed, expected, tolerance * scale, provenance, passed, detail)

    @classmethod
    def at_most(cls, name: str, scenario: str, value: float, bound: float, provenance: Provenance,
                *, detail: str = '') -> Check:
        """0 <= value <= bound, reported as a comparison with 0."""
        passed = bool(math.isfinite(value) and value <= bound)
        return cls(name, scenario, value, 0.0, bound, provenance, passed, detail)

    @classmethod
    def exceeds(cls, name: str, scenario: str, value: float, bound: float, provenance: Provenance,
                *, detail: str = '') -> Check:
        passed = bool(math.isfinite(value) and value > bound)
        return cls(name, scenario, value, bound, 0.0, provenance, passed, detail or f'must exceed {bound:g}')

    @classmethod
    def holds(cls, name: str, scenario: str, condition: bool, provenance: Provenance,
              *, detail: str = '') -> Check:
        return cls(name, scenario, 1.0 if condition else 0.0, 1.0, 0.0, provenance, bool(condition), detail)

    def row(self) -> CheckRow:
        return {
            'scenario': self.scenario,
            'name': self.name,
            'computed': format_cell(self.computed),
            'expected': format_cell(self.expected),
            'tolerance': format_cell(self.tolerance),
            'passed': format_cell(self.passed),
            'provenance': str(self.provenance).upper(),
            'detail': self.detail,
        }


class Series:
    """Rows of one scenario's CSV file, with the header fixed by the scenario."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario: Scenario = scenario
        self.rows: List[List[Cell]] = []

    def add(self, *cells: Cell) -> None:
        if len(cells) != len(self.scenario.columns):
            raise ValueError(f'{self.scenario} rows have {len(self.scenario.columns)} cells, got {len(cells)}')
        self.rows.append(list(cells))

    def column(self, name: str) -> List[Cell]:
        index = self.scenario.columns.index(name)
        return [row[index] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def write(self, directory: Path) -> Path:
        path = directory / self.scenario.filename
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(self.scenario.columns)
            writer.writerows([format_cell(c) for c in row] for row in self.rows)
        return path


@dataclass
class ScenarioResult:
    """Everything one scenario job produced, also when it stopped with an error."""
    scenario: Scenario
    checks: List[Check] = field(default_factory=list)
    series: Optional[Series] = None
    error: Optional[str] = None

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        if not check.passed:
            _log.error(f'check "{check.name}" failed in {self.scenario}: computed {check.computed}, '
                       f'expected {check.expected}, tolerance {check.tolerance:.3g}')
        return check


@dataclass
class RunReport:
    """Checks and series of a run, in configuration order.

    Attributes:
        checks: every check of every scenario
        series: one series per scenario that produced data
        config_text: the effective scenario document
        artifacts: files written so far
        wall_clock: seconds spent running the scenarios
        errors: scenario key to error message, for scenarios that raised
    """
    checks: List[Check] = field(default_factory=list)
    series: Dict[Scenario, Series] = field(default_factory=dict)
    config_text: str = ''
    artifacts: List[Path] = field(default_factory=list)
    wall_clock: float = 0.0
    errors: Dict[str, str] = field(default_factory=dict)

    def merge(self, result: ScenarioResult) -> None:
        self.checks.extend(result.checks)
        if result.series is not None and len(result.series):
            self.series[result.scenario] = result.series
        if result.error is not None:
            self.errors[str(result.scenario)] = result.error

    @property
    def passed(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def checks_for(self, scenario: Union[Scenario, str]) -> List[Check]:
        return [c for c in self.checks if c.scenario == str(scenario)]

    def find(self, name: str) -> Check:
        """The first check named ``name``.

        Raises:
            KeyError: if there is none
        """
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def write(self, directory: Union[str, Path]) -> List[Path]:
        """Writes ``checks.csv``, one CSV per series and ``config.toml``.

        Returns:
            the paths written
        """
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths: List[Path] = []
        checks_path = out / 'checks.csv'
        with open(checks_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=CHECK_COLUMNS, lineterminator='\n')
            writer.writeheader()
            writer.writerows(c.row() for c in self.checks)
        paths.append(checks_path)
        for series in self.series.values():
            paths.append(series.write(out))
        if self.config_text:
            config_path = out / 'config.toml'
            config_path.write_text(self.config_text, encoding='utf-8')
            paths.append(config_path)
        self.artifacts.extend(paths)
        _log.info(f'wrote {len(paths)} files to {out}')
        return paths

    def summary(self) -> str:
        failed = self.failed_checks
        lines = [f'{len(self.checks) - len(failed)}/{len(self.checks)} checks passed '
                 f'in {self.wall_clock:.1f}s']
        lines += [f'FAILED {c.scenario}: {c.name} (computed {format_cell(c.computed)}, '
                  f'expected {format_cell(c.expected)})' for c in failed]
        lines += [f'ERROR {key}: {message}' for key, message in self.errors.items()]
        return '\n'.join(lines)


def collect(results: Sequence[ScenarioResult]) -> RunReport:
    report = RunReport()
    for result in results:
        report.merge(result)
    return report
