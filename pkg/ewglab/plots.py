"""SVG plots derived from the series of a run. Plots are never read back by checks."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Union

import matplotlib
from matplotlib.figure import Figure

from .relativistic import fit_slope
from .report import RunReport, Series
from .scenarios import Scenario

_log = logging.getLogger(__name__)

# fixed so that repeated runs give identical files
_SVG_STYLE = {'svg.hashsalt': 'ewglab', 'svg.fonttype': 'path'}


def _floats(series: Series, column: str) -> List[float]:
    return [float(v) for v in series.column(column)]  # type: ignore[arg-type]


def x3p_figure(series: Series) -> Figure:
    """x³p on the classical orbit against the quantum expectation."""
    t = _floats(series, 't')
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    ax.plot(t, _floats(series, 'x3p_quantum'), label='⟨X^{3/2} P X^{3/2}⟩')
    ax.plot(t, _floats(series, 'x3p_classical'), '--', label='x³p classical')
    ax.set_xlabel('t')
    ax.set_ylabel('x³p')
    ax.legend()
    return fig


def likelihood_figure(series: Series) -> Figure:
    """Record likelihoods against the interaction phase, first mixing angle only."""
    thetas = _floats(series, 'theta')
    first = thetas[0]
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    for record in ('up', 'dn', 'xx'):
        rows = [r for r, th in zip(series.rows, thetas) if th == first and r[3] == record]
        ax.plot([float(r[1]) for r in rows], [float(r[4]) for r in rows], 'o-',  # type: ignore[arg-type]
                label=f'Trace(Q_{record} ρ)')
    ax.set_xlabel('φ')
    ax.set_ylabel('likelihood')
    ax.legend()
    return fig


def asymmetry_figure(series: Series) -> Figure:
    """|asymmetry|/|inner| against the mass on log-log axes, annotated with the fitted slope."""
    masses = _floats(series, 'm')
    ratios = _floats(series, 'ratio')
    slope = fit_slope(masses, ratios)
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    ax.loglog(masses, ratios, 'o-', label='|⟨f|xg⟩ - ⟨xf|g⟩| / |⟨f|g⟩|')
    ax.set_xlabel('m')
    ax.set_ylabel('ratio')
    text = 'slope n/a' if slope is None else f'slope {slope:.3f}'
    ax.annotate(text, xy=(0.05, 0.1), xycoords='axes fraction')
    ax.legend()
    return fig


_BUILDERS = {
    Scenario.OSCILLATOR: ('x3p.svg', x3p_figure),
    Scenario.MEASUREMENT: ('likelihoods.svg', likelihood_figure),
    Scenario.RELPOS: ('asymmetry.svg', asymmetry_figure),
}


def build_figures(report: RunReport) -> Dict[str, Figure]:
    """Figures for every plottable series of ``report``, keyed by file name."""
    figures: Dict[str, Figure] = {}
    for scenario, (filename, builder) in _BUILDERS.items():
        series = report.series.get(scenario)
        if series is not None and len(series):
            figures[filename] = builder(series)
    return figures


def emit_plots(report: RunReport, directory: Union[str, Path]) -> List[Path]:
    """Writes the SVG plots of ``report`` to ``directory``.

    Returns:
        the paths written, empty when the report holds no series
    """
    figures = build_figures(report)
    if not figures:
        return []
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths: List[Path] = []
    with matplotlib.rc_context(_SVG_STYLE):
        for filename, fig in figures.items():
            path = out / filename
            fig.savefig(path, format='svg', metadata={'Date': None})
            paths.append(path)
    report.artifacts.extend(paths)
    _log.info(f'wrote {len(paths)} plots to {out}')
    return paths
