"""Position under the Lorentz invariant one particle inner product.

Momentum space wavefunctions f̃(p) of a particle of mass m live on the mass
shell E = ω(p) = √(m² + p²), with inner product ∫dp conj(f̃)g̃/(2ω). One spatial
dimension is used. Multiplication by x acts as iħ d/dp, which is not symmetric
for this measure: the defect is iħ∫dp conj(f̃)g̃ p/(2ω³) and vanishes like m⁻²
relative to the inner product.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse
import scipy.special
from numpy.typing import ArrayLike, NDArray

from .errors import GridMismatchError

_log = logging.getLogger(__name__)

# share of ∫|g̃′|² allowed in the two outermost panels
DERIVATIVE_TAIL_LIMIT = 1e-8


def _differentiation_matrix(nodes: NDArray[np.float64]) -> NDArray[np.float64]:
    """Derivative of the interpolating polynomial through ``nodes``, evaluated at the nodes."""
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    """Composite Gauss-Legendre rule on [-cutoff, cutoff].

    Attributes:
        p: quadrature nodes, increasing
        weights: quadrature weights
        panels: number of equal panels
        order: Gauss-Legendre nodes per panel
        cutoff: half width of the covered interval
    """
    p: NDArray[np.float64]
    weights: NDArray[np.float64]
    panels: int
    order: int
    cutoff: float

    @classmethod
    def build(cls, cutoff: float, panels: int = 64, order: int = 16) -> MomentumGrid:
        """
        Raises:
            ValueError: if the cutoff is not positive or panels/order are below 1/2
        """
        if not cutoff > 0:
            raise ValueError('cutoff must be positive')
        if panels < 1 or order < 2:
            raise ValueError('need at least one panel of order 2')
        nodes, weights = np.polynomial.legendre.leggauss(order)
        edges = np.linspace(-cutoff, cutoff, panels + 1)
        half = (edges[1:] - edges[:-1]) / 2
        mid = (edges[1:] + edges[:-1]) / 2
        p = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        return cls(p, w, panels, order, float(cutoff))

    @classmethod
    def for_gaussian(cls, p0: float, width: float, *, panels: int = 64, order: int = 16) -> MomentumGrid:
        """Grid reaching |p0| + 12·width, where a Gaussian of that width is negligible."""
        return cls.build(abs(p0) + 12 * width, panels, order)

    @property
    def size(self) -> int:
        return self.p.size

    @cached_property
    def derivative_matrix(self) -> scipy.sparse.csr_matrix:
        """Block diagonal spectral derivative, one Legendre block per panel."""
        nodes, _ = np.polynomial.legendre.leggauss(self.order)
        scale = self.panels / self.cutoff
        block = _differentiation_matrix(nodes) * scale
        return scipy.sparse.block_diag([block] * self.panels, format='csr')

    def same_as(self, other: MomentumGrid) -> bool:
        return self is other or (self.p.shape == other.p.shape and bool(np.array_equal(self.p, other.p)))


@dataclass(frozen=True, eq=False)
class MomentumWavefunction:
    """Sampled momentum space amplitude f̃(p) of a particle of mass ``mass``.

    Attributes:
        grid: the quadrature grid
        values: f̃ at the grid nodes
        mass: particle mass, m > 0
    """
    grid: MomentumGrid
    values: NDArray[np.complex128]
    mass: float

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f'mass must be positive, got {self.mass}')
        if self.values.shape != self.grid.p.shape:
            raise ValueError('values do not match the grid')

    @classmethod
    def gaussian(
        cls,
        grid: MomentumGrid,
        mass: float,
        p0: float = 0.0,
        width: float = 1.0,
        *,
        hermite: int = 0,
        amplitude: complex = 1.0
    ) -> MomentumWavefunction:
        """amplitude · H_n(u) exp(-u²/2) with u = (p - p0)/width and n = ``hermite``."""
        if not width > 0:
            raise ValueError('width must be positive')
        u = (grid.p - p0) / width
        values = amplitude * scipy.special.eval_hermite(hermite, u) * np.exp(-u**2 / 2)
        return cls(grid, values.astype(np.complex128), float(mass))

    @property
    def omega(self) -> NDArray[np.float64]:
        """On-shell energy √(m² + p²)."""
        return np.sqrt(self.mass**2 + self.grid.p**2)

    def with_mass(self, mass: float) -> MomentumWavefunction:
        return MomentumWavefunction(self.grid, self.values, float(mass))

    def derivative(self) -> NDArray[np.complex128]:
        return self.grid.derivative_matrix @ self.values

    def __add__(self, other: MomentumWavefunction) -> MomentumWavefunction:
        _check_compatible(self, other)
        return MomentumWavefunction(self.grid, self.values + other.values, self.mass)


def random_wavefunction(
    rng: np.random.Generator,
    grid: MomentumGrid,
    mass: float,
    *,
    terms: int = 3
) -> MomentumWavefunction:
    """Mixture of ``terms`` Gaussians with centers in [-2, 2], widths in [0.5, 1.5]
    and random complex coefficients. Needs a cutoff of at least 20."""
    if terms < 1:
        raise ValueError('terms must be positive')
    total: Optional[MomentumWavefunction] = None
    for _ in range(terms):
        coeff = complex(rng.normal(), rng.normal())
        f = MomentumWavefunction.gaussian(grid, mass, rng.uniform(-2, 2), rng.uniform(0.5, 1.5),
                                          amplitude=coeff)
        total = f if total is None else total + f
    return total  # type: ignore[return-value]


def _check_compatible(f: MomentumWavefunction, g: MomentumWavefunction) -> None:
    if not f.grid.same_as(g.grid):
        raise GridMismatchError('wavefunctions are sampled on different grids')
    if f.mass != g.mass:
        raise GridMismatchError(f'wavefunctions have different masses {f.mass} and {g.mass}')


def invariant_inner(f: MomentumWavefunction, g: MomentumWavefunction) -> complex:
    """∫dp conj(f̃)g̃/(2ω).

    Raises:
        GridMismatchError: if the grids or masses differ
    """
    _check_compatible(f, g)
    return complex(np.sum(f.grid.weights * np.conj(f.values) * g.values / (2 * f.omega)))


def _derivative_tail(g: MomentumWavefunction, dg: NDArray[np.complex128]) -> float:
    density = g.grid.weights * np.abs(dg) ** 2
    total = float(np.sum(density))
    if total == 0:
        return 0.0
    order = g.grid.order
    return float(np.sum(density[:order]) + np.sum(density[-order:])) / total


def position_element(f: MomentumWavefunction, g: MomentumWavefunction, *, hbar: float = 1.0) -> complex:
    """⟨f|xg⟩ = iħ∫dp conj(f̃) g̃′/(2ω) with the spectral panel derivative.

    Logs a warning when g̃′ is not negligible at the ends of the grid.

    Raises:
        GridMismatchError: if the grids or masses differ
    """
    _check_compatible(f, g)
    dg = g.derivative()
    tail = _derivative_tail(g, dg)
    if tail > DERIVATIVE_TAIL_LIMIT:
        _log.warning(f'derivative tail mass {tail:.3e} at the grid ends, the cutoff is too small')
    return complex(1j * hbar * np.sum(f.grid.weights * np.conj(f.values) * dg / (2 * f.omega)))


def adjoint_asymmetry(f: MomentumWavefunction, g: MomentumWavefunction, *, hbar: float = 1.0) -> complex:
    """⟨f|xg⟩ - ⟨xf|g⟩, where ⟨xf|g⟩ = conj(⟨g|xf⟩)."""
    return position_element(f, g, hbar=hbar) - position_element(g, f, hbar=hbar).conjugate()


def asymmetry_closed_form(f: MomentumWavefunction, g: MomentumWavefunction, *, hbar: float = 1.0) -> complex:
    """iħ∫dp conj(f̃)g̃ p/(2ω³), the integrated by parts form of :func:`adjoint_asymmetry`."""
    _check_compatible(f, g)
    p = f.grid.p
    return complex(1j * hbar * np.sum(f.grid.weights * np.conj(f.values) * g.values * p / (2 * f.omega**3)))


def nonrelativistic_position_element(
    f: MomentumWavefunction,
    g: MomentumWavefunction,
    *,
    hbar: float = 1.0
) -> complex:
    """iħ∫dp conj(f̃) g̃′/(2m), the large mass form of :func:`position_element`."""
    _check_compatible(f, g)
    dg = g.derivative()
    return complex(1j * hbar * np.sum(f.grid.weights * np.conj(f.values) * dg) / (2 * f.mass))


class LimitRow(NamedTuple):
    m: float
    inner: complex
    position: complex
    asymmetry: complex
    ratio: float
    nonrelativistic: complex


@dataclass(frozen=True)
class LimitStudy:
    """Asymmetry of position against growing mass.

    Attributes:
        rows: one row per mass, in the order given
        slope: least squares slope of log ratio against log m, None when a
            ratio vanishes or fewer than two masses were given
        monotone: the ratio never increases with the mass
    """
    rows: List[LimitRow]
    slope: Optional[float]
    monotone: bool

    @property
    def masses(self) -> NDArray[np.float64]:
        return np.array([r.m for r in self.rows])

    @property
    def ratios(self) -> NDArray[np.float64]:
        return np.array([r.ratio for r in self.rows])


def fit_slope(masses: ArrayLike, ratios: ArrayLike) -> Optional[float]:
    """Slope of log(ratio) against log(m), None if it is undefined."""
    m = np.asarray(masses, dtype=np.float64)
    r = np.asarray(ratios, dtype=np.float64)
    if m.size < 2 or np.any(r <= 0):
        return None
    slope, _ = np.polyfit(np.log(m), np.log(r), 1)
    return float(slope)


def limit_study(
    f: MomentumWavefunction,
    g: MomentumWavefunction,
    masses: Sequence[float],
    *,
    hbar: float = 1.0
) -> LimitStudy:
    """Inner product, position element, asymmetry and |asymmetry|/|inner| for
    each mass, using the amplitudes of ``f`` and ``g`` unchanged.

    Raises:
        ValueError: if the masses are not positive and strictly ascending
    """
    ms = [float(m) for m in masses]
    if not ms or any(m <= 0 for m in ms) or any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError(f'masses must be positive and ascending, got {ms}')
    rows: List[LimitRow] = []
    for m in ms:
        fm, gm = f.with_mass(m), g.with_mass(m)
        inner = invariant_inner(fm, gm)
        asym = adjoint_asymmetry(fm, gm, hbar=hbar)
        ratio = abs(asym) / abs(inner) if inner != 0 else math.inf
        rows.append(LimitRow(m, inner, position_element(fm, gm, hbar=hbar), asym, ratio,
                             nonrelativistic_position_element(fm, gm, hbar=hbar)))
        _log.debug(f'mass {m:g}: asymmetry ratio {ratio:.6e}')
    ratios = [r.ratio for r in rows]
    monotone = all(b <= a for a, b in zip(ratios, ratios[1:]))
    return LimitStudy(rows, fit_slope(ms, ratios), monotone)
