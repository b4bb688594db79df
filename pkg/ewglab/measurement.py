"""Explicit measurement of a spin by an observer with three record states.

The Hilbert space is H_up ⊕ H_dn ⊕ H_xx, each summand a copy of the subsystem
space, ordered that way in every block matrix. The interaction acts for
0 ≤ t ≤ T_m and rotates the no-record block into the two record blocks with
strength set by the mixing angle ϑ. ħ = 1 throughout.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from .enums import MeasurementQuality, Record, Spin
from .errors import EmptyBranchError, NotEigenvectorError
from .linalg import (EXACT_TOL, ComplexMatrix, ComplexVector, DensityMatrix, Projection,
                     as_matrix, commutator, eig_hermitian, expm_i, frozen, lift, max_norm)
from .relative_state import conditional_expectation
from .utils import MISSING, or_default

_log = logging.getLogger(__name__)

BLOCKS = 3

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SPIN_UP = np.diag([1.0, 0.0]).astype(np.complex128)
SPIN_DOWN = np.diag([0.0, 1.0]).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """Subsystem projections, mixing angle, interaction time and free Hamiltonian.

    Attributes:
        P1: projection onto spin up states of the subsystem
        P2: projection onto spin down states, P1 + P2 = 1
        theta_mix: mixing angle ϑ in radians
        T_m: duration of the interaction
        H0: free Hamiltonian of the subsystem, commuting with P1 and P2

    Raises:
        ValueError: if P1 and P2 do not split the identity, H0 does not commute
            with them or T_m is not positive
    """
    P1: Projection
    P2: Projection
    theta_mix: float
    T_m: float
    H0: ComplexMatrix = field(default=MISSING)

    def __post_init__(self) -> None:
        n = self.P1.dim
        if self.P2.dim != n or n < 2:
            raise ValueError('P1 and P2 must act on the same subsystem of dimension >= 2')
        if max_norm(self.P1.matrix + self.P2.matrix - np.eye(n)) > EXACT_TOL:
            raise ValueError('P1 + P2 must be the identity of the subsystem')
        if max_norm(self.P1.matrix @ self.P2.matrix) > EXACT_TOL:
            raise ValueError('P1 and P2 must be orthogonal')
        if not self.T_m > 0:
            raise ValueError('T_m must be positive')
        h0 = np.zeros((n, n)) if self.H0 is MISSING else as_matrix(self.H0)
        if h0.shape != (n, n):
            raise ValueError(f'H0 must be {n}x{n}')
        for k, p in ((1, self.P1), (2, self.P2)):
            if max_norm(commutator(h0, p.matrix)) > EXACT_TOL:
                raise ValueError(f'H0 does not commute with P{k}')
        if max_norm(h0 - h0.conj().T) > EXACT_TOL:
            raise ValueError('H0 must be Hermitian')
        object.__setattr__(self, 'H0', frozen(h0))
        object.__setattr__(self, 'theta_mix', float(self.theta_mix))
        object.__setattr__(self, 'T_m', float(self.T_m))

    @classmethod
    def spin(
        cls,
        theta_mix: float,
        T_m: float = 1.0,
        energies: Sequence[float] = (0.0, 0.0)
    ) -> MeasurementModel:
        """Single spin one-half, H0 = E_up P1 + E_dn P2."""
        p1, p2 = SPIN_UP, SPIN_DOWN
        return cls(Projection(p1), Projection(p2), theta_mix, T_m,
                   energies[0] * p1 + energies[1] * p2)

    @classmethod
    def spin_pair(
        cls,
        theta_mix: float,
        T_m: float = 1.0,
        energies: Sequence[float] = (0.0, 0.0)
    ) -> MeasurementModel:
        """Two spins A ⊗ B with the observer coupled to particle A only."""
        identity = np.eye(2)
        p1 = np.kron(SPIN_UP, identity)
        p2 = np.kron(SPIN_DOWN, identity)
        return cls(Projection(p1), Projection(p2), theta_mix, T_m,
                   energies[0] * p1 + energies[1] * p2)

    @property
    def n_sub(self) -> int:
        return self.P1.dim

    @property
    def dim(self) -> int:
        return BLOCKS * self.n_sub

    @property
    def rate(self) -> float:
        """π/(2T_m), the interaction strength."""
        return math.pi / (2 * self.T_m)


class BlockState:
    """State of the full space H_up ⊕ H_dn ⊕ H_xx at time ``t``.

    Attributes:
        model: the model the state belongs to
        rho: density matrix on the 3·n_sub dimensional space
        t: time of the state
    """

    def __init__(self, model: MeasurementModel, rho: DensityMatrix, t: float) -> None:
        if rho.dim != model.dim:
            raise ValueError(f'state has dimension {rho.dim}, model needs {model.dim}')
        self.model: MeasurementModel = model
        self.rho: DensityMatrix = rho
        self.t: float = float(t)

    @property
    def n_sub(self) -> int:
        return self.model.n_sub

    @property
    def layout(self) -> Dict[Record, slice]:
        """Index range of every record subspace."""
        n = self.n_sub
        return {r: slice(r.index * n, (r.index + 1) * n) for r in Record}

    def block(self, row: Union[Record, str], col: Union[Record, str]) -> ComplexMatrix:
        layout = self.layout
        return self.rho.matrix[layout[Record(row)], layout[Record(col)]]

    def __repr__(self) -> str:
        return f'<BlockState n_sub={self.n_sub} t={self.t:g}>'


def build_A_operators(model: MeasurementModel) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """A1 = cosϑ P1 + sinϑ P2 and A2 = cosϑ P2 + sinϑ P1."""
    c, s = math.cos(model.theta_mix), math.sin(model.theta_mix)
    p1, p2 = model.P1.matrix, model.P2.matrix
    return c * p1 + s * p2, c * p2 + s * p1


def interaction_block(model: MeasurementModel) -> ComplexMatrix:
    """π/(2T_m) [[0, 0, iA1], [0, 0, iA2], [-iA1, -iA2, 0]]."""
    a1, a2 = build_A_operators(model)
    zero = np.zeros_like(a1)
    block = np.block([
        [zero, zero, 1j * a1],
        [zero, zero, 1j * a2],
        [-1j * a1, -1j * a2, zero],
    ])
    return model.rate * block


def hamiltonian(model: MeasurementModel, t: float, *, reverse_interaction: bool = False) -> ComplexMatrix:
    """Hamiltonian of the full space at time ``t``.

    Args:
        model: the measurement model
        t: time

    Keyword args:
        reverse_interaction: flip the sign of the interaction block. The closed
            form propagator, the ± labels of the eigenvectors and the closed form
            ρ(t) are exact for the reversed sign.

    Returns:
        diag(H0, H0, H0) plus the interaction block for 0 <= t <= T_m
    """
    free = lift(model.H0, BLOCKS)
    if 0 <= t <= model.T_m:
        sign = -1.0 if reverse_interaction else 1.0
        return free + sign * interaction_block(model)
    return free


@dataclass(frozen=True)
class EigenPair:
    """Closed form eigenvector of the interaction Hamiltonian.

    Attributes:
        label: '0', '+' or '-'
        vector: the normalized eigenvector
        eigenvalue: Rayleigh quotient of the vector for the Hamiltonian used
        printed: the eigenvalue the ± label stands for, E_w ± π/(2T_m)
        residual: |He - λe|
    """
    label: str
    vector: ComplexVector
    eigenvalue: float
    printed: float
    residual: float

    @property
    def paired_as_printed(self) -> bool:
        return abs(self.eigenvalue - self.printed) <= 1e-9


def eigen_system(
    model: MeasurementModel,
    w: ArrayLike,
    E_w: float,
    *,
    reverse_interaction: bool = False,
    tol: float = MISSING
) -> Dict[str, EigenPair]:
    """The three closed form eigenvectors built from an eigenvector ``w`` of H0:
    e0 = (A2w, -A1w, 0) and e± = (A1w, A2w, ±iw)/√2.

    The eigenvalue of each vector is computed, not assumed; a warning is logged
    when it differs from the one its label stands for.

    Raises:
        NotEigenvectorError: if H0 w != E_w w within ``tol``
    """
    tol = or_default(tol, 1e-9)
    v = np.asarray(w, dtype=np.complex128).ravel()
    v = v / np.linalg.norm(v)
    defect = float(np.linalg.norm(model.H0 @ v - E_w * v))
    if defect > tol:
        raise NotEigenvectorError(f'w is not an eigenvector of H0 for E_w = {E_w} ({defect:.3e})')
    a1, a2 = build_A_operators(model)
    zero = np.zeros_like(v)
    vectors = {
        '0': np.concatenate([a2 @ v, -(a1 @ v), zero]),
        '+': np.concatenate([a1 @ v, a2 @ v, 1j * v]) / math.sqrt(2),
        '-': np.concatenate([a1 @ v, a2 @ v, -1j * v]) / math.sqrt(2),
    }
    printed = {'0': E_w, '+': E_w + model.rate, '-': E_w - model.rate}
    h = hamiltonian(model, model.T_m / 2, reverse_interaction=reverse_interaction)
    pairs: Dict[str, EigenPair] = {}
    for label, e in vectors.items():
        e = e / np.linalg.norm(e)
        he = h @ e
        value = float(np.vdot(e, he).real)
        residual = float(np.linalg.norm(he - value * e))
        pair = EigenPair(label, e, value, printed[label], residual)
        if not pair.paired_as_printed:
            _log.warning(f'e{label} has eigenvalue {value:.12g}, its label stands for {printed[label]:.12g}')
        pairs[label] = pair
    return pairs


def free_eigenbasis(model: MeasurementModel) -> List[Tuple[float, ComplexVector]]:
    """Common eigenvectors of H0, P1 and P2 as (E_w, w) pairs."""
    result: List[Tuple[float, ComplexVector]] = []
    for p in (model.P1, model.P2):
        values, vectors = eig_hermitian(p.matrix)
        span = vectors[:, values > 0.5]
        energies, local = eig_hermitian(span.conj().T @ model.H0 @ span)
        for energy, u in zip(energies, local.T):
            result.append((float(energy), span @ u))
    return result


def expected_spectrum(model: MeasurementModel) -> np.ndarray:
    """{E_w, E_w ± π/(2T_m)} over the eigenvalues E_w of H0, sorted."""
    energies = [e for e, _ in free_eigenbasis(model)]
    values = [e + shift for e in energies for shift in (0.0, model.rate, -model.rate)]
    return np.sort(np.array(values))


def interaction_phase(t: float, T_m: float) -> float:
    """φ(t): 0 before the interaction, π/2 after it, πt/(2T_m) in between."""
    if not T_m > 0:
        raise ValueError('T_m must be positive')
    if t < 0:
        return 0.0
    if t > T_m:
        return math.pi / 2
    return math.pi * t / (2 * T_m)


def free_propagator(model: MeasurementModel, t: float) -> ComplexMatrix:
    """U0(t) = exp(iH0 t) on every block."""
    return lift(expm_i(model.H0, t), BLOCKS)


def propagator(model: MeasurementModel, t: float) -> ComplexMatrix:
    """Closed form U(t) = U0(t) R(φ(t)) with R the block rotation in A1, A2, cos φ, sin φ."""
    phi = interaction_phase(t, model.T_m)
    c, s = math.cos(phi), math.sin(phi)
    a1, a2 = build_A_operators(model)
    one = np.eye(model.n_sub)
    rotation = np.block([
        [a2 @ a2 + a1 @ a1 * c, a1 @ a2 * (c - 1), a1 * s],
        [a1 @ a2 * (c - 1), a1 @ a1 + a2 @ a2 * c, a2 * s],
        [-a1 * s, -a2 * s, one * c],
    ])
    return free_propagator(model, t) @ rotation


def propagator_oracle(model: MeasurementModel, t: float) -> ComplexMatrix:
    """U(t) from matrix exponentials of the piecewise constant Hamiltonian with the
    reversed interaction sign, for comparison with :func:`propagator`."""
    active = min(max(t, 0.0), model.T_m)
    inside = expm_i(hamiltonian(model, model.T_m / 2, reverse_interaction=True), active)
    return expm_i(lift(model.H0, BLOCKS), t - active) @ inside


def initial_state(model: MeasurementModel, rho0_sub: DensityMatrix) -> BlockState:
    """ρ(0): the subsystem state in the no-record block."""
    if rho0_sub.dim != model.n_sub:
        raise ValueError(f'subsystem state has dimension {rho0_sub.dim}, expected {model.n_sub}')
    selector = np.zeros((BLOCKS, BLOCKS))
    selector[Record.xx.index, Record.xx.index] = 1.0
    return BlockState(model, DensityMatrix(np.kron(selector, rho0_sub.matrix)), 0.0)


def evolve(model: MeasurementModel, rho0_sub: DensityMatrix, t: float) -> BlockState:
    """U(t) ρ(0) U(t)* for ρ(0) in the no-record block."""
    rho = initial_state(model, rho0_sub).rho.matrix
    u = propagator(model, t)
    return BlockState(model, DensityMatrix(u @ rho @ u.conj().T), t)


def evolve_closed_form(model: MeasurementModel, rho0_sub: DensityMatrix, t: float) -> BlockState:
    """ρ(t) assembled block by block from A_j ρ0(t) A_k sin²φ, A_j ρ0(t) sinφ cosφ
    and ρ0(t) cos²φ, without using U(t)."""
    if rho0_sub.dim != model.n_sub:
        raise ValueError(f'subsystem state has dimension {rho0_sub.dim}, expected {model.n_sub}')
    phi = interaction_phase(t, model.T_m)
    c, s = math.cos(phi), math.sin(phi)
    u0 = expm_i(model.H0, t)
    r = u0 @ rho0_sub.matrix @ u0.conj().T
    a1, a2 = build_A_operators(model)
    rho = np.block([
        [a1 @ r @ a1 * s**2, a1 @ r @ a2 * s**2, a1 @ r * (s * c)],
        [a2 @ r @ a1 * s**2, a2 @ r @ a2 * s**2, a2 @ r * (s * c)],
        [r @ a1 * (s * c), r @ a2 * (s * c), r * c**2],
    ])
    return BlockState(model, DensityMatrix(rho), t)


def record_projection(n_sub: int, record: Union[Record, str]) -> Projection:
    """Q_a, the projection onto the subspace of record ``a``."""
    index = Record(record).index
    return Projection.coordinate(BLOCKS * n_sub, range(index * n_sub, (index + 1) * n_sub))


def _spin_projection(model: MeasurementModel, spin: Union[Spin, int, str]) -> ComplexMatrix:
    if isinstance(spin, int):
        if spin not in (1, 2):
            raise ValueError(f'spin index must be 1 or 2, got {spin}')
        index = spin
    else:
        index = Spin(spin).projection_index
    p = model.P1 if index == 1 else model.P2
    return lift(p.matrix, BLOCKS)


def record_likelihood(state: BlockState, record: Union[Record, str]) -> float:
    """Trace(Q_a ρ), the likelihood of the observer's record."""
    q = record_projection(state.n_sub, record)
    return float(np.trace(q.matrix @ state.rho.matrix).real)


def record_likelihoods(state: BlockState) -> Dict[Record, float]:
    return {r: record_likelihood(state, r) for r in Record}


def spin_likelihood(state: BlockState, spin: Union[Spin, int, str]) -> float:
    """Trace(P̂_k ρ), the likelihood of the spin regardless of the record."""
    return float(np.trace(_spin_projection(state.model, spin) @ state.rho.matrix).real)


def conditional_spin_likelihood(
    state: BlockState,
    record: Union[Record, str],
    spin: Union[Spin, int, str],
    *,
    threshold: float = MISSING
) -> float:
    """Trace(P̂_k Q_a ρ Q_a)/Trace(Q_a ρ), the likelihood of spin k given record a.

    Raises:
        EmptyBranchError: if the record has (numerically) zero likelihood
    """
    q = record_projection(state.n_sub, record)
    value = conditional_expectation(state.rho, q, _spin_projection(state.model, spin),
                                    label=str(Record(record)), threshold=threshold)
    return value.real


def measurement_quality(theta_mix: float, tol: float = 1e-9) -> MeasurementQuality:
    """Perfect for ϑ = kπ, uncorrelated for ϑ = (2k+1)π/4, anticorrelated for
    ϑ = (2k+1)π/2, partial otherwise."""
    c2 = math.cos(theta_mix) ** 2
    if abs(c2 - 1.0) <= tol:
        return MeasurementQuality.perfect
    if abs(c2 - 0.5) <= tol:
        return MeasurementQuality.uncorrelated
    if c2 <= tol:
        return MeasurementQuality.anticorrelated
    return MeasurementQuality.partial


def singlet() -> DensityMatrix:
    """(|↑↓⟩ - |↓↑⟩)/√2 as a density matrix on particle A ⊗ particle B."""
    return DensityMatrix.from_vector(np.array([0.0, 1.0, -1.0, 0.0]))


def pair_spin_operators() -> Tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """Components of the total spin S_A + S_B of the pair, S = σ/2."""
    identity = np.eye(2)
    return tuple(  # type: ignore[return-value]
        (np.kron(p, identity) + np.kron(identity, p)) / 2 for p in (PAULI_X, PAULI_Y, PAULI_Z)
    )


@dataclass(frozen=True)
class EPRTable:
    """Observer records and partner spin for a measured singlet.

    Attributes:
        t: time
        phi: interaction phase at ``t``
        record_likelihoods: Trace(Q_a ρ) per record
        partner_spin: likelihood of particle B being up and down given each
            record, None for an empty branch
        total_spin: expectation of the three components of S_A + S_B
    """
    t: float
    phi: float
    record_likelihoods: Dict[Record, float]
    partner_spin: Dict[Record, Optional[Tuple[float, float]]]
    total_spin: Tuple[float, float, float]


def epr_scenario(
    model: MeasurementModel,
    t: float,
    *,
    rho0: DensityMatrix = MISSING,
    threshold: float = MISSING
) -> EPRTable:
    """Observer measuring particle A of a spin pair, by default in the singlet state.

    Raises:
        ValueError: if the model is not a spin pair with P1 acting on particle A
    """
    expected_p1 = np.kron(SPIN_UP, np.eye(2))
    if model.n_sub != 4 or max_norm(model.P1.matrix - expected_p1) > EXACT_TOL:
        raise ValueError('the model must be MeasurementModel.spin_pair')
    state = evolve(model, or_default(rho0, singlet()), t)
    identity = np.eye(2)
    partner_up = lift(np.kron(identity, SPIN_UP), BLOCKS)
    partner_down = lift(np.kron(identity, SPIN_DOWN), BLOCKS)
    partner: Dict[Record, Optional[Tuple[float, float]]] = {}
    for record in Record:
        q = record_projection(model.n_sub, record)
        try:
            up = conditional_expectation(state.rho, q, partner_up, label=str(record),
                                         threshold=threshold).real
            down = conditional_expectation(state.rho, q, partner_down, label=str(record),
                                           threshold=threshold).real
        except EmptyBranchError:
            partner[record] = None
        else:
            partner[record] = (up, down)
    spin = tuple(float(np.trace(lift(s, BLOCKS) @ state.rho.matrix).real)
                 for s in pair_spin_operators())
    return EPRTable(
        t=float(t),
        phi=interaction_phase(t, model.T_m),
        record_likelihoods=record_likelihoods(state),
        partner_spin=partner,
        total_spin=spin,  # type: ignore[arg-type]
    )
