"""Relative states of a density matrix with respect to observer records.

A resolution of unity {Q_θ} labels the subspaces of observer states by the
record θ. The relative state of record θ is ρ^θ = c_θ Q_θ ρ Q_θ with
1/c_θ = Trace(Q_θ ρ), and the mixture Σ_θ ρ^θ/c_θ reproduces Trace(Aρ) for
every A commuting with all the Q_θ.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.stats
from numpy.typing import ArrayLike

from .errors import EmptyBranchError, NotProjectionError
from .linalg import (EXACT_TOL, WEIGHT_THRESHOLD, ComplexMatrix, DensityMatrix, Projection,
                     as_matrix, commutator, gram_schmidt, max_norm)
from .utils import MISSING, or_default

_log = logging.getLogger(__name__)

_ROUNDING = 16 * float(np.finfo(float).eps)


class ResolutionOfUnity:
    """Ordered family of mutually orthogonal projections summing to the identity,
    one per observer record.

    Iterating yields ``(label, projection)`` pairs in order.

    Raises:
        NotProjectionError: if the projections overlap or do not sum to the identity
        ValueError: if labels are missing, repeated or the dimensions differ
    """

    def __init__(
        self,
        projections: Sequence[Union[Projection, ArrayLike]],
        labels: Sequence[str],
        *,
        tol: float = MISSING
    ) -> None:
        tol = or_default(tol, EXACT_TOL)
        if len(projections) != len(labels):
            raise ValueError('one label is needed for each projection')
        if len(set(labels)) != len(labels):
            raise ValueError(f'record labels must be unique, got {list(labels)}')
        if not projections:
            raise ValueError('a resolution of unity needs at least one projection')
        qs = [q if isinstance(q, Projection) else Projection(q, tol=tol) for q in projections]
        dim = qs[0].dim
        if any(q.dim != dim for q in qs):
            raise ValueError('all projections must act on the same space')
        for i, qi in enumerate(qs):
            for j in range(i + 1, len(qs)):
                overlap = max_norm(qi.matrix @ qs[j].matrix)
                if overlap > tol:
                    raise NotProjectionError(
                        f'records "{labels[i]}" and "{labels[j]}" overlap ({overlap:.3e})')
        defect = max_norm(sum(q.matrix for q in qs) - np.eye(dim))
        if defect > tol:
            raise NotProjectionError(f'projections do not sum to the identity ({defect:.3e})')
        self._projections: Dict[str, Projection] = dict(zip(labels, qs))

    @classmethod
    def from_blocks(
        cls,
        sizes: Sequence[int],
        labels: Sequence[str] = MISSING,
        *,
        basis: ArrayLike = MISSING
    ) -> ResolutionOfUnity:
        """Projections onto consecutive blocks of coordinates, optionally rotated
        by the unitary ``basis`` (its columns are the record adapted basis)."""
        dim = int(sum(sizes))
        if labels is MISSING:
            labels = [f'r{i}' for i in range(len(sizes))]
        v = np.eye(dim) if basis is MISSING else as_matrix(basis)
        projections = []
        start = 0
        for size in sizes:
            cols = v[:, start:start + size]
            projections.append(cols @ cols.conj().T)
            start += size
        return cls(projections, labels)

    def __iter__(self) -> Iterator[Tuple[str, Projection]]:
        return iter(self._projections.items())

    def __len__(self) -> int:
        return len(self._projections)

    def __getitem__(self, label: str) -> Projection:
        return self._projections[str(label)]

    @property
    def labels(self) -> List[str]:
        return list(self._projections)

    @property
    def dim(self) -> int:
        return next(iter(self._projections.values())).dim


@dataclass(frozen=True)
class RelativeState:
    """The relative state of one observer record.

    Attributes:
        rho_theta: the renormalized compression c_θ Q_θ ρ Q_θ
        weight: Trace(Q_θ ρ), that is 1/c_θ
        label: the observer record
    """
    rho_theta: DensityMatrix
    weight: float
    label: str = ''


def _branch_weight(rho: DensityMatrix, Q: Projection) -> float:
    return float(np.trace(Q.matrix @ rho.matrix).real)


def relative_density(
    rho: DensityMatrix,
    Q: Projection,
    *,
    label: str = '',
    threshold: float = MISSING
) -> RelativeState:
    """Relative state of ``rho`` with respect to the record subspace of ``Q``.

    Raises:
        EmptyBranchError: if Trace(Qρ) is at most ``threshold`` (default ``WEIGHT_THRESHOLD``)
    """
    threshold = or_default(threshold, WEIGHT_THRESHOLD)
    weight = _branch_weight(rho, Q)
    if weight <= threshold:
        raise EmptyBranchError(label, weight)
    compressed = Q.matrix @ rho.matrix @ Q.matrix
    # rounding in QρQ is absolute, so it grows as 1/weight once renormalised
    tol = EXACT_TOL + _ROUNDING * rho.dim / weight
    hermitian = (compressed + compressed.conj().T) / 2
    return RelativeState(DensityMatrix.normalized(hermitian, tol=tol), weight, label)


def conditional_expectation(
    rho: DensityMatrix,
    Q: Projection,
    A: ArrayLike,
    *,
    label: str = '',
    threshold: float = MISSING
) -> complex:
    """Trace(QAQρ)/Trace(Qρ), the expectation of A given the record of Q.

    Raises:
        EmptyBranchError: if Trace(Qρ) is at most ``threshold``
    """
    threshold = or_default(threshold, WEIGHT_THRESHOLD)
    weight = _branch_weight(rho, Q)
    if weight <= threshold:
        raise EmptyBranchError(label, weight)
    q = Q.matrix
    return complex(np.trace(q @ as_matrix(A) @ q @ rho.matrix)) / weight


def equivalent_mixture(rho: DensityMatrix, R: ResolutionOfUnity) -> DensityMatrix:
    """Σ_θ Q_θ ρ Q_θ, the weighted mixture of all relative states. Empty
    branches contribute nothing."""
    total = sum(q.matrix @ rho.matrix @ q.matrix for _, q in R)
    return DensityMatrix(total)


def commutes_with_all(A: ArrayLike, R: ResolutionOfUnity, tol: float = MISSING) -> bool:
    """True iff max_θ |[A, Q_θ]| is at most ``tol``."""
    tol = or_default(tol, EXACT_TOL)
    a = as_matrix(A)
    if a.shape[0] != R.dim:
        raise ValueError(f'operator has dimension {a.shape[0]}, records act on {R.dim}')
    return max(max_norm(commutator(a, q.matrix)) for _, q in R) <= tol


def branches(
    rho: DensityMatrix,
    R: ResolutionOfUnity,
    *,
    threshold: float = MISSING
) -> Dict[str, Optional[RelativeState]]:
    """Relative state of every record. Empty branches are kept as ``None``."""
    result: Dict[str, Optional[RelativeState]] = {}
    for label, q in R:
        try:
            result[label] = relative_density(rho, q, label=label, threshold=threshold)
        except EmptyBranchError as e:
            _log.info(f'record "{label}" has an empty branch (weight {e.weight:.3e})')
            result[label] = None
    return result


def mixture_from_branches(parts: Dict[str, Optional[RelativeState]]) -> DensityMatrix:
    """Σ_θ ρ^θ/c_θ rebuilt from the output of :func:`branches`."""
    states = [s for s in parts.values() if s is not None]
    if not states:
        raise ValueError('every branch is empty')
    return DensityMatrix(sum(s.weight * s.rho_theta.matrix for s in states))


def records_from_observer_states(
    vectors: Sequence[ArrayLike],
    system_dim: int,
    labels: Sequence[str],
    *,
    tol: float = MISSING
) -> ResolutionOfUnity:
    """Record projections |o_θ⟩⟨o_θ| ⊗ 1 built from linearly independent
    observer states, orthogonalized by Gram-Schmidt in the given order.

    The observer states must span the observer space, otherwise states would be
    left out of the sum of projections.

    Raises:
        RankDeficiencyError: if the observer states are linearly dependent
        ValueError: if they do not span the observer space
    """
    basis = gram_schmidt(vectors, tol=tol)
    observer_dim = basis[0].shape[0]
    if len(basis) != observer_dim:
        raise ValueError(
            f'{len(basis)} observer states cannot resolve a {observer_dim} dimensional observer space')
    identity = np.eye(system_dim)
    projections = [np.kron(np.outer(o, o.conj()), identity) for o in basis]
    return ResolutionOfUnity(projections, labels, tol=tol)


def random_density(rng: np.random.Generator, dim: int, *, rank: int = MISSING) -> DensityMatrix:
    """Random full rank (or rank ``rank``) density matrix, ρ = GG*/Trace(GG*)."""
    cols = or_default(rank, dim)
    g = rng.normal(size=(dim, cols)) + 1j * rng.normal(size=(dim, cols))
    return DensityMatrix.normalized(g @ g.conj().T)


def random_unitary(rng: np.random.Generator, dim: int) -> ComplexMatrix:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=np.complex128)
    return np.asarray(scipy.stats.unitary_group.rvs(dim, random_state=rng), dtype=np.complex128)


def random_resolution(
    rng: np.random.Generator,
    dim: int,
    n_blocks: int
) -> Tuple[ResolutionOfUnity, ComplexMatrix, List[int]]:
    """Random resolution of unity with ``n_blocks`` records in a random basis.

    Returns:
        the resolution, the unitary whose columns are the record adapted basis
        and the block sizes
    """
    if not 1 <= n_blocks <= dim:
        raise ValueError(f'cannot split dimension {dim} into {n_blocks} blocks')
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False))
    sizes = np.diff(np.concatenate(([0], cuts, [dim]))).astype(int).tolist()
    basis = random_unitary(rng, dim)
    return ResolutionOfUnity.from_blocks(sizes, basis=basis), basis, sizes


def random_commutant_element(
    rng: np.random.Generator,
    basis: ArrayLike,
    sizes: Sequence[int],
    *,
    hermitian: bool = True
) -> ComplexMatrix:
    """Random operator commuting with every record projection: block diagonal
    in the record adapted basis."""
    v = as_matrix(basis)
    dim = v.shape[0]
    block = np.zeros((dim, dim), dtype=np.complex128)
    start = 0
    for size in sizes:
        b = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        if hermitian:
            b = (b + b.conj().T) / 2
        block[start:start + size, start:start + size] = b
        start += size
    return v @ block @ v.conj().T


def random_hermitian(rng: np.random.Generator, dim: int) -> ComplexMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2
