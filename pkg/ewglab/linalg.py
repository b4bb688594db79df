"""Dense complex linear algebra used by every other module.

Operators are plain ``numpy`` arrays of ``complex128``. The matrix modules work
with ħ = 1, so the propagator of a Hermitian ``H`` is ``exp(iHt)``.
"""
from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .errors import (NotHermitianError, NotDensityMatrixError, NotProjectionError,
                     RankDeficiencyError)
from .utils import MISSING, or_default

_log = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]
ComplexVector = NDArray[np.complex128]

# exact-algebra identities
EXACT_TOL: float = 1e-10
# grid and quadrature results
QUADRATURE_TOL: float = 1e-6
# smallest Trace(Qρ) accepted as a non-empty branch
WEIGHT_THRESHOLD: float = 1e-12


def as_matrix(M: ArrayLike) -> ComplexMatrix:
    """Returns ``M`` as a square complex array.

    Raises:
        ValueError: if ``M`` is not square or has non finite entries
    """
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f'expected a square matrix, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise ValueError('matrix has non finite entries')
    return arr


def frozen(M: ArrayLike) -> ComplexMatrix:
    """Read only complex copy of ``M``."""
    arr = np.array(M, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def max_norm(M: ArrayLike) -> float:
    """Largest entry modulus, the norm used for every tolerance comparison."""
    arr = np.asarray(M)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def adjoint(M: ArrayLike) -> ComplexMatrix:
    """Conjugate transpose of ``M``."""
    return as_matrix(M).conj().T


def commutator(A: ArrayLike, B: ArrayLike) -> ComplexMatrix:
    a = as_matrix(A)
    b = as_matrix(B)
    return a @ b - b @ a


def block_diag(*blocks: ArrayLike) -> ComplexMatrix:
    return np.asarray(scipy.linalg.block_diag(*(as_matrix(b) for b in blocks)), dtype=np.complex128)


def lift(op: ArrayLike, copies: int) -> ComplexMatrix:
    """Block diagonal matrix with ``copies`` copies of ``op`` on the diagonal."""
    return block_diag(*([op] * copies))


def is_hermitian(M: ArrayLike, tol: float = MISSING) -> bool:
    """True iff the largest entry of M - M* is at most ``tol``.

    Raises:
        ValueError: if ``tol`` is not positive
    """
    tol = or_default(tol, EXACT_TOL)
    if tol <= 0:
        raise ValueError('tolerance must be positive')
    m = as_matrix(M)
    return max_norm(m - m.conj().T) <= tol


def is_unitary(U: ArrayLike, tol: float = MISSING) -> bool:
    tol = or_default(tol, EXACT_TOL)
    u = as_matrix(U)
    return max_norm(u @ u.conj().T - np.eye(u.shape[0])) <= tol


def _hermitian_part(M: ArrayLike, tol: float, what: str) -> ComplexMatrix:
    m = as_matrix(M)
    defect = max_norm(m - m.conj().T)
    if defect > tol:
        raise NotHermitianError(f'{what} requires a Hermitian matrix, |M - M*| = {defect:.3e}')
    return (m + m.conj().T) / 2


def eig_hermitian(M: ArrayLike, *, tol: float = MISSING) -> Tuple[NDArray[np.float64], ComplexMatrix]:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        M: Hermitian matrix

    Keyword args:
        tol: Hermiticity tolerance, defaults to ``EXACT_TOL``

    Returns:
        eigenvalues in ascending order and the orthonormal eigenvectors as columns

    Raises:
        NotHermitianError: if M is not Hermitian within ``tol``
    """
    h = _hermitian_part(M, or_default(tol, EXACT_TOL), 'eig_hermitian')
    values, vectors = scipy.linalg.eigh(h)
    return values, vectors


def expm_i(H: ArrayLike, t: float, *, tol: float = MISSING) -> ComplexMatrix:
    """exp(iHt) computed from the eigendecomposition of ``H``.

    Raises:
        NotHermitianError: if H is not Hermitian within ``tol``
    """
    values, vectors = eig_hermitian(H, tol=tol)
    return (vectors * np.exp(1j * values * t)) @ vectors.conj().T


def gram_schmidt(vs: Sequence[ArrayLike], *, tol: float = MISSING) -> List[ComplexVector]:
    """Orthonormalizes ``vs`` in order, spanning the same subspace.

    Uses modified Gram-Schmidt with one reorthogonalization pass.

    Raises:
        RankDeficiencyError: if a residual norm falls below ``tol`` times the
            norm of the vector it comes from
    """
    tol = or_default(tol, EXACT_TOL)
    basis: List[ComplexVector] = []
    for i, v in enumerate(vs):
        w = np.array(v, dtype=np.complex128).ravel()
        scale = np.linalg.norm(w)
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        residual = np.linalg.norm(w)
        if scale == 0 or residual <= tol * scale:
            raise RankDeficiencyError(
                f'vector {i} is linearly dependent on the previous ones (residual {residual:.3e})')
        basis.append(w / residual)
    return basis


def gram_matrix(vs: Sequence[ArrayLike]) -> ComplexMatrix:
    stacked = np.column_stack([np.asarray(v, dtype=np.complex128).ravel() for v in vs])
    return stacked.conj().T @ stacked


class DensityMatrix:
    """Positive semi-definite, unit trace operator.

    The matrix is stored read only; every operation returns a new object.

    Attributes:
        matrix: the density matrix
    """

    def __init__(self, matrix: ArrayLike, *, tol: float = MISSING) -> None:
        tol = or_default(tol, EXACT_TOL)
        m = _hermitian_part(matrix, tol, 'DensityMatrix')
        trace = float(np.trace(m).real)
        if abs(trace - 1.0) > tol:
            raise NotDensityMatrixError(f'trace is {trace!r}, expected 1')
        smallest = float(scipy.linalg.eigvalsh(m)[0])
        if smallest < -tol:
            raise NotDensityMatrixError(f'negative eigenvalue {smallest:.3e}')
        self.matrix: ComplexMatrix = frozen(m)

    @classmethod
    def from_vector(cls, psi: ArrayLike) -> DensityMatrix:
        """Pure state |ψ⟩⟨ψ|, normalizing ψ."""
        v = np.asarray(psi, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def normalized(cls, M: ArrayLike, *, tol: float = MISSING) -> DensityMatrix:
        """Divides a positive operator by its trace."""
        m = as_matrix(M)
        return cls(m / np.trace(m).real, tol=tol)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def purity(self) -> float:
        """Trace(ρ²), 1 for pure states."""
        return float(np.trace(self.matrix @ self.matrix).real)

    def expectation(self, A: ArrayLike) -> complex:
        """Trace(Aρ)."""
        return complex(np.trace(as_matrix(A) @ self.matrix))

    def __repr__(self) -> str:
        return f'<DensityMatrix dim={self.dim} purity={self.purity:.6f}>'


def is_density_matrix(M: ArrayLike, tol: float = MISSING) -> bool:
    try:
        DensityMatrix(M, tol=tol)
    except (NotHermitianError, NotDensityMatrixError):
        return False
    return True


def purity(rho: DensityMatrix) -> float:
    return rho.purity


class Projection:
    """Orthogonal projection, P = P* = P² within tolerance.

    Attributes:
        matrix: the projection
    """

    def __init__(self, matrix: ArrayLike, *, tol: float = MISSING) -> None:
        tol = or_default(tol, EXACT_TOL)
        m = as_matrix(matrix)
        if max_norm(m - m.conj().T) > tol:
            raise NotProjectionError('projection is not Hermitian')
        if max_norm(m @ m - m) > tol:
            raise NotProjectionError('projection is not idempotent')
        self.matrix: ComplexMatrix = frozen(m)

    @classmethod
    def onto(cls, vectors: Sequence[ArrayLike], *, tol: float = MISSING) -> Projection:
        """Projection onto the span of ``vectors``, which must be linearly independent."""
        basis = gram_schmidt(vectors, tol=tol)
        q = np.column_stack(basis)
        return cls(q @ q.conj().T)

    @classmethod
    def coordinate(cls, dim: int, indices: Sequence[int]) -> Projection:
        """Projection onto the coordinate axes ``indices``."""
        diag = np.zeros(dim)
        diag[list(indices)] = 1.0
        return cls(np.diag(diag))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix).real)))

    def complement(self) -> Projection:
        return Projection(np.eye(self.dim) - self.matrix)

    def __repr__(self) -> str:
        return f'<Projection dim={self.dim} rank={self.rank}>'
