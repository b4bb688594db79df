"""Exceptions raised by the library.

Every error is a ``ValueError`` so that code checking for bad arguments the
usual way keeps working.
"""
from typing import Optional


class EWGLabError(ValueError):
    """Base class for all the errors raised by ewglab."""


class NotHermitianError(EWGLabError):
    """An operator that must be Hermitian is not, within tolerance."""


class NotDensityMatrixError(EWGLabError):
    """Trace or positivity of a density matrix is violated."""


class NotProjectionError(EWGLabError):
    """An operator is not an orthogonal projection, or a family of
    projections is not a resolution of unity."""


class RankDeficiencyError(EWGLabError):
    """Gram-Schmidt found a vector in the span of the previous ones."""


class NotEigenvectorError(EWGLabError):
    """A vector passed as an eigenvector of the free Hamiltonian is not one."""


class GridMismatchError(EWGLabError):
    """Two momentum wavefunctions live on different grids or masses."""


class DivergenceError(EWGLabError):
    """Numerical time evolution drifted away from unit norm."""


class EmptyBranchError(EWGLabError):
    """The branch of an observer record has (numerically) zero weight.

    Attributes:
        label: the record that was requested
        weight: Trace(Qρ) of the branch
    """

    def __init__(self, label: Optional[str], weight: float) -> None:
        self.label = label
        self.weight = weight
        name = f'"{label}"' if label else 'requested'
        super().__init__(f'{name} branch is empty: Trace(Qρ) = {weight:.3e}')


class ConfigError(EWGLabError):
    """The scenario document could not be parsed or holds invalid values.

    Attributes:
        field: dotted name of the offending field, if known
        line: line of a parse error, if known
        column: column of a parse error, if known
    """

    def __init__(
        self,
        message: str,
        *,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None
    ) -> None:
        self.field = field
        self.line = line
        self.column = column
        super().__init__(message)
