from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ubmat.core.config import Tolerances, get_tolerances
from ubmat.service.estimation import SampleMoments
from ubmat.service.ub_matrix import (
    NonSymmetricInputError,
    PartitionVector,
    SpectralForm,
    UBMatrix,
)


class UBCoordinates(BaseModel):
    """UB coordinate file: partition sizes, diagonal a and the full square b."""
    partition: List[int] = Field(..., min_length=1)
    a: List[float]
    b: List[List[float]]
    symmetric: bool = True  # False only for products of non-commuting operands

    @model_validator(mode="after")
    def check_shapes(self) -> "UBCoordinates":
        K = len(self.partition)
        if len(self.a) != K:
            raise ValueError(f"a has {len(self.a)} entries but partition has {K} blocks")
        if len(self.b) != K or any(len(row) != K for row in self.b):
            raise ValueError(f"b must be a {K} x {K} array")
        return self

    def to_ub(self, tol: Optional[Tolerances] = None) -> UBMatrix:
        """Build the UBMatrix, checking that b is symmetric within symmetry_tol."""
        tol = get_tolerances(tol)
        b = np.asarray(self.b, dtype=np.float64)
        if self.symmetric:
            asymmetry = float(np.max(np.abs(b - b.T)))
            if asymmetry > tol.symmetry_tol * max(1.0, float(np.max(np.abs(b)))):
                raise NonSymmetricInputError(f"b is not symmetric (max |b_kl - b_lk| = {asymmetry:.3e})")
        return UBMatrix(self.a, b, PartitionVector(tuple(self.partition)), symmetric=self.symmetric)

    @classmethod
    def from_ub(cls, x: UBMatrix) -> "UBCoordinates":
        return cls(
            partition=list(x.partition.sizes),
            a=x.a.tolist(),
            b=x.b.tolist(),
            symmetric=x.symmetric
        )


class EigenPair(BaseModel):
    value: float
    multiplicity: int


class EigenvalueReport(BaseModel):
    """Distinct eigenvalue slots: (a_kk, p_k - 1) then the eigenvalues of Delta."""
    partition: List[int]
    eigenvalues: List[EigenPair]
    total_multiplicity: int

    @classmethod
    def from_pairs(cls, partition: PartitionVector, pairs: List[Tuple[float, int]]) -> "EigenvalueReport":
        return cls(
            partition=list(partition.sizes),
            eigenvalues=[EigenPair(value=v, multiplicity=m) for v, m in pairs],
            total_multiplicity=sum(m for _, m in pairs)
        )


class CanonicalFormReport(BaseModel):
    """Gamma with Gamma N Gamma^T = diag(diagonal)."""
    partition: List[int]
    eigenvalues: List[EigenPair]
    diagonal: List[float]
    gamma: List[List[float]]
    delta_eigenvalues: List[float]
    delta_eigenvectors: List[List[float]]
    degenerate: bool

    @classmethod
    def from_form(cls, partition: PartitionVector, form: SpectralForm) -> "CanonicalFormReport":
        return cls(
            partition=list(partition.sizes),
            eigenvalues=[EigenPair(value=v, multiplicity=m) for v, m in form.eigenvalues],
            diagonal=form.diagonal.tolist(),
            gamma=form.gamma.tolist(),
            delta_eigenvalues=form.delta_eigenvalues.tolist(),
            delta_eigenvectors=form.delta_eigenvectors.tolist(),
            degenerate=form.degenerate
        )


class DeterminantReport(BaseModel):
    partition: List[int]
    determinant: float
    sign: float
    log_abs_determinant: Optional[float] = None  # None when the matrix is singular


class PositiveDefiniteReport(BaseModel):
    partition: List[int]
    positive_definite: bool
    min_a: float
    min_delta_eigenvalue: float


class EstimateReport(BaseModel):
    """Coordinate estimates (and optionally the precision) from a dataset."""
    n: int
    divisor: int
    group_sizes: List[int]
    mean: List[float]
    coordinates: UBCoordinates
    precision: Optional[UBCoordinates] = None

    @classmethod
    def from_estimate(cls, moments: SampleMoments, estimate: UBMatrix,
                      precision: Optional[UBMatrix] = None) -> "EstimateReport":
        return cls(
            n=moments.n,
            divisor=moments.divisor,
            group_sizes=list(moments.group_sizes),
            mean=moments.mean.tolist(),
            coordinates=UBCoordinates.from_ub(estimate),
            precision=UBCoordinates.from_ub(precision) if precision is not None else None
        )
