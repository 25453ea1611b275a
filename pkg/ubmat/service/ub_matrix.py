"""
Uniform-block (UB) matrix algebra on coordinates.

A p x p symmetric matrix partitioned by the block sizes p = (p_1, ..., p_K)
is uniform-block when every diagonal block is a_kk I + b_kk J and every
off-diagonal block is the constant b_kk'. The matrix is stored as the
coordinate triple (a, B, p) and every operation in this module works on the
K-vector a and the K x K matrix B, never on the p x p matrix itself (the only
exceptions are ub_expand, ub_compress and the explicit Gamma of the canonical
form, whose outputs are p x p by definition).

With P = diag(p_1, ..., p_K) and Delta = A + B P:

- eigenvalues are a_kk (multiplicity p_k - 1) plus the K eigenvalues of Delta,
- det = prod(a_kk ** (p_k - 1)) * det(Delta),
- inverse has coordinates (A^-1, -Delta^-1 B A^-1).

Delta is not symmetric, but it is similar to S = A + P^1/2 B P^1/2, so its
spectrum is computed with a symmetric eigensolver on S.
"""

import logging
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ubmat.core.config import Tolerances, get_tolerances
from ubmat.core.errors import UBMatError

logger = logging.getLogger(__name__)


class PartitionError(UBMatError):
    """Invalid partition-size vector."""

    exit_code = 3


class PartitionMismatchError(UBMatError):
    """Operands or coordinates disagree with the partition."""

    exit_code = 3


class StructureViolationError(UBMatError):
    """A dense matrix is not uniform-block within tolerance."""

    exit_code = 4

    def __init__(self, block: Tuple[int, int], deviation: float, threshold: float):
        self.block = block
        self.deviation = deviation
        self.threshold = threshold
        super().__init__(
            f"block ({block[0]}, {block[1]}) is not uniform: deviation {deviation:.3e} "
            f"exceeds tolerance {threshold:.3e}"
        )


class SingularMatrixError(UBMatError):
    """The UB matrix is singular (A or Delta has a vanishing pivot)."""

    def __init__(self, factor: str, index: int, pivot: float):
        self.factor = factor
        self.index = index
        self.pivot = pivot
        super().__init__(f"matrix is singular: factor {factor} has pivot {pivot:.3e} at position {index + 1}")


class NotPositiveDefiniteError(UBMatError):
    """The UB matrix is not positive definite."""

    def __init__(self, message: str, min_a: float, min_delta_eigenvalue: float):
        self.min_a = min_a
        self.min_delta_eigenvalue = min_delta_eigenvalue
        super().__init__(
            f"{message} (min a_kk = {min_a:.6g}, min eigenvalue of Delta = {min_delta_eigenvalue:.6g})"
        )


class NonPositiveVarianceError(UBMatError):
    """A diagonal entry a_kk + b_kk is not positive."""


class NonSymmetricInputError(UBMatError):
    """A symmetric-only operation received a non-symmetric operand."""

    exit_code = 4


@dataclass(frozen=True)
class PartitionVector:
    """Block sizes (p_1, ..., p_K) of a UB layout; every block has at least two members."""

    sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(self.sizes)
        if not sizes:
            raise PartitionError("partition needs at least one block")

        checked = []
        for k, size in enumerate(sizes):
            if isinstance(size, bool) or int(size) != size:
                raise PartitionError(f"block {k + 1} size {size!r} is not an integer")
            if size < 2:
                raise PartitionError(
                    f"block {k + 1} has size {int(size)}; every block needs at least 2 members"
                )
            checked.append(int(size))
        object.__setattr__(self, "sizes", tuple(checked))

    @classmethod
    def parse(cls, text: str) -> "PartitionVector":
        """Parse an inline partition such as ``"2,3,4"``."""
        try:
            sizes = [int(part) for part in text.replace(" ", "").split(",") if part]
        except ValueError:
            raise PartitionError(f"cannot parse partition {text!r}; expected e.g. 2,3,4")
        return cls(tuple(sizes))

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @cached_property
    def array(self) -> np.ndarray:
        """Block sizes as float64 (the diagonal of P)."""
        arr = np.asarray(self.sizes, dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def offsets(self) -> np.ndarray:
        """Cumulative offsets 0 = pbar_0 < pbar_1 < ... < pbar_K = p."""
        arr = np.concatenate(([0], np.cumsum(self.sizes))).astype(np.intp)
        arr.flags.writeable = False
        return arr

    @cached_property
    def labels(self) -> np.ndarray:
        """Block index of every coordinate 0..p-1."""
        arr = np.repeat(np.arange(self.K), self.sizes)
        arr.flags.writeable = False
        return arr

    def slices(self) -> List[slice]:
        return [slice(int(self.offsets[k]), int(self.offsets[k + 1])) for k in range(self.K)]

    def block_sums(self, v: np.ndarray) -> np.ndarray:
        """Sum the last axis of ``v`` within each block."""
        return np.add.reduceat(v, self.offsets[:-1], axis=-1)

    def __len__(self) -> int:
        return self.K

    def __iter__(self) -> Iterator[int]:
        return iter(self.sizes)

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.sizes)


@dataclass(frozen=True, eq=False)
class UBMatrix:
    """
    Coordinates (a, B, p) of a uniform-block matrix A o I[p] + B o J[p].

    ``b`` is kept exactly symmetric (its upper triangle is authoritative).
    Products of non-commuting operands carry ``symmetric=False`` and keep the
    raw B; symmetric-only operations reject them.
    """

    a: np.ndarray
    b: np.ndarray
    partition: PartitionVector
    symmetric: bool = True

    def __post_init__(self):
        K = self.partition.K
        a = np.array(self.a, dtype=np.float64).reshape(-1)
        b = np.array(self.b, dtype=np.float64)

        if a.shape != (K,):
            raise PartitionMismatchError(f"a has {a.size} entries but the partition has {K} blocks")
        if b.shape != (K, K):
            raise PartitionMismatchError(f"b has shape {b.shape} but the partition needs ({K}, {K})")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise UBMatError("coordinates must be finite")

        if self.symmetric:
            b = np.triu(b) + np.triu(b, 1).T

        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def K(self) -> int:
        return self.partition.K

    @property
    def p(self) -> int:
        return self.partition.total

    @cached_property
    def delta(self) -> np.ndarray:
        """Delta = A + B P."""
        d = np.diag(self.a) + self.b * self.partition.array[None, :]
        d.flags.writeable = False
        return d

    @cached_property
    def symmetric_delta(self) -> np.ndarray:
        """S = P^1/2 (A P^-1 + B) P^1/2 = A + P^1/2 B P^1/2, similar to Delta."""
        root = np.sqrt(self.partition.array)
        s = np.diag(self.a) + root[:, None] * self.b * root[None, :]
        s = (s + s.T) / 2
        s.flags.writeable = False
        return s

    @classmethod
    def from_dense(cls, m: np.ndarray, partition: PartitionVector,
                   tol: Optional[Tolerances] = None) -> "UBMatrix":
        return ub_compress(m, partition, tol)

    def to_dense(self) -> np.ndarray:
        return ub_expand(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UBMatrix):
            return NotImplemented
        return (
            self.partition == other.partition
            and self.symmetric == other.symmetric
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None

    def __add__(self, other: "UBMatrix") -> "UBMatrix":
        return ub_add(self, other)

    def __sub__(self, other: "UBMatrix") -> "UBMatrix":
        return ub_subtract(self, other)

    def __neg__(self) -> "UBMatrix":
        return ub_scale(self, -1.0)

    def __matmul__(self, other: "UBMatrix") -> "UBMatrix":
        return ub_multiply(self, other)

    def __repr__(self) -> str:
        flag = "" if self.symmetric else ", symmetric=False"
        return f"UBMatrix(a={self.a.tolist()}, b={self.b.tolist()}, partition=({self.partition}){flag})"


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """Orthogonal diagonalization Gamma N Gamma^T = diag(diagonal)."""

    eigenvalues: Tuple[Tuple[float, int], ...]
    diagonal: np.ndarray
    gamma: np.ndarray
    delta_eigenvalues: np.ndarray
    delta_eigenvectors: np.ndarray
    degenerate: bool

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.eigenvalues)


def ub_identity(partition: PartitionVector) -> UBMatrix:
    return UBMatrix(np.ones(partition.K), np.zeros((partition.K, partition.K)), partition)


def ub_zeros(partition: PartitionVector) -> UBMatrix:
    return UBMatrix(np.zeros(partition.K), np.zeros((partition.K, partition.K)), partition)


def _check_same_partition(x: UBMatrix, y: UBMatrix, op: str) -> None:
    if x.partition != y.partition:
        raise PartitionMismatchError(
            f"{op}: partitions ({x.partition}) and ({y.partition}) differ"
        )


def _require_symmetric(x: UBMatrix, op: str) -> None:
    if not x.symmetric:
        raise NonSymmetricInputError(
            f"{op} needs a symmetric UB matrix; got a non-commuting product"
        )


def ub_add(x: UBMatrix, y: UBMatrix, subtract: bool = False) -> UBMatrix:
    """Coordinates of x + y (or x - y): A1 +- A2, B1 +- B2."""
    _check_same_partition(x, y, "subtract" if subtract else "add")
    sign = -1.0 if subtract else 1.0
    return UBMatrix(
        x.a + sign * y.a,
        x.b + sign * y.b,
        x.partition,
        symmetric=x.symmetric and y.symmetric
    )


def ub_subtract(x: UBMatrix, y: UBMatrix) -> UBMatrix:
    return ub_add(x, y, subtract=True)


def ub_scale(x: UBMatrix, c: float) -> UBMatrix:
    return UBMatrix(c * x.a, c * x.b, x.partition, symmetric=x.symmetric)


def _product_coordinates(a1: np.ndarray, b1: np.ndarray, a2: np.ndarray, b2: np.ndarray,
                         sizes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # A* = A1 A2, B* = A1 B2 + B1 A2 + B1 P B2
    a = a1 * a2
    b = a1[:, None] * b2 + b1 * a2[None, :] + (b1 * sizes[None, :]) @ b2
    return a, b


def ub_multiply(x: UBMatrix, y: UBMatrix, tol: Optional[Tolerances] = None) -> UBMatrix:
    """
    Coordinates of the product x @ y.

    The product of two symmetric UB matrices is symmetric exactly when they
    commute. When B* passes that test it is symmetrized; otherwise the raw
    B* is returned with ``symmetric=False``.
    """
    _check_same_partition(x, y, "multiply")
    tol = get_tolerances(tol)
    a, b = _product_coordinates(x.a, x.b, y.a, y.b, x.partition.array)

    if x.symmetric and y.symmetric:
        asymmetry = float(np.max(np.abs(b - b.T)))
        scale = max(1.0, float(np.max(np.abs(b))))
        if asymmetry <= tol.symmetry_tol * scale:
            return UBMatrix(a, (b + b.T) / 2, x.partition)
        logger.debug("product operands do not commute (asymmetry %.3e)", asymmetry)

    return UBMatrix(a, b, x.partition, symmetric=False)


def ub_power(x: UBMatrix, m: int) -> UBMatrix:
    """Coordinates of x ** m by the recursion A(m) = A(m-1) A, B(m) = A(m-1) B + B(m-1) A + B(m-1) P B."""
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise UBMatError(f"power must be a positive integer, got {m!r}")

    a, b = x.a, x.b
    for _ in range(int(m) - 1):
        a, b = _product_coordinates(a, b, x.a, x.b, x.partition.array)

    if x.symmetric and m > 1:
        b = (b + b.T) / 2
    return UBMatrix(a, b, x.partition, symmetric=x.symmetric)


def _delta_eigh(x: UBMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the symmetric S similar to Delta, in decreasing order."""
    values, vectors = np.linalg.eigh(x.symmetric_delta)
    return values[::-1], vectors[:, ::-1]


def ub_eigenvalues(x: UBMatrix) -> List[Tuple[float, int]]:
    """
    Eigenvalues as (value, multiplicity) pairs.

    The first K pairs are (a_kk, p_k - 1); the last K pairs are the
    eigenvalues of Delta in decreasing order, each with multiplicity one.
    """
    _require_symmetric(x, "eigenvalues")
    delta_values, _ = _delta_eigh(x)
    pairs = [(float(a), size - 1) for a, size in zip(x.a, x.partition.sizes)]
    pairs.extend((float(v), 1) for v in delta_values)
    return pairs


def ub_spectrum(x: UBMatrix) -> np.ndarray:
    """All p eigenvalues (multiplicities expanded), sorted decreasing."""
    pairs = ub_eigenvalues(x)
    values = np.repeat([v for v, _ in pairs], [m for _, m in pairs])
    return np.sort(values)[::-1]


def ub_slogdet(x: UBMatrix) -> Tuple[float, float]:
    """Sign and log-absolute determinant, safe for large p."""
    multiplicity = x.partition.array - 1
    if np.any(x.a == 0):
        return 0.0, -np.inf

    sign = float(np.prod(np.sign(x.a) ** multiplicity))
    logabs = float(np.sum(multiplicity * np.log(np.abs(x.a))))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(x.delta, check_finite=False)
    pivots = np.diag(lu)
    if np.any(pivots == 0):
        return 0.0, -np.inf

    swaps = int(np.count_nonzero(piv != np.arange(x.K)))
    sign *= float(np.prod(np.sign(pivots))) * (-1.0) ** swaps
    logabs += float(np.sum(np.log(np.abs(pivots))))
    return sign, logabs


def ub_determinant(x: UBMatrix) -> float:
    """prod(a_kk ** (p_k - 1)) * det(Delta), det(Delta) by LU with partial pivoting."""
    sign, logabs = ub_slogdet(x)
    if sign == 0:
        return 0.0
    return sign * float(np.exp(logabs))


def _factor_delta(x: UBMatrix, tol: Tolerances):
    scale = float(np.max(np.abs(x.delta)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(x.delta, check_finite=False)
    pivots = np.abs(np.diag(lu))
    worst = int(np.argmin(pivots))
    if scale == 0 or pivots[worst] <= tol.singular_rtol * scale:
        raise SingularMatrixError("Delta", worst, float(pivots[worst]))
    return lu, piv


def ub_inverse(x: UBMatrix, tol: Optional[Tolerances] = None) -> UBMatrix:
    """Coordinates (A^-1, -Delta^-1 B A^-1) of the inverse."""
    _require_symmetric(x, "inverse")
    tol = get_tolerances(tol)

    scale = max(float(np.max(np.abs(x.a))), float(np.max(np.abs(x.b))))
    worst = int(np.argmin(np.abs(x.a)))
    if scale == 0 or abs(x.a[worst]) <= tol.singular_rtol * scale:
        raise SingularMatrixError("A", worst, float(x.a[worst]))

    lu_piv = _factor_delta(x, tol)
    a_inv = 1.0 / x.a
    b_inv = -scipy.linalg.lu_solve(lu_piv, x.b, check_finite=False) * a_inv[None, :]
    return UBMatrix(a_inv, (b_inv + b_inv.T) / 2, x.partition)


def positive_definite_diagnostics(x: UBMatrix) -> Tuple[float, float]:
    """(min a_kk, min eigenvalue of Delta)."""
    return float(np.min(x.a)), float(np.min(np.linalg.eigvalsh(x.symmetric_delta)))


def ub_is_positive_definite(x: UBMatrix, tol: Optional[Tolerances] = None) -> bool:
    """True iff every a_kk and every eigenvalue of Delta exceeds the tolerance."""
    _require_symmetric(x, "positive-definiteness check")
    tol = get_tolerances(tol)
    if np.any(x.a <= tol.pd_tol):
        return False
    return bool(np.min(np.linalg.eigvalsh(x.symmetric_delta)) > tol.pd_tol)


def ensure_positive_definite(x: UBMatrix, context: str, tol: Optional[Tolerances] = None) -> None:
    if not ub_is_positive_definite(x, tol):
        min_a, min_delta = positive_definite_diagnostics(x)
        raise NotPositiveDefiniteError(f"{context}: matrix is not positive definite", min_a, min_delta)


def helmert_submatrix(order: int) -> np.ndarray:
    """
    Rows 2..order of the standard Helmert matrix.

    Row j (1-based, j >= 2) has j - 1 entries 1/sqrt(j(j-1)), then
    -(j-1)/sqrt(j(j-1)), then zeros.
    """
    if order < 2:
        raise PartitionError(f"Helmert submatrix needs order >= 2, got {order}")
    j = np.arange(2, order + 1)
    norm = np.sqrt(j * (j - 1.0))
    cols = np.arange(order)[None, :]
    h = np.where(cols < (j - 1)[:, None], 1.0, 0.0) / norm[:, None]
    h[np.arange(order - 1), j - 1] = -(j - 1) / norm
    return h


def helmert_matrix(order: int) -> np.ndarray:
    """Full Helmert matrix: first row 1/sqrt(order), then the submatrix."""
    first = np.full((1, order), 1.0 / np.sqrt(order))
    return np.vstack([first, helmert_submatrix(order)])


def ub_canonical_form(x: UBMatrix, tol: Optional[Tolerances] = None) -> SpectralForm:
    """
    Orthogonal Gamma with Gamma N Gamma^T diagonal.

    Rows pbar_(k-1)+1 .. pbar_k - 1 of Gamma hold the Helmert submatrix of
    block k (eigenvalue a_kk); row pbar_k holds (xi_k1 1^T, ..., xi_kK 1^T)
    where xi_k is the eigenvector of Delta for its k-th largest eigenvalue,
    scaled so that the row has unit length.
    """
    _require_symmetric(x, "canonical form")
    tol = get_tolerances(tol)
    partition = x.partition
    values, vectors = _delta_eigh(x)

    # Delta (P^-1/2 u) = lambda (P^-1/2 u); sum_j p_j xi_j^2 = |u|^2 = 1
    xi = vectors / np.sqrt(partition.array)[:, None]

    p = partition.total
    gamma = np.zeros((p, p))
    diagonal = np.empty(p)
    for k, (block, size) in enumerate(zip(partition.slices(), partition.sizes)):
        start, end = block.start, block.stop
        gamma[start:end - 1, block] = helmert_submatrix(size)
        diagonal[start:end - 1] = x.a[k]
        gamma[end - 1, :] = xi[partition.labels, k]
        diagonal[end - 1] = values[k]

    gaps = np.abs(np.diff(values))
    spread = max(1.0, float(np.max(np.abs(values))))
    degenerate = bool(gaps.size and np.min(gaps) <= tol.symmetry_tol * spread)
    if degenerate:
        logger.warning("Delta has repeated eigenvalues; eigenvector basis chosen by the eigensolver")

    unit_vectors = xi / np.linalg.norm(xi, axis=0)[None, :]
    pairs = [(float(a), size - 1) for a, size in zip(x.a, partition.sizes)]
    pairs.extend((float(v), 1) for v in values)

    return SpectralForm(
        eigenvalues=tuple(pairs),
        diagonal=diagonal,
        gamma=gamma,
        delta_eigenvalues=values.copy(),
        delta_eigenvectors=unit_vectors,
        degenerate=degenerate,
    )


def ub_precision_coordinates(sigma: UBMatrix, tol: Optional[Tolerances] = None) -> UBMatrix:
    """Precision matrix Theta = Sigma^-1 of a covariance with UB structure."""
    ensure_positive_definite(sigma, "precision", tol)
    return ub_inverse(sigma, tol)


def ub_correlation_coordinates(sigma: UBMatrix) -> UBMatrix:
    """Correlation coordinates C^-1/2 A C^-1/2, C^-1/2 B C^-1/2 with c_kk = a_kk + b_kk."""
    _require_symmetric(sigma, "correlation")
    variances = sigma.a + np.diag(sigma.b)
    if np.any(variances <= 0):
        k = int(np.argmin(variances))
        raise NonPositiveVarianceError(
            f"block {k + 1} has non-positive variance a_kk + b_kk = {variances[k]:.6g}"
        )
    scale = np.sqrt(np.outer(variances, variances))
    return UBMatrix(sigma.a / variances, sigma.b / scale, sigma.partition)


def ub_sqrt(x: UBMatrix, tol: Optional[Tolerances] = None) -> UBMatrix:
    """
    Symmetric square root of an SPD UB matrix, itself UB.

    A_r = A^1/2 and B_r = P^-1/2 S^1/2 P^-1/2 - A^1/2 P^-1, so that
    Delta_r = P^-1/2 S^1/2 P^1/2 squares to Delta.
    """
    ensure_positive_definite(x, "square root", tol)
    values, vectors = np.linalg.eigh(x.symmetric_delta)
    s_half = (vectors * np.sqrt(values)[None, :]) @ vectors.T
    inv_root = 1.0 / np.sqrt(x.partition.array)
    a_root = np.sqrt(x.a)
    b_root = inv_root[:, None] * s_half * inv_root[None, :] - np.diag(a_root / x.partition.array)
    return UBMatrix(a_root, (b_root + b_root.T) / 2, x.partition)


def ub_apply(x: UBMatrix, v: np.ndarray) -> np.ndarray:
    """
    N v for a p-vector, or N applied to every row of an (n, p) array.

    Costs O(pK) per vector: (N v)_i = a_kk v_i + sum_k' b_kk' s_k' for i in
    block k, with s the block sums of v.
    """
    v = np.asarray(v, dtype=np.float64)
    rows = np.atleast_2d(v)
    if rows.shape[-1] != x.p:
        raise PartitionMismatchError(f"vector length {rows.shape[-1]} does not match p = {x.p}")
    labels = x.partition.labels
    sums = x.partition.block_sums(rows)
    out = rows * x.a[labels][None, :] + (sums @ x.b.T)[:, labels]
    return out.reshape(v.shape)


def ub_quadratic_form(x: UBMatrix, v: np.ndarray) -> float | np.ndarray:
    """v^T N v = sum_k a_kk |v_k|^2 + s^T B s (per row for an (n, p) array)."""
    v = np.asarray(v, dtype=np.float64)
    rows = np.atleast_2d(v)
    if rows.shape[-1] != x.p:
        raise PartitionMismatchError(f"vector length {rows.shape[-1]} does not match p = {x.p}")
    sums = x.partition.block_sums(rows)
    squares = x.partition.block_sums(rows * rows)
    values = squares @ x.a + np.einsum("ik,kl,il->i", sums, x.b, sums)
    return float(values[0]) if v.ndim == 1 else values


def ub_expand(x: UBMatrix) -> np.ndarray:
    """Dense p x p matrix A o I[p] + B o J[p]."""
    labels = x.partition.labels
    m = x.b[np.ix_(labels, labels)].copy()
    m[np.diag_indices_from(m)] += x.a[labels]
    return m


def ub_compress(m: np.ndarray, partition: PartitionVector,
                tol: Optional[Tolerances] = None) -> UBMatrix:
    """
    Read (a, B) off a dense symmetric matrix.

    Each block value is taken from a representative entry, and every other
    entry of the block must agree with it to within structure_rtol times the
    block magnitude.
    """
    tol = get_tolerances(tol)
    m = np.asarray(m, dtype=np.float64)
    p = partition.total
    if m.shape != (p, p):
        raise PartitionMismatchError(f"matrix has shape {m.shape} but the partition needs ({p}, {p})")
    if not np.all(np.isfinite(m)):
        raise UBMatError("matrix entries must be finite")

    asymmetry = float(np.max(np.abs(m - m.T)))
    if asymmetry > tol.symmetry_tol * max(1.0, float(np.max(np.abs(m)))):
        raise NonSymmetricInputError(f"matrix is not symmetric (max |m_ij - m_ji| = {asymmetry:.3e})")

    K = partition.K
    a = np.empty(K)
    b = np.empty((K, K))
    slices = partition.slices()
    worst = (0.0, (1, 1), 0.0, 0.0)

    for k in range(K):
        for l in range(k, K):
            block = m[slices[k], slices[l]]
            if k == l:
                off_mask = ~np.eye(block.shape[0], dtype=bool)
                b_value = block[1, 0]
                d_value = block[0, 0]
                deviation = max(
                    float(np.max(np.abs(block[off_mask] - b_value))),
                    float(np.max(np.abs(np.diag(block) - d_value)))
                )
                a[k] = d_value - b_value
                b[k, k] = b_value
            else:
                b_value = block[0, 0]
                deviation = float(np.max(np.abs(block - b_value)))
                b[k, l] = b_value

            magnitude = float(np.max(np.abs(block)))
            relative = deviation / magnitude if magnitude > 0 else 0.0
            if relative > worst[0]:
                worst = (relative, (k + 1, l + 1), deviation, tol.structure_rtol * magnitude)

    if worst[0] > tol.structure_rtol:
        raise StructureViolationError(worst[1], worst[2], worst[3])

    return UBMatrix(a, b, partition)


def decomposition_identity_residual(x: UBMatrix) -> float:
    """
    Max-abs residual of (A P)^-1 - Delta^-1 B A^-1 - (P Delta)^-1.

    The identity splits the block-average part of the inverse into its
    within-block and between-block pieces; it holds for any non-singular
    coordinates.
    """
    sizes = x.partition.array
    delta_inv = np.linalg.inv(x.delta)
    lhs = np.diag(1.0 / (x.a * sizes)) - delta_inv @ x.b / x.a[None, :]
    rhs = np.linalg.inv(sizes[:, None] * x.delta)
    return float(np.max(np.abs(lhs - rhs)))
