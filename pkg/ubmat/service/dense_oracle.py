"""
Dense reference implementations used to validate the coordinate algebra.

Everything here works on explicit p x p arrays with textbook algorithms
written out by hand (numpy is used only for vector primitives). Nothing in
this module imports the coordinate algebra, so a bug there cannot hide in
the oracle as well.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ubmat.core.errors import UBMatError

logger = logging.getLogger(__name__)

PIVOT_RTOL = 1e-12
SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class DenseOracleError(UBMatError):
    """Dense reference computation failed."""
    pass


class DenseShapeError(DenseOracleError):
    exit_code = 3


class DenseSingularError(DenseOracleError):
    pass


@dataclass(frozen=True, eq=False)
class DenseLU:
    """P x = L U with unit lower L; ``permutation[i]`` is the source row of row i."""

    lower: np.ndarray
    upper: np.ndarray
    permutation: np.ndarray
    sign: float


def _as_matrix(x: np.ndarray, square: bool = True) -> np.ndarray:
    m = np.array(x, dtype=np.float64)
    if m.ndim != 2 or (square and m.shape[0] != m.shape[1]):
        raise DenseShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def _check_symmetric(m: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and float(np.max(np.abs(m - m.T))) > SYMMETRY_TOL * scale:
        raise DenseOracleError(f"{what} needs a symmetric matrix")


def dense_identity(n: int) -> np.ndarray:
    return np.eye(n)


def dense_ones(n: int) -> np.ndarray:
    return np.ones((n, n))


def dense_from_blocks(a: Sequence[float], b: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    """Build A o I[p] + B o J[p] entry by entry."""
    b = np.asarray(b, dtype=np.float64)
    owner = []
    for k, size in enumerate(sizes):
        owner.extend([k] * int(size))
    p = len(owner)
    m = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            m[i, j] = b[owner[i], owner[j]]
        m[i, i] += a[owner[i]]
    return m


def dense_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-by-column product, one inner product per output entry."""
    x = _as_matrix(x, square=False)
    y = _as_matrix(y, square=False)
    if x.shape[1] != y.shape[0]:
        raise DenseShapeError(f"cannot multiply {x.shape} by {y.shape}")

    columns = np.ascontiguousarray(y.T)
    out = np.empty((x.shape[0], y.shape[1]))
    for i in range(x.shape[0]):
        row = x[i]
        for j in range(y.shape[1]):
            out[i, j] = np.dot(row, columns[j])
    return out


def dense_lu(x: np.ndarray) -> DenseLU:
    """
    Gaussian elimination with partial pivoting.

    Raises:
        DenseSingularError: if a pivot falls below 1e-12 times the largest entry
    """
    u = _as_matrix(x)
    n = u.shape[0]
    lower = np.eye(n)
    perm = np.arange(n)
    sign = 1.0
    scale = float(np.max(np.abs(u))) if n else 0.0

    for k in range(n):
        r = k + int(np.argmax(np.abs(u[k:, k])))
        if scale == 0 or abs(u[r, k]) < PIVOT_RTOL * scale:
            raise DenseSingularError(f"matrix is singular (pivot {u[r, k]:.3e} in column {k + 1})")
        if r != k:
            u[[k, r], :] = u[[r, k], :]
            lower[[k, r], :k] = lower[[r, k], :k]
            perm[[k, r]] = perm[[r, k]]
            sign = -sign
        factors = u[k + 1:, k] / u[k, k]
        lower[k + 1:, k] = factors
        u[k + 1:, k:] -= np.outer(factors, u[k, k:])
        u[k + 1:, k] = 0.0

    return DenseLU(lower=lower, upper=u, permutation=perm, sign=sign)


def dense_determinant(x: np.ndarray) -> float:
    """Product of the LU pivots (0 for a singular matrix)."""
    try:
        lu = dense_lu(x)
    except DenseSingularError:
        return 0.0
    return lu.sign * float(np.prod(np.diag(lu.upper)))


def dense_inverse(x: np.ndarray) -> np.ndarray:
    """Inverse by forward and back substitution on every column of the identity."""
    lu = dense_lu(x)
    n = lu.upper.shape[0]
    rhs = np.eye(n)[lu.permutation]

    y = np.empty((n, n))
    for i in range(n):
        y[i] = rhs[i] - lu.lower[i, :i] @ y[:i]

    z = np.empty((n, n))
    for i in range(n - 1, -1, -1):
        z[i] = (y[i] - lu.upper[i, i + 1:] @ z[i + 1:]) / lu.upper[i, i]
    return z


def dense_symmetric_eigen(x: np.ndarray, tol: float = JACOBI_TOL,
                          max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigensolver.

    Sweeps over all (p, q) pairs until the off-diagonal Frobenius mass drops
    below ``tol`` times max(1, |x|_F).

    Returns:
        Eigenvalues in decreasing order and the matching orthonormal
        eigenvectors as columns.
    """
    a = _as_matrix(x)
    _check_symmetric(a, "Jacobi eigensolver")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for sweep in range(max_sweeps):
        off = float(np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2)))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning("Jacobi did not converge in %d sweeps", max_sweeps)

    values = np.diag(a).copy()
    order = np.argsort(values)[::-1]
    return values[order], v[:, order]


def dense_cholesky(x: np.ndarray) -> Optional[np.ndarray]:
    """Lower Cholesky factor, or None when a pivot is <= 1e-12 (not positive definite)."""
    m = _as_matrix(x)
    n = m.shape[0]
    lower = np.zeros((n, n))
    for j in range(n):
        pivot = m[j, j] - np.dot(lower[j, :j], lower[j, :j])
        if pivot <= PIVOT_RTOL:
            return None
        lower[j, j] = np.sqrt(pivot)
        lower[j + 1:, j] = (m[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def dense_is_positive_definite(x: np.ndarray) -> bool:
    m = _as_matrix(x)
    try:
        _check_symmetric(m, "positive-definiteness check")
    except DenseOracleError:
        return False
    return dense_cholesky(m) is not None


def dense_quadratic_form(x: np.ndarray, v: np.ndarray) -> float:
    m = _as_matrix(x)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (m.shape[0],):
        raise DenseShapeError(f"vector of length {v.size} does not match matrix of order {m.shape[0]}")
    total = 0.0
    for i in range(m.shape[0]):
        total += v[i] * np.dot(m[i], v)
    return float(total)


def dense_correlation(x: np.ndarray) -> np.ndarray:
    """D^-1/2 x D^-1/2 with D the diagonal of x."""
    m = _as_matrix(x)
    d = np.diag(m)
    if np.any(d <= 0):
        raise DenseOracleError("correlation needs a positive diagonal")
    out = np.empty_like(m)
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            out[i, j] = m[i, j] / np.sqrt(d[i] * d[j])
    return out


def dense_sample_moments(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two-pass mean and unbiased covariance, accumulated one observation at a time."""
    rows = np.asarray(rows, dtype=np.float64)
    n, p = rows.shape
    if n < 2:
        raise DenseOracleError("sample moments need at least two observations")

    mean = np.zeros(p)
    for row in rows:
        mean += row
    mean /= n

    cov = np.zeros((p, p))
    for row in rows:
        centered = row - mean
        cov += np.outer(centered, centered)
    return mean, cov / (n - 1)
