"""
Unit tests for the UB coordinate algebra.

Tests the core operations:
- Partition handling
- Arithmetic and products
- Determinant, eigenvalues and inverse on the worked instance
- Canonical form, square root and positive definiteness
- Dense expansion and compression
"""

import numpy as np
import pytest

from ubmat.core.config import Tolerances
from ubmat.core.errors import UBMatError
from ubmat.service.ub_matrix import (
    NonPositiveVarianceError,
    NonSymmetricInputError,
    NotPositiveDefiniteError,
    PartitionError,
    PartitionMismatchError,
    PartitionVector,
    SingularMatrixError,
    StructureViolationError,
    UBMatrix,
    decomposition_identity_residual,
    ensure_positive_definite,
    helmert_matrix,
    helmert_submatrix,
    ub_add,
    ub_apply,
    ub_canonical_form,
    ub_compress,
    ub_correlation_coordinates,
    ub_determinant,
    ub_eigenvalues,
    ub_expand,
    ub_identity,
    ub_inverse,
    ub_is_positive_definite,
    ub_multiply,
    ub_power,
    ub_precision_coordinates,
    ub_quadratic_form,
    ub_scale,
    ub_slogdet,
    ub_spectrum,
    ub_sqrt,
    ub_subtract,
    ub_zeros,
)


@pytest.fixture
def swap():
    """Symmetric operand that does not commute with the worked instance."""
    return UBMatrix([1.0, 1.0], [[0.0, 1.0], [1.0, 0.0]], PartitionVector((2, 3)))


class TestPartitionVector:
    """Tests for partition parsing and layout helpers."""

    def test_parse_inline(self):
        """Test parsing an inline partition."""
        partition = PartitionVector.parse("2, 3,4")
        assert partition.sizes == (2, 3, 4)
        assert partition.K == 3
        assert partition.total == 9

    def test_rejects_singleton_block(self):
        """Test that a block of size one is rejected."""
        with pytest.raises(PartitionError):
            PartitionVector((2, 1))

    def test_rejects_empty(self):
        """Test that an empty partition is rejected."""
        with pytest.raises(PartitionError):
            PartitionVector(())

    def test_rejects_garbage(self):
        """Test that non-numeric sizes are rejected."""
        with pytest.raises(PartitionError):
            PartitionVector.parse("2,x")

    def test_offsets_and_labels(self):
        """Test cumulative offsets and per-coordinate block labels."""
        partition = PartitionVector((2, 3))
        assert partition.offsets.tolist() == [0, 2, 5]
        assert partition.labels.tolist() == [0, 0, 1, 1, 1]
        assert partition.block_sums(np.arange(5.0)).tolist() == [1.0, 9.0]


class TestConstruction:
    """Tests for coordinate validation."""

    def test_wrong_a_length(self):
        """Test that a must have one entry per block."""
        with pytest.raises(PartitionMismatchError):
            UBMatrix([1.0], [[0.0, 0.0], [0.0, 0.0]], PartitionVector((2, 2)))

    def test_wrong_b_shape(self):
        """Test that b must be K x K."""
        with pytest.raises(PartitionMismatchError):
            UBMatrix([1.0, 1.0], [[0.0]], PartitionVector((2, 2)))

    def test_b_is_symmetrized_from_upper_triangle(self):
        """Test that the upper triangle of b is authoritative."""
        x = UBMatrix([1.0, 1.0], [[0.0, 0.3], [0.7, 0.0]], PartitionVector((2, 2)))
        assert x.b[1, 0] == 0.3

    def test_identity_and_zeros(self):
        """Test the identity and zero coordinates."""
        partition = PartitionVector((2, 3))
        np.testing.assert_array_equal(ub_expand(ub_identity(partition)), np.eye(5))
        np.testing.assert_array_equal(ub_expand(ub_zeros(partition)), np.zeros((5, 5)))


class TestWorkedInstance:
    """Tests against the hand-computed worked instance."""

    def test_delta(self, worked_instance):
        """Test Delta = A + B P."""
        np.testing.assert_allclose(worked_instance.delta, [[2.0, 0.6], [0.4, 2.9]], rtol=1e-15)

    def test_determinant(self, worked_instance):
        """Test det = 1^1 * 2^2 * det(Delta) = 22.24."""
        assert ub_determinant(worked_instance) == pytest.approx(22.24, rel=1e-12)
        assert ub_determinant(worked_instance) == pytest.approx(np.linalg.det(ub_expand(worked_instance)), rel=1e-12)

    def test_slogdet(self, worked_instance):
        """Test the sign and log-absolute determinant."""
        sign, logabs = ub_slogdet(worked_instance)
        assert sign == 1.0
        assert logabs == pytest.approx(np.log(22.24), rel=1e-12)

    def test_eigenvalues(self, worked_instance):
        """Test the (value, multiplicity) slots."""
        pairs = ub_eigenvalues(worked_instance)
        assert [m for _, m in pairs] == [1, 2, 1, 1]
        assert pairs[0][0] == 1.0
        assert pairs[1][0] == 2.0
        assert pairs[2][0] == pytest.approx(3.1152, abs=1e-4)
        assert pairs[3][0] == pytest.approx(1.7848, abs=1e-4)

    def test_spectrum_matches_dense(self, worked_instance):
        """Test that the expanded spectrum equals the dense one."""
        dense = np.sort(np.linalg.eigvalsh(ub_expand(worked_instance)))[::-1]
        np.testing.assert_allclose(ub_spectrum(worked_instance), dense, rtol=1e-12)

    def test_inverse(self, worked_instance):
        """Test the inverse coordinates A* = A^-1 and B* = -Delta^-1 B A^-1."""
        inv = ub_inverse(worked_instance)
        np.testing.assert_allclose(inv.a, [1.0, 0.5], rtol=1e-15)
        expected = -np.array([[0.239209, 0.035971], [0.035971, 0.046763]])
        np.testing.assert_allclose(inv.b, expected, atol=1e-6)

    def test_inverse_times_self_is_identity(self, worked_instance):
        """Test N N^-1 = I in coordinates."""
        product = ub_multiply(worked_instance, ub_inverse(worked_instance))
        np.testing.assert_allclose(product.a, [1.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(product.b, np.zeros((2, 2)), atol=1e-14)

    def test_decomposition_identity(self, worked_instance):
        """Test (AP)^-1 - Delta^-1 B A^-1 = (P Delta)^-1."""
        assert decomposition_identity_residual(worked_instance) < 1e-12

    @pytest.mark.parametrize("seed", range(100))
    def test_decomposition_identity_on_random_instances(self, random_ub, seed):
        """Test the decomposition identity on seeded positive definite coordinates."""
        assert decomposition_identity_residual(random_ub(seed)) <= 1e-11


class TestArithmetic:
    """Tests for sums, scaling, products and powers."""

    def test_add_subtract(self, worked_instance):
        """Test x + x - x = x."""
        total = ub_subtract(ub_add(worked_instance, worked_instance), worked_instance)
        assert total == worked_instance

    def test_operators(self, worked_instance):
        """Test the operator forms."""
        assert worked_instance + worked_instance == ub_scale(worked_instance, 2.0)
        assert -worked_instance == ub_scale(worked_instance, -1.0)

    def test_partition_mismatch(self, worked_instance):
        """Test that operands on different partitions are rejected."""
        other = ub_identity(PartitionVector((3, 2)))
        with pytest.raises(PartitionMismatchError):
            ub_add(worked_instance, other)

    def test_product_matches_dense(self, worked_instance, swap):
        """Test the product coordinates against the dense product."""
        product = ub_multiply(worked_instance, swap)
        np.testing.assert_allclose(
            ub_expand(product), ub_expand(worked_instance) @ ub_expand(swap), atol=1e-14
        )

    def test_non_commuting_product_is_flagged(self, worked_instance, swap):
        """Test that a non-commuting product keeps the raw, non-symmetric B."""
        product = worked_instance @ swap
        assert product.symmetric is False
        np.testing.assert_allclose(product.b, [[1.1, 2.2], [3.1, 0.7]], atol=1e-14)

    def test_non_symmetric_rejected_by_inverse(self, worked_instance, swap):
        """Test that symmetric-only operations reject a flagged product."""
        product = worked_instance @ swap
        with pytest.raises(NonSymmetricInputError):
            ub_inverse(product)
        with pytest.raises(NonSymmetricInputError):
            ub_eigenvalues(product)

    def test_commuting_product_stays_symmetric(self, worked_instance):
        """Test that a matrix commutes with its own inverse."""
        product = ub_multiply(worked_instance, ub_inverse(worked_instance))
        assert product.symmetric is True

    def test_power(self, worked_instance):
        """Test x^3 against repeated products."""
        cube = ub_power(worked_instance, 3)
        np.testing.assert_allclose(
            ub_expand(cube), np.linalg.matrix_power(ub_expand(worked_instance), 3), rtol=1e-12
        )

    def test_power_rejects_zero(self, worked_instance):
        """Test that the exponent must be a positive integer."""
        with pytest.raises(UBMatError):
            ub_power(worked_instance, 0)


class TestSingularity:
    """Tests for singular and indefinite coordinates."""

    def test_singular_a(self):
        """Test that a vanishing a_kk is reported against factor A."""
        x = UBMatrix([0.0, 1.0], [[0.5, 0.0], [0.0, 0.5]], PartitionVector((2, 2)))
        assert ub_determinant(x) == 0.0
        with pytest.raises(SingularMatrixError) as excinfo:
            ub_inverse(x)
        assert excinfo.value.factor == "A"
        assert excinfo.value.index == 0

    def test_singular_delta(self):
        """Test that a singular Delta is reported against factor Delta."""
        x = UBMatrix([1.0, 1.0], [[-0.5, 0.0], [0.0, 0.2]], PartitionVector((2, 2)))
        assert ub_determinant(x) == 0.0
        with pytest.raises(SingularMatrixError) as excinfo:
            ub_inverse(x)
        assert excinfo.value.factor == "Delta"

    def test_positive_definite(self, worked_instance):
        """Test positive definiteness through a_kk and the spectrum of Delta."""
        assert ub_is_positive_definite(worked_instance)
        indefinite = UBMatrix([1.0, 1.0], [[-0.6, 0.0], [0.0, 0.0]], PartitionVector((2, 2)))
        assert not ub_is_positive_definite(indefinite)
        with pytest.raises(NotPositiveDefiniteError) as excinfo:
            ensure_positive_definite(indefinite, "test")
        assert excinfo.value.min_delta_eigenvalue == pytest.approx(-0.2)

    def test_precision_needs_positive_definite(self):
        """Test that precision coordinates require a covariance."""
        indefinite = UBMatrix([-1.0, 1.0], [[0.1, 0.0], [0.0, 0.1]], PartitionVector((2, 2)))
        with pytest.raises(NotPositiveDefiniteError):
            ub_precision_coordinates(indefinite)


class TestCanonicalForm:
    """Tests for the Helmert-based orthogonal diagonalization."""

    def test_helmert_is_orthogonal(self):
        """Test that the full Helmert matrix is orthogonal."""
        h = helmert_matrix(5)
        np.testing.assert_allclose(h @ h.T, np.eye(5), atol=1e-15)
        np.testing.assert_allclose(helmert_submatrix(5) @ np.ones(5), np.zeros(4), atol=1e-15)

    def test_gamma_diagonalizes(self, sigma3):
        """Test Gamma N Gamma^T = diag(diagonal) with Gamma orthogonal."""
        form = ub_canonical_form(sigma3)
        gamma = form.gamma
        np.testing.assert_allclose(gamma @ gamma.T, np.eye(sigma3.p), atol=1e-12)
        np.testing.assert_allclose(gamma @ ub_expand(sigma3) @ gamma.T, np.diag(form.diagonal), atol=1e-12)
        assert form.total_multiplicity == sigma3.p
        assert not form.degenerate

    def test_repeated_delta_eigenvalues_flagged(self):
        """Test that a repeated Delta spectrum is reported as degenerate."""
        x = UBMatrix([1.0, 1.0], np.zeros((2, 2)), PartitionVector((2, 2)))
        form = ub_canonical_form(x)
        assert form.degenerate


class TestDerivedMatrices:
    """Tests for correlation, square root, and products with vectors."""

    def test_correlation_has_unit_diagonal(self, sigma3):
        """Test that correlation coordinates give a unit diagonal."""
        corr = ub_correlation_coordinates(sigma3)
        np.testing.assert_allclose(np.diag(ub_expand(corr)), np.ones(sigma3.p), rtol=1e-15)

    def test_correlation_rejects_non_positive_variance(self):
        """Test that a_kk + b_kk <= 0 is rejected."""
        x = UBMatrix([1.0, 1.0], [[-1.0, 0.0], [0.0, 0.5]], PartitionVector((2, 2)))
        with pytest.raises(NonPositiveVarianceError):
            ub_correlation_coordinates(x)

    def test_square_root(self, sigma3):
        """Test that the UB square root squares back to the matrix."""
        root = ub_sqrt(sigma3)
        np.testing.assert_allclose(ub_expand(ub_multiply(root, root)), ub_expand(sigma3), atol=1e-12)
        assert ub_is_positive_definite(root)

    def test_apply_matches_dense(self, sigma3):
        """Test N v for a vector and for rows of a matrix."""
        gen = np.random.default_rng(4)
        v = gen.standard_normal(sigma3.p)
        rows = gen.standard_normal((6, sigma3.p))
        dense = ub_expand(sigma3)
        np.testing.assert_allclose(ub_apply(sigma3, v), dense @ v, atol=1e-13)
        np.testing.assert_allclose(ub_apply(sigma3, rows), rows @ dense.T, atol=1e-13)

    def test_quadratic_form(self, sigma3):
        """Test v^T N v for a vector and row-wise."""
        gen = np.random.default_rng(5)
        v = gen.standard_normal(sigma3.p)
        rows = gen.standard_normal((4, sigma3.p))
        dense = ub_expand(sigma3)
        assert ub_quadratic_form(sigma3, v) == pytest.approx(v @ dense @ v, rel=1e-12)
        np.testing.assert_allclose(
            ub_quadratic_form(sigma3, rows), np.einsum("ij,jk,ik->i", rows, dense, rows), rtol=1e-12
        )

    def test_vector_length_checked(self, sigma3):
        """Test that a vector of the wrong length is rejected."""
        with pytest.raises(PartitionMismatchError):
            ub_apply(sigma3, np.ones(sigma3.p + 1))


class TestExpandCompress:
    """Tests for the dense boundary."""

    def test_expand_layout(self, worked_instance):
        """Test diagonal and off-diagonal block entries."""
        dense = ub_expand(worked_instance)
        assert dense.shape == (5, 5)
        assert dense[0, 0] == 1.5
        assert dense[0, 1] == 0.5
        assert dense[0, 4] == 0.2
        assert dense[2, 2] == 2.3
        assert dense[3, 4] == 0.3

    def test_round_trip_is_exact_for_dyadic_values(self):
        """Test compress(expand(x)) == x bit for bit when the entries are dyadic."""
        x = UBMatrix([0.75, 1.5, 2.0], [[0.5, 0.25, -0.125], [0.25, 1.0, 0.375], [-0.125, 0.375, 0.0625]],
                     PartitionVector((2, 3, 4)))
        assert ub_compress(ub_expand(x), x.partition) == x

    def test_dense_methods(self, sigma3):
        """Test that to_dense and from_dense wrap expand and compress."""
        dense = sigma3.to_dense()
        np.testing.assert_array_equal(dense, ub_expand(sigma3))
        back = UBMatrix.from_dense(dense, sigma3.partition)
        np.testing.assert_allclose(back.a, sigma3.a, rtol=1e-12)
        np.testing.assert_allclose(back.b, sigma3.b, rtol=1e-12)
        with pytest.raises(StructureViolationError):
            UBMatrix.from_dense(dense + np.diag(np.linspace(0.0, 0.1, sigma3.p)), sigma3.partition)

    def test_structure_violation(self, worked_instance):
        """Test that a perturbed block is rejected with its location."""
        dense = ub_expand(worked_instance)
        dense[0, 3] += 1e-3
        dense[3, 0] += 1e-3
        with pytest.raises(StructureViolationError) as excinfo:
            ub_compress(dense, worked_instance.partition)
        assert excinfo.value.block == (1, 2)

    def test_structure_tolerance_override(self, worked_instance):
        """Test that a looser tolerance accepts a small perturbation."""
        dense = ub_expand(worked_instance)
        dense[0, 3] += 1e-6
        dense[3, 0] += 1e-6
        x = ub_compress(dense, worked_instance.partition, Tolerances(structure_rtol=1e-4))
        assert x.b[0, 1] == pytest.approx(0.2, abs=1e-5)

    def test_non_symmetric_dense_rejected(self, worked_instance):
        """Test that an asymmetric dense matrix is rejected."""
        dense = ub_expand(worked_instance)
        dense[0, 4] += 0.1
        with pytest.raises(NonSymmetricInputError):
            ub_compress(dense, worked_instance.partition)

    def test_wrong_shape(self, worked_instance):
        """Test that the dense shape must match the partition."""
        with pytest.raises(PartitionMismatchError):
            ub_compress(np.eye(4), worked_instance.partition)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
