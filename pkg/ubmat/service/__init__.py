# Service exports
from ubmat.service.ub_matrix import (
    PartitionVector,
    UBMatrix,
    SpectralForm,
    PartitionError,
    PartitionMismatchError,
    StructureViolationError,
    SingularMatrixError,
    NotPositiveDefiniteError,
    NonPositiveVarianceError,
    NonSymmetricInputError,
    ub_identity,
    ub_zeros,
    ub_add,
    ub_subtract,
    ub_scale,
    ub_multiply,
    ub_power,
    ub_eigenvalues,
    ub_spectrum,
    ub_determinant,
    ub_slogdet,
    ub_inverse,
    ub_is_positive_definite,
    ub_canonical_form,
    ub_precision_coordinates,
    ub_correlation_coordinates,
    ub_sqrt,
    ub_apply,
    ub_quadratic_form,
    ub_expand,
    ub_compress,
    helmert_submatrix,
    decomposition_identity_residual
)
from ubmat.service.estimation import (
    Dataset,
    SampleMoments,
    EstimationError,
    sample_moments,
    covariance_coordinates,
    estimate_coordinates,
    estimate_precision,
    block_average_covariance
)
from ubmat.service.mixture import (
    FTerm,
    HotellingT0,
    FMixture,
    MonteCarloLaw,
    InferenceError,
    ApproximationUnavailableError,
    mixture_sample,
    mixture_quantile,
    mixture_moments,
    p_value,
    morrison_approximation
)
from ubmat.service.inference import (
    TestMethod,
    one_sample_statistic,
    m_sample_statistic,
    one_sample_null_law,
    m_sample_null_law,
    noncentrality_parameters,
    noncentral_law,
    run_one_sample_test,
    run_m_sample_test,
    simultaneous_ci
)
from ubmat.service.simulation import (
    StudyPlan,
    SimulationError,
    sample_ub_normal,
    sample_groups,
    random_spd_ub,
    run_type1_study,
    run_power_study,
    wishart_mean_check
)

__all__ = [
    # Coordinate algebra
    "PartitionVector",
    "UBMatrix",
    "SpectralForm",
    "PartitionError",
    "PartitionMismatchError",
    "StructureViolationError",
    "SingularMatrixError",
    "NotPositiveDefiniteError",
    "NonPositiveVarianceError",
    "NonSymmetricInputError",
    "ub_identity",
    "ub_zeros",
    "ub_add",
    "ub_subtract",
    "ub_scale",
    "ub_multiply",
    "ub_power",
    "ub_eigenvalues",
    "ub_spectrum",
    "ub_determinant",
    "ub_slogdet",
    "ub_inverse",
    "ub_is_positive_definite",
    "ub_canonical_form",
    "ub_precision_coordinates",
    "ub_correlation_coordinates",
    "ub_sqrt",
    "ub_apply",
    "ub_quadratic_form",
    "ub_expand",
    "ub_compress",
    "helmert_submatrix",
    "decomposition_identity_residual",
    # Estimation
    "Dataset",
    "SampleMoments",
    "EstimationError",
    "sample_moments",
    "covariance_coordinates",
    "estimate_coordinates",
    "estimate_precision",
    "block_average_covariance",
    # Null laws
    "FTerm",
    "HotellingT0",
    "FMixture",
    "MonteCarloLaw",
    "InferenceError",
    "ApproximationUnavailableError",
    "mixture_sample",
    "mixture_quantile",
    "mixture_moments",
    "p_value",
    "morrison_approximation",
    # Tests
    "TestMethod",
    "one_sample_statistic",
    "m_sample_statistic",
    "one_sample_null_law",
    "m_sample_null_law",
    "noncentrality_parameters",
    "noncentral_law",
    "run_one_sample_test",
    "run_m_sample_test",
    "simultaneous_ci",
    # Simulation
    "StudyPlan",
    "SimulationError",
    "sample_ub_normal",
    "sample_groups",
    "random_spd_ub",
    "run_type1_study",
    "run_power_study",
    "wishart_mean_check"
]
