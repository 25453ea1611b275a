# Schema exports
from ubmat.schema.coordinates import (
    UBCoordinates,
    EigenPair,
    EigenvalueReport,
    CanonicalFormReport,
    DeterminantReport,
    PositiveDefiniteReport,
    EstimateReport
)
from ubmat.schema.inference import (
    FTermModel,
    HotellingT0Model,
    FMixtureModel,
    MorrisonModel,
    TestReport,
    ConfidenceIntervalReport
)
from ubmat.schema.simulation import SimulationPlan, StudyReport
from ubmat.schema.bench import BenchRecord, BenchReport

# Shipped JSON schemas, by the name used on the command line
SCHEMAS = {
    "coordinates": UBCoordinates,
    "eigenvalues": EigenvalueReport,
    "canonical": CanonicalFormReport,
    "determinant": DeterminantReport,
    "pd": PositiveDefiniteReport,
    "estimate": EstimateReport,
    "mixture": FMixtureModel,
    "test": TestReport,
    "ci": ConfidenceIntervalReport,
    "plan": SimulationPlan,
    "study": StudyReport,
    "bench": BenchReport,
}

__all__ = [
    # Coordinate schemas
    "UBCoordinates",
    "EigenPair",
    "EigenvalueReport",
    "CanonicalFormReport",
    "DeterminantReport",
    "PositiveDefiniteReport",
    "EstimateReport",
    # Inference schemas
    "FTermModel",
    "HotellingT0Model",
    "FMixtureModel",
    "MorrisonModel",
    "TestReport",
    "ConfidenceIntervalReport",
    # Simulation schemas
    "SimulationPlan",
    "StudyReport",
    # Benchmark schemas
    "BenchRecord",
    "BenchReport",
    "SCHEMAS"
]
