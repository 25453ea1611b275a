from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from ubmat.service.inference import ConfidenceInterval, TestMethod, TestOutcome
from ubmat.service.mixture import FMixture, FTerm, HotellingT0

P_VALUE_NOTE = "Monte Carlo p-values are (exceedances + 1) / (replicates + 1) and never zero"


class FTermModel(BaseModel):
    """coefficient * F(df1, df2; noncentrality)."""
    coefficient: float
    df1: float
    df2: float
    noncentrality: float = 0.0
    label: str = ""

    @classmethod
    def from_term(cls, term: FTerm) -> "FTermModel":
        return cls(
            coefficient=term.coefficient,
            df1=term.df1,
            df2=term.df2,
            noncentrality=term.noncentrality,
            label=term.label
        )


class HotellingT0Model(BaseModel):
    """Hotelling-Lawley trace component, evaluated by Monte Carlo only."""
    dimension: int
    hypothesis_df: int
    error_df: int


class FMixtureModel(BaseModel):
    terms: List[FTermModel]
    hotelling: Optional[HotellingT0Model] = None
    dimension: Optional[int] = None

    @classmethod
    def from_law(cls, law: FMixture) -> "FMixtureModel":
        hotelling: Optional[HotellingT0] = law.hotelling
        return cls(
            terms=[FTermModel.from_term(t) for t in law.terms],
            hotelling=HotellingT0Model(
                dimension=hotelling.dimension,
                hypothesis_df=hotelling.hypothesis_df,
                error_df=hotelling.error_df
            ) if hotelling is not None else None,
            dimension=law.dimension
        )

    def to_law(self) -> FMixture:
        return FMixture(
            terms=tuple(FTerm(**t.model_dump()) for t in self.terms),
            hotelling=HotellingT0(**self.hotelling.model_dump()) if self.hotelling else None,
            dimension=self.dimension
        )


class MorrisonModel(BaseModel):
    c1: float
    c2: float


class TestReport(BaseModel):
    """Result of a one-sample or M-sample information test."""
    __test__ = False

    test: Literal["one_sample", "m_sample"]
    statistic: float
    components: List[float]
    decomposition_residual: float
    p_value: float = Field(..., ge=0, le=1)
    critical_value: float
    critical_value_se: Optional[float] = None
    alpha: float
    reject: bool
    method: TestMethod
    replicates: Optional[int] = None
    seed: Optional[int] = None
    n: int
    group_sizes: List[int]
    law: FMixtureModel
    morrison: Optional[MorrisonModel] = None
    note: str = P_VALUE_NOTE

    @classmethod
    def from_outcome(cls, outcome: TestOutcome) -> "TestReport":
        stat = outcome.statistic
        return cls(
            test="one_sample" if outcome.law.hotelling is None else "m_sample",
            statistic=stat.statistic,
            components=stat.components.tolist(),
            decomposition_residual=stat.decomposition_residual,
            p_value=outcome.p_value,
            critical_value=outcome.critical_value,
            critical_value_se=outcome.critical_value_se,
            alpha=outcome.alpha,
            reject=outcome.reject,
            method=outcome.method,
            replicates=outcome.replicates,
            seed=outcome.seed,
            n=stat.moments.n,
            group_sizes=list(stat.moments.group_sizes),
            law=FMixtureModel.from_law(outcome.law),
            morrison=MorrisonModel(c1=outcome.morrison[0], c2=outcome.morrison[1]) if outcome.morrison else None,
            note=P_VALUE_NOTE if outcome.method == TestMethod.MONTE_CARLO else "p-value from the scaled-F approximation"
        )


class ConfidenceIntervalReport(BaseModel):
    center: float
    half_width: float
    low: float
    high: float
    critical_value: float
    alpha: float

    @classmethod
    def from_interval(cls, ci: ConfidenceInterval) -> "ConfidenceIntervalReport":
        return cls(
            center=ci.center,
            half_width=ci.half_width,
            low=ci.low,
            high=ci.high,
            critical_value=ci.critical_value,
            alpha=ci.alpha
        )
