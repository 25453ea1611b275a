from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ubmat.core.config import Tolerances
from ubmat.schema.coordinates import UBCoordinates
from ubmat.service.simulation import StudyPlan, StudyResult


class SimulationPlan(BaseModel):
    """
    Monte Carlo study configuration file.

    One-sample plans give ``n`` (and optionally ``mu`` and ``mu0``, both
    defaulting to zero); M-sample plans give ``group_sizes`` and optionally
    ``group_means``.
    """
    study: Literal["type1", "power"] = "type1"
    sigma: UBCoordinates
    n: Optional[int] = Field(None, ge=2)
    mu: Optional[List[float]] = None
    mu0: Optional[List[float]] = None
    group_sizes: Optional[List[int]] = None
    group_means: Optional[List[List[float]]] = None
    replicates: int = Field(..., ge=1)
    seed: int = Field(..., ge=0)
    alpha: float = Field(0.05, gt=0, lt=1)
    law_replicates: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_design(self) -> "SimulationPlan":
        if (self.n is None) == (self.group_sizes is None):
            raise ValueError("give exactly one of n (one-sample) or group_sizes (M-sample)")
        if self.group_sizes is not None and len(self.group_sizes) < 2:
            raise ValueError("group_sizes needs at least two groups")
        if self.group_sizes is None and self.group_means is not None:
            raise ValueError("group_means needs group_sizes")
        return self

    def to_plan(self, tol: Optional[Tolerances] = None, workers: Optional[int] = None,
                allow_small_n: bool = False) -> StudyPlan:
        sigma = self.sigma.to_ub(tol)
        p = sigma.p
        if self.group_sizes is None:
            means = np.asarray(self.mu if self.mu is not None else np.zeros(p), dtype=np.float64)
            mu0 = np.asarray(self.mu0 if self.mu0 is not None else np.zeros(p), dtype=np.float64)
            sizes = (self.n,)
        else:
            means = (
                np.asarray(self.group_means, dtype=np.float64)
                if self.group_means is not None
                else np.zeros((len(self.group_sizes), p))
            )
            mu0 = None
            sizes = tuple(self.group_sizes)
        return StudyPlan(
            sigma=sigma,
            means=means,
            group_sizes=sizes,
            replicates=self.replicates,
            seed=self.seed,
            alpha=self.alpha,
            mu0=mu0,
            law_replicates=self.law_replicates,
            workers=workers,
            allow_small_n=allow_small_n
        )


class StudyReport(BaseModel):
    kind: Literal["type1", "power"]
    rejection_rate: float
    standard_error: float
    ci_low: float
    ci_high: float
    critical_value: float
    alpha: float
    replicates: int
    seed: int
    mean_statistic: float
    mean_statistic_se: Optional[float] = None
    predicted_power: Optional[float] = None
    predicted_power_se: Optional[float] = None
    noncentralities: Optional[List[float]] = None

    @classmethod
    def from_result(cls, result: StudyResult, alpha: float) -> "StudyReport":
        se = result.mean_statistic_se
        return cls(
            kind=result.kind,
            rejection_rate=result.rejection_rate,
            standard_error=result.standard_error,
            ci_low=result.ci_low,
            ci_high=result.ci_high,
            critical_value=result.critical_value,
            alpha=alpha,
            replicates=result.replicates,
            seed=result.seed,
            mean_statistic=result.mean_statistic,
            mean_statistic_se=None if np.isnan(se) else se,
            predicted_power=result.predicted_power,
            predicted_power_se=result.predicted_power_se,
            noncentralities=result.noncentralities.tolist() if result.noncentralities is not None else None
        )
