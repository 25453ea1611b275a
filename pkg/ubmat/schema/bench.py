from typing import List, Optional

from pydantic import BaseModel

from ubmat.service.benchmark import BenchTiming


class BenchRecord(BaseModel):
    """Median seconds for one (op, K, p); dense_seconds is None when skipped."""
    op: str
    K: int
    p: int
    coordinate_seconds: float
    dense_seconds: Optional[float] = None
    speedup: Optional[float] = None

    @classmethod
    def from_timing(cls, timing: BenchTiming) -> "BenchRecord":
        return cls(
            op=timing.op,
            K=timing.K,
            p=timing.p,
            coordinate_seconds=timing.coordinate_seconds,
            dense_seconds=timing.dense_seconds,
            speedup=timing.speedup
        )


class BenchReport(BaseModel):
    repeats: int
    seed: int
    records: List[BenchRecord]
