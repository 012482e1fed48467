"""Kendall's tau-a between a metric series and a performance series."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DataError, IoError, LengthError, SeriesError


@dataclass(frozen=True)
class TauReport:
    tau: float
    n: int
    p_value: float
    concordant: int
    discordant: int
    tied: int

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def tau_pvalue(tau: float, n: int) -> float:
    """Two-sided p-value from the normal approximation to tau under independence."""
    if n < 2:
        raise LengthError("n must be >= 2")
    z = 3.0 * tau * math.sqrt(n * (n - 1)) / math.sqrt(2.0 * (2 * n + 5))
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


def kendall_tau(metric, perf) -> TauReport:
    """tau-a: tied pairs count as zero, no tie correction."""
    x = np.asarray(metric, dtype=np.float64).ravel()
    y = np.asarray(perf, dtype=np.float64).ravel()
    if x.size != y.size:
        raise LengthError(f"series lengths differ: {x.size} vs {y.size}")
    n = x.size
    if n < 2:
        raise LengthError("need at least 2 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("series contain non-finite values")
    conc, disc, tied = kernels.kendall_counts(x, y)
    tau = 2.0 * (conc - disc) / (n * (n - 1))
    return TauReport(tau, n, tau_pvalue(tau, n), conc, disc, tied)


def read_performance_csv(path) -> dict:
    """``source_id,value`` CSV with header -> {source_id: value}."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"source_id", "value"} <= set(reader.fieldnames):
            raise DataError(f"{path}: header must contain source_id,value")
        out = {}
        for row in reader:
            sid = row["source_id"].strip()
            if sid in out:
                raise DataError(f"{path}: duplicate source_id {sid!r}")
            try:
                out[sid] = float(row["value"])
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}: bad value for {sid!r}") from exc
    return out


def align_performance(source_ids, perf: dict) -> np.ndarray:
    """Performance values in ``source_ids`` order; any unmatched id is an error."""
    ids = list(source_ids)
    unknown = sorted(set(perf) - set(ids))
    missing = [s for s in ids if s not in perf]
    if unknown:
        raise SeriesError(f"performance ids not in series: {', '.join(unknown)}")
    if missing:
        raise SeriesError(f"series ids without performance: {', '.join(missing)}")
    return np.array([perf[s] for s in ids])
