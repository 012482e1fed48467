"""Per-checkpoint DSE components and series-level scoring.

score = (m_inter - m_intra) + lambda * m_dim, with lambda chosen by default
as the ratio of the two components' standard deviations over the series.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dimensionality import m_dim as compute_m_dim
from .errors import DataError, DSEWarning, SeriesError
from .separability import SeparabilityConfig, class_separability
from .tensor_io import EmbeddingBatch, default_b_prime

log = logging.getLogger(__name__)

LAMBDA_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class MetricConfig:
    separability: SeparabilityConfig = field(default_factory=SeparabilityConfig)
    b_prime: int | None = None  # rows for the effective rank, capped at num_images

    def to_dict(self):
        return {"separability": self.separability.to_dict(),
                "b_prime": self.b_prime if self.b_prime is not None else "auto"}

    def digest(self, seed: int) -> str:
        blob = json.dumps({"seed": seed, **self.to_dict()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ComponentRecord:
    source_id: str
    cls_sep: float
    m_dim: float
    config_digest: str

    def __post_init__(self):
        if not (math.isfinite(self.cls_sep) and math.isfinite(self.m_dim)):
            raise DataError(f"{self.source_id}: non-finite component values")

    def to_dict(self):
        return {"source_id": self.source_id, "cls_sep": self.cls_sep,
                "m_dim": self.m_dim, "config_digest": self.config_digest}


@dataclass(frozen=True)
class CheckpointSeries:
    records: tuple
    lam: float
    scores: np.ndarray
    lambda_source: str = "estimated"

    @property
    def source_ids(self):
        return [r.source_id for r in self.records]

    def to_dict(self):
        return {
            "lambda": self.lam,
            "lambda_source": self.lambda_source,
            "records": [r.to_dict() for r in self.records],
            "scores": [float(s) for s in self.scores],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source_id", "cls_sep", "m_dim", "dse"])
        for r, s in zip(self.records, self.scores):
            w.writerow([r.source_id, repr(r.cls_sep), repr(r.m_dim), repr(float(s))])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, obj) -> "CheckpointSeries":
        try:
            records = tuple(ComponentRecord(**r) for r in obj["records"])
            return cls(records, float(obj["lambda"]),
                       np.asarray(obj["scores"], dtype=np.float64),
                       obj.get("lambda_source", "estimated"))
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"malformed series document: {exc}") from exc


def dse_components(batch: EmbeddingBatch, cfg: MetricConfig | None = None,
                   seed: int = 0) -> ComponentRecord:
    cfg = cfg or MetricConfig()
    b_prime = default_b_prime(batch)
    if cfg.b_prime is not None:
        b_prime = min(cfg.b_prime, batch.num_images)
    try:
        sep = class_separability(batch, cfg.separability, seed)
        dim = compute_m_dim(batch, b_prime, seed)
    except DataError as exc:
        msg = str(exc)
        if batch.source_id and not msg.startswith(batch.source_id):
            msg = f"{batch.source_id}: {msg}"
        raise DataError(msg) from exc
    return ComponentRecord(batch.source_id, sep, dim, cfg.digest(seed))


def _check_series(records):
    if len(records) < 2:
        raise SeriesError(f"need at least 2 checkpoints, got {len(records)}")
    digests = {r.config_digest for r in records}
    if len(digests) != 1:
        raise SeriesError(f"records computed with different configs: {sorted(digests)}")


def lambda_from_series(records) -> float:
    """Std(cls_sep) / Std(m_dim), population standard deviations."""
    records = list(records)
    _check_series(records)
    sd_sep = float(np.std([r.cls_sep for r in records]))
    sd_dim = float(np.std([r.m_dim for r in records]))
    if sd_dim < LAMBDA_STD_FLOOR:
        msg = "m_dim is constant across checkpoints; lambda set to 0"
        warnings.warn(msg, DSEWarning, stacklevel=2)
        log.warning(msg)
        return 0.0
    return sd_sep / sd_dim


def dse_series(records, lambda_override: float | None = None) -> CheckpointSeries:
    records = tuple(records)
    if lambda_override is None:
        lam, source = lambda_from_series(records), "estimated"
    else:
        if not records:
            raise SeriesError("empty series")
        if len({r.config_digest for r in records}) != 1:
            raise SeriesError("records computed with different configs")
        lam, source = float(lambda_override), "override"
    sep = np.array([r.cls_sep for r in records])
    dim = np.array([r.m_dim for r in records])
    return CheckpointSeries(records, lam, sep + lam * dim, source)
