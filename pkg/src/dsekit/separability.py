"""Class-separability statistics from k-means pseudo-labels.

``m_intra`` averages a per-cluster radius (nuclear norm of the centred
cluster matrix over sqrt(n - 1)); ``m_inter`` averages each point's distance
to the nearest foreign centroid.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .clustering import DEFAULT_MAX_ITER, DEFAULT_TOL, ClusterAssignment, kmeans
from .errors import ClusterError, ConfigError, DimensionError, DSEWarning
from .tensor_io import EmbeddingBatch, as_matrix

log = logging.getLogger(__name__)

DEFAULT_SEP_CONFIGS = ((1, 3), (8, 24))
FALLBACK_SEP_CONFIG = (1, 3)


@dataclass(frozen=True)
class SeparabilityStats:
    m_intra: float
    m_inter: float
    per_cluster_radius: np.ndarray
    per_cluster_inter: np.ndarray
    cluster_sizes: np.ndarray

    @property
    def cls_sep(self) -> float:
        return self.m_inter - self.m_intra


@dataclass(frozen=True)
class SeparabilityConfig:
    """(images per group, k) pairs whose results are averaged."""

    configs: tuple = DEFAULT_SEP_CONFIGS
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        pairs = tuple((int(b), int(k)) for b, k in self.configs)
        if not pairs:
            raise ConfigError("at least one (B, k) pair is required")
        for b, k in pairs:
            if b < 1 or k < 2:
                raise ConfigError(f"invalid (B, k) = ({b}, {k}); need B >= 1 and k >= 2")
        object.__setattr__(self, "configs", pairs)

    def to_dict(self):
        return {"configs": [list(p) for p in self.configs],
                "max_iter": self.max_iter, "tol": self.tol}


def _check(X, assignment):
    labels = np.asarray(assignment.labels)
    if labels.shape != (X.shape[0],):
        raise DimensionError(f"{labels.shape[0]} labels for {X.shape[0]} rows")
    sizes = np.bincount(labels, minlength=assignment.k)
    if sizes.shape[0] != assignment.k or sizes.min() == 0:
        raise ClusterError("every cluster must be non-empty")
    return labels, sizes


def cluster_radius(rows: np.ndarray) -> float:
    n = rows.shape[0]
    if n < 2:
        return 0.0
    centred = rows - rows.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    return float(sv.sum() / np.sqrt(n - 1))


def intra_radius(matrix, assignment: ClusterAssignment):
    X = as_matrix(matrix).rows
    labels, _ = _check(X, assignment)
    radii = np.array([cluster_radius(X[labels == j]) for j in range(assignment.k)])
    return float(radii.mean()), radii


def foreign_distances(X, labels, centroids) -> np.ndarray:
    """Distance from each row to the nearest centroid other than its own."""
    D = kernels.sq_distances(X, centroids)
    D[np.arange(X.shape[0]), labels] = np.inf
    return np.sqrt(D.min(axis=1))


def inter_distance(matrix, assignment: ClusterAssignment):
    X = as_matrix(matrix).rows
    if assignment.k < 2:
        raise ClusterError("inter-class distance needs k >= 2")
    labels, sizes = _check(X, assignment)
    dmin = foreign_distances(X, labels, np.asarray(assignment.centroids, dtype=np.float64))
    per = np.bincount(labels, weights=dmin, minlength=assignment.k) / sizes
    return float(per.mean()), per


def separability_stats(matrix, assignment: ClusterAssignment) -> SeparabilityStats:
    m_intra, radii = intra_radius(matrix, assignment)
    m_inter, per = inter_distance(matrix, assignment)
    return SeparabilityStats(m_intra, m_inter, radii, per,
                             np.bincount(assignment.labels, minlength=assignment.k))


def group_seed(seed: int, config_index: int, group_index: int) -> int:
    ss = np.random.SeedSequence([seed, config_index, group_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def effective_configs(num_images: int, cfg: SeparabilityConfig):
    usable = tuple(p for p in cfg.configs if p[0] <= num_images)
    if len(usable) < len(cfg.configs):
        dropped = [p for p in cfg.configs if p[0] > num_images]
        if not usable:
            usable = (FALLBACK_SEP_CONFIG,)
        msg = (f"only {num_images} images: dropping (B, k) configs {dropped}, "
               f"using {list(usable)}")
        warnings.warn(msg, DSEWarning, stacklevel=3)
        log.warning(msg)
    return usable


def class_separability(batch: EmbeddingBatch, cfg: SeparabilityConfig | None = None,
                       seed: int = 0) -> float:
    """Mean of (m_inter - m_intra) over image groups, averaged over configs."""
    cfg = cfg or SeparabilityConfig()
    data = batch.data
    n_img, n_patch, dim = data.shape
    values = []
    for ci, (b, k) in enumerate(effective_configs(n_img, cfg)):
        n_groups = n_img // b
        if b * n_patch < k:
            raise ConfigError(
                f"group of {b} images has {b * n_patch} patches, fewer than k={k}")
        group_vals = []
        for g in range(n_groups):
            rows = data[g * b:(g + 1) * b].reshape(b * n_patch, dim)
            asg = kmeans(rows, k, seed=group_seed(seed, ci, g),
                         max_iter=cfg.max_iter, tol=cfg.tol)
            group_vals.append(separability_stats(rows, asg).cls_sep)
        values.append(float(np.mean(group_vals)))
    return float(np.mean(values))
