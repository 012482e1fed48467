"""k-means pseudo-labelling of dense representations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ClusterError, DimensionError
from .tensor_io import as_matrix

DEFAULT_MAX_ITER = 100
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    k: int
    init_inertia: float = float("nan")
    n_iter: int = 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def assign(matrix, centroids) -> np.ndarray:
    """Nearest-centroid labels; ties go to the lowest centroid index."""
    X = as_matrix(matrix).rows
    C = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if C.shape[1] != X.shape[1]:
        raise DimensionError(f"centroid dim {C.shape[1]} != matrix dim {X.shape[1]}")
    return np.argmin(kernels.sq_distances(X, C), axis=1)


def _kmeans_plusplus(X, k, rng):
    m = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(m)]
    closest = kernels.sq_distances(X, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            cdf = np.cumsum(closest)
            idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
            idx = min(idx, m - 1)
        else:
            idx = int(rng.integers(m))
        centers[j] = X[idx]
        closest = np.minimum(closest, kernels.sq_distances(X, centers[j:j + 1])[:, 0])
    return centers


def _cluster_means(X, labels, k):
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k)
    return sums, counts


def _reseed_empty(X, centers, counts, point_d2):
    # each empty cluster takes the point farthest from its own centroid
    d2 = point_d2.copy()
    for j in np.flatnonzero(counts == 0):
        far = int(np.argmax(d2))
        centers[j] = X[far]
        d2 = np.minimum(d2, np.sum((X - X[far]) ** 2, axis=1))
    return centers


def _fill_empty(X, labels, centers, point_d2, k):
    # Only reachable with fewer distinct points than k. Prefer donors sitting
    # exactly on their centroid so the new centroid duplicates an existing one.
    labels = labels.copy()
    centers = centers.copy()
    for j in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
        counts = np.bincount(labels, minlength=k)
        eligible = counts[labels] >= 2
        on_center = eligible & (point_d2 == 0)
        pool = np.flatnonzero(on_center) if on_center.any() else np.flatnonzero(eligible)
        donor = int(pool[np.argmax(point_d2[pool])])
        labels[donor] = j
        centers[j] = X[donor]
        point_d2[donor] = 0.0
    return labels, centers


def kmeans(matrix, k: int, seed: int = 0, max_iter: int = DEFAULT_MAX_ITER,
           tol: float = DEFAULT_TOL) -> ClusterAssignment:
    """Lloyd's algorithm from k-means++ seeding.

    Stops when the Frobenius norm of the centroid update, relative to the
    centroid norm, drops below ``tol``. The returned labels are the
    nearest-centroid assignment for the returned centroids.
    """
    X = as_matrix(matrix).rows
    m = X.shape[0]
    if k < 1 or k > m:
        raise ClusterError(f"k={k} must lie in [1, {m}]")
    if max_iter < 1:
        raise ClusterError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    centers = _kmeans_plusplus(X, k, rng)
    D = kernels.sq_distances(X, centers)
    labels = np.argmin(D, axis=1)
    point_d2 = D[np.arange(m), labels]
    init_inertia = float(point_d2.sum())

    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        sums, counts = _cluster_means(X, labels, k)
        new = centers.copy()
        full = counts > 0
        new[full] = sums[full] / counts[full, None]
        if not full.all():
            new = _reseed_empty(X, new, counts, point_d2)
        scale = np.linalg.norm(centers)
        shift = np.linalg.norm(new - centers) / (scale if scale > 0 else 1.0)
        centers = new
        D = kernels.sq_distances(X, centers)
        labels = np.argmin(D, axis=1)
        point_d2 = D[np.arange(m), labels]
        if shift < tol:
            break

    if np.bincount(labels, minlength=k).min() == 0:
        labels, centers = _fill_empty(X, labels, centers, point_d2, k)
        point_d2 = np.sum((X - centers[labels]) ** 2, axis=1)
    return ClusterAssignment(labels=labels, centroids=centers,
                             inertia=float(point_d2.sum()), k=k,
                             init_inertia=init_inertia, n_iter=n_iter)
