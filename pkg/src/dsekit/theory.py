"""Synthetic Gaussian-mixture experiments around the nearest-mean error bound.

Covers: the instance-wise margin being uninformative under k-means labels,
the radius-plus-margin error bound, error decay with dimension at fixed
per-coordinate separation, and the bound's probability term as k varies.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .clustering import kmeans
from .errors import ConfigError
from .separability import cluster_radius, foreign_distances
from .tensor_io import as_matrix

DEFAULT_CONSTANTS = (1.0, 1.0)


@dataclass(frozen=True)
class MixtureSpec:
    num_classes: int
    dim: int
    means: np.ndarray
    per_class_std: float
    samples_per_class: int
    seed: int = 0

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        if self.num_classes < 2 or self.dim < 1:
            raise ConfigError("need num_classes >= 2 and dim >= 1")
        if means.shape != (self.num_classes, self.dim):
            raise ConfigError(f"means shape {means.shape} != ({self.num_classes}, {self.dim})")
        if not np.all(np.isfinite(means)) or not math.isfinite(self.per_class_std):
            raise ConfigError("mixture parameters must be finite")
        if self.per_class_std <= 0:
            raise ConfigError("per_class_std must be positive")
        if self.samples_per_class < 2:
            raise ConfigError("samples_per_class must be >= 2")
        object.__setattr__(self, "means", means)

    def with_seed(self, seed) -> "MixtureSpec":
        return MixtureSpec(self.num_classes, self.dim, self.means,
                           self.per_class_std, self.samples_per_class, seed)

    def to_dict(self):
        d = asdict(self)
        d["means"] = self.means.tolist()
        return d


@dataclass(frozen=True)
class LabeledCloud:
    points: np.ndarray
    labels: np.ndarray
    spec: MixtureSpec


@dataclass(frozen=True)
class BoundReport:
    empirical_err: float
    delta: float
    margin_cdf_term: float
    c_delta: np.ndarray
    bound: float
    holds: bool


def simplex_means(num_classes: int, dim: int, separation: float) -> np.ndarray:
    """Class means with every pairwise distance equal to ``separation`` when
    ``num_classes <= dim + 1``; otherwise evenly spaced on the first axis."""
    K, d = num_classes, dim
    if K <= d:
        return np.eye(K, d) * (separation / math.sqrt(2.0))
    if K == d + 1:
        # regular simplex: centred basis of R^K, rotated into R^(K-1)
        E = np.eye(K) - 1.0 / K
        q, _ = np.linalg.qr(E.T)
        pts = E @ q[:, :K - 1]
        return pts * (separation / math.sqrt(2.0))
    means = np.zeros((K, d))
    means[:, 0] = np.arange(K) * separation
    return means


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream per (seed, keys...), independent of run order."""
    return np.random.default_rng([seed, *keys])


def sample_mixture(spec: MixtureSpec, rng: np.random.Generator | None = None) -> LabeledCloud:
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    n, K, d = spec.samples_per_class, spec.num_classes, spec.dim
    noise = rng.standard_normal((K, n, d)) * spec.per_class_std
    points = (spec.means[:, None, :] + noise).reshape(K * n, d)
    labels = np.repeat(np.arange(K), n)
    return LabeledCloud(points, labels, spec)


def class_means(points, labels, num_classes) -> np.ndarray:
    sums = np.zeros((num_classes, points.shape[1]))
    np.add.at(sums, labels, points)
    return sums / np.bincount(labels, minlength=num_classes)[:, None]


def nearest_mean_error(points, labels, num_classes) -> float:
    mu = class_means(points, labels, num_classes)
    pred = np.argmin(kernels.sq_distances(points, mu), axis=1)
    return float(np.mean(pred != labels))


def nn_error(cloud: LabeledCloud) -> float:
    """Misclassification rate of the nearest empirical class mean."""
    return nearest_mean_error(cloud.points, cloud.labels, cloud.spec.num_classes)


def instance_margin_accuracy(matrix, k: int, seed: int = 0) -> float:
    """Fraction of points closer to their own k-means centroid than to any other."""
    X = as_matrix(matrix).rows
    asg = kmeans(X, k, seed=seed)
    if k < 2:
        return 1.0
    D = kernels.sq_distances(X, asg.centroids)
    own = D[np.arange(X.shape[0]), asg.labels]
    D[np.arange(X.shape[0]), asg.labels] = np.inf
    return float(np.mean(own <= D.min(axis=1)))


def class_radius_accuracy(matrix, labels, centroids) -> float:
    """Fraction of points whose class radius is at most their nearest foreign distance."""
    X = as_matrix(matrix).rows
    labels = np.asarray(labels)
    k = len(centroids)
    radii = np.array([cluster_radius(X[labels == j]) for j in range(k)])
    dmin = foreign_distances(X, labels, np.asarray(centroids, dtype=np.float64))
    return float(np.mean(radii[labels] <= dmin))


def c_delta(R: float, d: int, n, delta: float, constants=DEFAULT_CONSTANTS):
    """Class-size dependent margin; ``n`` may be an array of class sizes."""
    c1, ct = constants
    l2 = math.log(2.0 / delta)
    l8 = math.log(8.0 / delta)
    n = np.asarray(n, dtype=np.float64)
    inner = (c1 * R ** 2 * d * (l2 + math.sqrt(l2))
             + ct * R ** 2 * (d * np.sqrt(l8 / n) + (d + l8) / n))
    return np.sqrt(inner)


def margin_term(points, labels, centroids, R, delta, constants=DEFAULT_CONSTANTS):
    """Fraction of points with D_min - radius(own class) < C_delta(own class).

    With a single group there is no foreign centroid; D_min is taken as 0 so
    every point counts as at risk.
    """
    X = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    k = len(centroids)
    sizes = np.bincount(labels, minlength=k)
    radii = np.array([cluster_radius(X[labels == j]) for j in range(k)])
    cd = c_delta(R, X.shape[1], np.maximum(sizes, 1), delta, constants)
    if k < 2:
        dmin = np.zeros(X.shape[0])
    else:
        dmin = foreign_distances(X, labels, np.asarray(centroids, dtype=np.float64))
    return float(np.mean(dmin - radii[labels] < cd[labels])), cd


def thm1_bound(cloud: LabeledCloud, delta: float,
               constants=DEFAULT_CONSTANTS) -> BoundReport:
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    if min(constants) <= 0:
        raise ConfigError("constants must be positive")
    spec = cloud.spec
    mu = class_means(cloud.points, cloud.labels, spec.num_classes)
    term, cd = margin_term(cloud.points, cloud.labels, mu, spec.per_class_std,
                           delta, constants)
    err = nn_error(cloud)
    bound = delta + term
    return BoundReport(err, delta, term, cd, bound, bool(err <= bound))


def cor1_min_separation(d: int, R: float, delta: float, n: int) -> float:
    """Mean separation above which the dimension-decay bound applies."""
    return math.sqrt(d) * R * (2.0 + math.sqrt(math.log(8.0 / delta) / n) + math.sqrt(3.0))


def decay_spec(base: MixtureSpec, d: int, per_coordinate_separation: float) -> MixtureSpec:
    means = np.arange(base.num_classes)[:, None] * per_coordinate_separation * np.ones((1, d))
    return MixtureSpec(base.num_classes, d, means, base.per_class_std,
                       base.samples_per_class, base.seed)


def dim_decay_experiment(base_spec: MixtureSpec, dims, per_coordinate_separation=None,
                         trials: int = 1):
    """[(d, mean nn_error over trials)], classes offset by s in every coordinate."""
    s = (6.0 * base_spec.per_class_std if per_coordinate_separation is None
         else per_coordinate_separation)
    out = []
    for d in dims:
        spec = decay_spec(base_spec, int(d), s)
        errs = [nn_error(sample_mixture(spec, trial_rng(base_spec.seed, int(d), t)))
                for t in range(trials)]
        out.append((int(d), float(np.mean(errs))))
    return out


def mc_stderr(err: float, n_points: int) -> float:
    return math.sqrt(max(err * (1.0 - err), 0.0) / n_points)


def k_sweep_experiment(cloud: LabeledCloud, k_values, delta: float = 0.05,
                       constants=DEFAULT_CONSTANTS, seed: int = 0):
    """[(k, margin term under k-means pseudo-labels)]."""
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    m = cloud.points.shape[0]
    out = []
    for k in k_values:
        if not 1 <= k <= m:
            raise ConfigError(f"k={k} outside [1, {m}]")
        asg = kmeans(cloud.points, int(k), seed=seed)
        term, _ = margin_term(cloud.points, asg.labels, asg.centroids,
                              cloud.spec.per_class_std, delta, constants)
        out.append((int(k), term))
    return out


def random_prop1_case(rng):
    m = int(rng.integers(50, 501))
    d = int(rng.integers(2, 65))
    k = int(rng.integers(2, 11))
    X = rng.standard_normal((m, d)) * rng.uniform(0.1, 10.0)
    return X, k


def prop1_trials(trials: int = 100, seed: int = 0):
    """Instance-margin accuracy over random matrices; every value should be 1.0."""
    out = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        X, k = random_prop1_case(rng)
        out.append(instance_margin_accuracy(X, k, seed=int(rng.integers(2 ** 31))))
    return out


def thm1_sweep(separations=(1, 2, 4, 8), dims=(4, 16), num_classes=3,
               samples_per_class=1000, trials=100, delta=0.05,
               constants=DEFAULT_CONSTANTS, R=1.0, seed=0):
    """Rows of (separation, d, trial, empirical_err, margin_term, bound, holds)."""
    rows = []
    for si, sep in enumerate(separations):
        for d in dims:
            means = simplex_means(num_classes, d, sep * R * math.sqrt(d))
            spec = MixtureSpec(num_classes, d, means, R, samples_per_class, seed)
            for t in range(trials):
                cloud = sample_mixture(spec, trial_rng(seed, si, d, t))
                rep = thm1_bound(cloud, delta, constants)
                rows.append((sep, d, t, rep.empirical_err, rep.margin_cdf_term,
                             rep.bound, rep.holds))
    return rows
