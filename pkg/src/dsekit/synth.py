"""Synthetic checkpoint trajectories with known nearest-mean accuracy.

Each patch is ``sep * class_code + image_code + noise_scale * noise`` in a
latent space. Class codes and image codes are Gaussian vectors; a rank ``r``
zeroes their latent coordinates beyond ``r`` (collapse) before a fixed random
rotation, while the isotropic noise stays full-dimensional. Fewer coordinates
mean smaller class-mean gaps and a narrower spread of images, so both the
nearest-mean accuracy and the effective rank fall. All random draws are
shared by the checkpoints of one trajectory; only the schedule differs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError
from .tensor_io import EmbeddingBatch
from .theory import nearest_mean_error

SCHEDULES = ("separability_decay", "dimension_collapse", "improving")


@dataclass(frozen=True)
class TrajectorySpec:
    num_checkpoints: int = 10
    num_images: int = 64
    num_patches: int = 49
    dim: int = 32
    schedule: str = "improving"
    noise_scale: float = 0.1
    seed: int = 0
    num_classes: int = 3
    sep_range: tuple = (0.3, 1.0)
    content_scale: float = 2.0
    min_rank: int | None = None  # default: max(num_classes, dim // 8)

    def __post_init__(self):
        if self.num_checkpoints < 2:
            raise ConfigError("num_checkpoints must be >= 2")
        if min(self.num_images, self.num_patches, self.dim) < 1:
            raise ConfigError("num_images, num_patches and dim must be positive")
        if self.schedule not in SCHEDULES:
            raise ConfigError(f"unknown schedule {self.schedule!r}; choose from {SCHEDULES}")
        if self.noise_scale <= 0:
            raise ConfigError("noise_scale must be positive")
        if self.num_classes < 2 or self.num_patches < self.num_classes:
            raise ConfigError("need 2 <= num_classes <= num_patches")
        lo, hi = self.sep_range
        if not 0 < lo < hi:
            raise ConfigError("sep_range must satisfy 0 < low < high")
        object.__setattr__(self, "sep_range", (float(lo), float(hi)))

    @property
    def rank_floor(self) -> int:
        r = self.min_rank if self.min_rank is not None else max(self.num_classes, self.dim // 8)
        return int(min(max(r, 1), self.dim))

    def to_dict(self):
        return asdict(self)


def schedule_params(spec: TrajectorySpec):
    """[(separation, rank)] per checkpoint."""
    n = spec.num_checkpoints
    lo, hi = spec.sep_range
    r_lo, r_hi = spec.rank_floor, spec.dim
    t = np.linspace(0.0, 1.0, n)
    if spec.schedule == "separability_decay":
        seps = hi + (lo - hi) * t
        ranks = np.full(n, r_hi)
    elif spec.schedule == "dimension_collapse":
        seps = np.full(n, hi)
        ranks = np.rint(r_hi + (r_lo - r_hi) * t).astype(int)
    else:
        seps = lo + (hi - lo) * t
        ranks = np.rint(r_lo + (r_hi - r_lo) * t).astype(int)
    return [(float(s), int(r)) for s, r in zip(seps, ranks)]


def generate_trajectory(spec: TrajectorySpec):
    """[(EmbeddingBatch, true_nn_accuracy)] in training order.

    Source ids are ``ckpt_000``, ``ckpt_001``, ... so lexicographic order is
    training order.
    """
    rng = np.random.default_rng(spec.seed)
    B, N, d, K = spec.num_images, spec.num_patches, spec.dim, spec.num_classes
    rotation, _ = np.linalg.qr(rng.standard_normal((d, d)))
    class_codes = rng.standard_normal((K, d))
    image_codes = rng.standard_normal((B, 1, d)) * spec.content_scale
    labels = np.stack([rng.permutation(np.arange(N) % K) for _ in range(B)])
    noise = rng.standard_normal((B, N, d))

    width = len(str(spec.num_checkpoints - 1))
    out = []
    for i, (sep, rank) in enumerate(schedule_params(spec)):
        signal = sep * class_codes[labels] + image_codes
        signal[..., rank:] = 0.0
        data = (signal + spec.noise_scale * noise) @ rotation.T
        acc = 1.0 - nearest_mean_error(data.reshape(B * N, d), labels.reshape(-1), K)
        batch = EmbeddingBatch(data, source_id=f"ckpt_{i:0{max(3, width)}d}")
        out.append((batch, acc))
    return out
