"""Effective rank as a measure of dimensional collapse."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .tensor_io import EmbeddingBatch, as_matrix, sample_independent

# singular values below this fraction of the largest are treated as zero
RELATIVE_CUTOFF = 1e-12


@dataclass(frozen=True)
class ErankReport:
    erank: float
    singular_values: np.ndarray
    entropy: float


def spectrum_entropy(singular_values) -> float:
    s = np.asarray(singular_values, dtype=np.float64)
    p = s / s.sum()
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def effective_rank(matrix) -> ErankReport:
    """exp of the Shannon entropy of the l1-normalised singular values.

    The matrix is used as given (no centring).
    """
    X = as_matrix(matrix).rows
    s = np.linalg.svd(X, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise DataError("effective rank of an all-zero matrix is undefined")
    s = np.where(s < RELATIVE_CUTOFF * s[0], 0.0, s)
    h = spectrum_entropy(s)
    return ErankReport(erank=float(np.exp(h)), singular_values=s, entropy=h)


def m_dim(batch: EmbeddingBatch, b_prime: int, seed: int = 0) -> float:
    sample = sample_independent(batch, b_prime, seed)
    try:
        return effective_rank(sample).erank
    except DataError as exc:
        raise DataError(f"{batch.source_id or 'batch'}: {exc}") from exc
