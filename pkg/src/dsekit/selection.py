"""Checkpoint selection: windowed local maxima, then the top-T of those."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class SelectionResult:
    candidate_indices: list
    selected_indices: list
    T: int
    window: int

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _scores(scores):
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise DataError("scores must be a non-empty vector")
    if not np.all(np.isfinite(s)):
        raise DataError("scores must be finite")
    return s


def local_maxima(scores, window: int = 2) -> list:
    """Indices that are the first argmax of their clipped window [i-w, i+w]."""
    s = _scores(scores)
    if window < 1:
        raise ValueError("window must be positive")
    n = s.size
    out = []
    for i in range(n):
        lo, hi = max(0, i - window), min(n, i + window + 1)
        if lo + int(np.argmax(s[lo:hi])) == i:
            out.append(i)
    return out


def select_top(scores, window: int = 2, T: int = 3) -> SelectionResult:
    """Top-``T`` local maxima by score; equal scores prefer the later checkpoint."""
    s = _scores(scores)
    if T < 1:
        raise ValueError("T must be positive")
    cands = local_maxima(s, window)
    ranked = sorted(cands, key=lambda i: (-s[i], -i))
    return SelectionResult(cands, ranked[:T], T, window)
