"""Independent brute-force reference implementations used by several tests."""

import math

import numpy as np


def intra_radius_oracle(X, labels, k):
    """Per-cluster nuclear norm via eigenvalues of the explicitly centred Gram matrix."""
    radii = []
    for j in range(k):
        rows = [X[i] for i in range(len(X)) if labels[i] == j]
        n = len(rows)
        if n < 2:
            radii.append(0.0)
            continue
        mean = [sum(r[t] for r in rows) / n for t in range(X.shape[1])]
        centred = np.array([[r[t] - mean[t] for t in range(X.shape[1])] for r in rows])
        eig = np.linalg.eigvalsh(centred.T @ centred)[::-1]
        # centring leaves rank <= min(n - 1, d); the trailing eigenvalues are
        # exact zeros in theory and sqrt would blow their rounding up to ~1e-8
        rank = min(n - 1, X.shape[1])
        radii.append(sum(math.sqrt(max(e, 0.0)) for e in eig[:rank]) / math.sqrt(n - 1))
    return sum(radii) / k, radii


def inter_distance_oracle(X, labels, centroids):
    k = len(centroids)
    totals = [0.0] * k
    counts = [0] * k
    for i, x in enumerate(X):
        own = labels[i]
        best = math.inf
        for j, c in enumerate(centroids):
            if j == own:
                continue
            best = min(best, math.sqrt(sum((a - b) ** 2 for a, b in zip(x, c))))
        totals[own] += best
        counts[own] += 1
    per = [t / c for t, c in zip(totals, counts)]
    return sum(per) / k, per


def kendall_pairs(x, y):
    """Direct sum of sign products over i < j."""
    x, y = [float(v) for v in x], [float(v) for v in y]
    n = len(x)
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = (x[i] > x[j]) - (x[i] < x[j])
            b = (y[i] > y[j]) - (y[i] < y[j])
            s += a * b
    return 2.0 * s / (n * (n - 1))


def merge_sort_inversions(seq):
    """Inversion count by merge sort, O(n log n)."""
    seq = list(seq)
    if len(seq) <= 1:
        return seq, 0
    mid = len(seq) // 2
    left, a = merge_sort_inversions(seq[:mid])
    right, b = merge_sort_inversions(seq[mid:])
    merged, inv, i, j = [], a + b, 0, 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            inv += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def kendall_by_inversions(x, y):
    """tau for tie-free data: order y by x and count discordant pairs."""
    n = len(x)
    order = sorted(range(n), key=lambda i: x[i])
    _, disc = merge_sort_inversions([y[i] for i in order])
    pairs = n * (n - 1) // 2
    return (pairs - 2 * disc) / pairs
