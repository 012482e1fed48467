"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np

# elements per broadcast block in sq_distances
_BLOCK = 1 << 22


def sq_distances(X, C):
    m, d = X.shape
    k = C.shape[0]
    out = np.empty((m, k), dtype=np.float64)
    step = max(1, _BLOCK // max(1, k * d))
    for start in range(0, m, step):
        diff = X[start:start + step, None, :] - C[None, :, :]
        out[start:start + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def kendall_counts(x, y):
    n = x.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    dx = np.sign(x[iu] - x[ju])
    dy = np.sign(y[iu] - y[ju])
    prod = dx * dy
    tied = int(np.count_nonzero(prod == 0))
    conc = int(np.count_nonzero(prod > 0))
    disc = int(np.count_nonzero(prod < 0))
    return conc, disc, tied
