"""Compare the Cython kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from dsekit import kernels
from dsekit.clustering import kmeans


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    X = rng.standard_normal((1568, 384))  # 8 images x 196 patches, ViT-S width
    C = rng.standard_normal((24, 384))
    x, y = rng.standard_normal(400), rng.standard_normal(400)

    cases = {
        "sq_distances 1568x384 vs 24": lambda: kernels.sq_distances(X, C),
        "kendall_counts n=400": lambda: kernels.kendall_counts(x, y),
        "kmeans k=24 (end to end)": lambda: kmeans(X, 24, seed=0),
    }
    backends = ["python"]
    try:
        kernels.use_backend("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernels not built; reporting numpy fallback only")

    results = {}
    for backend in backends:
        kernels.use_backend(backend)
        for name, fn in cases.items():
            results[name, backend] = best_of(fn, args.repeat)

    print(f"{'case':32s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name in cases:
        row = [results[name, b] for b in backends]
        speed = f"{row[0] / row[-1]:8.2f}x" if len(row) > 1 else ""
        print(f"{name:32s} " + " ".join(f"{t * 1e3:8.2f}ms" for t in row) + "  " + speed)


if __name__ == "__main__":
    main()
