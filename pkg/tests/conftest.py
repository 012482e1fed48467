import numpy as np
import pytest

from dsekit import kernels
from dsekit.tensor_io import EmbeddingBatch, save_embeddings


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["python", "cython"])
def backend(request):
    """Run a test once per kernel backend; skip cython when it is not built."""
    previous = kernels.BACKEND
    try:
        kernels.use_backend(request.param)
    except ImportError:
        pytest.skip("compiled kernels not built")
    yield request.param
    kernels.use_backend(previous)


def blob_batch(num_images=4, per_blob=10, spread=0.1, distance=100.0, dim=4, seed=0):
    """Every image has three tight blobs far apart."""
    r = np.random.default_rng(seed)
    centers = np.zeros((3, dim))
    centers[1, 0] = distance
    centers[2, 1] = distance
    imgs = []
    for _ in range(num_images):
        pts = np.concatenate([c + spread * r.standard_normal((per_blob, dim)) for c in centers])
        imgs.append(r.permutation(pts))
    return EmbeddingBatch(np.stack(imgs), source_id="blobs")


@pytest.fixture
def write_npy(tmp_path):
    def _write(name, data):
        return save_embeddings(tmp_path / f"{name}.npy", np.asarray(data))
    return _write


# criterion -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
