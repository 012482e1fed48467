"""Loading, validating and sampling dense-representation dumps.

A dump is an ``.npy`` file holding a float tensor of shape
``(num_images, num_patches, dim)``; the file stem names the checkpoint.
"""

from __future__ import annotations

import ast
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, IoError, SampleError

NPY_MAGIC = b"\x93NUMPY"
SUPPORTED_DESCR = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}
DEFAULT_B_PRIME = 2048

FLATTENED_ALL = "flattened_all"
INDEPENDENT_SAMPLE = "independent_sample"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmbeddingBatch:
    data: np.ndarray
    source_id: str = ""
    dtype: str = "float64"

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3:
            raise FormatError(f"expected a 3-D tensor, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise FormatError(f"empty tensor of shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError(f"{self.source_id or 'batch'}: non-finite values")
        object.__setattr__(self, "dtype", str(arr.dtype))
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def num_images(self) -> int:
        return self.data.shape[0]

    @property
    def num_patches(self) -> int:
        return self.data.shape[1]

    @property
    def dim(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class RepresentationMatrix:
    rows: np.ndarray
    provenance: str = FLATTENED_ALL
    source_images: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.rows)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise FormatError(f"expected a non-empty 2-D matrix, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("matrix has non-finite values")
        object.__setattr__(self, "rows", _frozen(arr))

    @property
    def shape(self):
        return self.rows.shape


def as_matrix(x) -> RepresentationMatrix:
    if isinstance(x, RepresentationMatrix):
        return x
    return RepresentationMatrix(np.asarray(x, dtype=np.float64))


def _read_header(fh, path):
    magic = fh.read(6)
    if magic != NPY_MAGIC:
        raise FormatError(f"{path}: not an npy file (bad magic)")
    version = fh.read(2)
    if len(version) != 2:
        raise FormatError(f"{path}: truncated header")
    major, minor = version[0], version[1]
    if (major, minor) == (1, 0):
        raw = fh.read(2)
        if len(raw) != 2:
            raise FormatError(f"{path}: truncated header")
        (hlen,) = struct.unpack("<H", raw)
    elif (major, minor) == (2, 0):
        raw = fh.read(4)
        if len(raw) != 4:
            raise FormatError(f"{path}: truncated header")
        (hlen,) = struct.unpack("<I", raw)
    else:
        raise FormatError(f"{path}: unsupported npy version {major}.{minor}")
    text = fh.read(hlen)
    if len(text) != hlen:
        raise FormatError(f"{path}: truncated header")
    try:
        header = ast.literal_eval(text.decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: malformed header dict") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise FormatError(f"{path}: header must have descr/fortran_order/shape")
    return header


def load_embeddings(path) -> EmbeddingBatch:
    """Read one ``.npy`` dump into an :class:`EmbeddingBatch` (widened to float64)."""
    path = Path(path)
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        header = _read_header(fh, path)
        descr = header["descr"]
        if descr not in SUPPORTED_DESCR:
            raise FormatError(f"{path}: dtype {descr!r} not little-endian float32/float64")
        if header["fortran_order"]:
            raise FormatError(f"{path}: Fortran-ordered arrays are not supported")
        shape = header["shape"]
        if not isinstance(shape, tuple) or len(shape) != 3:
            raise FormatError(f"{path}: expected ndim=3, got shape {shape!r}")
        dtype = SUPPORTED_DESCR[descr]
        count = int(np.prod(shape))
        payload = fh.read(count * dtype.itemsize)
    if len(payload) != count * dtype.itemsize:
        raise FormatError(f"{path}: payload shorter than declared shape {shape}")
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{path}: non-finite values")
    return EmbeddingBatch(arr.astype(np.float64), source_id=path.stem)


def save_embeddings(path, data) -> Path:
    """Write a 3-D float tensor as a version 1.0 npy file."""
    arr = np.ascontiguousarray(data)
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
    path = Path(path)
    np.save(path, arr, allow_pickle=False)
    return path


def flatten_all(batch: EmbeddingBatch) -> RepresentationMatrix:
    """All patches as rows, image-major."""
    b, n, d = batch.data.shape
    return RepresentationMatrix(batch.data.reshape(b * n, d), FLATTENED_ALL,
                                np.repeat(np.arange(b), n))


def default_b_prime(batch: EmbeddingBatch) -> int:
    return min(batch.num_images, DEFAULT_B_PRIME)


def sample_independent(batch: EmbeddingBatch, count: int, seed: int) -> RepresentationMatrix:
    """One uniformly chosen patch from each of ``count`` distinct images."""
    if count < 1:
        raise SampleError(f"count must be positive, got {count}")
    if count > batch.num_images:
        raise SampleError(
            f"cannot draw {count} independent rows from {batch.num_images} images")
    rng = np.random.default_rng(seed)
    images = rng.permutation(batch.num_images)[:count]
    patches = rng.integers(0, batch.num_patches, size=count)
    return RepresentationMatrix(batch.data[images, patches], INDEPENDENT_SAMPLE, images)
