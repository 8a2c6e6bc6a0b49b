"""MNIST ingestion and spike encoding.

IDX layout (all integers big-endian)::

    [0]  magic   0x00000803 for images, 0x00000801 for labels
    [4]  count
    [8]  rows     (images only)
    [12] cols     (images only)
    ...  raw unsigned bytes

Files may be gzip-compressed; this is detected from the content, not the
file name.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from colanet.errors import EncodingError, IngestionError, InputError

__all__ = [
    "BinaryTask",
    "Dataset",
    "EncodedExample",
    "encode_counts",
    "encode_dataset",
    "load_idx",
    "load_mnist",
    "make_binary_tasks",
    "poisson_schedule",
    "schedule_spikes",
    "write_idx",
]

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
IMAGE_SIDE = 28

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


class Dataset(NamedTuple):
    """Images of shape (count, 28, 28) as uint8 plus labels 0..9."""

    images: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, n: int | None) -> "Dataset":
        if n is None:
            return self
        return Dataset(self.images[:n], self.labels[:n])


def _read_bytes(path) -> bytes:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read {exc.strerror or exc}", path) from exc
    if raw[:2] == b"\x1f\x8b":
        try:
            raw = gzip.decompress(raw)
        except (OSError, EOFError) as exc:
            raise IngestionError(f"corrupt gzip stream: {exc}", path) from exc
    return raw


def _parse_idx(raw: bytes, path, magic: int, ndim: int) -> np.ndarray:
    header = 4 + 4 * ndim
    if len(raw) < 4:
        raise IngestionError("truncated header", path, len(raw))
    (found,) = struct.unpack_from(">I", raw, 0)
    if found != magic:
        raise IngestionError(f"bad magic 0x{found:08x}, expected 0x{magic:08x}", path, 0)
    if len(raw) < header:
        raise IngestionError("truncated header", path, len(raw))
    dims = struct.unpack_from(f">{ndim}I", raw, 4)
    size = int(np.prod(dims, dtype=np.int64))
    if len(raw) < header + size:
        raise IngestionError(
            f"truncated payload: expected {size} bytes after header, found {len(raw) - header}",
            path,
            len(raw),
        )
    if len(raw) > header + size:
        raise IngestionError("trailing bytes after payload", path, header + size)
    return np.frombuffer(raw, dtype=np.uint8, count=size, offset=header).reshape(dims)


def load_idx(images_path, labels_path) -> Dataset:
    """Read an image/label IDX pair; counts and label range are checked."""
    images = _parse_idx(_read_bytes(images_path), images_path, IMAGE_MAGIC, 3)
    labels = _parse_idx(_read_bytes(labels_path), labels_path, LABEL_MAGIC, 1)
    if images.shape[0] != labels.shape[0]:
        raise IngestionError(
            f"image count {images.shape[0]} does not match label count {labels.shape[0]}",
            labels_path,
            4,
        )
    if images.shape[1:] != (IMAGE_SIDE, IMAGE_SIDE):
        raise IngestionError(f"images must be 28x28, got {images.shape[1:]}", images_path, 8)
    bad = np.flatnonzero(labels > 9)
    if bad.size:
        raise IngestionError(f"label {labels[bad[0]]} out of range", labels_path, 8 + int(bad[0]))
    return Dataset(images, labels)


def _find(data_dir: Path, stem: str) -> Path:
    for name in (stem, stem + ".gz", stem.replace("-idx", ".idx"), stem.replace("-idx", ".idx") + ".gz"):
        if (data_dir / name).exists():
            return data_dir / name
    raise IngestionError(f"missing {stem}[.gz]", data_dir)


def load_mnist(data_dir, split: str) -> Dataset:
    """Load the ``train`` or ``test`` split from a directory of IDX files."""
    data_dir = Path(data_dir)
    img, lab = MNIST_FILES[split]
    return load_idx(_find(data_dir, img), _find(data_dir, lab))


def write_idx(path, array: np.ndarray) -> None:
    """Write a uint8 array as IDX (gzip if ``path`` ends in ``.gz``)."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    magic = {1: LABEL_MAGIC, 3: IMAGE_MAGIC}.get(array.ndim)
    if magic is None:
        raise ValueError("only label (1-d) and image (3-d) arrays are supported")
    payload = struct.pack(f">I{array.ndim}I", magic, *array.shape) + array.tobytes()
    path = Path(path)
    if path.suffix == ".gz":
        payload = gzip.compress(payload)
    path.write_bytes(payload)


def _round_half_up(x):
    return np.floor(np.asarray(x, dtype=float) + 0.5).astype(np.int64)


def encode_counts(pixels, s_max: int = 10) -> np.ndarray:
    """Rate-code 8-bit intensities into spike counts ``round(p / 255 * s_max)``.

    The result is flattened. Raises :class:`EncodingError` if it is all zero
    or all non-zero, since neither engine accepts such vectors.
    """
    if int(s_max) != s_max or s_max < 1:
        raise InputError(f"s_max must be a positive integer, got {s_max}")
    pixels = np.asarray(pixels)
    if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
        raise InputError("pixel intensities must lie in [0, 255]")
    counts = _round_half_up(pixels.reshape(-1) * (s_max / 255.0))
    nz = np.count_nonzero(counts)
    if not 0 < nz < counts.size:
        raise EncodingError(f"encoded vector has {nz} non-zero counts out of {counts.size}")
    return counts


def schedule_spikes(counts, presentation_ticks: int = 10) -> np.ndarray:
    """Spread each input's count evenly over the presentation window.

    Returns a boolean ``(presentation_ticks, n)`` raster; row ``t - 1`` holds
    the inputs spiking on tick ``t``. Count ``k`` spikes at ticks
    ``round(j * T / k)`` for ``j = 1..k``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    T = int(presentation_ticks)
    if counts.size and counts.max() > T:
        raise InputError(f"count {counts.max()} does not fit in {T} presentation ticks")
    if counts.size and counts.min() < 0:
        raise InputError("counts must be non-negative")
    raster = np.zeros((T, counts.size), dtype=bool)
    for k in np.unique(counts[counts > 0]):
        ticks = np.clip(_round_half_up(np.arange(1, k + 1) * T / k), 1, T)
        cols = np.flatnonzero(counts == k)
        raster[np.ix_(ticks - 1, cols)] = True
    return raster


def poisson_schedule(counts, presentation_ticks: int = 10, rng=None) -> np.ndarray:
    """Seeded alternative to :func:`schedule_spikes`: each input's ``k``
    spikes land on ``k`` distinct ticks drawn uniformly at random."""
    rng = np.random.default_rng(rng)
    counts = np.asarray(counts, dtype=np.int64)
    T = int(presentation_ticks)
    if counts.size and counts.max() > T:
        raise InputError(f"count {counts.max()} does not fit in {T} presentation ticks")
    keys = rng.random((T, counts.size))
    ranks = keys.argsort(axis=0).argsort(axis=0)
    return ranks < counts[None, :]


@dataclass(frozen=True)
class EncodedExample:
    counts: np.ndarray
    schedule: np.ndarray

    @classmethod
    def from_counts(cls, counts, presentation_ticks: int = 10) -> "EncodedExample":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts, schedule_spikes(counts, presentation_ticks))


def encode_dataset(ds: Dataset, s_max: int = 10) -> np.ndarray:
    """Encode every image; returns an int64 ``(count, 784)`` matrix."""
    counts = _round_half_up(ds.images.reshape(len(ds), -1) * (s_max / 255.0))
    nz = np.count_nonzero(counts, axis=1)
    bad = np.flatnonzero((nz == 0) | (nz == counts.shape[1]))
    if bad.size:
        raise EncodingError(f"example {bad[0]} encodes to an unusable count vector")
    return counts


@dataclass(frozen=True)
class BinaryTask:
    """One digit against the rest; inputs are shared, only labels differ."""

    target_digit: int
    train_counts: np.ndarray
    train_labels: np.ndarray
    test_counts: np.ndarray
    test_labels: np.ndarray

    @property
    def train(self) -> list[tuple[np.ndarray, bool]]:
        return list(zip(self.train_counts, self.train_labels.tolist()))

    @property
    def test(self) -> list[tuple[np.ndarray, bool]]:
        return list(zip(self.test_counts, self.test_labels.tolist()))


def make_binary_tasks(
    train_counts: np.ndarray,
    train_digits: Sequence[int],
    test_counts: np.ndarray,
    test_digits: Sequence[int],
    digits: Sequence[int] = range(10),
) -> list[BinaryTask]:
    """Derive the one-vs-rest tasks, keeping file order."""
    train_digits = np.asarray(train_digits)
    test_digits = np.asarray(test_digits)
    return [
        BinaryTask(int(t), train_counts, train_digits == t, test_counts, test_digits == t)
        for t in digits
    ]
