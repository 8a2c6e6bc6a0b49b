"""Small MNIST-shaped stand-in built from scikit-learn's bundled 8x8 digits.

Useful for smoke runs and tuning when the MNIST files are not at hand. The
8x8 images are upsampled to 20x20 and centred in a 28x28 frame, as in
MNIST. Optionally every training image is also shifted by one pixel in
each of the eight directions to enlarge the training split.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import shift as nd_shift, zoom

from colanet.data import MNIST_FILES, Dataset, write_idx


def _to_mnist_frame(images8: np.ndarray) -> np.ndarray:
    scaled = images8.astype(float) * (255.0 / 16.0)
    big = np.stack([zoom(img, 2.5, order=1) for img in scaled])
    out = np.zeros((images8.shape[0], 28, 28))
    out[:, 4:24, 4:24] = big
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def proxy_digits(train_fraction: float = 0.8, shifts: bool = False) -> tuple[Dataset, Dataset]:
    """Return (train, test) splits in file order; deterministic."""
    from sklearn.datasets import load_digits

    digits = load_digits()
    images = _to_mnist_frame(digits.images)
    labels = digits.target.astype(np.uint8)
    cut = int(round(train_fraction * len(labels)))
    train = Dataset(images[:cut], labels[:cut])
    test = Dataset(images[cut:], labels[cut:])
    if shifts:
        moved = [train.images]
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy or dx:
                    moved.append(nd_shift(train.images, (0, dy, dx), order=0))
        # shift-major order: the unshifted pass comes first
        train = Dataset(np.concatenate(moved), np.tile(train.labels, len(moved)))
    return train, test


def write_proxy_idx(out_dir, shifts: bool = False) -> Path:
    """Write the proxy splits under the standard MNIST file names (gzipped)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train, test = proxy_digits(shifts=shifts)
    for split, ds in (("train", train), ("test", test)):
        img, lab = MNIST_FILES[split]
        write_idx(out / f"{img}.gz", ds.images)
        write_idx(out / f"{lab}.gz", ds.labels)
    return out
