"""Blue-intensity dataset partitioner.

An image's blue intensity is the blue channel's share of the total
pixel mass: b = sum(blue) / sum(all channels). Images are assigned to
five groups by where b falls in the *training* split's empirical CDF,
so train and test partitions share thresholds.
"""

from __future__ import annotations

import warnings

import numpy as np

N_GROUPS = 5


def blue_intensity(images: np.ndarray) -> np.ndarray:
    """b per image for an (N, H, W, 3) array in [0, 1].

    Zero-mass images (all channels zero) get the neutral value 1/3 and
    a warning.
    """
    arr = np.asarray(images, dtype=np.float64)
    if arr.ndim != 4 or arr.shape[-1] != 3:
        raise ValueError(f"expected (N, H, W, 3) images, got shape {arr.shape}")
    blue = arr[..., 2].sum(axis=(1, 2))
    total = arr.sum(axis=(1, 2, 3))
    dead = total == 0.0
    if dead.any():
        warnings.warn(
            f"{int(dead.sum())} zero-intensity image(s); "
            "blue intensity set to 1/3", stacklevel=2)
    return np.where(dead, 1.0 / 3.0, blue / np.where(dead, 1.0, total))


def partition_by_blue(images: np.ndarray,
                      train_reference: np.ndarray) -> np.ndarray:
    """Group index 0..4 per image, by training-CDF quintiles of b.

    Group i collects images with CDF value in (0.2 i, 0.2 (i+1)];
    values at or below the training minimum clamp into group 0.
    """
    train_b = np.sort(blue_intensity(train_reference))
    b = blue_intensity(images)
    cdf = np.searchsorted(train_b, b, side="right") / train_b.size
    groups = np.ceil(N_GROUPS * cdf).astype(np.int64) - 1
    return np.clip(groups, 0, N_GROUPS - 1)
