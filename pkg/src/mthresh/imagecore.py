"""Image representation, gray conversion, binarization and segmentation.

Images are plain numpy arrays: a gray image is a 2-D ``uint8`` array of shape
``(height, width)``, an RGB image is ``(height, width, 3)`` ``uint8``, and a
binary image is a 2-D ``uint8`` array holding only 0 and 1.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import EmptyImage, EmptyThresholdSet

LEVELS = 256

# luma weights scaled by 10^4 so the weighted sum is exact integer arithmetic
_LUMA_WEIGHTS = (2989, 5870, 1140)
_LUMA_SCALE = 10000


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a 2-D uint8 array (no copy if possible)."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"gray image must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyImage("image has no pixels")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise TypeError(f"gray image must hold integers, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("gray levels must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_rgb(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"RGB image must have shape (h, w, 3), got {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyImage("image has no pixels")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def to_grayscale(img) -> np.ndarray:
    """Convert an RGB image to gray with weights 0.2989, 0.5870, 0.1140.

    The weighted sum is rounded half-up, which is done in exact integer
    arithmetic so that ties never depend on floating-point representation.
    """
    rgb = as_rgb(img).astype(np.int32)
    wr, wg, wb = _LUMA_WEIGHTS
    acc = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    gray = (acc + _LUMA_SCALE // 2) // _LUMA_SCALE
    return np.clip(gray, 0, 255).astype(np.uint8)


def binarize(img, th: int) -> np.ndarray:
    """Global binarization: 1 where ``img < th``, 0 elsewhere.

    Note the polarity: dark pixels map to 1.
    """
    if not 0 <= th <= LEVELS:
        raise ValueError(f"threshold must lie in [0, 256], got {th}")
    return (as_gray(img) < th).astype(np.uint8)


def segmentation_lut(thresholds: Sequence[int]) -> np.ndarray:
    """Level lookup table used by :func:`apply_thresholds`."""
    levels = [int(x) for x in thresholds]
    if not levels:
        raise EmptyThresholdSet("at least one threshold is required")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"thresholds must be strictly increasing: {levels}")
    if levels[0] < 0 or levels[-1] > 255:
        raise ValueError(f"thresholds must lie in [0, 255]: {levels}")
    lut = np.arange(LEVELS, dtype=np.uint8)
    for lo, hi in zip(levels, levels[1:]):
        lut[lo + 1:hi + 1] = lo
    return lut


def apply_thresholds(img, thresholds: Sequence[int]) -> np.ndarray:
    """Segment a gray image with a multilevel threshold set.

    Pixels at or below the first threshold and above the last one keep their
    value; a pixel in the band ``(th[i-1], th[i]]`` is replaced by ``th[i-1]``.
    With two thresholds this is the usual three-class rule.

    Parameters
    ----------
    img : array_like
        2-D uint8 gray image.
    thresholds : sequence of int
        Strictly increasing levels in [0, 255].

    Returns
    -------
    numpy.ndarray
        Segmented image, same shape and dtype as ``img``.
    """
    gray = as_gray(img)
    return segmentation_lut(thresholds)[gray]


# --- file I/O -------------------------------------------------------------

def read_image(path) -> np.ndarray:
    """Decode an image file to a gray (2-D) or RGB (3-D) uint8 array.

    Gray files (PGM, 8-bit gray PNG) come back 2-D; everything else is
    converted to RGB, dropping any alpha channel.
    """
    with Image.open(path) as im:
        if im.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
            raise ValueError(f"{path}: only 8-bit images are supported (mode {im.mode})")
        if im.mode == "L":
            return np.array(im, dtype=np.uint8)
        if im.mode in ("1", "LA", "P", "PA") and _is_gray_palette(im):
            return np.array(im.convert("L"), dtype=np.uint8)
        return np.array(im.convert("RGB"), dtype=np.uint8)


def _is_gray_palette(im) -> bool:
    if im.mode in ("1", "LA"):
        return True
    rgb = np.array(im.convert("RGB"))
    return bool(np.all(rgb[..., 0] == rgb[..., 1]) and np.all(rgb[..., 1] == rgb[..., 2]))


def load_gray(path) -> np.ndarray:
    """Read an image and convert it to gray with :func:`to_grayscale` if needed."""
    arr = read_image(path)
    return arr if arr.ndim == 2 else to_grayscale(arr)


def write_pgm(path, img) -> Path:
    """Write a binary (P5) 8-bit PGM file."""
    path = Path(path)
    gray = as_gray(img)
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(gray).tobytes())
    return path


def write_png(path, img) -> Path:
    path = Path(path)
    Image.fromarray(as_gray(img)).save(path, format="PNG")
    return path
