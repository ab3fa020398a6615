"""Stand-in benchmark corpus with the image names and sizes of the classic set.

The original benchmark photographs are not redistributable, so each entry is
rendered from a scikit-image sample picture resized to the listed dimensions.
Only the dimensions and the mix of gray/color inputs follow the classic set;
the pixel content does not.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .imagecore import write_pgm

# name, (width, height), skimage.data source
BENCHMARK_STANDINS = (
    ("lena", (220, 220), "astronaut"),
    ("cameraman", (256, 256), "camera"),
    ("hunter", (512, 512), "coins"),
    ("baboon", (512, 512), "chelsea"),
    ("fruits", (512, 512), "coffee"),
    ("mountain", (640, 480), "rocket"),
    ("airplane", (512, 512), "moon"),
    ("boat", (512, 512), "immunohistochemistry"),
    ("fingerprint_1", (300, 300), "grass"),
    ("fingerprint_2", (300, 300), "gravel"),
    ("blonde", (512, 512), "cell"),
    ("frozen_franz_josef", (4531, 6005), "hubble_deep_field"),
)


def standin_image(source: str, size) -> np.ndarray:
    """Load ``skimage.data.<source>`` resized to ``size = (width, height)``."""
    from skimage import data

    arr = np.asarray(getattr(data, source)())
    if arr.dtype == bool:
        arr = arr.astype(np.uint8) * 255
    if arr.ndim == 3:
        arr = arr[..., :3]
    im = Image.fromarray(np.ascontiguousarray(arr.astype(np.uint8)))
    return np.asarray(im.resize(tuple(size), Image.Resampling.LANCZOS))


def build_standin_corpus(out_dir, large_scale: float = 0.125, names=None) -> list:
    """Write the stand-in corpus to ``out_dir`` and return the file paths.

    Gray sources are written as P5 PGM, color sources as RGB PNG. Images
    larger than 2 megapixels are shrunk by ``large_scale`` per side to keep
    full runs at desk scale.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, (w, h), source in BENCHMARK_STANDINS:
        if names is not None and name not in names:
            continue
        if w * h > 2_000_000:
            w, h = round(w * large_scale), round(h * large_scale)
        img = standin_image(source, (w, h))
        if img.ndim == 2:
            paths.append(write_pgm(out_dir / f"{name}.pgm", img))
        else:
            path = out_dir / f"{name}.png"
            Image.fromarray(img).save(path, format="PNG")
            paths.append(path)
    return paths
