"""Deterministic synthetic test scenes: textures, focus pairs, dot-and-blob."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .image import Image, convolve_separable, make_gaussian_kernel


def texture(width: int, height: int, channels: int = 3, seed: int = 0) -> Image:
    """Reproducible high-detail texture: blurred noise, contrast-stretched.

    Every pixel neighborhood carries fine structure, which makes the result a
    good stand-in for an everywhere-in-focus photograph.
    """
    if width < 1 or height < 1:
        raise InvalidParameterError(f"texture size must be positive, got {width}x{height}")
    if channels not in (1, 3):
        raise InvalidParameterError(f"channels must be 1 or 3, got {channels}")
    rng = np.random.default_rng(seed)
    shape = (height, width) if channels == 1 else (height, width, 3)
    noise = Image(rng.random(shape))
    smooth = convolve_separable(noise, make_gaussian_kernel(1.0)).data
    lo = smooth.min()
    hi = smooth.max()
    if hi - lo < 1e-12:
        return Image(smooth)
    return Image((smooth - lo) / (hi - lo))


def focus_pair(base: Image, sigma: float = 3.0) -> tuple[Image, Image]:
    """Two complementary half-blurred copies of an all-sharp base image.

    Returns (left-sharp, right-sharp): the first image is crisp on the left
    half and defocused (Gaussian sigma) on the right, the second the reverse.
    """
    blurred = convolve_separable(base, make_gaussian_kernel(sigma)).data
    half = base.width // 2
    a = base.data.copy()
    a[:, half:] = blurred[:, half:]
    b = blurred.copy()
    b[:, half:] = base.data[:, half:]
    return Image(a), Image(b)


def dot_and_blob(
    size: int = 256, dot_radius: float = 2.0, blob_radius: float = 30.0
) -> Image:
    """A small bright dot and a large bright disk on a black background.

    The dot sits at (size/4, size/4) and the blob at (3*size/4, 3*size/4);
    with the defaults that is a 4 px dot and a 60 px blob.
    """
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    img = np.zeros((size, size), dtype=np.float64)
    c1 = size / 4.0
    c2 = 3.0 * size / 4.0
    img[(yy - c1) ** 2 + (xx - c1) ** 2 <= dot_radius ** 2] = 1.0
    img[(yy - c2) ** 2 + (xx - c2) ** 2 <= blob_radius ** 2] = 1.0
    return Image(img)


def blob_center(size: int = 256) -> tuple[int, int]:
    """(row, col) of the blob center used by dot_and_blob."""
    c = int(round(3.0 * size / 4.0))
    return c, c
