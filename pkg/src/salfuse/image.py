"""Raster type and pixel-level primitives every other stage builds on.

Images are immutable float64 rasters in [0, 1], either single-plane ``(h, w)``
or three-plane ``(h, w, 3)``.  All filtering primitives replicate the edge
pixel outside the image bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import PIL.Image

from . import _kernels
from .errors import ImageTooSmallError, InvalidInputError, InvalidParameterError

_SUPPORTED_SUFFIXES = {".png", ".bmp", ".tif", ".tiff"}


@dataclass(frozen=True)
class Image:
    """A raster of float64 intensities in [0, 1].

    Attributes:
        data: array of shape (h, w) for grayscale or (h, w, 3) for color.
    """

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim not in (2, 3):
            raise InvalidInputError(f"image array must be 2-D or 3-D, got ndim={d.ndim}")
        if d.ndim == 3 and d.shape[2] != 3:
            raise InvalidInputError(f"color images must have 3 channels, got {d.shape[2]}")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise InvalidInputError(f"image must be at least 1x1, got shape {d.shape}")
        if d.dtype != np.float64 or not d.flags.c_contiguous:
            d = np.ascontiguousarray(d, dtype=np.float64)
        object.__setattr__(self, "data", d)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    def planes(self):
        """Yield each channel as a 2-D array view."""
        if self.data.ndim == 2:
            yield self.data
        else:
            for c in range(3):
                yield self.data[:, :, c]

    def same_shape_as(self, other: "Image") -> bool:
        return self.data.shape == other.data.shape


def _stack_planes(planes: list[np.ndarray]) -> Image:
    if len(planes) == 1:
        return Image(planes[0])
    return Image(np.stack(planes, axis=-1))


@dataclass(frozen=True)
class Kernel1D:
    """Symmetric, normalized 1-D filter tap sequence of length 2*radius + 1."""

    radius: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if self.radius < 0 or w.ndim != 1 or w.size != 2 * self.radius + 1:
            raise InvalidParameterError(
                f"kernel weights must have length 2*radius+1, got {w.size} for radius {self.radius}"
            )
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise InvalidParameterError("kernel weights must sum to 1")
        if not np.array_equal(w, w[::-1]):
            raise InvalidParameterError("kernel weights must be symmetric")


def make_gaussian_kernel(sigma: float) -> Kernel1D:
    """Build a normalized 1-D Gaussian kernel truncated at 3 sigma.

    Args:
        sigma: standard deviation, must be positive and finite.

    Returns:
        Kernel1D with radius ceil(3*sigma).
    """
    if not (isinstance(sigma, (int, float)) and math.isfinite(sigma) and sigma > 0):
        raise InvalidParameterError(f"sigma must be a positive finite number, got {sigma!r}")
    radius = math.ceil(3.0 * sigma)
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(d * d) / (2.0 * sigma * sigma))
    w /= w.sum()
    return Kernel1D(radius, w)


def convolve_separable(img: Image, k: Kernel1D) -> Image:
    """Convolve with the kernel horizontally then vertically.

    Edge-replicated borders; output has the input's dimensions.
    """
    out_planes = []
    for plane in img.planes():
        tmp = np.empty_like(plane)
        out = np.empty_like(plane)
        _kernels.conv_h(plane, k.weights, tmp)
        _kernels.conv_v(tmp, k.weights, out)
        out_planes.append(out)
    return _stack_planes(out_planes)


def downsample_half(img: Image) -> Image:
    """Take every second pixel in each row and column (no pre-filtering).

    Output dimensions are ceil(w/2) x ceil(h/2).
    """
    if img.width < 2 or img.height < 2:
        raise ImageTooSmallError(
            f"downsampling needs at least 2x2 pixels, got {img.width}x{img.height}"
        )
    if img.data.ndim == 2:
        return Image(img.data[::2, ::2].copy())
    return Image(img.data[::2, ::2, :].copy())


def _axis_coords(src_len: int, dst_len: int):
    """Per-axis gather indices and fractions for align-corner bilinear resize."""
    if dst_len == 1 or src_len == 1:
        pos = np.zeros(dst_len, dtype=np.float64)
    else:
        pos = np.arange(dst_len, dtype=np.float64) * ((src_len - 1) / (dst_len - 1))
    i0 = np.floor(pos).astype(np.int64)
    np.minimum(i0, src_len - 1, out=i0)
    i1 = np.minimum(i0 + 1, src_len - 1)
    frac = pos - i0
    return i0, i1, frac


def upsample_to(img: Image, target_w: int, target_h: int) -> Image:
    """Bilinearly resample up to exactly target_w x target_h.

    Corner pixels map to corner pixels, so source samples are reproduced
    exactly wherever the target grid lands on integer source coordinates.
    """
    if target_w < img.width or target_h < img.height:
        raise InvalidParameterError(
            f"target {target_w}x{target_h} is smaller than source {img.width}x{img.height}"
        )
    y0, y1, fy = _axis_coords(img.height, target_h)
    x0, x1, fx = _axis_coords(img.width, target_w)
    out_planes = []
    for plane in img.planes():
        out = np.empty((target_h, target_w), dtype=np.float64)
        _kernels.bilinear_k(plane, y0, y1, fy, x0, x1, fx, out)
        out_planes.append(out)
    return _stack_planes(out_planes)


def to_gray(img: Image) -> Image:
    """Convert to single-channel luma (0.299 R + 0.587 G + 0.114 B)."""
    if img.channels == 1:
        return img
    d = img.data
    return Image(0.299 * d[:, :, 0] + 0.587 * d[:, :, 1] + 0.114 * d[:, :, 2])


def box_mean(img: Image, r: int) -> Image:
    """Mean over (2r+1)^2 windows, clipped to the image at the borders.

    Runs in O(1) per pixel via a summed-area table; border windows divide by
    their true (smaller) population, keeping the means unbiased.
    """
    if r < 0:
        raise InvalidParameterError(f"box radius must be >= 0, got {r}")
    if r == 0:
        return img
    out_planes = [box_mean_raw(plane, r) for plane in img.planes()]
    return _stack_planes(out_planes)


def box_mean_raw(plane: np.ndarray, r: int) -> np.ndarray:
    """box_mean on a bare 2-D float64 array (internal fast path)."""
    out = np.empty_like(plane)
    _kernels.box_mean_k(plane, r, out)
    return out


def _check_suffix(path: Path) -> None:
    if path.suffix.lower() not in _SUPPORTED_SUFFIXES:
        raise InvalidInputError(
            f"unsupported image format {path.suffix!r} for {path.name}; "
            f"use one of: png, bmp, tif/tiff"
        )


def load_image(path) -> Image:
    """Decode a PNG/BMP/TIFF file into a normalized float image.

    8-bit data maps to [0,1] by /255; 16-bit grayscale PNG/TIFF by /65535.
    Palette and alpha variants are converted to plain RGB.
    """
    path = Path(path)
    _check_suffix(path)
    try:
        with PIL.Image.open(path) as pim:
            pim.load()
            if pim.mode in ("I;16", "I;16L", "I;16B", "I"):
                arr = np.asarray(pim, dtype=np.float64) / 65535.0
            elif pim.mode == "L":
                arr = np.asarray(pim, dtype=np.float64) / 255.0
            else:
                if pim.mode != "RGB":
                    pim = pim.convert("RGB")
                arr = np.asarray(pim, dtype=np.float64) / 255.0
    except FileNotFoundError:
        raise InvalidInputError(f"no such image file: {path}") from None
    except PIL.UnidentifiedImageError:
        raise InvalidInputError(f"cannot decode {path}: not a recognized image") from None
    return Image(np.clip(arr, 0.0, 1.0))


def save_image(img: Image, path) -> None:
    """Encode to 8-bit PNG/BMP/TIFF chosen by the file extension."""
    path = Path(path)
    _check_suffix(path)
    data = np.clip(img.data, 0.0, 1.0)
    eight = np.rint(data * 255.0).astype(np.uint8)
    mode = "L" if img.channels == 1 else "RGB"
    PIL.Image.fromarray(eight, mode=mode).save(path)
