"""Scale-invariant structure saliency maps.

Each pyramid layer yields a per-scale structure response (band-pass DoG by
default, gradient energy or scale-normalized Laplacian as alternatives),
smoothed by a fixed 3x3 integration filter.  Responses are reduced by a
pixelwise max inside each octave, each octave maximum is resized to source
resolution, and a final pixelwise max across octaves gives the saliency map.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .image import Image, Kernel1D, convolve_separable, save_image, upsample_to
from .scale_space import GaussianPyramid, PyramidParams, build_dog_pyramid, build_gaussian_pyramid, dump_pyramid

#: Standard deviation of the fixed 3x3 integration filter.
INTEGRATION_SIGMA = 0.8


def _integration_kernel(sigma: float = INTEGRATION_SIGMA) -> Kernel1D:
    # Exactly 3 taps (radius 1), regardless of the usual 3-sigma truncation.
    d = np.array([-1.0, 0.0, 1.0])
    w = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return Kernel1D(1, w / w.sum())


_INTEGRATION = _integration_kernel()


class SaliencyMetricKind(enum.Enum):
    """Which per-scale structure response feeds the saliency map."""

    DOG = "dog"
    GRADIENT = "grad"
    LOG = "log"


@dataclass(frozen=True)
class SaliencyMap:
    """Full-resolution nonnegative saliency of one source image."""

    map: Image
    source_index: int = 0


def saliency_dog(dog_plane: Image) -> Image:
    """Integrate an absolute difference-of-Gaussians plane over 3x3 windows."""
    return convolve_separable(dog_plane, _INTEGRATION)


def saliency_gradient(L: Image, sigma: float) -> Image:
    """Gradient-energy response of a pyramid layer.

    Central differences with replicated edges; the squared gradient magnitude
    is then integrated over 3x3 windows.  Note this response carries no
    scale normalization (``sigma`` is accepted for interface symmetry), so
    responses at different scales are less comparable than for the other
    metric kinds.
    """
    d = L.data
    lx = np.empty_like(d)
    ly = np.empty_like(d)
    lx[:, 1:-1] = (d[:, 2:] - d[:, :-2]) * 0.5
    lx[:, 0] = (d[:, 1] - d[:, 0]) * 0.5 if d.shape[1] > 1 else 0.0
    lx[:, -1] = (d[:, -1] - d[:, -2]) * 0.5 if d.shape[1] > 1 else 0.0
    ly[1:-1, :] = (d[2:, :] - d[:-2, :]) * 0.5
    ly[0, :] = (d[1, :] - d[0, :]) * 0.5 if d.shape[0] > 1 else 0.0
    ly[-1, :] = (d[-1, :] - d[-2, :]) * 0.5 if d.shape[0] > 1 else 0.0
    return convolve_separable(Image(lx * lx + ly * ly), _INTEGRATION)


def saliency_log(L: Image, sigma: float) -> Image:
    """Scale-normalized Laplacian response |sigma^2 * lap(L)| of a layer.

    Five-point Laplacian stencil with replicated edges, scaled by sigma^2,
    absolute value, then the 3x3 integration filter.
    """
    d = L.data
    up = np.vstack([d[:1, :], d[:-1, :]])
    down = np.vstack([d[1:, :], d[-1:, :]])
    left = np.hstack([d[:, :1], d[:, :-1]])
    right = np.hstack([d[:, 1:], d[:, -1:]])
    lap = up + down + left + right - 4.0 * d
    return convolve_separable(Image(np.abs(sigma * sigma * lap)), _INTEGRATION)


def _octave_responses(gp: GaussianPyramid, kind: SaliencyMetricKind) -> list[list[Image]]:
    """Per-octave lists of the s per-scale responses (layers j = 0..s-1)."""
    p = gp.params
    if kind is SaliencyMetricKind.DOG:
        dog = build_dog_pyramid(gp)
        return [[saliency_dog(plane) for plane in stack] for stack in dog.octaves]
    responses = []
    for stack in gp.octaves:
        planes = []
        for j in range(p.layers):
            sigma = gp.layer_scale(j)
            if kind is SaliencyMetricKind.GRADIENT:
                planes.append(saliency_gradient(stack[j], sigma))
            else:
                planes.append(saliency_log(stack[j], sigma))
        responses.append(planes)
    return responses


def _normalized_u8(plane: Image) -> Image:
    lo = float(plane.data.min())
    hi = float(plane.data.max())
    if hi - lo < 1e-12:
        return Image(np.zeros_like(plane.data))
    return Image((plane.data - lo) / (hi - lo))


def build_saliency_map(
    img: Image,
    p: PyramidParams,
    kind: SaliencyMetricKind = SaliencyMetricKind.DOG,
    debug_dir=None,
) -> SaliencyMap:
    """Compute the cross-scale maximum structure response of one image.

    Per octave the per-scale responses are reduced with a pixelwise max,
    each octave maximum is bilinearly resized to the source resolution, and
    the final map is the pixelwise max across octaves.

    Args:
        img: single-channel source image.
        p: pyramid sampling parameters.
        kind: which per-scale response to use.
        debug_dir: optional directory; dumps pyramid planes, per-octave
            maxima, and the final map as PNGs (min-max normalized for
            viewing only).

    Returns:
        SaliencyMap at the source resolution (source_index left at 0).
    """
    if img.channels != 1:
        raise InvalidInputError("saliency is computed on single-channel images")
    gp = build_gaussian_pyramid(img, p)
    octave_maps = []
    for planes in _octave_responses(gp, kind):
        acc = planes[0].data
        for plane in planes[1:]:
            acc = np.maximum(acc, plane.data)
        octave_maps.append(Image(acc))
    final = None
    upsampled = []
    for om in octave_maps:
        full = om if om.data.shape == img.data.shape else upsample_to(om, img.width, img.height)
        upsampled.append(full)
        final = full.data if final is None else np.maximum(final, full.data)
    result = Image(final)
    if debug_dir is not None:
        debug_dir = Path(debug_dir)
        debug_dir.mkdir(parents=True, exist_ok=True)
        dump_pyramid(gp, debug_dir)
        for t, om in enumerate(upsampled):
            save_image(_normalized_u8(om), debug_dir / f"saliency_oct{t}_max.png")
        save_image(_normalized_u8(result), debug_dir / "saliency.png")
    return SaliencyMap(map=result)
