"""Incremental Gaussian pyramid and its difference-of-Gaussian stack.

Within an octave, layer j carries cumulative blur sigma0 * k**j with
k = 2**(1/s); each layer is produced from the previous one by a small
incremental blur, and the next octave starts from the layer whose cumulative
blur is 2*sigma0, downsampled by two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .image import Image, convolve_separable, downsample_half, make_gaussian_kernel, save_image


@dataclass(frozen=True)
class PyramidParams:
    """Scale-space sampling parameters.

    Attributes:
        octaves: number of octaves (resolution halvings + 1), >= 1.
        layers: scale samples per octave doubling, >= 1.
        sigma0: blur of the first layer of every octave (octave-local units).
        k: derived per-layer scale factor 2**(1/layers), stored for inspection.
    """

    octaves: int = 1
    layers: int = 1
    sigma0: float = 1.0
    k: float = field(init=False)

    def __post_init__(self):
        if self.octaves < 1:
            raise InvalidParameterError(f"octaves must be >= 1, got {self.octaves}")
        if self.layers < 1:
            raise InvalidParameterError(f"layers must be >= 1, got {self.layers}")
        if not (math.isfinite(self.sigma0) and self.sigma0 > 0):
            raise InvalidParameterError(f"sigma0 must be positive, got {self.sigma0}")
        object.__setattr__(self, "k", 2.0 ** (1.0 / self.layers))

    def max_octaves_for(self, width: int, height: int) -> int:
        return max(int(math.floor(math.log2(min(width, height)))) - 1, 0)

    def validate_for(self, width: int, height: int) -> None:
        """Reject octave counts the image cannot support (each needs >= 2x2)."""
        limit = self.max_octaves_for(width, height)
        if self.octaves > limit:
            raise InvalidParameterError(
                f"{self.octaves} octaves exceed the maximum {limit} for a "
                f"{width}x{height} image"
            )


@dataclass(frozen=True)
class GaussianPyramid:
    """Per-octave stacks of progressively blurred images.

    Octave t holds layers+1 images at scales sigma0 * k**j, j = 0..layers,
    all at that octave's resolution.
    """

    params: PyramidParams
    octaves: list[list[Image]]

    def layer_scale(self, j: int) -> float:
        """Nominal octave-local blur of layer j."""
        return self.params.sigma0 * self.params.k ** j


@dataclass(frozen=True)
class DoGPyramid:
    """Per-octave stacks of absolute adjacent-layer differences (all >= 0)."""

    params: PyramidParams
    octaves: list[list[Image]]


def build_gaussian_pyramid(img: Image, p: PyramidParams) -> GaussianPyramid:
    """Build the incremental Gaussian pyramid of a grayscale image.

    Octave 0 layer 0 is the input blurred to sigma0; layer j+1 adds an
    incremental blur of sigma0 * k**j * sqrt(k*k - 1), so cumulative blur is
    sigma0 * k**(j+1).  The next octave's base is the layer at cumulative
    blur 2*sigma0 (index ``layers``), decimated by two.

    Args:
        img: single-channel image.
        p: sampling parameters; must satisfy the octave bound for img.

    Returns:
        GaussianPyramid with p.octaves octaves of p.layers + 1 images each.
    """
    if img.channels != 1:
        raise InvalidInputError("pyramids are built from single-channel images")
    p.validate_for(img.width, img.height)
    inc_kernels = [
        make_gaussian_kernel(p.sigma0 * p.k ** j * math.sqrt(p.k * p.k - 1.0))
        for j in range(p.layers)
    ]
    base = convolve_separable(img, make_gaussian_kernel(p.sigma0))
    octaves = []
    for t in range(p.octaves):
        stack = [base]
        for j in range(p.layers):
            stack.append(convolve_separable(stack[-1], inc_kernels[j]))
        octaves.append(stack)
        if t + 1 < p.octaves:
            base = downsample_half(stack[p.layers])
    return GaussianPyramid(p, octaves)


def build_dog_pyramid(gp: GaussianPyramid) -> DoGPyramid:
    """Absolute difference of adjacent pyramid layers, per octave."""
    octaves = []
    for stack in gp.octaves:
        planes = [
            Image(np.abs(stack[j].data - stack[j + 1].data))
            for j in range(len(stack) - 1)
        ]
        octaves.append(planes)
    return DoGPyramid(gp.params, octaves)


def dump_pyramid(pyr: GaussianPyramid | DoGPyramid, directory) -> None:
    """Write every plane as PNG files named oct{t}_lay{j}.png."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for t, stack in enumerate(pyr.octaves):
        for j, plane in enumerate(stack):
            save_image(plane, directory / f"oct{t}_lay{j}.png")
