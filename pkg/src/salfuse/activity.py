"""Per-source activity maps: winner-take-all masks refined by a guided filter.

The n saliency maps vote per pixel; the winner's binary mask is then smoothed
with an edge-preserving guided filter (window ridge regression against the
grayscale source) so region boundaries follow image edges instead of the raw
vote boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .image import Image, box_mean_raw
from .saliency import SaliencyMap

#: Default regularization, the 8-bit-era value 2 rescaled to [0,1] intensities.
DEFAULT_EPS = 2.0 / 255.0 ** 2


@dataclass(frozen=True)
class MaskMap:
    """Binary winner mask of one source; the n masks partition the image."""

    mask: Image
    source_index: int = 0


@dataclass(frozen=True)
class GuidedFilterParams:
    """Guided-filter window radius and regularization.

    Attributes:
        radius: window radius r >= 1 (window side 2r+1).
        eps: ridge regularization on the [0,1] intensity scale; the classic
            8-bit tuning "2" corresponds to 2/255**2 here.
    """

    radius: int = 2
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.radius < 1:
            raise InvalidParameterError(f"guided filter radius must be >= 1, got {self.radius}")
        if not self.eps > 0:
            raise InvalidParameterError(f"guided filter eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class ActivityMap:
    """Refined fusion weights of one source, clamped to [0, 1]."""

    weights: Image
    source_index: int = 0


def make_masks(saliencies: list[SaliencyMap], n_expected: int | None = None) -> list[MaskMap]:
    """Winner-take-all masks from per-source saliency maps.

    Per pixel the source with the largest saliency wins; exact ties go to the
    lowest source index, so the masks always sum to exactly 1 everywhere.

    Args:
        saliencies: n >= 2 saliency maps of identical dimensions.
        n_expected: optional sanity check on len(saliencies).

    Returns:
        One binary MaskMap per input, in input order.
    """
    n = len(saliencies)
    if n_expected is not None and n != n_expected:
        raise InvalidInputError(f"expected {n_expected} saliency maps, got {n}")
    if n < 2:
        raise InvalidInputError(f"mask construction needs at least 2 saliency maps, got {n}")
    shape = saliencies[0].map.data.shape
    for s in saliencies[1:]:
        if s.map.data.shape != shape:
            raise InvalidInputError(
                f"saliency map dimensions differ: {shape} vs {s.map.data.shape}"
            )
    stack = np.stack([s.map.data for s in saliencies], axis=0)
    winner = np.argmax(stack, axis=0)  # first max wins: lowest-index tie-break
    return [
        MaskMap(mask=Image((winner == i).astype(np.float64)), source_index=saliencies[i].source_index)
        for i in range(n)
    ]


def guided_filter(guide: Image, input: MaskMap, p: GuidedFilterParams) -> ActivityMap:
    """Edge-preserving refinement of a binary mask, guided by its source.

    Fits output = a*guide + b per window by ridge regression (regularized by
    eps), then averages the per-window predictions that cover each pixel:
    out = mean(a)*guide + mean(b), with all window statistics taken over
    bound-clipped windows.  The result is clamped to [0, 1].
    """
    if guide.channels != 1:
        raise InvalidInputError("the guide image must be single-channel")
    I = guide.data
    M = input.mask.data
    if I.shape != M.shape:
        raise InvalidInputError(f"guide {I.shape} and mask {M.shape} dimensions differ")
    r = p.radius
    mean_I = box_mean_raw(I, r)
    mean_M = box_mean_raw(M, r)
    corr_IM = box_mean_raw(I * M, r)
    corr_II = box_mean_raw(I * I, r)
    var_I = corr_II - mean_I * mean_I
    a = (corr_IM - mean_I * mean_M) / (var_I + p.eps)
    b = mean_M - a * mean_I
    out = box_mean_raw(a, r) * I + box_mean_raw(b, r)
    return ActivityMap(weights=Image(np.clip(out, 0.0, 1.0)), source_index=input.source_index)


def make_activity_maps(
    guides: list[Image], masks: list[MaskMap], p: GuidedFilterParams
) -> list[ActivityMap]:
    """Refine each source's mask with its own grayscale guide."""
    if len(guides) != len(masks):
        raise InvalidInputError(
            f"got {len(guides)} guide images for {len(masks)} masks"
        )
    return [guided_filter(g, m, p) for g, m in zip(guides, masks)]
