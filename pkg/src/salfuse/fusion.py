"""End-to-end fusion pipeline: saliency -> masks -> activity maps -> blend.

The fused image is the per-pixel weighted average of the sources, each source
weighted by its refined activity map (shared across color channels).
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .activity import ActivityMap, GuidedFilterParams, make_activity_maps, make_masks
from .errors import InvalidInputError
from .image import Image, save_image, to_gray
from .saliency import SaliencyMetricKind, build_saliency_map
from .scale_space import PyramidParams

#: Named (octaves, layers) presets for the three dataset families.
PRESETS = {
    "multimodal": (5, 3),
    "natural": (1, 1),
    "cell": (3, 5),
}

#: Blend denominators below this fall back to uniform 1/n weights.
DENOM_GUARD = 1e-8


@dataclass(frozen=True)
class FusionConfig:
    """Everything the pipeline needs besides the images themselves."""

    pyramid: PyramidParams = field(default_factory=PyramidParams)
    metric: SaliencyMetricKind = SaliencyMetricKind.DOG
    gf: GuidedFilterParams = field(default_factory=GuidedFilterParams)
    debug_dump: str | Path | None = None

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "FusionConfig":
        """Build a config from a named preset; overrides win over the preset."""
        if name not in PRESETS:
            raise InvalidInputError(
                f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
            )
        o, s = PRESETS[name]
        pyramid = overrides.pop("pyramid", PyramidParams(octaves=o, layers=s))
        return cls(pyramid=pyramid, **overrides)


@dataclass(frozen=True)
class FusionResult:
    """Fused image plus the per-source weights and per-stage wall times."""

    fused: Image
    activity_maps: list[ActivityMap]
    elapsed: dict[str, float]


def _check_sources(sources: list[Image]) -> None:
    if len(sources) < 2:
        raise InvalidInputError(f"fusion needs at least 2 source images, got {len(sources)}")
    first = sources[0]
    for i, s in enumerate(sources[1:], start=1):
        if s.data.shape != first.data.shape:
            raise InvalidInputError(
                f"source 0 is {first.width}x{first.height}x{first.channels} but "
                f"source {i} is {s.width}x{s.height}x{s.channels}; "
                "all sources must share dimensions and channel count"
            )


def fuse(sources: list[Image], cfg: FusionConfig | None = None) -> FusionResult:
    """Fuse n >= 2 aligned source images into one composite.

    Grayscale conversions of the sources drive both saliency estimation and
    guided filtering; the blend applies each activity map to every channel of
    its source and divides by the summed weights (uniform fallback where that
    sum vanishes).  Output is clamped to [0, 1].

    Args:
        sources: aligned images, identical dimensions and channel count.
        cfg: pipeline configuration (defaults to octaves=1, layers=1, DoG).

    Returns:
        FusionResult with the fused image, activity maps, and stage timings.
    """
    cfg = cfg or FusionConfig()
    _check_sources(sources)
    cfg.pyramid.validate_for(sources[0].width, sources[0].height)
    debug = Path(cfg.debug_dump) if cfg.debug_dump is not None else None

    t0 = time.perf_counter()
    grays = [to_gray(s) for s in sources]
    saliencies = []
    for i, g in enumerate(grays):
        sal = build_saliency_map(
            g, cfg.pyramid, cfg.metric,
            debug_dir=(debug / f"src{i}" if debug is not None else None),
        )
        saliencies.append(dataclasses.replace(sal, source_index=i))
    t1 = time.perf_counter()
    masks = make_masks(saliencies)
    t2 = time.perf_counter()
    activities = make_activity_maps(grays, masks, cfg.gf)
    t3 = time.perf_counter()

    weights = [a.weights.data for a in activities]
    denom = weights[0].copy()
    for w in weights[1:]:
        denom += w
    color = sources[0].channels == 3
    acc = np.zeros_like(sources[0].data)
    for w, s in zip(weights, sources):
        acc += (w[:, :, None] if color else w) * s.data
    low = denom < DENOM_GUARD
    safe = np.where(low, 1.0, denom)
    acc /= safe[:, :, None] if color else safe
    if low.any():
        uniform = sum(s.data for s in sources) / len(sources)
        acc[low] = uniform[low]
    fused = Image(np.clip(acc, 0.0, 1.0))
    t4 = time.perf_counter()

    if debug is not None:
        debug.mkdir(parents=True, exist_ok=True)
        for i, (m, a) in enumerate(zip(masks, activities)):
            save_image(m.mask, debug / f"src{i}_mask.png")
            save_image(a.weights, debug / f"src{i}_activity.png")
        save_image(fused, debug / "fused.png")

    elapsed = {
        "saliency": t1 - t0,
        "masks": t2 - t1,
        "guided_filter": t3 - t2,
        "blend": t4 - t3,
        "total": t4 - t0,
    }
    return FusionResult(fused=fused, activity_maps=activities, elapsed=elapsed)


def fuse_stack_pairwise_equivalence_check(sources: list[Image], cfg: FusionConfig | None = None) -> dict:
    """Compare native n-ary fusion against sequential pairwise fusion.

    Diagnostic only (no pass/fail): fuses all sources at once, then folds
    them in pairwise left to right, and reports how far the two composites
    diverge.

    Returns:
        dict with n, mae, and max_diff between the two strategies.
    """
    if len(sources) < 2:
        raise InvalidInputError("the equivalence check needs at least 2 sources")
    native = fuse(sources, cfg).fused
    running = sources[0]
    for s in sources[1:]:
        running = fuse([running, s], cfg).fused
    diff = np.abs(native.data - running.data)
    return {
        "n": len(sources),
        "mae": float(diff.mean()),
        "max_diff": float(diff.max()),
    }
