"""salfuse: fast spatial-domain image fusion driven by multi-scale saliency.

Build scale-invariant structure-saliency maps from a difference-of-Gaussian
pyramid, refine winner-take-all weights with a guided filter, and blend any
number of aligned sources into an all-in-focus / multi-modal composite.
"""

from .activity import ActivityMap, GuidedFilterParams, MaskMap, guided_filter, make_activity_maps, make_masks
from .errors import FusionError, ImageTooSmallError, InvalidInputError, InvalidParameterError
from .fusion import (
    PRESETS,
    FusionConfig,
    FusionResult,
    fuse,
    fuse_stack_pairwise_equivalence_check,
)
from .image import (
    Image,
    Kernel1D,
    box_mean,
    convolve_separable,
    downsample_half,
    load_image,
    make_gaussian_kernel,
    save_image,
    to_gray,
    upsample_to,
)
from .metrics import QualityReport, evaluate, mutual_information, qabf, quality_index, ssim
from .saliency import (
    SaliencyMap,
    SaliencyMetricKind,
    build_saliency_map,
    saliency_dog,
    saliency_gradient,
    saliency_log,
)
from .scale_space import (
    DoGPyramid,
    GaussianPyramid,
    PyramidParams,
    build_dog_pyramid,
    build_gaussian_pyramid,
    dump_pyramid,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityMap",
    "DoGPyramid",
    "FusionConfig",
    "FusionError",
    "FusionResult",
    "GaussianPyramid",
    "GuidedFilterParams",
    "Image",
    "ImageTooSmallError",
    "InvalidInputError",
    "InvalidParameterError",
    "Kernel1D",
    "MaskMap",
    "PRESETS",
    "PyramidParams",
    "QualityReport",
    "SaliencyMap",
    "SaliencyMetricKind",
    "box_mean",
    "build_dog_pyramid",
    "build_gaussian_pyramid",
    "build_saliency_map",
    "convolve_separable",
    "downsample_half",
    "dump_pyramid",
    "evaluate",
    "fuse",
    "fuse_stack_pairwise_equivalence_check",
    "guided_filter",
    "load_image",
    "make_activity_maps",
    "make_gaussian_kernel",
    "make_masks",
    "mutual_information",
    "qabf",
    "quality_index",
    "save_image",
    "saliency_dog",
    "saliency_gradient",
    "saliency_log",
    "ssim",
    "to_gray",
    "upsample_to",
]
