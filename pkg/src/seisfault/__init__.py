"""Fault-line extraction from 3D seismic volumes.

Semblance maps of neighboring time sections are blended into an RGB image,
intensity channels from Lab/YCbCr/HSV are enhanced and thresholded, the
channel masks are combined under a semblance gate, and a weighted medial
axis turns the combined mask into one-pixel-wide fault lines.
"""

from .attributes import (
    DiscontinuityMap,
    GeologicalWeightMap,
    SemblanceMap,
    SemblanceParams,
    discontinuity_map,
    geological_weight,
    semblance,
)
from .color import (
    BlendedImage,
    ColorPlanes,
    IntensityMap,
    blend_rgb,
    extract_intensity,
    lab_to_rgb,
    rgb_to_hsv,
    rgb_to_lab,
    rgb_to_ycbcr,
)
from .enhance import (
    BinaryMap,
    EnhanceParams,
    clahe,
    combine_binary,
    gaussian_smooth,
    threshold_channel,
)
from .evaluate import DistanceReport, average_distance, export_overlay, point_distance, run_ablation
from .pipeline import PipelineParams, PipelineResult, run_section, run_volume
from .skeleton import (
    SkeletonParams,
    WeightedSkeleton,
    attach_geological_weight,
    cleanup,
    dimensional_weight,
    medial_axis,
    prune,
)
from .volume import (
    FaultGroundTruth,
    FaultSpec,
    SeismicVolume,
    SyntheticSpec,
    TimeSection,
    VolumeHeader,
    extract_time_section,
    generate_synthetic,
    load_ground_truth,
    load_volume,
    save_ground_truth,
    save_volume,
)

__version__ = "0.1.0"
