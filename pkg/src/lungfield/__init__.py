"""Interactive lung-field annotation toolkit for CT volumes.

Automatic seed selection plus max-min connectivity segmentation produces an
initial lung mask; stroke painting refines it; a CLI and an HTTP service
drive batch and interactive use.
"""

from .affinity import AffinityParams, affinity, pair_affinity
from .connectivity import ConnectivityScene, compute_connectivity
from .errors import LungFieldError
from .grid import BinaryMask, HUVolume, VolumeGeometry, world_extent
from .metrics import (
    OverlapSummary,
    VolumeRecord,
    dice_coefficient,
    overlap_coefficient,
    pearson_correlation_matrix,
    summary_stats,
    volume_ml,
)
from .nifti_io import load_mask, load_volume, save_mask, save_volume
from .phantom import PhantomSpec, generate_thorax_phantom
from .seeding import (
    CandidateRegion,
    SeedSet,
    candidate_regions,
    extract_body_mask,
    extract_rib_cage,
    select_seeds,
    validate_manual_seeds,
)
from .segment import FcResult, auto_segment, postprocess_mask, segment_lungs, threshold_scene
from .strokes import (
    EditRecord,
    EditStack,
    Stroke,
    apply_stroke,
    rasterize_stroke,
    seeds_from_stroke,
    undo,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityParams",
    "BinaryMask",
    "CandidateRegion",
    "ConnectivityScene",
    "EditRecord",
    "EditStack",
    "FcResult",
    "HUVolume",
    "LungFieldError",
    "OverlapSummary",
    "PhantomSpec",
    "SeedSet",
    "Stroke",
    "VolumeGeometry",
    "VolumeRecord",
    "affinity",
    "apply_stroke",
    "auto_segment",
    "candidate_regions",
    "compute_connectivity",
    "dice_coefficient",
    "extract_body_mask",
    "extract_rib_cage",
    "generate_thorax_phantom",
    "load_mask",
    "load_volume",
    "overlap_coefficient",
    "pair_affinity",
    "pearson_correlation_matrix",
    "postprocess_mask",
    "rasterize_stroke",
    "save_mask",
    "save_volume",
    "seeds_from_stroke",
    "segment_lungs",
    "select_seeds",
    "summary_stats",
    "threshold_scene",
    "undo",
    "validate_manual_seeds",
    "volume_ml",
    "world_extent",
]
