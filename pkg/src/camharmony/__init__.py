"""Metadata-driven color and tone harmonization for multi-camera rigs.

Each camera's ISP white-balance gains and tone curve are blended with its
neighbours' along a logistic spatial profile, so adjacent images meet at a
shared color response at their seams while the image centers are left
untouched.  A patch-statistics color transfer baseline, a synthetic rig
generator, seam metrics and a runtime harness are included for comparison.
"""

from .awb import BoundaryGains, apply_awb_half, awb_boundary_gains, awb_gain_profile
from .bench import BenchResult, bench
from .blend import (
    BlendWeights,
    DomainError,
    blend_weights,
    full_width_weights,
    logistic_mod,
    logistic_standard,
    spatial_gain,
)
from .core import (
    AwbGains,
    BadDimensions,
    CameraFrame,
    DimensionMismatch,
    GtmLut,
    HarmonizeConfig,
    HarmonizeError,
    ImageBuffer,
    InsufficientCameras,
    NonMonotoneLut,
    NonPositiveAwbGain,
    RigConfig,
    ValidationError,
    to_uint8,
    validate_frame,
    validate_rig,
)
from .gct import (
    ChannelStats,
    CyclicPlan,
    EmptyRegion,
    GroundProjection,
    ReferencePlan,
    Region,
    RegionOutOfBounds,
    color_transfer,
    default_plan,
    lab_to_rgb,
    patch_stats,
    rgb_to_lab,
    run_gct_rig,
)
from .gtm import CorrectionLut, apply_gtm_half, average_lut, boundary_correction_lut, invert_lut
from .metrics import (
    SeamReport,
    boundary_disagreement,
    column_gains,
    gain_smoothness,
    psnr,
    seam_discontinuity,
    seam_report,
)
from .pipeline import HarmonizedRig, harmonize_camera, harmonize_pair, harmonize_rig
from .rigio import (
    IoError,
    MetadataRecord,
    MissingFile,
    RigIOError,
    SchemaError,
    read_image,
    read_metadata,
    read_rig,
    write_image,
    write_metadata,
    write_rig,
)
from .synth import BadSpec, CameraDistortion, SceneSpec, gamma_lut, generate_rig, generate_scene

__version__ = "0.1.0"
