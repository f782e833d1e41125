"""Multi-camera pedestrian localization on the ground plane.

Per-camera pose detections are turned into image ground points, projected to
the world ground plane with per-camera homographies, and fused across cameras
by partitioning a fusibility graph into cliques.
"""

from .errors import (
    CalibrationError,
    EmptyGrid,
    LengthMismatch,
    MissingDescriptor,
    PedfuseError,
    PlacementFailure,
    PointAtInfinity,
    SchemaError,
    SingularCalibration,
    ZeroGroundTruth,
    ZeroVector,
)
from .evaluation import GroundTruthFrame, MatchResult, MetricsReport, compute_metrics, hungarian_match
from .fusion import (
    CliqueCover,
    FusedDetection,
    FusionGraph,
    average_heatmap_fuse,
    build_fusion_graph,
    clique_cover,
    descriptor_distance,
    fuse,
    greedy_color_with_interchange,
    smallest_last_ordering,
)
from .geometry import (
    AreaOfInterest,
    CameraCalibration,
    GroundHomography,
    ImagePoint,
    WorldGroundPoint,
    compute_homography,
    filter_aoi,
    project_to_ground,
    project_to_image,
)
from .groundpoint import GroundPointEstimate, PoseDetection, estimate_ground_point, estimate_ground_point_bbox
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"
