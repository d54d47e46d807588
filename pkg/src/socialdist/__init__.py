"""Social distance estimation from single-image body keypoints, plus the
benchmark harness that scores any such estimator against annotated
ground-truth layouts."""

from .geometry import (
    BodyPart,
    BodyProportion,
    CameraIntrinsics,
    PersonEstimate,
    SensorPoint,
    SkeletonObservation,
    WorldPoint,
    back_project,
    estimate_depth,
    estimate_person,
    image_pair_distance,
    pairwise_distance,
    pixel_to_sensor,
)
from .dataset import (
    BodyPartAnnotation,
    Dataset,
    GroundTruthScene,
    ImageRecord,
    ground_truth_pairwise,
    load_dataset,
    validate_extension,
)
from .evaluation import (
    DatasetEvaluation,
    DetectedPerson,
    DetectionInput,
    ImageEvaluation,
    MatchResult,
    aggregate,
    binary_classification,
    image_error,
    match_detections,
)
from .simulator import (
    Posture,
    SimCamera,
    SimPerson,
    replay_benchmark_layout,
    synthesize_scene,
)

__version__ = "0.1.0"
