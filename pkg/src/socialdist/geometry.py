"""Pinhole-model person location estimation from body keypoint pairs.

A person is ranged by comparing the pixel length of a keypoint pair whose
real-world length is assumed known (pupil spacing, shoulder width, torso
length) with its metric length on the camera sensor.  All world quantities
are millimeters; the camera sits at the origin looking down the negative
z axis, so every point in front of the camera has z < 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import DegeneratePair, InvalidPixel, NoUsableKeypoints


class BodyPart(enum.Enum):
    """Keypoint pairs with a usable average adult length."""

    PUPILS = "pupils"
    SHOULDERS = "shoulders"
    TORSO = "torso"


# 25-keypoint skeleton indices of each pair's endpoints.
PAIR_KEYPOINTS: Mapping[BodyPart, tuple[int, int]] = {
    BodyPart.PUPILS: (15, 16),
    BodyPart.SHOULDERS: (2, 5),
    BodyPart.TORSO: (1, 8),
}

# Annotation-file part names the benchmark matches on.
ANCHOR_NAMES: Mapping[BodyPart, str] = {
    BodyPart.PUPILS: "Eyes",
    BodyPart.SHOULDERS: "Shoulder",
    BodyPart.TORSO: "Torso",
}

# Average adult body proportions, millimeters.
DEFAULT_PROPORTIONS_MM: Mapping[BodyPart, float] = {
    BodyPart.PUPILS: 63.0,
    BodyPart.SHOULDERS: 389.0,
    BodyPart.TORSO: 444.0,
}

# Tie-break order when per-part depths agree: the torso is the most
# orientation-robust yardstick, pupils the least.
SELECTION_PRIORITY: Sequence[BodyPart] = (
    BodyPart.TORSO,
    BodyPart.SHOULDERS,
    BodyPart.PUPILS,
)

DEFAULT_CONFIDENCE_FLOOR = 0.1

# Per-part depths that agree to this relative tolerance are treated as tied
# and resolved by SELECTION_PRIORITY; depths of an unrotated person are
# mathematically equal and differ only by floating-point rounding.
_DEPTH_TIE_RTOL = 1e-9

N_KEYPOINTS = 25


@dataclass(frozen=True)
class CameraIntrinsics:
    """Focal length and sensor/image geometry needed to meter pixels.

    Sensor and image aspect ratios are allowed to differ; conversions use
    an independent scale per axis.
    """

    focal_length: float  # mm
    sensor_width: float  # mm
    sensor_height: float  # mm
    image_width: int  # px
    image_height: int  # px

    def __post_init__(self):
        for name in ("focal_length", "sensor_width", "sensor_height",
                     "image_width", "image_height"):
            if getattr(self, name) <= 0:
                raise ValueError(f"intrinsics field {name} must be positive")

@dataclass(frozen=True)
class SensorPoint:
    """Metric point on the sensor plane, origin at the sensor center, y up."""

    x_a: float  # mm
    y_a: float  # mm


@dataclass(frozen=True)
class WorldPoint:
    """Camera-frame 3D point in millimeters; z < 0 in front of the camera."""

    x: float
    y: float
    z: float

    @property
    def depth(self) -> float:
        """Distance along the optical axis (positive in front)."""
        return -self.z


@dataclass(frozen=True)
class BodyProportion:
    part: BodyPart
    world_length: float  # mm

    def __post_init__(self):
        if self.world_length <= 0:
            raise ValueError("body proportion must be positive")


@dataclass(frozen=True)
class KeypointPairObservation:
    """Both endpoints of one ranging pair, in pixel coordinates."""

    part: BodyPart
    p0: tuple[float, float]
    p1: tuple[float, float]
    confidence: float = 1.0


@dataclass(frozen=True)
class SkeletonObservation:
    """One detected person: 25 keypoints as (u, v, confidence) triples.

    Missing keypoints follow the usual pose-estimator convention of
    (0, 0, 0); the confidence floor filters them out.
    """

    keypoints: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.keypoints) != N_KEYPOINTS:
            raise ValueError(f"expected {N_KEYPOINTS} keypoints, got {len(self.keypoints)}")

    def pair(self, part: BodyPart, confidence_floor: float,
             cam: Optional[CameraIntrinsics] = None) -> Optional[KeypointPairObservation]:
        """Return the ranging pair for `part`, or None if unusable.

        Both endpoints must reach the confidence floor and, when `cam` is
        given, lie inside the image bounds.
        """
        i, j = PAIR_KEYPOINTS[part]
        u0, v0, c0 = self.keypoints[i]
        u1, v1, c1 = self.keypoints[j]
        if c0 < confidence_floor or c1 < confidence_floor:
            return None
        if cam is not None:
            for u, v in ((u0, v0), (u1, v1)):
                if not (0 <= u < cam.image_width and 0 <= v < cam.image_height):
                    return None
        return KeypointPairObservation(part, (u0, v0), (u1, v1), min(c0, c1))

    def single_endpoint(self, part: BodyPart,
                        confidence_floor: float) -> Optional[tuple[float, float]]:
        """The one visible endpoint of a pair, if exactly one is visible."""
        i, j = PAIR_KEYPOINTS[part]
        u0, v0, c0 = self.keypoints[i]
        u1, v1, c1 = self.keypoints[j]
        ok0 = c0 >= confidence_floor
        ok1 = c1 >= confidence_floor
        if ok0 == ok1:
            return None
        return (u0, v0) if ok0 else (u1, v1)


@dataclass(frozen=True)
class PersonEstimate:
    """Estimated 3D location of one person plus matching anchors.

    `location` is the world-coordinate midpoint of the chosen keypoint
    pair; `anchors` holds the pixel midpoints used by the benchmark to
    match this detection against annotated people.
    """

    location: WorldPoint
    chosen_part: BodyPart
    anchors: Mapping[str, tuple[float, float]]
    per_part_estimates: tuple[tuple[BodyPart, WorldPoint], ...] = field(default=())

    def depth_of(self, part: BodyPart) -> float:
        for p, w in self.per_part_estimates:
            if p == part:
                return w.depth
        raise KeyError(part)


def pixel_to_sensor(p: tuple[float, float], cam: CameraIntrinsics) -> SensorPoint:
    """Map an image pixel to the metric sensor plane.

    Pixel origin is the top-left corner, sensor origin the sensor center
    with y pointing up.
    """
    u, v = p
    if not (0 <= u < cam.image_width and 0 <= v < cam.image_height):
        raise InvalidPixel(f"pixel ({u}, {v}) outside {cam.image_width}x{cam.image_height}")
    x_a = (u - cam.image_width / 2.0) * cam.sensor_width / cam.image_width
    y_a = (cam.image_height / 2.0 - v) * cam.sensor_height / cam.image_height
    return SensorPoint(x_a, y_a)


def sensor_to_pixel(s: SensorPoint, cam: CameraIntrinsics) -> tuple[float, float]:
    """Inverse of pixel_to_sensor; may fall outside the image bounds."""
    u = s.x_a * cam.image_width / cam.sensor_width + cam.image_width / 2.0
    v = cam.image_height / 2.0 - s.y_a * cam.image_height / cam.sensor_height
    return (u, v)


def image_pair_distance(p0: SensorPoint, p1: SensorPoint) -> float:
    """Metric distance between two sensor-plane points (both share z = f)."""
    return math.hypot(p0.x_a - p1.x_a, p0.y_a - p1.y_a)


def estimate_depth(d_image: float, cam: CameraIntrinsics,
                   proportion: BodyProportion) -> float:
    """Depth of a keypoint pair from its sensor-plane length.

    Triangle similarity of the pinhole model: the pair's world length is
    to its distance from the camera as its sensor length is to the focal
    length.  Assumes the pair is parallel to the sensor plane; violations
    shrink d_image and inflate the result.
    """
    if d_image <= 0:
        raise DegeneratePair(f"image pair length {d_image} mm cannot be ranged")
    return cam.focal_length * proportion.world_length / d_image


def back_project(s: SensorPoint, d: float, cam: CameraIntrinsics) -> WorldPoint:
    """Lift a sensor point at known depth into camera-frame coordinates."""
    if d <= 0:
        raise ValueError("depth must be positive")
    scale = -d / cam.focal_length
    return WorldPoint(scale * s.x_a, scale * s.y_a, -d)


def pairwise_distance(a: WorldPoint, b: WorldPoint) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def _pixel_midpoint(p0: tuple[float, float], p1: tuple[float, float]) -> tuple[float, float]:
    return ((p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0)


def estimate_person(obs: SkeletonObservation, cam: CameraIntrinsics,
                    proportions: Optional[Mapping[BodyPart, float]] = None,
                    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR) -> PersonEstimate:
    """Estimate one person's 3D location from their skeleton keypoints.

    Every usable pair yields a candidate location (the pair's world
    midpoint); the candidate nearest the camera wins, since violated
    parallel-plane assumptions only ever push estimates farther away.
    A pair with a single visible endpoint cannot be ranged but still
    contributes a matching anchor (pupils and shoulders only, where one
    endpoint approximates the pair center on a sideways person).

    Raises NoUsableKeypoints when no pair can be ranged.
    """
    if proportions is None:
        proportions = DEFAULT_PROPORTIONS_MM

    anchors: dict[str, tuple[float, float]] = {}
    candidates: list[tuple[BodyPart, WorldPoint]] = []

    for part in SELECTION_PRIORITY:
        if part not in proportions:
            continue
        pair = obs.pair(part, confidence_floor, cam)
        if pair is None:
            if part in (BodyPart.PUPILS, BodyPart.SHOULDERS):
                single = obs.single_endpoint(part, confidence_floor)
                if single is not None and 0 <= single[0] < cam.image_width \
                        and 0 <= single[1] < cam.image_height:
                    anchors[ANCHOR_NAMES[part]] = single
            continue
        s0 = pixel_to_sensor(pair.p0, cam)
        s1 = pixel_to_sensor(pair.p1, cam)
        d_image = image_pair_distance(s0, s1)
        if d_image <= 0:
            continue
        d = estimate_depth(d_image, cam, BodyProportion(part, proportions[part]))
        mid = SensorPoint((s0.x_a + s1.x_a) / 2.0, (s0.y_a + s1.y_a) / 2.0)
        candidates.append((part, back_project(mid, d, cam)))
        anchors[ANCHOR_NAMES[part]] = _pixel_midpoint(pair.p0, pair.p1)

    if not candidates:
        raise NoUsableKeypoints("no keypoint pair passes the confidence/visibility gate")

    best_depth = min(w.depth for _, w in candidates)
    tie_band = best_depth * (1.0 + _DEPTH_TIE_RTOL)
    chosen_part, location = next(
        (part, w) for part, w in candidates if w.depth <= tie_band
    )

    return PersonEstimate(
        location=location,
        chosen_part=chosen_part,
        anchors=anchors,
        per_part_estimates=tuple(candidates),
    )
