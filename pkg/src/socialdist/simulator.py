"""Virtual photoshoots: exact forward projection of people through a pinhole.

The simulator places simplified skeletons (the six keypoints forming the
three ranging pairs, plus a head point for annotation) in a site frame
with x/y on the ground plane and z up, projects them through a positioned
camera, and emits the same artifacts a real shoot would produce: skeleton
observations, annotation rows, and ground-truth pairwise distances.  With
zero noise the output round-trips through the estimator exactly, which
makes generated scenes the reference oracle for the geometry and protocol
tests.

A person's orientation angle rotates their horizontal keypoint pairs away
from the sensor plane.  The rotation is modeled as pure foreshortening:
the pair stays parallel to the sensor plane while its world length shrinks
by cos(theta).  This keeps every projection exact, so the depth
overestimate of a rotated pair is exactly 1/cos(theta).  A physically
rotated segment would add second-order perspective terms that have no
closed form and would mask the effect under test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .dataset import CM_TO_MM, BodyPartAnnotation, GroundTruthScene
from .errors import DanglingReference, InvalidScene
from .geometry import (
    DEFAULT_PROPORTIONS_MM,
    N_KEYPOINTS,
    BodyPart,
    CameraIntrinsics,
    SensorPoint,
    SkeletonObservation,
    sensor_to_pixel,
)

TRIPOD_HEIGHT_MM = 1350.0


class Posture(enum.Enum):
    STANDING = "standing"
    SITTING = "sitting"


# Heights of the skeleton landmarks above the person's ground position, mm.
# Sitting folds the legs: the upper body keeps its shape 430 mm lower.
_STANDING_HEIGHTS = {"pupils": 1630.0, "neck": 1400.0, "head": 1700.0}
_SIT_DROP = 430.0

KEYPOINT_HEIGHTS_MM: Mapping[Posture, Mapping[str, float]] = {
    Posture.STANDING: dict(_STANDING_HEIGHTS),
    Posture.SITTING: {k: v - _SIT_DROP for k, v in _STANDING_HEIGHTS.items()},
}


@dataclass(frozen=True)
class SimPerson:
    """A test subject: ground position (mm), orientation, posture."""

    position: tuple[float, float, float]
    theta_deg: float = 0.0
    posture: Posture = Posture.STANDING
    proportions: Optional[Mapping[BodyPart, float]] = None

    def __post_init__(self):
        if not (0.0 <= self.theta_deg < 90.0):
            raise ValueError("orientation angle must be in [0, 90) degrees")

    def proportion(self, part: BodyPart) -> float:
        if self.proportions and part in self.proportions:
            return self.proportions[part]
        return DEFAULT_PROPORTIONS_MM[part]


@dataclass(frozen=True)
class SimCamera:
    """Camera pose in the site frame.

    Yaw 0 looks along +y, positive yaw turns toward +x; positive pitch
    points down.  The position is the optical center.
    """

    position: tuple[float, float, float]
    yaw_deg: float = 0.0
    pitch_deg: float = 0.0
    intrinsics: CameraIntrinsics = None

    def __post_init__(self):
        if self.intrinsics is None:
            raise ValueError("camera needs intrinsics")
        if not (-90.0 < self.pitch_deg < 90.0):
            raise ValueError("pitch must be in (-90, 90) degrees")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, up, forward) unit vectors in the site frame."""
        yaw = math.radians(self.yaw_deg)
        pitch = math.radians(self.pitch_deg)
        forward = np.array([math.sin(yaw) * math.cos(pitch),
                            math.cos(yaw) * math.cos(pitch),
                            -math.sin(pitch)])
        right = np.array([math.cos(yaw), -math.sin(yaw), 0.0])
        up = np.cross(-forward, right)
        return right, up, forward


@dataclass(frozen=True)
class SceneOutput:
    """Everything one simulated image contributes to a benchmark run."""

    image_id: str
    photoshoot_id: int
    camera_tag: str
    camera: SimCamera
    observations: tuple[tuple[str, SkeletonObservation], ...]
    annotations: tuple[BodyPartAnnotation, ...]
    gt_distances: Mapping[tuple[str, str], float]
    people_positions_mm: Mapping[str, tuple[float, float, float]]


def _project(point: np.ndarray, camera: SimCamera) -> tuple[float, float, float]:
    """Site-frame point -> (u, v, camera depth); raises behind the camera.

    Renders upright, the way cameras write image files: a point right of
    the optical axis lands right of the image center.  The physical
    sensor-plane inversion cancels against the readout flip, so the
    estimator's back projection recovers an isometric (mirrored) frame and
    every distance survives exactly.
    """
    right, up, forward = camera.basis()
    rel = point - np.asarray(camera.position, dtype=float)
    depth = float(rel @ forward)
    if depth <= 0:
        raise InvalidScene("point at or behind the camera plane")
    f = camera.intrinsics.focal_length
    x_a = f * float(rel @ right) / depth
    y_a = f * float(rel @ up) / depth
    u, v = sensor_to_pixel(SensorPoint(x_a, y_a), camera.intrinsics)
    return u, v, depth


def _in_frame(u: float, v: float, cam: CameraIntrinsics) -> bool:
    return 0 <= u < cam.image_width and 0 <= v < cam.image_height


def _person_landmarks(person: SimPerson, camera: SimCamera) -> dict[str, np.ndarray]:
    """Site-frame 3D positions of the six pair endpoints plus the head."""
    right, _, _ = camera.basis()
    pos = np.asarray(person.position, dtype=float)
    heights = KEYPOINT_HEIGHTS_MM[person.posture]
    shrink = math.cos(math.radians(person.theta_deg))
    z = np.array([0.0, 0.0, 1.0])

    def lateral_pair(height: float, length: float):
        mid = pos + height * z
        half = 0.5 * length * shrink * right
        return mid - half, mid + half

    eye_r, eye_l = lateral_pair(heights["pupils"], person.proportion(BodyPart.PUPILS))
    sho_r, sho_l = lateral_pair(heights["neck"], person.proportion(BodyPart.SHOULDERS))
    neck = pos + heights["neck"] * z
    hip = neck - person.proportion(BodyPart.TORSO) * z
    head = pos + heights["head"] * z
    return {"15": eye_r, "16": eye_l, "2": sho_r, "5": sho_l,
            "1": neck, "8": hip, "head": head}


_ANNOTATION_SOURCES = (
    ("Eyes", ("15", "16")),
    ("Shoulder", ("2", "5")),
    ("Torso", ("1", "8")),
    ("Head", ("head",)),
)


def synthesize_scene(people: Sequence[SimPerson], camera: SimCamera,
                     noise_px: float = 0.0, seed: int = 0,
                     image_id: str = "sim_0000.jpg", photoshoot_id: int = 0,
                     camera_tag: str = "C0",
                     tags: Optional[Sequence[str]] = None) -> SceneOutput:
    """Project a configured layout into one simulated image.

    Keypoints that land outside the image are occluded: their observation
    entries are zeroed and the affected annotation rows are dropped, the
    way a human annotator skips body parts cut off by the frame.  Gaussian
    pixel noise (seeded) perturbs the observed keypoints only; annotations
    and ground-truth distances stay exact.
    """
    cam = camera.intrinsics
    rng = np.random.default_rng(seed)
    if tags is None:
        tags_seq = [f"P{idx}" for idx in range(len(people))]
    else:
        if len(tags) != len(people):
            raise ValueError("one tag per person required")
        tags_seq = list(tags)

    observations: list[tuple[str, SkeletonObservation]] = []
    annotations: list[BodyPartAnnotation] = []
    positions: dict[str, tuple[float, float, float]] = {}

    for idx, person in enumerate(people):
        tag = tags_seq[idx]
        positions[tag] = tuple(float(c) for c in person.position)
        landmarks = _person_landmarks(person, camera)
        projected = {name: _project(point, camera)
                     for name, point in landmarks.items()}
        visible = {name: _in_frame(u, v, cam)
                   for name, (u, v, _) in projected.items()}

        keypoints = [(0.0, 0.0, 0.0)] * N_KEYPOINTS
        for name in ("15", "16", "2", "5", "1", "8"):
            u, v, _ = projected[name]
            if visible[name]:
                if noise_px > 0:
                    u += float(rng.normal(0.0, noise_px))
                    v += float(rng.normal(0.0, noise_px))
                keypoints[int(name)] = (u, v, 1.0)
        if any(c > 0 for _, _, c in keypoints):
            observations.append((tag, SkeletonObservation(tuple(keypoints))))

        for part, sources in _ANNOTATION_SOURCES:
            if not all(visible[s] for s in sources):
                continue
            us = [projected[s][0] for s in sources]
            vs = [projected[s][1] for s in sources]
            annotations.append(BodyPartAnnotation(
                image_id=image_id, person_tag=tag, part=part,
                u=sum(us) / len(us), v=sum(vs) / len(vs)))

    gt_distances: dict[tuple[str, str], float] = {}
    sorted_tags = sorted(positions)
    for i, a in enumerate(sorted_tags):
        for b in sorted_tags[i + 1:]:
            gt_distances[(a, b)] = math.dist(positions[a], positions[b])

    return SceneOutput(
        image_id=image_id,
        photoshoot_id=photoshoot_id,
        camera_tag=camera_tag,
        camera=camera,
        observations=tuple(observations),
        annotations=tuple(annotations),
        gt_distances=gt_distances,
        people_positions_mm=positions,
    )


def aim_at(camera_position: Sequence[float], target: Sequence[float]) -> float:
    """Yaw (degrees) turning the camera toward a site-frame target."""
    dx = target[0] - camera_position[0]
    dy = target[1] - camera_position[1]
    return math.degrees(math.atan2(dx, dy))


def pitch_toward(camera_position: Sequence[float], target: Sequence[float]) -> float:
    """Downward pitch (degrees) pointing the optical axis at a 3D target."""
    dx = target[0] - camera_position[0]
    dy = target[1] - camera_position[1]
    dz = target[2] - camera_position[2]
    return math.degrees(math.atan2(-dz, math.hypot(dx, dy)))


def replay_benchmark_layout(scene: GroundTruthScene, camera_tag: str,
                            intrinsics: CameraIntrinsics, *,
                            posture: Posture = Posture.STANDING,
                            pitch_deg: float = 0.0,
                            aim_tag: Optional[str] = None,
                            noise_px: float = 0.0, seed: int = 0,
                            image_id: Optional[str] = None,
                            tripod_height_mm: float = TRIPOD_HEIGHT_MM) -> SceneOutput:
    """Re-stage an annotated photoshoot layout as a synthetic image.

    People stand (or sit) on their measured ground-truth spots; the camera
    goes on its measured spot raised by the tripod height and is yawed
    toward the group centroid (or toward ``aim_tag``).  Useful for
    exercising the full pipeline against the published layouts without any
    real photographs.
    """
    if camera_tag not in scene.cameras:
        raise DanglingReference(camera_tag, f"photoshoot {scene.photoshoot_id}")

    people_tags = sorted(scene.people)
    if aim_tag is not None and aim_tag not in scene.people:
        raise DanglingReference(aim_tag, f"photoshoot {scene.photoshoot_id}")

    people = [SimPerson(position=tuple(CM_TO_MM * c for c in scene.people[tag]),
                        posture=posture)
              for tag in people_tags]

    cx, cy, cz = (CM_TO_MM * c for c in scene.cameras[camera_tag])
    cam_pos = (cx, cy, cz + tripod_height_mm)

    if aim_tag is not None:
        target = [CM_TO_MM * c for c in scene.people[aim_tag]]
    else:
        target = [sum(CM_TO_MM * scene.people[t][i] for t in people_tags) / len(people_tags)
                  for i in range(3)]
    yaw = aim_at(cam_pos, target)

    camera = SimCamera(position=cam_pos, yaw_deg=yaw, pitch_deg=pitch_deg,
                       intrinsics=intrinsics)
    if image_id is None:
        image_id = f"replay_{scene.photoshoot_id}_{camera_tag}_f{intrinsics.focal_length:g}.jpg"
    return synthesize_scene(people, camera, noise_px=noise_px, seed=seed,
                            image_id=image_id, photoshoot_id=scene.photoshoot_id,
                            camera_tag=camera_tag, tags=people_tags)
