import math
from pathlib import Path

import pytest

from socialdist.geometry import CameraIntrinsics, SensorPoint

REPO_ROOT = Path(__file__).resolve().parents[1]
BENCHMARK_DIR = REPO_ROOT / "data" / "benchmark"


@pytest.fixture(scope="session")
def benchmark_dir() -> Path:
    assert BENCHMARK_DIR.is_dir(), "run scripts/make_benchmark.py first"
    return BENCHMARK_DIR


@pytest.fixture()
def cam50() -> CameraIntrinsics:
    return CameraIntrinsics(focal_length=50.0, sensor_width=36.0,
                            sensor_height=24.0, image_width=4180,
                            image_height=2768)


def oracle_project(world, cam: CameraIntrinsics) -> tuple[float, float]:
    """Independent forward projection used as the test oracle.

    Straight similar-triangle arithmetic from camera-frame coordinates
    (z < 0 in front) to pixels; deliberately no reuse of library code.
    """
    x, y, z = world
    assert z < 0, "oracle only projects points in front of the camera"
    x_a = cam.focal_length * x / z
    y_a = cam.focal_length * y / z
    u = x_a * cam.image_width / cam.sensor_width + cam.image_width / 2.0
    v = cam.image_height / 2.0 - y_a * cam.image_height / cam.sensor_height
    return (u, v)


def oracle_sensor(world, cam: CameraIntrinsics) -> SensorPoint:
    x, y, z = world
    return SensorPoint(cam.focal_length * x / z, cam.focal_length * y / z)


def oracle_image_length(world_length, depth, focal) -> float:
    """Similar triangles: sensor-plane length of a sensor-parallel segment."""
    return focal * world_length / depth


def keypoints_for_person(center, cam: CameraIntrinsics, *,
                         theta_deg: float = 0.0,
                         parts=("pupils", "shoulders", "torso"),
                         pupil_mm: float = 63.0, shoulder_mm: float = 389.0,
                         torso_mm: float = 444.0):
    """25-keypoint tuple for a synthetic person built with the oracle.

    The person is described directly in camera-frame millimeters with
    `center` at the torso midpoint; horizontal pairs sit parallel to the
    sensor plane, foreshortened by cos(theta).
    """
    cx, cy, cz = center
    shrink = math.cos(math.radians(theta_deg))
    kps = [(0.0, 0.0, 0.0)] * 25

    def put(idx, world):
        kps[idx] = (*oracle_project(world, cam), 1.0)

    if "torso" in parts:
        put(1, (cx, cy + torso_mm / 2.0, cz))
        put(8, (cx, cy - torso_mm / 2.0, cz))
    if "shoulders" in parts:
        half = shoulder_mm * shrink / 2.0
        put(2, (cx - half, cy + torso_mm / 2.0, cz))
        put(5, (cx + half, cy + torso_mm / 2.0, cz))
    if "pupils" in parts:
        half = pupil_mm * shrink / 2.0
        put(15, (cx - half, cy + torso_mm / 2.0 + 230.0, cz))
        put(16, (cx + half, cy + torso_mm / 2.0 + 230.0, cz))
    return tuple(kps)
