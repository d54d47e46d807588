#!/usr/bin/env python3
"""Regenerate the bundled benchmark annotation files under data/benchmark.

The layouts mirror the published two-photoshoot test collection: an
outdoor shoot with six standing subjects (P0-P5) covered by two ground
cameras plus one balcony camera 230 cm up, and an indoor shoot with six
sitting subjects (P0-P4, P6) covered by four ground cameras.  Image
bookkeeping reproduces the published census: 96 images (63 outdoor, 33
indoor), the per-focal-length picture counts, and the two camera bodies
(36x24 mm sensors; the 200/300 mm body shoots 4080x2720, the rest
4180x2768).

Body-part pixel annotations are produced by projecting the layout through
each image's camera with the forward model, so the whole directory is
geometrically self-consistent and noiseless replays evaluate to zero
error.  Everything is deterministic; rerunning rewrites identical files.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from socialdist import dataset as ds
from socialdist.geometry import CameraIntrinsics
from socialdist.simulator import Posture, replay_benchmark_layout

OUT_DIR = Path(__file__).resolve().parents[1] / "data" / "benchmark"

# Site coordinates in centimeters, ground plane z=0.
OUTDOOR = ds.GroundTruthScene(
    photoshoot_id=0,
    people={
        "P0": (0.0, 0.0, 0.0),
        "P1": (120.0, 30.0, 0.0),
        "P2": (255.0, -30.0, 0.0),
        "P3": (70.0, 210.0, 0.0),
        "P4": (200.0, 180.0, 0.0),
        "P5": (-95.0, 140.0, 0.0),
    },
    cameras={
        "C0": (100.0, -600.0, 0.0),
        "C1": (-450.0, -350.0, 0.0),
        "C2": (120.0, -1250.0, 230.0),  # balcony
    },
)

INDOOR = ds.GroundTruthScene(
    photoshoot_id=1,
    people={
        "P0": (0.0, 0.0, 0.0),
        "P1": (120.0, 60.0, 0.0),
        "P2": (60.0, 180.0, 0.0),
        "P3": (-100.0, 150.0, 0.0),
        "P4": (220.0, 120.0, 0.0),
        "P6": (-60.0, -90.0, 0.0),
    },
    cameras={
        "C0": (-50.0, -550.0, 0.0),
        "C1": (420.0, -480.0, 0.0),
        "C2": (-450.0, -250.0, 0.0),
        "C3": (150.0, 750.0, 0.0),
    },
)

POSTURE = {0: Posture.STANDING, 1: Posture.SITTING}

# (photoshoot, camera) -> {focal mm: picture count}; sums to the published
# focal-length census and gives the balcony camera its 16 pictures.
ALLOCATION = {
    (0, "C0"): {16: 3, 24: 3, 35: 4, 50: 4, 105: 4, 200: 3, 300: 3},
    (0, "C1"): {16: 2, 24: 3, 35: 4, 50: 4, 105: 4, 200: 3, 300: 3},
    (0, "C2"): {16: 2, 24: 2, 35: 3, 50: 3, 105: 3, 200: 1, 300: 2},
    (1, "C0"): {16: 1, 24: 1, 35: 1, 50: 2, 105: 4},
    (1, "C1"): {16: 1, 24: 1, 35: 1, 50: 2, 105: 4},
    (1, "C2"): {16: 1, 24: 1, 35: 1, 50: 2, 105: 3},
    (1, "C3"): {16: 1, 24: 1, 35: 1, 50: 1, 105: 3},
}

# The long lenses belong to the second camera body.
RESOLUTION = {200: (4080, 2720), 300: (4080, 2720)}
DEFAULT_RESOLUTION = (4180, 2768)
SENSOR_MM = (36.0, 24.0)


def intrinsics_for(focal: float) -> CameraIntrinsics:
    width, height = RESOLUTION.get(focal, DEFAULT_RESOLUTION)
    return CameraIntrinsics(focal_length=float(focal), sensor_width=SENSOR_MM[0],
                            sensor_height=SENSOR_MM[1], image_width=width,
                            image_height=height)


def build():
    scenes = {0: OUTDOOR, 1: INDOOR}
    images, annotations = [], []
    counter = 0
    for (shoot_id, camera_tag), focals in sorted(ALLOCATION.items()):
        scene = scenes[shoot_id]
        for focal, count in sorted(focals.items()):
            for _ in range(count):
                counter += 1
                image_id = f"IMG_{counter:04d}.jpg"
                cam = intrinsics_for(focal)
                out = replay_benchmark_layout(scene, camera_tag, cam,
                                              posture=POSTURE[shoot_id],
                                              image_id=image_id)
                images.append(ds.ImageRecord(image_id, shoot_id, camera_tag, cam))
                annotations.extend(out.annotations)
    return scenes, images, annotations


def check(scenes, images, annotations):
    assert len(images) == 96, len(images)
    outdoor = [r for r in images if r.photoshoot_id == 0]
    indoor = [r for r in images if r.photoshoot_id == 1]
    assert (len(outdoor), len(indoor)) == (63, 33)

    focal_counts = {}
    for rec in images:
        key = (rec.intrinsics.focal_length, rec.photoshoot_id)
        focal_counts[key] = focal_counts.get(key, 0) + 1
    expected = {(16, 1): 4, (16, 0): 7, (24, 1): 4, (24, 0): 8,
                (35, 1): 4, (35, 0): 11, (50, 1): 7, (50, 0): 11,
                (105, 1): 14, (105, 0): 11, (200, 0): 7, (300, 0): 8}
    assert focal_counts == expected, focal_counts

    resolutions = {}
    for rec in images:
        key = (rec.intrinsics.image_width, rec.intrinsics.image_height)
        resolutions[key] = resolutions.get(key, 0) + 1
    assert resolutions == {(4180, 2768): 81, (4080, 2720): 15}, resolutions

    balcony = [r for r in outdoor if r.camera_tag == "C2"]
    assert len(balcony) == 16, len(balcony)

    # Every subject must be fully in frame from every camera at 50 mm so
    # that noiseless replays range everybody off the torso.
    cam50 = intrinsics_for(50)
    for scene in scenes.values():
        for camera_tag in scene.cameras:
            out = replay_benchmark_layout(scene, camera_tag, cam50,
                                          posture=POSTURE[scene.photoshoot_id])
            seen = {tag for tag, _ in out.observations}
            assert seen == set(scene.people), (scene.photoshoot_id, camera_tag, seen)
            by_person = {}
            for a in out.annotations:
                by_person.setdefault(a.person_tag, set()).add(a.part)
            for tag in scene.people:
                assert by_person.get(tag) == set(ds.PART_NAMES), \
                    (scene.photoshoot_id, camera_tag, tag, by_person.get(tag))


def main():
    scenes, images, annotations = build()
    check(scenes, images, annotations)
    ds.write_dataset(OUT_DIR, scenes=list(scenes.values()), images=images,
                     annotations=annotations)
    print(f"wrote {len(images)} image records and {len(annotations)} "
          f"annotation rows to {OUT_DIR}")


if __name__ == "__main__":
    main()
