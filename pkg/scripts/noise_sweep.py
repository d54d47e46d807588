#!/usr/bin/env python3
"""Sweep keypoint noise and orientation angle; write error curves as CSV.

Two experiments on a fixed three-person scene at 50 mm:

  noise_sweep.csv   mean/min/max per-image error over seeds, per noise level
  theta_sweep.csv   exact error of shoulder-only ranging per orientation angle

Usage: python3 scripts/noise_sweep.py [--out DIR] [--seeds N]
"""

from __future__ import annotations

import argparse
import csv
import math
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from socialdist.evaluation import image_error, match_detections
from socialdist.geometry import BodyPart, CameraIntrinsics
from socialdist.interchange import (
    detection_from_json,
    detection_to_json,
    estimate_observations,
)
from socialdist.simulator import SimCamera, SimPerson, synthesize_scene

CAM = CameraIntrinsics(50.0, 36.0, 24.0, 4180, 2768)
PEOPLE = [SimPerson((-900.0, 5200.0, 0.0)),
          SimPerson((350.0, 6100.0, 0.0)),
          SimPerson((1200.0, 5600.0, 0.0))]
CAMERA = SimCamera((0.0, 0.0, 1350.0), 0.0, 0.0, CAM)

NOISE_LEVELS = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0]
THETAS = list(range(0, 85, 5))


def scene_error(people, noise_px, seed, annotations=None, proportions=None):
    scene = synthesize_scene(people, CAMERA, noise_px=noise_px, seed=seed)
    ests, _ = estimate_observations([o for _, o in scene.observations],
                                    CAM, proportions)
    det = detection_from_json(detection_to_json(scene.image_id, ests))
    match = match_detections(det, annotations if annotations is not None
                             else scene.annotations)
    return image_error(det, match, scene.gt_distances).d_e


def sweep_noise(out_path: Path, n_seeds: int) -> None:
    base = synthesize_scene(PEOPLE, CAMERA)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["noise_px", "mean_error_percent", "min_error_percent",
                    "max_error_percent", "n_seeds"])
        for noise in NOISE_LEVELS:
            errors = [scene_error(PEOPLE, noise, seed, base.annotations)
                      for seed in range(n_seeds)]
            w.writerow([noise, statistics.mean(errors), min(errors),
                        max(errors), n_seeds])
    print(f"wrote {out_path}")


def sweep_theta(out_path: Path) -> None:
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["theta_deg", "error_percent", "inverse_cosine_law_percent"])
        for theta in THETAS:
            people = [SimPerson(p.position, theta_deg=float(theta))
                      for p in PEOPLE]
            err = scene_error(people, 0.0, 0,
                              proportions={BodyPart.SHOULDERS: 389.0})
            law = (1.0 / math.cos(math.radians(theta)) - 1.0) * 100.0
            w.writerow([theta, err, law])
    print(f"wrote {out_path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/sweeps")
    parser.add_argument("--seeds", type=int, default=100)
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_noise(out_dir / "noise_sweep.csv", args.seeds)
    sweep_theta(out_dir / "theta_sweep.csv")


if __name__ == "__main__":
    main()
