#!/usr/bin/env python3
"""End-to-end harness demo on the bundled benchmark layouts.

Replays both photoshoots through every camera at 50 mm (optionally with
keypoint noise), runs the estimator, evaluates against the replayed
annotations, and renders the report tables.  Exercises the same CLI verbs
a user would chain together:

    simulate -> estimate -> evaluate -> report

Usage: python3 scripts/replay_eval.py [--out DIR] [--noise-px F] [--seed N]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from socialdist.cli import main as cli

BENCHMARK = Path(__file__).resolve().parents[1] / "data" / "benchmark"
CAMERAS = {0: ["C0", "C1", "C2"], 1: ["C0", "C1", "C2", "C3"]}


def run(argv) -> None:
    argv = [str(a) for a in argv]
    code = cli(argv)
    if code != 0:
        raise SystemExit(f"command failed ({code}): {' '.join(argv)}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/replay")
    parser.add_argument("--noise-px", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = Path(args.out)

    sim_dir = out / "sim"
    for shoot, cameras in CAMERAS.items():
        for camera in cameras:
            run(["simulate", "--annotations", BENCHMARK,
                 "--photoshoot", shoot, "--camera", camera, "--focal", "50",
                 "--noise-px", args.noise_px, "--seed", args.seed,
                 "--out", sim_dir])

    det_dir = out / "detections"
    run(["estimate", "--skeletons", sim_dir / "skeletons",
         "--intrinsics", sim_dir / "annotations" / "intrinsics.csv",
         "--out", det_dir])

    eval_dir = out / "evaluation"
    run(["evaluate", "--detections", det_dir,
         "--annotations", sim_dir / "annotations", "--out", eval_dir])

    run(["report", "--evaluation", f"replay={eval_dir / 'report.json'}",
         "--out", out / "tables"])
    print(f"full replay evaluation under {out}")


if __name__ == "__main__":
    main()
