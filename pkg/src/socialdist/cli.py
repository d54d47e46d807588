"""Command line interface wiring the engine and harness into batch runs.

Verbs:

  estimate      skeleton keypoint files -> per-image detection files
  evaluate      detection files + annotations -> metrics report and tables
  simulate      scene config or layout replay -> annotations + skeletons
  gt-distances  annotations -> ground-truth pairwise distances per image
  report        evaluation JSON -> markdown/CSV tables and data series

Exit codes: 0 success, 1 internal error, 2 input error.  A JSON config
file given with --config overrides the command line flags.  The
SOCIALDIST_DATA environment variable supplies the default annotation
directory.
"""

from __future__ import annotations

import argparse
import math
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import dataset as ds
from . import interchange, report as report_mod, simulator
from .errors import SocialDistError
from .evaluation import aggregate, image_error, match_detections
from .geometry import DEFAULT_CONFIDENCE_FLOOR, DEFAULT_PROPORTIONS_MM, BodyPart, CameraIntrinsics

ENV_DATA_DIR = "SOCIALDIST_DATA"

_SETTING_NAMES = {0: "outdoor", 1: "indoor"}


class InputError(SocialDistError):
    """User-facing input problem; maps to exit code 2."""


def _parse_proportions(spec: str | None) -> dict[BodyPart, float]:
    """Parse 'pupils=63,shoulders=389,torso=444' style overrides."""
    values = dict(DEFAULT_PROPORTIONS_MM)
    if not spec:
        return values
    for item in spec.split(","):
        if not item.strip():
            continue
        try:
            name, raw = item.split("=")
            part = BodyPart(name.strip().lower())
            length = float(raw)
        except (ValueError, KeyError):
            raise InputError(f"bad proportion override {item!r}")
        if length <= 0:
            raise InputError(f"proportion {part.value} must be positive")
        values[part] = length
    return values


def _setting_name(photoshoot_id: int) -> str:
    return _SETTING_NAMES.get(photoshoot_id, f"photoshoot-{photoshoot_id}")


def _fmt_focal(f: float) -> str:
    return f"{f:g}"


# --- estimate ---------------------------------------------------------------

def _estimate_one(job) -> tuple[str, dict, int]:
    path_str, cam, proportions, floor = job
    image_id, observations = interchange.load_skeletons(path_str)
    estimates, dropped = interchange.estimate_observations(
        observations, cam, proportions, floor)
    return image_id, interchange.detection_to_json(image_id, estimates), dropped


def cmd_estimate(args) -> int:
    skeleton_dir = Path(args.skeletons)
    out_dir = Path(args.out)
    intrinsics = ds.load_intrinsics(args.intrinsics)
    proportions = _parse_proportions(args.proportions)

    files = sorted(skeleton_dir.glob("*.json"))
    if not files:
        raise InputError(f"no skeleton files in {skeleton_dir}")

    jobs = []
    missing = []
    for path in files:
        image_id, _ = interchange.load_skeletons(path)
        if image_id not in intrinsics:
            missing.append(image_id)
            continue
        jobs.append((str(path), intrinsics[image_id], proportions,
                     args.confidence_floor))
    if missing:
        print("missing intrinsics for images:", file=sys.stderr)
        for image_id in missing:
            print(f"  {image_id}", file=sys.stderr)
        raise InputError(f"{len(missing)} image(s) lack intrinsics rows")

    results = _run_jobs(_estimate_one, jobs, args.jobs)

    out_dir.mkdir(parents=True, exist_ok=True)
    for image_id, doc, dropped in sorted(results, key=lambda r: r[0]):
        if dropped:
            print(f"warning: {image_id}: dropped {dropped} person(s) with no "
                  f"usable keypoint pair", file=sys.stderr)
        interchange.save_json(doc, out_dir / f"{Path(image_id).stem}.json")
    return 0


# --- evaluate ---------------------------------------------------------------

def _evaluate_one(job) -> dict:
    path_str, annotations, gt_pairs = job
    det = interchange.load_detection(path_str)
    match = match_detections(det, annotations)
    ev = image_error(det, match, gt_pairs)
    return ev


def cmd_evaluate(args) -> int:
    detections_dir = Path(args.detections)
    data = ds.load_dataset(_annotations_dir(args))
    out_dir = Path(args.out)

    files = sorted(detections_dir.glob("*.json"))
    if not files:
        raise InputError(f"no detection files in {detections_dir}")

    jobs = []
    for path in files:
        det = interchange.load_detection(path)
        if det.image_id not in data.images:
            raise InputError(
                f"detections for {det.image_id!r} but no such image in annotations")
        scene = data.scene_for(det.image_id)
        gt_pairs = ds.ground_truth_pairwise(scene, scene.people)
        jobs.append((str(path), data.annotations_for(det.image_id), gt_pairs))

    per_image = sorted(_run_jobs(_evaluate_one, jobs, args.jobs),
                       key=lambda ev: ev.image_id)

    dims = [d.strip() for d in args.group_by.split(",") if d.strip()]
    group_keys = {}
    for ev in per_image:
        rec = data.images[ev.image_id]
        labels = {
            "focal_length": _fmt_focal(rec.intrinsics.focal_length),
            "setting": _setting_name(rec.photoshoot_id),
            "camera": rec.camera_tag,
        }
        group_keys[ev.image_id] = {d: labels[d] for d in dims if d in labels}

    result = aggregate(per_image, group_keys)
    thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    doc = report_mod.evaluation_report(result, thresholds)

    out_dir.mkdir(parents=True, exist_ok=True)
    report_mod.save_report(doc, out_dir / "report.json")
    for dim in dims:
        report_mod.write_breakdown_csv({"method": doc}, dim, out_dir / f"{dim}.csv")
    report_mod.write_f1_csv(doc, out_dir / "f1.csv")

    overall = doc["overall"]
    err = "-" if overall["d_E"] is None else f"{overall['d_E']:.2f}"
    print(f"images={overall['n_images']} scored={overall['n_images_scored']} "
          f"detection_rate={overall['detection_rate']:.4f} "
          f"error_percent={err} "
          f"false_discovery_rate={overall['false_discovery_rate']:.4f}")
    return 0


# --- simulate ---------------------------------------------------------------

def _scene_from_config(doc: dict, seed_override=None) -> simulator.SceneOutput:
    try:
        intr = doc["intrinsics"]
        cam_doc = doc["camera"]
        intrinsics = CameraIntrinsics(
            focal_length=float(intr["focal_length_mm"]),
            sensor_width=float(intr.get("sensor_width_mm", 36.0)),
            sensor_height=float(intr.get("sensor_height_mm", 24.0)),
            image_width=int(intr.get("image_width_px", 4180)),
            image_height=int(intr.get("image_height_px", 2768)),
        )
        camera = simulator.SimCamera(
            position=tuple(float(c) for c in cam_doc["position_mm"]),
            yaw_deg=float(cam_doc.get("yaw_deg", 0.0)),
            pitch_deg=float(cam_doc.get("pitch_deg", 0.0)),
            intrinsics=intrinsics,
        )
        people = [
            simulator.SimPerson(
                position=tuple(float(c) for c in p["position_mm"]),
                theta_deg=float(p.get("theta_deg", 0.0)),
                posture=simulator.Posture(p.get("posture", "standing")),
            )
            for p in doc["people"]
        ]
        seed = int(doc.get("seed", 0)) if seed_override is None else seed_override
        return simulator.synthesize_scene(
            people, camera,
            noise_px=float(doc.get("noise_px", 0.0)),
            seed=seed,
            image_id=doc.get("image", "sim_0000.jpg"),
            photoshoot_id=int(doc.get("photoshoot", 0)),
            camera_tag=cam_doc.get("tag", "C0"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad scene config: {exc}")


def _write_scene_outputs(outputs, out_dir: Path) -> None:
    """Annotation CSVs plus one skeleton file per simulated image.

    Merges into an existing simulated dataset in the output directory, so
    repeated invocations compose one benchmark; a re-simulated image id
    replaces its earlier rows.
    """
    ann_dir = out_dir / "annotations"
    skel_dir = out_dir / "skeletons"
    skel_dir.mkdir(parents=True, exist_ok=True)

    scenes: dict[int, dict[str, dict]] = {}
    images: dict[str, ds.ImageRecord] = {}
    annotations: dict[str, list] = {}
    if (ann_dir / ds.IMAGES_FILE).is_file():
        existing = ds.load_dataset(ann_dir)
        for scene in existing.scenes.values():
            scenes[scene.photoshoot_id] = {"people": dict(scene.people),
                                           "cameras": dict(scene.cameras)}
        images.update(existing.images)
        annotations.update({img: list(anns)
                            for img, anns in existing.annotations.items()})

    def register(bucket, tag, pos_cm, kind, shoot_id):
        known = bucket.setdefault(tag, pos_cm)
        if any(not math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-6)
               for a, b in zip(known, pos_cm)):
            raise InputError(f"{kind} {tag} moved within photoshoot {shoot_id}")

    for out in outputs:
        shoot = scenes.setdefault(out.photoshoot_id, {"people": {}, "cameras": {}})
        for tag, pos in out.people_positions_mm.items():
            register(shoot["people"], tag,
                     tuple(c / ds.CM_TO_MM for c in pos), "person",
                     out.photoshoot_id)
        cam_pos = out.camera.position
        register(shoot["cameras"], out.camera_tag,
                 (cam_pos[0] / ds.CM_TO_MM, cam_pos[1] / ds.CM_TO_MM,
                  (cam_pos[2] - simulator.TRIPOD_HEIGHT_MM) / ds.CM_TO_MM),
                 "camera", out.photoshoot_id)
        images[out.image_id] = ds.ImageRecord(out.image_id, out.photoshoot_id,
                                              out.camera_tag, out.camera.intrinsics)
        annotations[out.image_id] = list(out.annotations)
        interchange.save_json(
            interchange.skeletons_to_json(out.image_id,
                                          [obs for _, obs in out.observations]),
            skel_dir / f"{Path(out.image_id).stem}.json")

    scene_objs = [
        ds.GroundTruthScene(photoshoot_id=shoot_id, people=body["people"],
                            cameras=body["cameras"])
        for shoot_id, body in sorted(scenes.items())
    ]
    ds.write_dataset(ann_dir, scenes=scene_objs, images=list(images.values()),
                     annotations=[a for anns in annotations.values() for a in anns])


def cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    outputs = []

    if args.scene_config:
        doc = json.loads(Path(args.scene_config).read_text(encoding="utf-8"))
        scenes = doc["scenes"] if "scenes" in doc else [doc]
        for scene_doc in scenes:
            outputs.append(_scene_from_config(scene_doc, args.seed))
    else:
        if args.photoshoot is None or args.camera is None or not args.focal:
            raise InputError("replay needs --photoshoot, --camera and --focal "
                             "(or use --scene-config)")
        data = ds.load_dataset(_annotations_dir(args))
        if args.photoshoot not in data.scenes:
            raise InputError(f"no photoshoot {args.photoshoot} in annotations")
        scene = data.scenes[args.photoshoot]
        posture = simulator.Posture.SITTING if args.photoshoot == 1 \
            else simulator.Posture.STANDING
        if args.posture:
            posture = simulator.Posture(args.posture)
        for focal in (float(f) for f in args.focal.split(",")):
            intrinsics = CameraIntrinsics(
                focal_length=focal, sensor_width=36.0, sensor_height=24.0,
                image_width=args.image_width, image_height=args.image_height)
            outputs.append(simulator.replay_benchmark_layout(
                scene, args.camera, intrinsics, posture=posture,
                pitch_deg=args.pitch, aim_tag=args.aim,
                noise_px=args.noise_px,
                seed=0 if args.seed is None else args.seed))

    _write_scene_outputs(outputs, out_dir)
    print(f"wrote {len(outputs)} simulated image(s) to {out_dir}")
    return 0


# --- gt-distances -----------------------------------------------------------

def cmd_gt_distances(args) -> int:
    data = ds.load_dataset(_annotations_dir(args))
    doc = {}
    for image_id in sorted(data.images):
        present = data.people_in(image_id)
        pairs = ds.ground_truth_pairwise(data.scene_for(image_id), present)
        doc[image_id] = {f"{a}-{b}": mm for (a, b), mm in sorted(pairs.items())}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# --- report -----------------------------------------------------------------

def cmd_report(args) -> int:
    reports = {}
    for item in args.evaluation:
        if "=" in item:
            label, path = item.split("=", 1)
        else:
            path = item
            label = Path(path).stem
        reports[label] = report_mod.load_report(path)
    if not reports:
        raise InputError("no evaluation inputs")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.md").write_text(report_mod.render_markdown(reports),
                                       encoding="utf-8")
    for dim in ("focal_length", "setting", "camera"):
        if any(r.get("breakdowns", {}).get(dim) for r in reports.values()):
            report_mod.write_breakdown_csv(reports, dim, out_dir / f"{dim}.csv")
    for label, doc in reports.items():
        report_mod.write_f1_csv(doc, out_dir / f"f1_{label}.csv")
        report_mod.write_series_csv(doc, out_dir / f"error_vs_distance_{label}.csv")
    print(f"wrote report tables to {out_dir}")
    return 0


# --- plumbing ---------------------------------------------------------------

def _run_jobs(fn, jobs, n_jobs):
    if n_jobs and n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def _annotations_dir(args) -> Path:
    path = args.annotations or os.environ.get(ENV_DATA_DIR)
    if not path:
        raise InputError(
            f"annotation directory required (--annotations or ${ENV_DATA_DIR})")
    return Path(path)


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Values from --config replace flag values (config wins)."""
    if not getattr(args, "config", None):
        return args
    doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise InputError(f"unknown config key {key!r}")
        setattr(args, attr, value)
    return args


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socialdist",
        description="Social distance estimation engine and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; overrides flags")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for per-image work")

    p = sub.add_parser("estimate", help="estimate 3D locations from skeletons")
    add_common(p)
    p.add_argument("--skeletons", required=True, help="directory of skeleton JSON files")
    p.add_argument("--intrinsics", required=True, help="intrinsics sidecar CSV")
    p.add_argument("--proportions",
                   help="override body lengths, e.g. pupils=63,shoulders=389,torso=444")
    p.add_argument("--confidence-floor", type=float, default=DEFAULT_CONFIDENCE_FLOOR)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("evaluate", help="score detections against the benchmark")
    add_common(p)
    p.add_argument("--detections", required=True)
    p.add_argument("--annotations", help=f"annotation dir (default ${ENV_DATA_DIR})")
    p.add_argument("--group-by", default="focal_length,setting,camera")
    p.add_argument("--thresholds", default="1000,1500,2000,3000",
                   help="safe-distance thresholds in mm for the F1 table")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("simulate", help="synthesize scenes or replay layouts")
    add_common(p)
    p.add_argument("--scene-config", help="scene description JSON")
    p.add_argument("--annotations", help="annotation dir for layout replay")
    p.add_argument("--photoshoot", type=int)
    p.add_argument("--camera")
    p.add_argument("--focal", help="focal length(s) in mm, comma separated")
    p.add_argument("--image-width", type=int, default=4180)
    p.add_argument("--image-height", type=int, default=2768)
    p.add_argument("--posture", choices=[po.value for po in simulator.Posture])
    p.add_argument("--pitch", type=float, default=0.0)
    p.add_argument("--aim", help="person tag to center instead of the centroid")
    p.add_argument("--noise-px", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("gt-distances", help="ground-truth pairwise distances per image")
    add_common(p)
    p.add_argument("--annotations")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gt_distances)

    p = sub.add_parser("report", help="render tables from evaluation JSON")
    add_common(p)
    p.add_argument("--evaluation", action="append", required=True,
                   help="evaluation JSON path, optionally label=path; repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SocialDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected: internal error
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
