"""Benchmark annotation files: parsing, validation, and ground-truth math.

A dataset directory holds four CSV files:

  body_parts.csv  image,person,part,x,y          pixel anchors per person
  locations.csv   photoshoot,tag,x,y[,z]         people/camera positions, cm
  images.csv      image,photoshoot,camera        image bookkeeping
  intrinsics.csv  image,focal_length_mm,sensor_width_mm,sensor_height_mm,
                  image_width_px,image_height_px

Positions are stored in centimeters (converted to millimeters at the
evaluation boundary); a missing z column means the ground plane.  An
optional ``header_aliases.json`` in the directory maps nonstandard column
names onto the canonical ones, so externally produced files need not be
rewritten.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DanglingReference, MissingAnnotationFile, ParseError
from .geometry import CameraIntrinsics

PART_NAMES = ("Eyes", "Shoulder", "Torso", "Head")

PERSON_TAG_RE = re.compile(r"^P\d+$")
CAMERA_TAG_RE = re.compile(r"^C\d+$")

BODY_PARTS_FILE = "body_parts.csv"
LOCATIONS_FILE = "locations.csv"
IMAGES_FILE = "images.csv"
INTRINSICS_FILE = "intrinsics.csv"
ALIASES_FILE = "header_aliases.json"

DEFAULT_SENSOR_MM = (36.0, 24.0)

CM_TO_MM = 10.0


@dataclass(frozen=True)
class BodyPartAnnotation:
    image_id: str
    person_tag: str
    part: str
    u: float
    v: float


@dataclass(frozen=True)
class GroundTruthScene:
    photoshoot_id: int
    people: Mapping[str, tuple[float, float, float]]  # cm
    cameras: Mapping[str, tuple[float, float, float]]  # cm


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    photoshoot_id: int
    camera_tag: str
    intrinsics: CameraIntrinsics


@dataclass(frozen=True)
class Dataset:
    images: Mapping[str, ImageRecord]
    scenes: Mapping[int, GroundTruthScene]
    annotations: Mapping[str, tuple[BodyPartAnnotation, ...]]

    def annotations_for(self, image_id: str) -> tuple[BodyPartAnnotation, ...]:
        return self.annotations.get(image_id, ())

    def scene_for(self, image_id: str) -> GroundTruthScene:
        return self.scenes[self.images[image_id].photoshoot_id]

    def people_in(self, image_id: str) -> tuple[str, ...]:
        """Person tags with at least one annotation in the image, sorted."""
        return tuple(sorted({a.person_tag for a in self.annotations_for(image_id)}))


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    row: Optional[int] = None


def _read_rows(path: Path, required: Sequence[str],
               optional: Sequence[str] = (),
               aliases: Optional[Mapping[str, str]] = None) -> list[dict]:
    """Read a CSV into dicts keyed by canonical column names.

    ``aliases`` maps actual header names in the file to canonical ones.
    Rows are tagged with their 1-based line number under ``_line``.
    """
    if not path.is_file():
        raise MissingAnnotationFile(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(path, 1, "missing header row")
        rename = dict(aliases or {})
        header = [rename.get(name, name) for name in reader.fieldnames]
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(path, 1, f"missing columns {missing} in header {header}")
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            row = {canon: raw.get(orig)
                   for orig, canon in zip(reader.fieldnames, header)
                   if canon in required or canon in optional}
            row["_line"] = line_no
            rows.append(row)
        return rows


def _parse_float(row: dict, key: str, path: Path):
    value = row.get(key)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(path, row["_line"], f"column {key!r}: not a number: {value!r}")


def _parse_int(row: dict, key: str, path: Path):
    value = row.get(key)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(path, row["_line"], f"column {key!r}: not an integer: {value!r}")


def _load_aliases(annotation_dir: Path,
                  aliases: Optional[Mapping[str, Mapping[str, str]]]) -> Mapping[str, Mapping[str, str]]:
    if aliases is not None:
        return aliases
    path = annotation_dir / ALIASES_FILE
    if path.is_file():
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return {}


def load_intrinsics(path, aliases: Optional[Mapping[str, str]] = None) -> dict[str, CameraIntrinsics]:
    """Read a standalone intrinsics sidecar CSV into an image lookup."""
    return _load_intrinsics(Path(path), aliases)


def load_dataset(annotation_dir, aliases: Optional[Mapping[str, Mapping[str, str]]] = None) -> Dataset:
    """Load and cross-validate the four-file annotation directory.

    Every annotation must reference an image from images.csv, every image a
    camera present in its photoshoot scene, and every annotated person a
    person of that scene; violations raise DanglingReference.
    """
    annotation_dir = Path(annotation_dir)
    aliases = _load_aliases(annotation_dir, aliases)

    scenes = _load_scenes(annotation_dir / LOCATIONS_FILE,
                          aliases.get(LOCATIONS_FILE))
    intrinsics = _load_intrinsics(annotation_dir / INTRINSICS_FILE,
                                  aliases.get(INTRINSICS_FILE))
    images = _load_images(annotation_dir / IMAGES_FILE,
                          aliases.get(IMAGES_FILE), scenes, intrinsics)
    annotations = _load_annotations(annotation_dir / BODY_PARTS_FILE,
                                    aliases.get(BODY_PARTS_FILE), images, scenes)
    return Dataset(images=images, scenes=scenes, annotations=annotations)


def _load_scenes(path: Path, aliases) -> dict[int, GroundTruthScene]:
    rows = _read_rows(path, required=("photoshoot", "tag", "x", "y"),
                      optional=("z",), aliases=aliases)
    people: dict[int, dict] = {}
    cameras: dict[int, dict] = {}
    for row in rows:
        shoot = _parse_int(row, "photoshoot", path)
        tag = (row.get("tag") or "").strip()
        x = _parse_float(row, "x", path)
        y = _parse_float(row, "y", path)
        z = float(row["z"]) if row.get("z") not in (None, "") else 0.0
        if PERSON_TAG_RE.match(tag):
            bucket = people
        elif CAMERA_TAG_RE.match(tag):
            bucket = cameras
        else:
            raise ParseError(path, row["_line"], f"bad tag {tag!r}")
        shoot_bucket = bucket.setdefault(shoot, {})
        if tag in shoot_bucket:
            raise ParseError(path, row["_line"],
                             f"duplicate tag {tag!r} in photoshoot {shoot}")
        shoot_bucket[tag] = (x, y, z)
    shoots = set(people) | set(cameras)
    return {
        shoot: GroundTruthScene(photoshoot_id=shoot,
                                people=dict(people.get(shoot, {})),
                                cameras=dict(cameras.get(shoot, {})))
        for shoot in sorted(shoots)
    }


def _load_intrinsics(path: Path, aliases) -> dict[str, CameraIntrinsics]:
    required = ("image", "focal_length_mm", "image_width_px", "image_height_px")
    optional = ("sensor_width_mm", "sensor_height_mm")
    rows = _read_rows(path, required=required, optional=optional, aliases=aliases)
    out: dict[str, CameraIntrinsics] = {}
    for row in rows:
        image = (row.get("image") or "").strip()
        if not image:
            raise ParseError(path, row["_line"], "empty image id")
        sw = float(row["sensor_width_mm"]) if row.get("sensor_width_mm") not in (None, "") \
            else DEFAULT_SENSOR_MM[0]
        sh = float(row["sensor_height_mm"]) if row.get("sensor_height_mm") not in (None, "") \
            else DEFAULT_SENSOR_MM[1]
        try:
            cam = CameraIntrinsics(
                focal_length=_parse_float(row, "focal_length_mm", path),
                sensor_width=sw,
                sensor_height=sh,
                image_width=_parse_int(row, "image_width_px", path),
                image_height=_parse_int(row, "image_height_px", path),
            )
        except ValueError as exc:
            raise ParseError(path, row["_line"], str(exc))
        out[image] = cam
    return out


def _load_images(path: Path, aliases, scenes, intrinsics) -> dict[str, ImageRecord]:
    rows = _read_rows(path, required=("image", "photoshoot", "camera"), aliases=aliases)
    out: dict[str, ImageRecord] = {}
    for row in rows:
        image = (row.get("image") or "").strip()
        shoot = _parse_int(row, "photoshoot", path)
        camera = (row.get("camera") or "").strip()
        if image in out:
            raise ParseError(path, row["_line"], f"duplicate image {image!r}")
        if shoot not in scenes:
            raise DanglingReference(shoot, f"photoshoot of image {image}")
        if camera not in scenes[shoot].cameras:
            raise DanglingReference(camera, f"camera of image {image}")
        if image not in intrinsics:
            raise DanglingReference(image, "no intrinsics row for image")
        out[image] = ImageRecord(image, shoot, camera, intrinsics[image])
    return out


def _load_annotations(path: Path, aliases, images, scenes):
    rows = _read_rows(path, required=("image", "person", "part", "x", "y"),
                      aliases=aliases)
    out: dict[str, list[BodyPartAnnotation]] = {}
    seen: set[tuple[str, str, str]] = set()
    for row in rows:
        image = (row.get("image") or "").strip()
        person = (row.get("person") or "").strip()
        part = (row.get("part") or "").strip()
        if part not in PART_NAMES:
            raise ParseError(path, row["_line"],
                             f"unknown body part {part!r}; expected one of {PART_NAMES}")
        if not PERSON_TAG_RE.match(person):
            raise ParseError(path, row["_line"], f"bad person tag {person!r}")
        if image not in images:
            raise DanglingReference(image, "annotation for unknown image")
        scene = scenes[images[image].photoshoot_id]
        if person not in scene.people:
            raise DanglingReference(person, f"annotation in image {image}")
        key = (image, person, part)
        if key in seen:
            raise ParseError(path, row["_line"],
                             f"duplicate annotation for {key}")
        seen.add(key)
        out.setdefault(image, []).append(BodyPartAnnotation(
            image_id=image, person_tag=person, part=part,
            u=_parse_float(row, "x", path), v=_parse_float(row, "y", path)))
    return {image: tuple(anns) for image, anns in out.items()}


def ground_truth_pairwise(scene: GroundTruthScene,
                          present: Iterable[str]) -> dict[tuple[str, str], float]:
    """Pairwise distances in millimeters among `present` people of a scene.

    Keys are tag pairs sorted ascending; the camera entries never enter the
    computation (elevated cameras do not affect person-to-person distances).
    """
    tags = sorted(set(present))
    for tag in tags:
        if tag not in scene.people:
            raise DanglingReference(tag, f"photoshoot {scene.photoshoot_id}")
    out: dict[tuple[str, str], float] = {}
    for a, b in combinations(tags, 2):
        pa, pb = scene.people[a], scene.people[b]
        out[(a, b)] = CM_TO_MM * math.dist(pa, pb)
    return out


def validate_extension(new_rows: Iterable[Mapping[str, str]],
                       dataset: Optional[Dataset] = None) -> list[Violation]:
    """Check candidate body-part annotation rows against the format rules.

    Violations are returned as data rather than raised, so a curation tool
    can report all of them at once.  Rows are mappings with the canonical
    body_parts.csv columns (image, person, part, x, y).
    """
    violations: list[Violation] = []
    seen: set[tuple[str, str, str]] = set()
    if dataset is not None:
        for anns in dataset.annotations.values():
            for a in anns:
                seen.add((a.image_id, a.person_tag, a.part))

    for idx, row in enumerate(new_rows):
        image = (row.get("image") or "").strip()
        person = (row.get("person") or "").strip()
        part = (row.get("part") or "").strip()
        if part not in PART_NAMES:
            violations.append(Violation(
                "NamingRule", f"part {part!r} is not one of {PART_NAMES}", idx))
        if not PERSON_TAG_RE.match(person):
            violations.append(Violation(
                "TagFormat", f"person tag {person!r} must match P<int>", idx))
        for key in ("x", "y"):
            try:
                float(row.get(key, ""))
            except (TypeError, ValueError):
                violations.append(Violation(
                    "ValueFormat", f"column {key!r} is not numeric", idx))
        dup_key = (image, person, part)
        if dup_key in seen:
            violations.append(Violation(
                "DuplicateAnnotation",
                f"second annotation for {dup_key}", idx))
        seen.add(dup_key)
        if dataset is not None and image in dataset.images:
            scene = dataset.scenes[dataset.images[image].photoshoot_id]
            if PERSON_TAG_RE.match(person) and person not in scene.people:
                violations.append(Violation(
                    "PhotoshootConsistency",
                    f"person {person!r} absent from photoshoot "
                    f"{scene.photoshoot_id}", idx))
    return violations


def write_dataset(annotation_dir, *,
                  scenes: Sequence[GroundTruthScene],
                  images: Sequence[ImageRecord],
                  annotations: Sequence[BodyPartAnnotation]) -> None:
    """Write the four canonical CSV files (deterministic row order)."""
    annotation_dir = Path(annotation_dir)
    annotation_dir.mkdir(parents=True, exist_ok=True)

    with open(annotation_dir / LOCATIONS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["photoshoot", "tag", "x", "y", "z"])
        for scene in sorted(scenes, key=lambda s: s.photoshoot_id):
            entries = [(tag, p) for tag, p in scene.people.items()]
            entries += [(tag, p) for tag, p in scene.cameras.items()]
            for tag, (x, y, z) in sorted(entries):
                w.writerow([scene.photoshoot_id, tag, _fmt(x), _fmt(y), _fmt(z)])

    with open(annotation_dir / IMAGES_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["image", "photoshoot", "camera"])
        for rec in sorted(images, key=lambda r: r.image_id):
            w.writerow([rec.image_id, rec.photoshoot_id, rec.camera_tag])

    with open(annotation_dir / INTRINSICS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["image", "focal_length_mm", "sensor_width_mm",
                    "sensor_height_mm", "image_width_px", "image_height_px"])
        for rec in sorted(images, key=lambda r: r.image_id):
            cam = rec.intrinsics
            w.writerow([rec.image_id, _fmt(cam.focal_length), _fmt(cam.sensor_width),
                        _fmt(cam.sensor_height), cam.image_width, cam.image_height])

    with open(annotation_dir / BODY_PARTS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["image", "person", "part", "x", "y"])
        for a in sorted(annotations, key=lambda a: (a.image_id, a.person_tag, a.part)):
            w.writerow([a.image_id, a.person_tag, a.part, _fmt(a.u), _fmt(a.v)])


def _fmt(value: float) -> str:
    """Compact numeric formatting: integers without a trailing .0."""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))
