"""On-disk JSON formats linking detectors, the estimator, and the harness.

Two document kinds exist, one file per image each:

Skeleton file (produced by a pose-estimation adapter or the simulator):

    {"image": "IMG_0001.jpg",
     "people": [{"keypoints": [[u, v, confidence], ... 25 entries]}]}

Detection file (produced by the estimator, consumed by the evaluator):

    {"image": "IMG_0001.jpg",
     "persons": [{"anchors": {"Torso": [u, v], ...},
                  "location_mm": [X, Y, Z]}],
     "distances_mm": {"0-1": 2350.0}}

``location_mm`` may be omitted when ``distances_mm`` carries the full
pairwise map instead.  Extra keys (``chosen_part``, ``per_part_mm``) are
informational and ignored by the evaluator.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .errors import MalformedDetection, NoUsableKeypoints, ParseError
from .evaluation import DetectedPerson, DetectionInput
from .geometry import (
    DEFAULT_CONFIDENCE_FLOOR,
    BodyPart,
    CameraIntrinsics,
    PersonEstimate,
    SkeletonObservation,
    WorldPoint,
    estimate_person,
    pairwise_distance,
)


def skeletons_to_json(image_id: str,
                      observations: Sequence[SkeletonObservation]) -> dict:
    return {
        "image": image_id,
        "people": [{"keypoints": [list(kp) for kp in obs.keypoints]}
                   for obs in observations],
    }


def skeletons_from_json(doc: dict, path="<memory>") -> tuple[str, list[SkeletonObservation]]:
    try:
        image_id = doc["image"]
        people = [
            SkeletonObservation(tuple(tuple(float(c) for c in kp)
                                      for kp in person["keypoints"]))
            for person in doc["people"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, 0, f"bad skeleton document: {exc}")
    return image_id, people


def load_skeletons(path) -> tuple[str, list[SkeletonObservation]]:
    path = Path(path)
    return skeletons_from_json(json.loads(path.read_text(encoding="utf-8")), path)


def save_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _pair_key(i: int, j: int) -> str:
    return f"{i}-{j}"


def detection_to_json(image_id: str, estimates: Sequence[PersonEstimate]) -> dict:
    """Detection document for estimated persons, locations and distances both."""
    persons = []
    for est in estimates:
        persons.append({
            "anchors": {part: [u, v] for part, (u, v) in sorted(est.anchors.items())},
            "location_mm": [est.location.x, est.location.y, est.location.z],
            "chosen_part": est.chosen_part.value,
            "per_part_mm": {part.value: [w.x, w.y, w.z]
                            for part, w in est.per_part_estimates},
        })
    distances = {}
    for i in range(len(estimates)):
        for j in range(i + 1, len(estimates)):
            distances[_pair_key(i, j)] = pairwise_distance(
                estimates[i].location, estimates[j].location)
    return {"image": image_id, "persons": persons, "distances_mm": distances}


def detection_from_json(doc: dict, path="<memory>") -> DetectionInput:
    """Parse a detection document.

    Locations take precedence when every person carries one; otherwise the
    distance map must be present and complete.
    """
    try:
        image_id = doc["image"]
        raw_persons = doc.get("persons", [])
        persons = []
        locations_complete = len(raw_persons) > 0
        for person in raw_persons:
            anchors = {part: (float(p[0]), float(p[1]))
                       for part, p in person.get("anchors", {}).items()}
            loc = person.get("location_mm")
            location = WorldPoint(*map(float, loc)) if loc is not None else None
            if location is None:
                locations_complete = False
            persons.append(DetectedPerson(anchors=anchors, location=location))
    except MalformedDetection:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, 0, f"bad detection document: {exc}")

    if locations_complete:
        return DetectionInput(image_id=image_id, persons=tuple(persons))

    raw_distances = doc.get("distances_mm")
    if raw_distances is None and persons:
        raise MalformedDetection(
            f"{image_id}: persons lack locations and no distances_mm map given")
    distances = {}
    for key, value in (raw_distances or {}).items():
        i, j = (int(part) for part in key.split("-"))
        if i > j:
            i, j = j, i
        distances[(i, j)] = float(value)
    persons_no_loc = tuple(DetectedPerson(anchors=p.anchors) for p in persons)
    return DetectionInput(image_id=image_id, persons=persons_no_loc,
                          distances=distances if persons else None)


def load_detection(path) -> DetectionInput:
    path = Path(path)
    return detection_from_json(json.loads(path.read_text(encoding="utf-8")), path)


def estimate_observations(observations: Sequence[SkeletonObservation],
                          cam: CameraIntrinsics,
                          proportions: Optional[Mapping[BodyPart, float]] = None,
                          confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR
                          ) -> tuple[list[PersonEstimate], int]:
    """Estimate every rangeable person; returns (estimates, dropped count)."""
    estimates = []
    dropped = 0
    for obs in observations:
        try:
            estimates.append(estimate_person(obs, cam, proportions, confidence_floor))
        except NoUsableKeypoints:
            dropped += 1
    return estimates, dropped
