"""Benchmark evaluation protocol: matching, error metrics, aggregation.

Detections are matched to annotated people by pixel distance between
same-name body-part anchors, greedily and without any distance threshold.
Matched people then contribute pairwise percentual distance errors which
are averaged per image and across images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .dataset import BodyPartAnnotation
from .errors import (
    DanglingReference,
    EmptyEvaluation,
    MalformedDetection,
    SocialDistError,
)
from .geometry import WorldPoint, pairwise_distance


@dataclass(frozen=True)
class DetectedPerson:
    """One detection: pixel anchors for matching, optional 3D location."""

    anchors: Mapping[str, tuple[float, float]]
    location: Optional[WorldPoint] = None

    def __post_init__(self):
        if not self.anchors:
            raise MalformedDetection("detection provides no body-part anchors")


@dataclass(frozen=True)
class DetectionInput:
    """A method's output for one image.

    Pair distances come either from per-person 3D locations or from an
    explicit distance map keyed by detection index pairs (i, j) with i < j;
    exactly one of the two must be supplied (unless there are no persons).
    """

    image_id: str
    persons: tuple[DetectedPerson, ...]
    distances: Optional[Mapping[tuple[int, int], float]] = None

    def __post_init__(self):
        if not self.persons:
            return
        have_locations = all(p.location is not None for p in self.persons)
        if have_locations == (self.distances is not None):
            raise MalformedDetection(
                "provide either locations for all persons or a distance map, not both")

    def estimated_distance(self, i: int, j: int) -> float:
        """Distance in mm between detections i and j."""
        if i > j:
            i, j = j, i
        if self.distances is not None:
            try:
                return self.distances[(i, j)]
            except KeyError:
                raise MalformedDetection(
                    f"distance map of {self.image_id} lacks pair ({i}, {j})")
        return pairwise_distance(self.persons[i].location, self.persons[j].location)


@dataclass(frozen=True)
class MatchResult:
    matches: Mapping[int, str]  # detection index -> person tag
    false_positives: frozenset[int]
    n_ground_truth: int


@dataclass(frozen=True)
class PairError:
    tags: tuple[str, str]
    estimated_mm: float
    ground_truth_mm: float
    signed_percent: float

    @property
    def abs_percent(self) -> float:
        return abs(self.signed_percent)


@dataclass(frozen=True)
class ImageEvaluation:
    image_id: str
    n_matched: int
    n_ground_truth: int
    n_false_positive: int
    d_e: Optional[float]  # percent; None with fewer than 2 matches
    pair_errors: tuple[PairError, ...] = field(default=())


@dataclass(frozen=True)
class ClassificationScores:
    threshold_mm: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class DatasetEvaluation:
    d_E: Optional[float]
    detection_rate: float
    false_discovery_rate: float
    n_images: int
    n_images_scored: int
    per_image: tuple[ImageEvaluation, ...]
    breakdowns: Mapping[str, Mapping[str, "DatasetEvaluation"]] = field(default_factory=dict)


def anchor_signature(person: DetectedPerson) -> tuple:
    """Order-independent identity of a detection's anchors, for tie-breaks."""
    return tuple(sorted((part, u, v) for part, (u, v) in person.anchors.items()))


def _candidate_distances(persons: Sequence[DetectedPerson],
                         annotations: Sequence[BodyPartAnnotation]):
    """All comparable (distance, person_tag, signature, index) candidates.

    A detection's distance to an annotated person is the minimum over the
    parts both sides provide of the same-part pixel distance.
    """
    by_person: dict[str, dict[str, tuple[float, float]]] = {}
    for a in annotations:
        by_person.setdefault(a.person_tag, {})[a.part] = (a.u, a.v)

    triples = []
    for det_idx, person in enumerate(persons):
        if not person.anchors:
            raise MalformedDetection(f"detection {det_idx} has no anchors")
        for tag, parts in by_person.items():
            best = None
            for part, (u, v) in person.anchors.items():
                if part not in parts:
                    continue
                au, av = parts[part]
                dist = math.hypot(u - au, v - av)
                if best is None or dist < best:
                    best = dist
            if best is not None:
                triples.append((best, tag, anchor_signature(person), det_idx))
    return triples, set(by_person)


def match_detections(det: DetectionInput,
                     annotations: Sequence[BodyPartAnnotation]) -> MatchResult:
    """Greedy thresholdless assignment of detections to annotated people.

    The globally closest anchor/annotation pair is matched first and both
    sides retire; remaining detections then compete for the remaining
    people.  There is no distance cutoff, so a lone detection always
    matches a lone person.  Detections left over are false positives only
    when detections outnumber the annotated people; otherwise they are
    merely unmatched.  Ties break on (person_tag, anchor signature), which
    keeps the result independent of detection input order.
    """
    triples, people = _candidate_distances(det.persons, annotations)
    triples.sort()

    matches: dict[int, str] = {}
    taken_people: set[str] = set()
    for dist, tag, _sig, det_idx in triples:
        if det_idx in matches or tag in taken_people:
            continue
        matches[det_idx] = tag
        taken_people.add(tag)

    unassigned = [i for i in range(len(det.persons)) if i not in matches]
    if len(det.persons) > len(people):
        false_positives = frozenset(unassigned)
    else:
        false_positives = frozenset()
    return MatchResult(matches=dict(matches), false_positives=false_positives,
                       n_ground_truth=len(people))


def image_error(det: DetectionInput, match: MatchResult,
                gt_pairs: Mapping[tuple[str, str], float]) -> ImageEvaluation:
    """Per-image pairwise percentual distance error over matched people.

    The error of a pair is |estimated - truth| / truth * 100; the image
    score averages over all pairs of matched detections.  The signed value
    is retained per pair for error-versus-distance analysis.  Images with
    fewer than two matches carry no score.
    """
    indices = sorted(match.matches)
    pair_errors: list[PairError] = []
    for i, j in combinations(indices, 2):
        tag_i, tag_j = match.matches[i], match.matches[j]
        key = (tag_i, tag_j) if tag_i <= tag_j else (tag_j, tag_i)
        if key not in gt_pairs:
            raise DanglingReference(key, f"ground-truth pair of image {det.image_id}")
        gt = gt_pairs[key]
        if gt <= 0:
            raise SocialDistError(
                f"ground-truth pair {key} of image {det.image_id} has zero "
                f"distance; percentual error is undefined")
        est = det.estimated_distance(i, j)
        pair_errors.append(PairError(
            tags=key, estimated_mm=est, ground_truth_mm=gt,
            signed_percent=(est - gt) / gt * 100.0))

    d_e = None
    if len(indices) >= 2:
        d_e = sum(p.abs_percent for p in pair_errors) / math.comb(len(indices), 2)

    return ImageEvaluation(
        image_id=det.image_id,
        n_matched=len(indices),
        n_ground_truth=match.n_ground_truth,
        n_false_positive=len(match.false_positives),
        d_e=d_e,
        pair_errors=tuple(pair_errors),
    )


def aggregate(per_image: Sequence[ImageEvaluation],
              group_keys: Optional[Mapping[str, Mapping[str, str]]] = None
              ) -> DatasetEvaluation:
    """Dataset-level metrics from per-image evaluations.

    The overall error averages the per-image errors of scored images only
    (images with fewer than two matches are excluded from the mean, not
    counted as zero).  Detection rate averages matched/annotated per image;
    false discovery rate averages FP/(matched+FP), taking 0 for images
    without detections.  ``group_keys`` maps image ids to dimension/value
    labels (e.g. focal length) and yields one nested aggregate per value.
    """
    if not per_image:
        raise EmptyEvaluation("no per-image evaluations to aggregate")

    scored = [ev.d_e for ev in per_image if ev.d_e is not None]
    d_E = sum(scored) / len(scored) if scored else None

    rates = [ev.n_matched / ev.n_ground_truth
             for ev in per_image if ev.n_ground_truth > 0]
    detection_rate = sum(rates) / len(rates) if rates else 0.0

    fdrs = []
    for ev in per_image:
        n_det = ev.n_matched + ev.n_false_positive
        fdrs.append(ev.n_false_positive / n_det if n_det > 0 else 0.0)
    false_discovery_rate = sum(fdrs) / len(fdrs)

    breakdowns: dict[str, dict[str, DatasetEvaluation]] = {}
    if group_keys:
        dims: dict[str, dict[str, list[ImageEvaluation]]] = {}
        for ev in per_image:
            labels = group_keys.get(ev.image_id, {})
            for dim, value in labels.items():
                dims.setdefault(dim, {}).setdefault(str(value), []).append(ev)
        for dim, groups in dims.items():
            breakdowns[dim] = {
                value: aggregate(evs) for value, evs in sorted(groups.items())
            }

    return DatasetEvaluation(
        d_E=d_E,
        detection_rate=detection_rate,
        false_discovery_rate=false_discovery_rate,
        n_images=len(per_image),
        n_images_scored=len(scored),
        per_image=tuple(per_image),
        breakdowns=breakdowns,
    )


def binary_classification(per_image: Iterable[ImageEvaluation],
                          threshold_mm: float) -> ClassificationScores:
    """Safe/unsafe classification scores over all matched pairs.

    A pair below the threshold is "unsafe", the positive class.  F1 is 0
    when precision or recall is undefined.
    """
    if threshold_mm <= 0:
        raise ValueError("threshold must be positive")
    tp = fp = fn = tn = 0
    for ev in per_image:
        for pair in ev.pair_errors:
            est_unsafe = pair.estimated_mm < threshold_mm
            gt_unsafe = pair.ground_truth_mm < threshold_mm
            if est_unsafe and gt_unsafe:
                tp += 1
            elif est_unsafe and not gt_unsafe:
                fp += 1
            elif not est_unsafe and gt_unsafe:
                fn += 1
            else:
                tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassificationScores(threshold_mm=threshold_mm, precision=precision,
                                recall=recall, f1=f1, tp=tp, fp=fp, fn=fn, tn=tn)
