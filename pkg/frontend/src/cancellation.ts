import { intersectionArea } from "./boxes.js";
import { BoundingBoxGroup, Rect, Skeleton } from "./types.js";

/**
 * Mutual false-positive cancellation between the box detector and the
 * pose estimator: a skeleton survives only if it sits inside one of the
 * person box groups, and a group survives only if it produced at least
 * one skeleton.  Cropped bicycles yield no skeleton; backpack skeletons
 * fall outside every person box.  Both disappear here.
 */

const MIN_CONTAINMENT = 0.5;

export function skeletonBounds(skeleton: Skeleton): Rect | null {
  const visible = skeleton.keypoints.filter(([, , c]) => c > 0);
  if (visible.length === 0) return null;
  const xs = visible.map(([u]) => u);
  const ys = visible.map(([, v]) => v);
  const x = Math.min(...xs);
  const y = Math.min(...ys);
  return { x, y, width: Math.max(...xs) - x, height: Math.max(...ys) - y };
}

/** At least half the skeleton's bounding rectangle must lie in the crop. */
export function skeletonInsideGroup(skeleton: Skeleton, group: BoundingBoxGroup): boolean {
  const bounds = skeletonBounds(skeleton);
  if (bounds === null) return false;
  const area = Math.max(bounds.width * bounds.height, 1e-9);
  return intersectionArea(bounds, group.unionCrop) / area >= MIN_CONTAINMENT;
}

export interface CancellationResult {
  skeletons: Skeleton[];
  groups: BoundingBoxGroup[];
  droppedSkeletons: number;
  droppedGroups: number;
}

export function cancelFalsePositives(
  skeletons: Skeleton[],
  groups: BoundingBoxGroup[],
): CancellationResult {
  const keptSkeletons: Skeleton[] = [];
  const groupHits = new Array(groups.length).fill(0);
  for (const skeleton of skeletons) {
    const idx = groups.findIndex((g) => skeletonInsideGroup(skeleton, g));
    if (idx >= 0) {
      groupHits[idx] += 1;
      keptSkeletons.push(skeleton);
    }
  }
  const keptGroups = groups.filter((_, i) => groupHits[i] > 0);
  return {
    skeletons: keptSkeletons,
    groups: keptGroups,
    droppedSkeletons: skeletons.length - keptSkeletons.length,
    droppedGroups: groups.length - keptGroups.length,
  };
}
