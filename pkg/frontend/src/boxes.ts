import { BoundingBoxGroup, Box, Rect } from "./types.js";

/** Any positive intersection area counts as overlap. */
export function overlaps(a: Rect, b: Rect): boolean {
  const w = Math.min(a.x + a.width, b.x + b.width) - Math.max(a.x, b.x);
  const h = Math.min(a.y + a.height, b.y + b.height) - Math.max(a.y, b.y);
  return w > 0 && h > 0;
}

export function unionRect(rects: Rect[]): Rect {
  const x0 = Math.min(...rects.map((r) => r.x));
  const y0 = Math.min(...rects.map((r) => r.y));
  const x1 = Math.max(...rects.map((r) => r.x + r.width));
  const y1 = Math.max(...rects.map((r) => r.y + r.height));
  return { x: x0, y: y0, width: x1 - x0, height: y1 - y0 };
}

export function intersectionArea(a: Rect, b: Rect): number {
  const w = Math.min(a.x + a.width, b.x + b.width) - Math.max(a.x, b.x);
  const h = Math.min(a.y + a.height, b.y + b.height) - Math.max(a.y, b.y);
  return Math.max(0, w) * Math.max(0, h);
}

export function clampRect(r: Rect, width: number, height: number): Rect {
  const x = Math.max(0, Math.min(r.x, width));
  const y = Math.max(0, Math.min(r.y, height));
  const x1 = Math.max(0, Math.min(r.x + r.width, width));
  const y1 = Math.max(0, Math.min(r.y + r.height, height));
  return { x, y, width: x1 - x, height: y1 - y };
}

/**
 * Merge overlapping boxes into connected-component groups, each carrying
 * the union crop handed to the pose estimator.  Group order follows the
 * smallest member index, so output is deterministic in the input order.
 */
export function groupBoxes(boxes: Box[]): BoundingBoxGroup[] {
  const parent = boxes.map((_, i) => i);
  const find = (i: number): number => {
    while (parent[i] !== i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  const union = (a: number, b: number) => {
    parent[find(a)] = find(b);
  };

  for (let i = 0; i < boxes.length; i++) {
    for (let j = i + 1; j < boxes.length; j++) {
      if (overlaps(boxes[i], boxes[j])) union(i, j);
    }
  }

  const members = new Map<number, number[]>();
  boxes.forEach((_, i) => {
    const root = find(i);
    const list = members.get(root) ?? [];
    list.push(i);
    members.set(root, list);
  });

  return [...members.values()]
    .sort((a, b) => a[0] - b[0])
    .map((indices) => {
      const groupBoxes = indices.map((i) => boxes[i]);
      return { boxes: groupBoxes, unionCrop: unionRect(groupBoxes) };
    });
}
