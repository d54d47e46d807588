import { describe, expect, it } from "vitest";

import { clampRect, groupBoxes, overlaps, unionRect } from "../src/boxes.js";
import { Box } from "../src/types.js";

const box = (x: number, y: number, w: number, h: number, score = 0.9): Box => ({
  x,
  y,
  width: w,
  height: h,
  score,
});

describe("overlaps", () => {
  it("detects any positive intersection", () => {
    expect(overlaps(box(0, 0, 10, 10), box(9, 9, 10, 10))).toBe(true);
  });

  it("treats shared edges as non-overlapping", () => {
    expect(overlaps(box(0, 0, 10, 10), box(10, 0, 10, 10))).toBe(false);
  });

  it("rejects disjoint boxes", () => {
    expect(overlaps(box(0, 0, 5, 5), box(50, 50, 5, 5))).toBe(false);
  });
});

describe("groupBoxes", () => {
  it("keeps disjoint boxes in separate groups", () => {
    const groups = groupBoxes([box(0, 0, 10, 10), box(100, 0, 10, 10)]);
    expect(groups).toHaveLength(2);
    expect(groups[0].boxes).toHaveLength(1);
  });

  it("merges two overlapping boxes into one union crop", () => {
    const groups = groupBoxes([box(0, 0, 10, 10), box(5, 5, 10, 10)]);
    expect(groups).toHaveLength(1);
    expect(groups[0].unionCrop).toEqual({ x: 0, y: 0, width: 15, height: 15 });
  });

  it("chains transitive overlaps into one component", () => {
    const groups = groupBoxes([
      box(0, 0, 10, 10),
      box(8, 0, 10, 10),
      box(16, 0, 10, 10),
    ]);
    expect(groups).toHaveLength(1);
    expect(groups[0].boxes).toHaveLength(3);
  });

  it("handles an empty detection list", () => {
    expect(groupBoxes([])).toEqual([]);
  });
});

describe("rect utilities", () => {
  it("union spans all members", () => {
    expect(unionRect([box(0, 0, 5, 5), box(10, 10, 5, 5)])).toEqual({
      x: 0,
      y: 0,
      width: 15,
      height: 15,
    });
  });

  it("clamps to image bounds", () => {
    expect(clampRect({ x: -5, y: 2, width: 20, height: 20 }, 10, 10)).toEqual({
      x: 0,
      y: 2,
      width: 10,
      height: 8,
    });
  });
});
