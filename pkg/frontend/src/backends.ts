import { promises as fs } from "node:fs";

import { skeletonBounds } from "./cancellation.js";
import { intersectionArea } from "./boxes.js";
import { AdapterRuntimeError, Box, Rect, Skeleton } from "./types.js";

/**
 * Model backends behind narrow interfaces so the pipeline stays testable
 * without weights.  A real deployment plugs in an object detector fed the
 * image at `resizeFactor` scale with the configured square input size,
 * and a pose estimator run per crop; both report in their own coordinate
 * spaces and the pipeline maps back to original pixels.
 */

export interface DetectorBackend {
  /** Person boxes in the coordinates of the resized detector input. */
  detectPersons(imagePath: string, resizeFactor: number): Promise<Box[]>;
}

export interface PoseBackend {
  /** Skeletons for one crop, keypoints relative to the crop origin. */
  extractSkeletons(imagePath: string, crop: Rect): Promise<Skeleton[]>;
}

export interface AdapterBackends {
  detector: DetectorBackend;
  pose: PoseBackend;
}

interface FixtureDocument {
  boxes: [number, number, number, number, number][];
  skeletons: { keypoints: [number, number, number][] }[];
}

/**
 * Fixture backend: reads precomputed predictions from a sidecar JSON next
 * to each image (``<image>.predictions.json``) holding boxes and
 * skeletons in original-image coordinates.  It then re-encodes them the
 * way the real models would (boxes scaled to the resized input, skeleton
 * keypoints relative to the crop), so the pipeline's coordinate mapping
 * is exercised for real.
 */
export class FixtureBackend implements DetectorBackend, PoseBackend {
  constructor(private readonly suffix = ".predictions.json") {}

  private async load(imagePath: string): Promise<FixtureDocument> {
    const path = imagePath + this.suffix;
    try {
      return JSON.parse(await fs.readFile(path, "utf-8")) as FixtureDocument;
    } catch (err) {
      throw new AdapterRuntimeError(`fixture predictions missing: ${path}`);
    }
  }

  async detectPersons(imagePath: string, resizeFactor: number): Promise<Box[]> {
    const doc = await this.load(imagePath);
    return doc.boxes.map(([x, y, width, height, score]) => ({
      x: x * resizeFactor,
      y: y * resizeFactor,
      width: width * resizeFactor,
      height: height * resizeFactor,
      score,
    }));
  }

  async extractSkeletons(imagePath: string, crop: Rect): Promise<Skeleton[]> {
    const doc = await this.load(imagePath);
    const out: Skeleton[] = [];
    for (const person of doc.skeletons) {
      const skeleton: Skeleton = { keypoints: person.keypoints };
      const bounds = skeletonBounds(skeleton);
      if (bounds === null) continue;
      // a pose model sees anything reaching into the crop it is given,
      // including partial people at the crop edges
      if (intersectionArea(bounds, crop) <= 0) continue;
      out.push({
        keypoints: person.keypoints.map(([u, v, c]) =>
          c > 0 ? [u - crop.x, v - crop.y, c] : [0, 0, 0],
        ),
      });
    }
    return out;
  }
}

export function createBackends(name: string, fixtureSuffix?: string): AdapterBackends {
  if (name === "fixture") {
    const backend = new FixtureBackend(fixtureSuffix);
    return { detector: backend, pose: backend };
  }
  throw new AdapterRuntimeError(`unknown backend '${name}'`);
}
