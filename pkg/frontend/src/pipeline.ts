import { promises as fs } from "node:fs";
import * as path from "node:path";

import { AdapterBackends } from "./backends.js";
import { clampRect, groupBoxes } from "./boxes.js";
import { cancelFalsePositives } from "./cancellation.js";
import { readExif, isJpeg } from "./exif.js";
import { buildIntrinsicsRow, renderSidecars } from "./intrinsics.js";
import {
  AdapterInputError,
  BoundingBoxGroup,
  Box,
  IntrinsicsRow,
  Skeleton,
  rowComplete,
  toSkeletonDocument,
} from "./types.js";

export interface AdapterConfig {
  /** Images are shrunk by this factor before object detection. */
  resizeFactor: number;
  /** Square input size the detector network is configured with. */
  detectorInputPx: number;
  minBoxScore: number;
  sensorLookup?: Record<string, [number, number]>;
}

export const DEFAULT_CONFIG: AdapterConfig = {
  resizeFactor: 0.5,
  detectorInputPx: 704,
  minBoxScore: 0.25,
};

export interface AdaptedImage {
  image: string;
  skeletons: Skeleton[];
  groups: BoundingBoxGroup[];
  intrinsics: IntrinsicsRow;
  droppedSkeletons: number;
  droppedGroups: number;
}

/**
 * One image through the whole adapter: person boxes (scaled back to
 * original pixels and grouped by overlap), a pose pass per group crop
 * (keypoints mapped back from crop coordinates), mutual false-positive
 * cancellation, and an intrinsics row from the JPEG metadata.
 */
export async function adaptImage(
  imagePath: string,
  backends: AdapterBackends,
  config: AdapterConfig = DEFAULT_CONFIG,
): Promise<AdaptedImage> {
  const buffer = await fs.readFile(imagePath);
  if (!isJpeg(buffer)) {
    throw new AdapterInputError(`undecodable image: ${imagePath}`);
  }
  const exif = readExif(buffer);
  const image = path.basename(imagePath);
  const intrinsics = buildIntrinsicsRow(image, exif, config.sensorLookup);

  const resizedBoxes = await backends.detector.detectPersons(
    imagePath,
    config.resizeFactor,
  );
  const boxes: Box[] = resizedBoxes
    .filter((b) => b.score >= config.minBoxScore)
    .map((b) => ({
      x: b.x / config.resizeFactor,
      y: b.y / config.resizeFactor,
      width: b.width / config.resizeFactor,
      height: b.height / config.resizeFactor,
      score: b.score,
    }))
    .map((b) =>
      exif.imageWidthPx && exif.imageHeightPx
        ? { ...clampRect(b, exif.imageWidthPx, exif.imageHeightPx), score: b.score }
        : b,
    );

  const groups = groupBoxes(boxes);

  const skeletons: Skeleton[] = [];
  for (const group of groups) {
    const found = await backends.pose.extractSkeletons(imagePath, group.unionCrop);
    for (const skeleton of found) {
      skeletons.push({
        keypoints: skeleton.keypoints.map(([u, v, c]) =>
          c > 0 ? [u + group.unionCrop.x, v + group.unionCrop.y, c] : [0, 0, 0],
        ),
      });
    }
  }

  const result = cancelFalsePositives(skeletons, groups);
  return {
    image,
    skeletons: result.skeletons,
    groups: result.groups,
    intrinsics,
    droppedSkeletons: result.droppedSkeletons,
    droppedGroups: result.droppedGroups,
  };
}

export interface AdaptSummary {
  images: number;
  people: number;
  incompleteIntrinsics: string[];
}

/** Run the adapter over every JPEG in a directory and write the outputs. */
export async function adaptDirectory(
  imagesDir: string,
  outDir: string,
  backends: AdapterBackends,
  config: AdapterConfig = DEFAULT_CONFIG,
): Promise<AdaptSummary> {
  const entries = (await fs.readdir(imagesDir))
    .filter((name) => /\.jpe?g$/i.test(name))
    .sort();
  if (entries.length === 0) {
    throw new AdapterInputError(`no JPEG images in ${imagesDir}`);
  }
  await fs.mkdir(path.join(outDir, "skeletons"), { recursive: true });

  const rows: IntrinsicsRow[] = [];
  let people = 0;
  for (const name of entries) {
    const adapted = await adaptImage(path.join(imagesDir, name), backends, config);
    rows.push(adapted.intrinsics);
    people += adapted.skeletons.length;
    const doc = toSkeletonDocument(adapted.image, adapted.skeletons);
    const stem = name.replace(/\.[^.]+$/, "");
    await fs.writeFile(
      path.join(outDir, "skeletons", `${stem}.json`),
      JSON.stringify(doc, null, 2) + "\n",
    );
  }

  const sidecars = renderSidecars(rows);
  await fs.writeFile(path.join(outDir, "intrinsics.csv"), sidecars.complete);
  const incomplete = rows.filter((r) => !rowComplete(r)).map((r) => r.image).sort();
  if (sidecars.incomplete !== null) {
    await fs.writeFile(
      path.join(outDir, "intrinsics_incomplete.csv"),
      sidecars.incomplete,
    );
  }
  return { images: entries.length, people, incompleteIntrinsics: incomplete };
}
