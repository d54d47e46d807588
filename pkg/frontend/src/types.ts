import { z } from "zod";

export const N_KEYPOINTS = 25;

/** Axis-aligned rectangle in original-image pixels. */
export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Person-class detector box with its confidence. */
export interface Box extends Rect {
  score: number;
}

/** One pose skeleton: 25 keypoints as [u, v, confidence]. */
export type Keypoint = [number, number, number];

export interface Skeleton {
  keypoints: Keypoint[];
}

/** Boxes that mutually overlap, merged into one crop region. */
export interface BoundingBoxGroup {
  boxes: Box[];
  unionCrop: Rect;
}

export class AdapterInputError extends Error {}
export class AdapterRuntimeError extends Error {}

/** Skeleton interchange document, one per image (primary harness format). */
export const skeletonDocumentSchema = z.object({
  image: z.string().min(1),
  people: z.array(
    z.object({
      keypoints: z
        .array(z.tuple([z.number(), z.number(), z.number()]))
        .length(N_KEYPOINTS),
    }),
  ),
});

export type SkeletonDocument = z.infer<typeof skeletonDocumentSchema>;

export function toSkeletonDocument(image: string, skeletons: Skeleton[]): SkeletonDocument {
  const doc = {
    image,
    people: skeletons.map((s) => ({
      keypoints: s.keypoints.map((k) => [k[0], k[1], k[2]] as Keypoint),
    })),
  };
  return skeletonDocumentSchema.parse(doc);
}

/** Intrinsics sidecar row; sensor fields stay unset on lookup misses. */
export interface IntrinsicsRow {
  image: string;
  focalLengthMm?: number;
  sensorWidthMm?: number;
  sensorHeightMm?: number;
  imageWidthPx?: number;
  imageHeightPx?: number;
}

export function rowComplete(row: IntrinsicsRow): boolean {
  return (
    row.focalLengthMm !== undefined &&
    row.sensorWidthMm !== undefined &&
    row.sensorHeightMm !== undefined &&
    row.imageWidthPx !== undefined &&
    row.imageHeightPx !== undefined
  );
}
