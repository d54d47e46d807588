import { ExifSummary } from "./exif.js";
import { IntrinsicsRow, rowComplete } from "./types.js";

/**
 * Sensor dimensions by camera model.  Seeded with the two full-frame
 * bodies the reference collection was shot on; extend via the adapter
 * config for other cameras.
 */
export const DEFAULT_SENSOR_LOOKUP: Record<string, [number, number]> = {
  "Canon EOS 5D Mark II": [36, 24],
  "Canon EOS 6D Mark II": [36, 24],
};

export function buildIntrinsicsRow(
  image: string,
  exif: ExifSummary,
  sensorLookup: Record<string, [number, number]> = DEFAULT_SENSOR_LOOKUP,
): IntrinsicsRow {
  const row: IntrinsicsRow = { image };
  if (exif.focalLengthMm !== undefined) row.focalLengthMm = exif.focalLengthMm;
  if (exif.imageWidthPx !== undefined) row.imageWidthPx = exif.imageWidthPx;
  if (exif.imageHeightPx !== undefined) row.imageHeightPx = exif.imageHeightPx;
  if (exif.model !== undefined) {
    const sensor = sensorLookup[exif.model];
    if (sensor) {
      row.sensorWidthMm = sensor[0];
      row.sensorHeightMm = sensor[1];
    }
  }
  return row;
}

const HEADER =
  "image,focal_length_mm,sensor_width_mm,sensor_height_mm,image_width_px,image_height_px";

function formatRow(row: IntrinsicsRow): string {
  const cell = (v: number | undefined) => (v === undefined ? "" : String(v));
  return [
    row.image,
    cell(row.focalLengthMm),
    cell(row.sensorWidthMm),
    cell(row.sensorHeightMm),
    cell(row.imageWidthPx),
    cell(row.imageHeightPx),
  ].join(",");
}

/**
 * Sidecar CSVs for the primary harness: complete rows go into
 * intrinsics.csv; incomplete ones are quarantined in a companion file so
 * the primary CLI rejects exactly those images.
 */
export function renderSidecars(rows: IntrinsicsRow[]): {
  complete: string;
  incomplete: string | null;
} {
  const sorted = [...rows].sort((a, b) => a.image.localeCompare(b.image));
  const good = sorted.filter(rowComplete);
  const bad = sorted.filter((r) => !rowComplete(r));
  const complete = [HEADER, ...good.map(formatRow)].join("\n") + "\n";
  const incomplete = bad.length
    ? [HEADER, ...bad.map(formatRow)].join("\n") + "\n"
    : null;
  return { complete, incomplete };
}
