import { AdapterInputError } from "./types.js";

/**
 * Minimal JPEG/EXIF reader: camera model, focal length, pixel dimensions.
 *
 * Walks the JPEG marker stream for the APP1 Exif segment and the first
 * SOF frame header; inside the Exif block it parses the TIFF structure
 * just far enough for IFD0 (Model, pointer to the Exif IFD) and the Exif
 * IFD (FocalLength).  No third-party decoder is worth carrying for three
 * tags.
 */

export interface ExifSummary {
  model?: string;
  focalLengthMm?: number;
  imageWidthPx?: number;
  imageHeightPx?: number;
}

const TAG_MODEL = 0x0110;
const TAG_EXIF_IFD = 0x8769;
const TAG_FOCAL_LENGTH = 0x920a;

const SOF_MARKERS = new Set([0xc0, 0xc1, 0xc2, 0xc3, 0xc5, 0xc6, 0xc7,
  0xc9, 0xca, 0xcb, 0xcd, 0xce, 0xcf]);

export function isJpeg(buffer: Buffer): boolean {
  return buffer.length >= 2 && buffer[0] === 0xff && buffer[1] === 0xd8;
}

export function readExif(buffer: Buffer): ExifSummary {
  if (!isJpeg(buffer)) {
    throw new AdapterInputError("not a JPEG file (missing SOI marker)");
  }
  const summary: ExifSummary = {};
  let offset = 2;
  while (offset + 4 <= buffer.length) {
    if (buffer[offset] !== 0xff) break;
    const marker = buffer[offset + 1];
    if (marker === 0xd9 || marker === 0xda) break; // EOI / image data
    const length = buffer.readUInt16BE(offset + 2);
    const segment = buffer.subarray(offset + 4, offset + 2 + length);
    if (marker === 0xe1 && segment.subarray(0, 6).toString("latin1") === "Exif\0\0") {
      parseTiff(segment.subarray(6), summary);
    } else if (SOF_MARKERS.has(marker)) {
      summary.imageHeightPx = segment.readUInt16BE(1);
      summary.imageWidthPx = segment.readUInt16BE(3);
    }
    offset += 2 + length;
  }
  return summary;
}

function parseTiff(tiff: Buffer, summary: ExifSummary): void {
  if (tiff.length < 8) return;
  const order = tiff.subarray(0, 2).toString("latin1");
  const little = order === "II";
  if (!little && order !== "MM") return;
  const u16 = (at: number) => (little ? tiff.readUInt16LE(at) : tiff.readUInt16BE(at));
  const u32 = (at: number) => (little ? tiff.readUInt32LE(at) : tiff.readUInt32BE(at));
  if (u16(2) !== 42) return;

  const readIfd = (ifdOffset: number, handler: (tag: number, type: number,
    count: number, at: number) => void) => {
    if (ifdOffset + 2 > tiff.length) return;
    const n = u16(ifdOffset);
    for (let i = 0; i < n; i++) {
      const entry = ifdOffset + 2 + i * 12;
      if (entry + 12 > tiff.length) return;
      const tag = u16(entry);
      const type = u16(entry + 2);
      const count = u32(entry + 4);
      const size = typeSize(type) * count;
      const at = size <= 4 ? entry + 8 : u32(entry + 8);
      handler(tag, type, count, at);
    }
  };

  let exifIfdOffset: number | undefined;
  readIfd(u32(4), (tag, type, count, at) => {
    if (tag === TAG_MODEL && type === 2) {
      summary.model = tiff
        .subarray(at, at + count)
        .toString("latin1")
        .replace(/\0+$/, "")
        .trim();
    } else if (tag === TAG_EXIF_IFD && (type === 4 || type === 3)) {
      exifIfdOffset = u32(at);
    }
  });

  if (exifIfdOffset !== undefined) {
    readIfd(exifIfdOffset, (tag, type, _count, at) => {
      if (tag === TAG_FOCAL_LENGTH && type === 5 && at + 8 <= tiff.length) {
        const num = u32(at);
        const den = u32(at + 4);
        if (den > 0) summary.focalLengthMm = num / den;
      }
    });
  }
}

function typeSize(type: number): number {
  switch (type) {
    case 1: // BYTE
    case 2: // ASCII
    case 7: // UNDEFINED
      return 1;
    case 3: // SHORT
      return 2;
    case 4: // LONG
    case 9: // SLONG
      return 4;
    case 5: // RATIONAL
    case 10: // SRATIONAL
      return 8;
    default:
      return 1;
  }
}
