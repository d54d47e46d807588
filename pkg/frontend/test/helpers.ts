/** Handcrafted JPEG bytes for metadata tests: SOI, APP1 Exif, SOF0, EOI. */

export interface FakeJpegSpec {
  model?: string;
  focalNum?: number;
  focalDen?: number;
  width?: number;
  height?: number;
  withExif?: boolean;
}

export function buildTiff(spec: FakeJpegSpec): Buffer {
  const model = spec.model ?? "Canon EOS 6D Mark II";
  const modelBytes = Buffer.from(model + "\0", "latin1");
  const haveFocal = spec.focalNum !== undefined;

  // layout: header(8) | IFD0 | exif IFD | model string | focal rational
  const ifd0Entries = haveFocal ? 2 : 1;
  const ifd0Start = 8;
  const ifd0Size = 2 + ifd0Entries * 12 + 4;
  const exifIfdStart = ifd0Start + ifd0Size;
  const exifIfdSize = haveFocal ? 2 + 12 + 4 : 0;
  const modelStart = exifIfdStart + exifIfdSize;
  const focalStart = modelStart + modelBytes.length;
  const total = focalStart + (haveFocal ? 8 : 0);

  const tiff = Buffer.alloc(total);
  tiff.write("II", 0, "latin1");
  tiff.writeUInt16LE(42, 2);
  tiff.writeUInt32LE(ifd0Start, 4);

  let at = ifd0Start;
  tiff.writeUInt16LE(ifd0Entries, at);
  at += 2;
  // Model tag
  tiff.writeUInt16LE(0x0110, at);
  tiff.writeUInt16LE(2, at + 2);
  tiff.writeUInt32LE(modelBytes.length, at + 4);
  tiff.writeUInt32LE(modelStart, at + 8);
  at += 12;
  if (haveFocal) {
    tiff.writeUInt16LE(0x8769, at);
    tiff.writeUInt16LE(4, at + 2);
    tiff.writeUInt32LE(1, at + 4);
    tiff.writeUInt32LE(exifIfdStart, at + 8);
    at += 12;
  }
  tiff.writeUInt32LE(0, at); // no next IFD

  if (haveFocal) {
    let ex = exifIfdStart;
    tiff.writeUInt16LE(1, ex);
    ex += 2;
    tiff.writeUInt16LE(0x920a, ex);
    tiff.writeUInt16LE(5, ex + 2);
    tiff.writeUInt32LE(1, ex + 4);
    tiff.writeUInt32LE(focalStart, ex + 8);
    tiff.writeUInt32LE(0, ex + 12);
    tiff.writeUInt32LE(spec.focalNum!, focalStart);
    tiff.writeUInt32LE(spec.focalDen ?? 1, focalStart + 4);
  }

  modelBytes.copy(tiff, modelStart);
  return tiff;
}

export function buildJpeg(spec: FakeJpegSpec = {}): Buffer {
  const parts: Buffer[] = [Buffer.from([0xff, 0xd8])];

  if (spec.withExif !== false) {
    const tiff = buildTiff(spec);
    const payload = Buffer.concat([Buffer.from("Exif\0\0", "latin1"), tiff]);
    const app1 = Buffer.alloc(4);
    app1[0] = 0xff;
    app1[1] = 0xe1;
    app1.writeUInt16BE(payload.length + 2, 2);
    parts.push(app1, payload);
  }

  // SOF0: length(2) precision(1) height(2) width(2) ncomp(1) + 3 bytes/comp
  const width = spec.width ?? 4180;
  const height = spec.height ?? 2768;
  const sof = Buffer.alloc(2 + 2 + 1 + 2 + 2 + 1 + 3);
  sof[0] = 0xff;
  sof[1] = 0xc0;
  sof.writeUInt16BE(sof.length - 2, 2);
  sof[4] = 8;
  sof.writeUInt16BE(height, 5);
  sof.writeUInt16BE(width, 7);
  sof[9] = 1;
  parts.push(sof);

  parts.push(Buffer.from([0xff, 0xd9]));
  return Buffer.concat(parts);
}
