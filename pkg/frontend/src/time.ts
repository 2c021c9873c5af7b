// Clock formatting and the media<->bag time mapping.
//
// The mapping mirrors the server's frame index semantics: a media
// position maps to the bag time of the latest frame at or before it,
// so round-trip error never exceeds one frame interval.

import type { FrameIndexDoc } from "./types.js";

export function formatClock(ms: number): string {
  const total = Math.max(0, Math.round(ms));
  const h = Math.floor(total / 3_600_000);
  const m = Math.floor((total % 3_600_000) / 60_000);
  const s = Math.floor((total % 60_000) / 1000);
  const frac = total % 1000;
  const pad = (v: number, w: number) => String(v).padStart(w, "0");
  return `${pad(h, 2)}:${pad(m, 2)}:${pad(s, 2)}.${pad(frac, 3)}`;
}

export function parseClock(text: string): number {
  const match = /^(\d+):(\d{2}):(\d{2})\.(\d{3})$/.exec(text.trim());
  if (!match) throw new Error(`not a clock timestamp: ${text}`);
  const [, h, m, s, frac] = match;
  return (
    Number(h) * 3_600_000 + Number(m) * 60_000 + Number(s) * 1000 + Number(frac)
  );
}

/** Duration for display next to the playhead; sub-hour spans drop the hour. */
export function formatClockShort(ms: number): string {
  const full = formatClock(ms);
  return full.startsWith("00:") ? full.slice(3) : full;
}

export class FrameMap {
  readonly usecPerFrame: number;
  readonly bagTimeMs: readonly number[];

  constructor(doc: FrameIndexDoc) {
    this.usecPerFrame = doc.micro_sec_per_frame;
    this.bagTimeMs = doc.bag_time_ms;
  }

  get frameIntervalMs(): number {
    return this.usecPerFrame / 1000;
  }

  /** Bag time of the latest frame at or before the media position. */
  mediaToBagMs(mediaMs: number): number {
    const frames = this.bagTimeMs;
    if (frames.length === 0) throw new Error("frame index is empty");
    let ordinal = Math.floor((mediaMs * 1000) / this.usecPerFrame);
    ordinal = Math.max(0, Math.min(ordinal, frames.length - 1));
    return frames[ordinal]!;
  }

  /** Media position of the last frame at or before the bag time. */
  bagToMediaMs(bagMs: number): number {
    const frames = this.bagTimeMs;
    if (frames.length === 0) throw new Error("frame index is empty");
    // rightmost frame with bag time <= bagMs, else frame 0
    let lo = 0;
    let hi = frames.length - 1;
    if (bagMs < frames[0]!) return 0;
    while (lo < hi) {
      const mid = (lo + hi + 1) >> 1;
      if (frames[mid]! <= bagMs) lo = mid;
      else hi = mid - 1;
    }
    return (lo * this.usecPerFrame) / 1000;
  }
}
