// Couples a media element to the timeline cursor through the frame
// index, both directions. The element is taken structurally so tests
// can drive the contract without real media playback.

import type { FrameMap } from "./time.js";

export interface MediaLike {
  currentTime: number; // seconds
  paused: boolean;
  play(): unknown;
  pause(): void;
  addEventListener(type: string, listener: () => void): void;
}

export class PlaybackSync {
  private readonly media: MediaLike;
  private readonly frames: FrameMap;
  private readonly onCursor: (bagMs: number) => void;
  private resumeAfterScrub = false;

  constructor(media: MediaLike, frames: FrameMap, onCursor: (bagMs: number) => void) {
    this.media = media;
    this.frames = frames;
    this.onCursor = onCursor;
    media.addEventListener("timeupdate", () => this.pushCursor());
    media.addEventListener("seeked", () => this.pushCursor());
  }

  /** Current playback position expressed in bag time. */
  cursorMs(): number {
    return this.frames.mediaToBagMs(Math.round(this.media.currentTime * 1000));
  }

  private pushCursor(): void {
    this.onCursor(this.cursorMs());
  }

  /** Jump playback to a bag time (annotation click, transcript row). */
  seekToBagMs(bagMs: number): void {
    this.media.currentTime = this.frames.bagToMediaMs(bagMs) / 1000;
    this.pushCursor();
  }

  // Cursor scrubbing pauses a running player and resumes it at the
  // new position once the scrub ends.
  beginScrub(): void {
    this.resumeAfterScrub = !this.media.paused;
    if (this.resumeAfterScrub) this.media.pause();
  }

  scrubTo(bagMs: number): void {
    this.media.currentTime = this.frames.bagToMediaMs(bagMs) / 1000;
    this.onCursor(bagMs);
  }

  endScrub(): void {
    this.pushCursor();
    if (this.resumeAfterScrub) {
      this.resumeAfterScrub = false;
      void this.media.play();
    }
  }
}
