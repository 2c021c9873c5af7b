import { describe, expect, it } from "vitest";

import { PlaybackSync, type MediaLike } from "../src/player.js";
import { FrameMap } from "../src/time.js";

class FakeMedia implements MediaLike {
  currentTime = 0;
  paused = true;
  playedAt: number[] = [];
  private listeners = new Map<string, (() => void)[]>();

  play(): void {
    this.paused = false;
    this.playedAt.push(this.currentTime);
  }

  pause(): void {
    this.paused = true;
  }

  addEventListener(type: string, listener: () => void): void {
    const bucket = this.listeners.get(type) ?? [];
    bucket.push(listener);
    this.listeners.set(type, bucket);
  }

  fire(type: string): void {
    for (const listener of this.listeners.get(type) ?? []) listener();
  }
}

const frames = new FrameMap({
  micro_sec_per_frame: 100_000,
  bag_time_ms: Array.from({ length: 60 }, (_, i) => i * 100),
});

function setup() {
  const media = new FakeMedia();
  const cursors: number[] = [];
  const sync = new PlaybackSync(media, frames, (ms) => cursors.push(ms));
  return { media, cursors, sync };
}

describe("PlaybackSync", () => {
  it("pushes the mapped cursor on timeupdate", () => {
    const { media, cursors } = setup();
    media.currentTime = 5.0;
    media.fire("timeupdate");
    expect(cursors).toEqual([5_000]);
    media.currentTime = 5.049; // not yet at the next frame
    media.fire("timeupdate");
    expect(cursors).toEqual([5_000, 5_000]);
  });

  it("seeks media when told a bag time", () => {
    const { media, cursors, sync } = setup();
    sync.seekToBagMs(3_000);
    expect(media.currentTime).toBeCloseTo(3.0);
    expect(cursors.at(-1)).toBe(3_000);
  });

  it("scrubbing pauses playback and resumes at the new spot", () => {
    const { media, sync } = setup();
    media.play();
    expect(media.paused).toBe(false);
    sync.beginScrub();
    expect(media.paused).toBe(true);
    sync.scrubTo(2_000);
    sync.scrubTo(4_100);
    sync.endScrub();
    expect(media.paused).toBe(false);
    expect(media.playedAt.at(-1)).toBeCloseTo(4.1);
  });

  it("does not resume when the player was already paused", () => {
    const { media, sync } = setup();
    sync.beginScrub();
    sync.scrubTo(1_000);
    sync.endScrub();
    expect(media.paused).toBe(true);
  });
});
