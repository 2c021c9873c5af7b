import { describe, expect, it } from "vitest";

import {
  beginDrag,
  commitDrag,
  createViewState,
  dragTo,
  msToPx,
  pxToMs,
  scrollBy,
  setCursor,
  zoomAt,
  MIN_SPAN_MS,
} from "../src/timeline.js";

const OBS = 10_000;

describe("view state", () => {
  it("fits the observation into the given width by default", () => {
    const state = createViewState(OBS, 800);
    expect(state.msPerPx).toBeCloseTo(12.5);
    expect(pxToMs(state, 0)).toBe(0);
    expect(pxToMs(state, 800)).toBeCloseTo(OBS);
  });

  it("clamps the cursor to the observation window", () => {
    const state = createViewState(OBS, 800);
    setCursor(state, -50);
    expect(state.cursorMs).toBe(0);
    setCursor(state, OBS + 99);
    expect(state.cursorMs).toBe(OBS);
  });

  it("px<->ms conversions invert each other", () => {
    const state = createViewState(OBS, 800);
    state.viewStartMs = 1_234;
    for (const px of [0, 1, 99.5, 800]) {
      expect(msToPx(state, pxToMs(state, px))).toBeCloseTo(px);
    }
  });

  it("zoom keeps the anchor point fixed and stays positive", () => {
    const state = createViewState(OBS, 800);
    const anchorPx = 200;
    const anchorMs = pxToMs(state, anchorPx);
    zoomAt(state, 0.5, anchorPx);
    expect(pxToMs(state, anchorPx)).toBeCloseTo(anchorMs);
    for (let i = 0; i < 60; i++) zoomAt(state, 0.5, anchorPx);
    expect(state.msPerPx).toBeGreaterThan(0);
  });

  it("scroll never goes left of zero", () => {
    const state = createViewState(OBS, 800);
    scrollBy(state, -10_000);
    expect(state.viewStartMs).toBe(0);
    scrollBy(state, 40);
    expect(state.viewStartMs).toBeCloseTo(40 * state.msPerPx);
  });
});

describe("drag machine", () => {
  it("create sweeps between anchor and pointer in either direction", () => {
    const drag = beginDrag("create", "t", null, { startMs: 500, endMs: 500 }, 500);
    dragTo(drag, 900, OBS);
    expect(drag.current).toEqual({ startMs: 500, endMs: 900 });
    dragTo(drag, 100, OBS);
    expect(drag.current).toEqual({ startMs: 100, endMs: 500 });
    expect(commitDrag(drag)).toEqual({ startMs: 100, endMs: 500 });
  });

  it("create clamps to the observation window", () => {
    const drag = beginDrag("create", "t", null, { startMs: 9_900, endMs: 9_900 }, 9_900);
    dragTo(drag, 25_000, OBS);
    expect(drag.current).toEqual({ startMs: 9_900, endMs: OBS });
  });

  it("a create that never moved commits to nothing", () => {
    const drag = beginDrag("create", "t", null, { startMs: 400, endMs: 400 }, 400);
    dragTo(drag, 400, OBS);
    expect(commitDrag(drag)).toBeNull();
  });

  it("move preserves width and clamps at both ends", () => {
    const span = { startMs: 1_000, endMs: 2_000 };
    const drag = beginDrag("move", "t", "a1", span, 1_300);
    dragTo(drag, 1_800, OBS);
    expect(drag.current).toEqual({ startMs: 1_500, endMs: 2_500 });
    dragTo(drag, -500, OBS);
    expect(drag.current).toEqual({ startMs: 0, endMs: 1_000 });
    dragTo(drag, 99_999, OBS);
    expect(drag.current).toEqual({ startMs: 9_000, endMs: 10_000 });
  });

  it("resize keeps at least the minimum span", () => {
    const span = { startMs: 1_000, endMs: 2_000 };
    const left = beginDrag("resize-start", "t", "a1", span, 1_000);
    dragTo(left, 5_000, OBS);
    expect(left.current.startMs).toBe(2_000 - MIN_SPAN_MS);
    const right = beginDrag("resize-end", "t", "a1", span, 2_000);
    dragTo(right, 0, OBS);
    expect(right.current.endMs).toBe(1_000 + MIN_SPAN_MS);
  });

  it("an unmoved move commits to nothing (plain click)", () => {
    const span = { startMs: 1_000, endMs: 2_000 };
    const drag = beginDrag("move", "t", "a1", span, 1_500);
    dragTo(drag, 1_500, OBS);
    expect(commitDrag(drag)).toBeNull();
  });

  it("commit rounds to integer milliseconds", () => {
    const span = { startMs: 1_000, endMs: 2_000 };
    const drag = beginDrag("move", "t", "a1", span, 1_500);
    dragTo(drag, 1_500.6, OBS);
    expect(commitDrag(drag)).toEqual({ startMs: 1_001, endMs: 2_001 });
    // sub-half-ms wiggle rounds back onto the original: a no-op
    dragTo(drag, 1_500.4, OBS);
    expect(commitDrag(drag)).toBeNull();
  });
});
