// Pure timeline math: view state (cursor, zoom, visible window) and
// the drag state machine. No DOM here; the view layer feeds pixel
// deltas in and renders whatever comes out.

export const MIN_SPAN_MS = 1;

export interface TimelineViewState {
  observationMs: number;
  cursorMs: number;
  msPerPx: number;
  viewStartMs: number;
  selectedId: string | null;
  activeTier: string | null;
}

export function createViewState(observationMs: number, widthPx: number): TimelineViewState {
  // default zoom fits the whole observation into the given width
  const msPerPx = widthPx > 0 ? Math.max(observationMs / widthPx, 0.01) : 10;
  return {
    observationMs,
    cursorMs: 0,
    msPerPx,
    viewStartMs: 0,
    selectedId: null,
    activeTier: null,
  };
}

export function clampCursor(state: TimelineViewState, ms: number): number {
  return Math.max(0, Math.min(ms, state.observationMs));
}

export function setCursor(state: TimelineViewState, ms: number): void {
  state.cursorMs = clampCursor(state, ms);
}

export function pxToMs(state: TimelineViewState, px: number): number {
  return state.viewStartMs + px * state.msPerPx;
}

export function msToPx(state: TimelineViewState, ms: number): number {
  return (ms - state.viewStartMs) / state.msPerPx;
}

/** Zoom by a factor, keeping the time under anchorPx fixed on screen. */
export function zoomAt(state: TimelineViewState, factor: number, anchorPx: number): void {
  const anchorMs = pxToMs(state, anchorPx);
  const next = state.msPerPx * factor;
  state.msPerPx = Math.max(next, 0.01);
  state.viewStartMs = Math.max(0, anchorMs - anchorPx * state.msPerPx);
}

export function scrollBy(state: TimelineViewState, deltaPx: number): void {
  state.viewStartMs = Math.max(0, state.viewStartMs + deltaPx * state.msPerPx);
}

export type DragKind = "create" | "move" | "resize-start" | "resize-end";

export interface Span {
  startMs: number;
  endMs: number;
}

export interface DragSession {
  kind: DragKind;
  tier: string;
  annId: string | null;
  original: Span;
  anchorMs: number;
  grabOffsetMs: number;
  current: Span;
}

export function beginDrag(
  kind: DragKind,
  tier: string,
  annId: string | null,
  original: Span,
  anchorMs: number,
): DragSession {
  return {
    kind,
    tier,
    annId,
    original: { ...original },
    anchorMs,
    grabOffsetMs: anchorMs - original.startMs,
    current: { ...original },
  };
}

export function dragTo(session: DragSession, pointerMs: number, observationMs: number): void {
  const span = session.current;
  const orig = session.original;
  switch (session.kind) {
    case "create": {
      const a = Math.max(0, Math.min(session.anchorMs, observationMs));
      const b = Math.max(0, Math.min(pointerMs, observationMs));
      span.startMs = Math.min(a, b);
      span.endMs = Math.max(a, b);
      break;
    }
    case "move": {
      const width = orig.endMs - orig.startMs;
      let start = pointerMs - session.grabOffsetMs;
      start = Math.max(0, Math.min(start, observationMs - width));
      span.startMs = start;
      span.endMs = start + width;
      break;
    }
    case "resize-start": {
      span.startMs = Math.max(0, Math.min(pointerMs, orig.endMs - MIN_SPAN_MS));
      span.endMs = orig.endMs;
      break;
    }
    case "resize-end": {
      span.startMs = orig.startMs;
      span.endMs = Math.min(observationMs, Math.max(pointerMs, orig.startMs + MIN_SPAN_MS));
      break;
    }
  }
}

/** Integer span for the API, or null when the drag produced nothing to send. */
export function commitDrag(session: DragSession): Span | null {
  const startMs = Math.round(session.current.startMs);
  const endMs = Math.round(session.current.endMs);
  if (endMs - startMs < MIN_SPAN_MS) return null;
  if (
    session.kind !== "create" &&
    startMs === Math.round(session.original.startMs) &&
    endMs === Math.round(session.original.endMs)
  ) {
    return null; // no-op click, nothing to persist
  }
  return { startMs, endMs };
}
