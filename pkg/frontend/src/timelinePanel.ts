// Multi-tier timeline: renders the last server-confirmed project and
// routes drags through the API. A dragged block follows the pointer
// only while the session is live; once the server answers, the render
// comes from the refreshed project. A 409 therefore snaps the block
// back by itself; this panel only adds the cue class and the warning.

import { clear, el } from "./dom.js";
import type { PlaybackSync } from "./player.js";
import { formatClockShort } from "./time.js";
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
  type DragKind,
  type DragSession,
  type Span,
  type TimelineViewState,
} from "./timeline.js";
import type { AnnotationRow, TierRow } from "./types.js";
import type { Workspace } from "./workspace.js";

const LANE_FALLBACK_PX = 800; // jsdom has no layout; keep px math deterministic
const HANDLE_PX = 6;
const SNAPBACK_CUE_MS = 900;
const ZOOM_STEP = 1.25;

interface PendingCreate {
  tier: TierRow;
  span: Span;
}

export class TimelinePanel {
  readonly root: HTMLElement;
  readonly state: TimelineViewState;
  onSelectionChange: (() => void) | null = null;

  private readonly ws: Workspace;
  private readonly playback: PlaybackSync | null;
  private readonly ruler: HTMLElement;
  private readonly rows: HTMLElement;
  private drag: DragSession | null = null;
  private scrubbing = false;
  private pendingCreate: PendingCreate | null = null;
  private cueId: string | null = null;
  private cueTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(ws: Workspace, playback: PlaybackSync | null, mount: HTMLElement) {
    this.ws = ws;
    this.playback = playback;
    this.ruler = el("div", { class: "tl-ruler" });
    this.rows = el("div", { class: "tl-rows" });
    this.root = el("div", { class: "tl" }, [this.ruler, this.rows]);
    mount.append(this.root);

    this.state = createViewState(ws.project.observation_ms, this.laneWidth());

    this.ruler.addEventListener("mousedown", (e) => this.onRulerDown(e as MouseEvent));
    this.rows.addEventListener("mousedown", (e) => this.onLaneDown(e as MouseEvent));
    this.root.addEventListener("wheel", (e) => this.onWheel(e as WheelEvent));
    const doc = this.root.ownerDocument;
    doc.addEventListener("mousemove", (e) => this.onMove(e as MouseEvent));
    doc.addEventListener("mouseup", (e) => void this.onUp(e as MouseEvent));

    ws.subscribe(() => this.render());
    this.render();
  }

  laneWidth(): number {
    return this.rows.clientWidth || LANE_FALLBACK_PX;
  }

  /** Playback-driven cursor updates; follows when the playhead leaves the view. */
  setCursorMs(bagMs: number): void {
    setCursor(this.state, bagMs);
    const px = msToPx(this.state, this.state.cursorMs);
    if (px < 0 || px > this.laneWidth()) {
      this.state.viewStartMs = Math.max(0, this.state.cursorMs);
    }
    this.render();
  }

  select(annId: string | null): void {
    this.state.selectedId = annId;
    this.render();
    this.onSelectionChange?.();
  }

  selectedAnnotation(): { tier: TierRow; ann: AnnotationRow } | null {
    if (this.state.selectedId === null) return null;
    for (const tier of this.ws.project.tiers) {
      const ann = tier.annotations.find((a) => a.id === this.state.selectedId);
      if (ann) return { tier, ann };
    }
    return null;
  }

  zoomIn(): void {
    zoomAt(this.state, 1 / ZOOM_STEP, this.laneWidth() / 2);
    this.render();
  }

  zoomOut(): void {
    zoomAt(this.state, ZOOM_STEP, this.laneWidth() / 2);
    this.render();
  }

  // -- event handling ------------------------------------------------

  private laneX(e: MouseEvent): number {
    return e.clientX - this.rows.getBoundingClientRect().left;
  }

  private onRulerDown(e: MouseEvent): void {
    e.preventDefault();
    this.scrubbing = true;
    this.playback?.beginScrub();
    this.scrubTo(e);
  }

  private scrubTo(e: MouseEvent): void {
    const ms = setClamped(this.state, pxToMs(this.state, this.laneX(e)));
    if (this.playback) this.playback.scrubTo(ms);
    this.render();
  }

  private onLaneDown(e: MouseEvent): void {
    const target = e.target as HTMLElement;
    const lane = target.closest<HTMLElement>(".tl-lane");
    if (!lane || this.pendingCreate) return;
    const tierName = lane.dataset.tier!;
    const tier = this.ws.tier(tierName);
    if (!tier) return;
    e.preventDefault();
    const pointerMs = pxToMs(this.state, this.laneX(e));

    const block = target.closest<HTMLElement>(".tl-block");
    if (block) {
      const ann = tier.annotations.find((a) => a.id === block.dataset.id);
      if (!ann) return;
      let kind: DragKind = "move";
      if (target.classList.contains("tl-handle-start")) kind = "resize-start";
      else if (target.classList.contains("tl-handle-end")) kind = "resize-end";
      this.drag = beginDrag(kind, tierName, ann.id, spanOf(ann), pointerMs);
      return;
    }
    this.drag = beginDrag("create", tierName, null, { startMs: pointerMs, endMs: pointerMs }, pointerMs);
  }

  private onMove(e: MouseEvent): void {
    if (this.scrubbing) {
      this.scrubTo(e);
      return;
    }
    if (!this.drag) return;
    dragTo(this.drag, pxToMs(this.state, this.laneX(e)), this.state.observationMs);
    this.render();
  }

  private async onUp(e: MouseEvent): Promise<void> {
    if (this.scrubbing) {
      this.scrubbing = false;
      this.playback?.endScrub();
      return;
    }
    const drag = this.drag;
    if (!drag) return;
    this.drag = null;
    dragTo(drag, pxToMs(this.state, this.laneX(e)), this.state.observationMs);
    const span = commitDrag(drag);

    if (drag.kind === "create") {
      const tier = this.ws.tier(drag.tier);
      if (!span || !tier) {
        this.render();
        return;
      }
      this.pendingCreate = { tier, span };
      this.render();
      return;
    }

    if (!span) {
      // plain click: select and jump playback to the annotation start
      this.select(drag.annId);
      if (drag.annId) {
        const hit = this.selectedAnnotation();
        if (hit && this.playback) this.playback.seekToBagMs(hit.ann.start_ms);
      }
      return;
    }

    const result = await this.ws.moveAnnotation(drag.annId!, span.startMs, span.endMs);
    if (!result.ok) this.flashSnapback(drag.annId!);
    else this.render();
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    if (e.ctrlKey || e.metaKey) {
      zoomAt(this.state, e.deltaY > 0 ? ZOOM_STEP : 1 / ZOOM_STEP, this.laneX(e));
    } else {
      scrollBy(this.state, e.deltaY || e.deltaX);
    }
    this.render();
  }

  private flashSnapback(annId: string): void {
    this.cueId = annId;
    this.render();
    if (this.cueTimer) clearTimeout(this.cueTimer);
    this.cueTimer = setTimeout(() => {
      this.cueId = null;
      this.render();
    }, SNAPBACK_CUE_MS);
  }

  // -- pending-create value picker ------------------------------------

  async confirmCreate(value: string): Promise<void> {
    const pending = this.pendingCreate;
    if (!pending) return;
    this.pendingCreate = null;
    const result = await this.ws.addAnnotation(
      pending.tier.name,
      Math.round(pending.span.startMs),
      Math.round(pending.span.endMs),
      value,
    );
    if (result.ok) this.render();
    else this.render(); // ghost gone: the rejected create snaps away entirely
  }

  cancelCreate(): void {
    this.pendingCreate = null;
    this.render();
  }

  // -- rendering -------------------------------------------------------

  render(): void {
    this.renderRuler();
    this.renderRows();
  }

  private renderRuler(): void {
    clear(this.ruler);
    const width = this.laneWidth();
    const stepMs = niceStep(this.state.msPerPx * 90);
    const firstTick = Math.ceil(this.state.viewStartMs / stepMs) * stepMs;
    for (let ms = firstTick; msToPx(this.state, ms) <= width; ms += stepMs) {
      const tick = el("div", { class: "tl-tick" }, [formatClockShort(ms)]);
      tick.style.left = `${msToPx(this.state, ms)}px`;
      this.ruler.append(tick);
    }
    const playhead = el("div", { class: "tl-playhead-label" }, [
      formatClockShort(this.state.cursorMs),
    ]);
    playhead.style.left = `${msToPx(this.state, this.state.cursorMs)}px`;
    this.ruler.append(playhead);
  }

  private renderRows(): void {
    clear(this.rows);
    for (const tier of this.ws.project.tiers) {
      const lane = el("div", { class: "tl-lane", "data-tier": tier.name });
      for (const ann of tier.annotations) {
        lane.append(this.renderBlock(tier, ann));
      }
      if (this.drag?.kind === "create" && this.drag.tier === tier.name) {
        lane.append(this.renderGhost(this.drag.current));
      }
      if (this.pendingCreate && this.pendingCreate.tier.name === tier.name) {
        lane.append(this.renderGhost(this.pendingCreate.span));
        lane.append(this.renderPicker(this.pendingCreate));
      }
      const cursor = el("div", { class: "tl-cursor" });
      cursor.style.left = `${msToPx(this.state, this.state.cursorMs)}px`;
      lane.append(cursor);

      const badge = tier.kind === "codebook" ? (tier.codebook_ref ?? "") : tier.kind;
      const label = el("div", { class: `tl-label origin-${tier.origin}` }, [
        el("span", { class: "tl-tier-name" }, [tier.name]),
        el("span", { class: "tl-tier-kind" }, [badge]),
      ]);
      this.rows.append(el("div", { class: "tl-row" }, [label, lane]));
    }
  }

  private renderBlock(tier: TierRow, ann: AnnotationRow): HTMLElement {
    let span: Span = spanOf(ann);
    if (this.drag && this.drag.annId === ann.id) span = this.drag.current;
    const left = msToPx(this.state, span.startMs);
    const width = Math.max((span.endMs - span.startMs) / this.state.msPerPx, 2);
    const classes = ["tl-block", `origin-${tier.origin}`];
    if (ann.id === this.state.selectedId) classes.push("selected");
    if (ann.id === this.cueId) classes.push("snapback");
    const block = el("div", { class: classes.join(" "), "data-id": ann.id }, [
      el("div", { class: "tl-handle-start" }),
      el("span", { class: "tl-value" }, [ann.value]),
      el("div", { class: "tl-handle-end" }),
    ]);
    block.style.left = `${left}px`;
    block.style.width = `${width}px`;
    block.title = `${ann.value} [${formatClockShort(ann.start_ms)} - ${formatClockShort(ann.end_ms)}]`;
    return block;
  }

  private renderGhost(span: Span): HTMLElement {
    const ghost = el("div", { class: "tl-block tl-ghost" });
    ghost.style.left = `${msToPx(this.state, span.startMs)}px`;
    ghost.style.width = `${Math.max((span.endMs - span.startMs) / this.state.msPerPx, 2)}px`;
    return ghost;
  }

  private renderPicker(pending: PendingCreate): HTMLElement {
    const book = this.ws.codebook(pending.tier.codebook_ref);
    let valueField: HTMLSelectElement | HTMLInputElement;
    if (pending.tier.kind === "codebook" && book) {
      // the menu lists exactly the codebook's codes
      valueField = el("select", { class: "tl-picker-value" });
      for (const code of book.codes) {
        valueField.append(el("option", { value: code.code }, [code.code]));
      }
    } else {
      valueField = el("input", { class: "tl-picker-value", type: "text" });
    }
    const ok = el("button", { class: "tl-picker-ok" }, ["Add"]);
    ok.addEventListener("click", () => void this.confirmCreate(valueField.value));
    const cancel = el("button", { class: "tl-picker-cancel" }, ["Cancel"]);
    cancel.addEventListener("click", () => this.cancelCreate());
    const picker = el("div", { class: "tl-picker" }, [valueField, ok, cancel]);
    picker.style.left = `${msToPx(this.state, pending.span.startMs)}px`;
    return picker;
  }
}

function spanOf(ann: AnnotationRow): Span {
  return { startMs: ann.start_ms, endMs: ann.end_ms };
}

function setClamped(state: TimelineViewState, ms: number): number {
  setCursor(state, ms);
  return state.cursorMs;
}

/** Tick spacing: 1/2/5 times a power of ten, at least the target. */
function niceStep(targetMs: number): number {
  let step = 1;
  for (;;) {
    for (const mult of [1, 2, 5]) {
      if (step * mult >= targetMs) return step * mult;
    }
    step *= 10;
  }
}
