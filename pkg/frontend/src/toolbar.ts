// Toolbar above the timeline: numeric start/end/duration entry for the
// selected annotation, value relabeling, tier creation, zoom buttons.

import { clear, el } from "./dom.js";
import { formatClock, parseClock } from "./time.js";
import type { TimelinePanel } from "./timelinePanel.js";
import type { Workspace } from "./workspace.js";

export class Toolbar {
  readonly root: HTMLElement;
  private readonly ws: Workspace;
  private readonly panel: TimelinePanel;
  private readonly startInput: HTMLInputElement;
  private readonly endInput: HTMLInputElement;
  private readonly durationInput: HTMLInputElement;
  private readonly valueInput: HTMLInputElement;
  private readonly tierNameInput: HTMLInputElement;
  private readonly tierKindSelect: HTMLSelectElement;
  private readonly codebookSelect: HTMLSelectElement;
  private readonly selectionLabel: HTMLElement;

  constructor(ws: Workspace, panel: TimelinePanel, mount: HTMLElement) {
    this.ws = ws;
    this.panel = panel;

    this.selectionLabel = el("span", { class: "tb-selection" }, ["no selection"]);
    this.startInput = el("input", { class: "tb-start", size: "12" });
    this.endInput = el("input", { class: "tb-end", size: "12" });
    this.durationInput = el("input", { class: "tb-duration", size: "12" });
    this.valueInput = el("input", { class: "tb-value", size: "14" });
    const apply = el("button", { class: "tb-apply" }, ["Apply"]);
    apply.addEventListener("click", () => void this.applyEdits());
    const remove = el("button", { class: "tb-delete" }, ["Delete"]);
    remove.addEventListener("click", () => void this.deleteSelected());

    this.tierNameInput = el("input", { class: "tb-tier-name", placeholder: "tier name" });
    this.tierKindSelect = el("select", { class: "tb-tier-kind" }, [
      el("option", { value: "free_text" }, ["free text"]),
      el("option", { value: "codebook" }, ["codebook"]),
    ]);
    this.codebookSelect = el("select", { class: "tb-tier-book" });
    const addTier = el("button", { class: "tb-tier-add" }, ["Add tier"]);
    addTier.addEventListener("click", () => void this.addTier());

    const zoomIn = el("button", { class: "tb-zoom-in" }, ["+"]);
    zoomIn.addEventListener("click", () => panel.zoomIn());
    const zoomOut = el("button", { class: "tb-zoom-out" }, ["-"]);
    zoomOut.addEventListener("click", () => panel.zoomOut());

    this.root = el("div", { class: "toolbar" }, [
      el("div", { class: "tb-group" }, [
        this.selectionLabel,
        labeled("start", this.startInput),
        labeled("end", this.endInput),
        labeled("duration", this.durationInput),
        labeled("value", this.valueInput),
        apply,
        remove,
      ]),
      el("div", { class: "tb-group" }, [
        this.tierNameInput,
        this.tierKindSelect,
        this.codebookSelect,
        addTier,
      ]),
      el("div", { class: "tb-group" }, [zoomOut, zoomIn]),
    ]);
    mount.append(this.root);

    panel.onSelectionChange = () => this.showSelection();
    ws.subscribe(() => {
      this.refreshCodebookChoices();
      this.showSelection();
    });
    this.refreshCodebookChoices();
    this.showSelection();
  }

  private refreshCodebookChoices(): void {
    const current = this.codebookSelect.value;
    clear(this.codebookSelect);
    for (const book of this.ws.codebooks) {
      this.codebookSelect.append(el("option", { value: book.name }, [book.name]));
    }
    if (current) this.codebookSelect.value = current;
  }

  showSelection(): void {
    const hit = this.panel.selectedAnnotation();
    if (!hit) {
      this.selectionLabel.textContent = "no selection";
      this.startInput.value = "";
      this.endInput.value = "";
      this.durationInput.value = "";
      this.valueInput.value = "";
      return;
    }
    this.selectionLabel.textContent = `${hit.tier.name} / ${hit.ann.id}`;
    this.startInput.value = formatClock(hit.ann.start_ms);
    this.endInput.value = formatClock(hit.ann.end_ms);
    this.durationInput.value = formatClock(hit.ann.end_ms - hit.ann.start_ms);
    this.valueInput.value = hit.ann.value;
  }

  /**
   * Push the numeric fields to the server. An edited duration wins
   * over an untouched end field; an edited end always wins.
   */
  async applyEdits(): Promise<void> {
    const hit = this.panel.selectedAnnotation();
    if (!hit) return;
    let startMs: number, endMs: number, durationMs: number;
    try {
      startMs = parseClock(this.startInput.value);
      endMs = parseClock(this.endInput.value);
      durationMs = parseClock(this.durationInput.value);
    } catch (err) {
      this.ws.setStatus(String(err instanceof Error ? err.message : err), "error");
      return;
    }
    const endUntouched = endMs === hit.ann.end_ms;
    const durationTouched = durationMs !== hit.ann.end_ms - hit.ann.start_ms;
    if (endUntouched && durationTouched) endMs = startMs + durationMs;

    if (startMs !== hit.ann.start_ms || endMs !== hit.ann.end_ms) {
      const moved = await this.ws.moveAnnotation(hit.ann.id, startMs, endMs);
      if (!moved.ok) {
        this.showSelection(); // revert fields to server truth
        return;
      }
    }
    if (this.valueInput.value !== hit.ann.value) {
      await this.ws.relabelAnnotation(hit.ann.id, this.valueInput.value);
    }
    this.showSelection();
  }

  private async deleteSelected(): Promise<void> {
    const hit = this.panel.selectedAnnotation();
    if (!hit) return;
    await this.ws.removeAnnotation(hit.ann.id);
    this.panel.select(null);
  }

  private async addTier(): Promise<void> {
    const name = this.tierNameInput.value.trim();
    if (!name) {
      this.ws.setStatus("tier name is required", "error");
      return;
    }
    const kind = this.tierKindSelect.value;
    const book = kind === "codebook" ? this.codebookSelect.value || null : null;
    const result = await this.ws.addTier(name, kind, book);
    if (result.ok) this.tierNameInput.value = "";
  }
}

function labeled(text: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "tb-field" }, [text, input]);
}
