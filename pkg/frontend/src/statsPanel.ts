// Statistical summary: the five overall metrics plus the eight
// per-tier metrics, rendered verbatim from the stats endpoint, with
// CSV export buttons for annotations and for the table itself.

import { clear, el } from "./dom.js";
import type { StatsDoc } from "./types.js";
import type { Workspace } from "./workspace.js";

export const OVERALL_LABELS: Record<string, string> = {
  occurrences: "Occurrences",
  frequency_per_min: "Frequency (/min)",
  average_duration_ms: "Average duration (ms)",
  time_ratio: "Time ratio",
  latency_ms: "Latency (ms)",
};

export const TIER_LABELS: Record<string, string> = {
  count: "Count",
  min_duration_ms: "Min (ms)",
  max_duration_ms: "Max (ms)",
  average_duration_ms: "Average (ms)",
  median_duration_ms: "Median (ms)",
  total_duration_ms: "Total (ms)",
  duration_percentage: "% of observation",
  latency_ms: "Latency (ms)",
};

function cellText(value: number | null): string {
  return value === null ? "-" : String(value);
}

function offerDownload(filename: string, text: string, mime: string): void {
  // Browser-only affordance; file-less environments just skip it.
  if (typeof URL.createObjectURL !== "function") return;
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export class StatsPanel {
  readonly root: HTMLElement;
  includeTranscript = true;
  lastStats: StatsDoc | null = null;

  private readonly ws: Workspace;
  private readonly body: HTMLElement;
  private seq = 0;

  constructor(ws: Workspace, mount: HTMLElement) {
    this.ws = ws;
    this.body = el("div", { class: "stats-body" });

    const toggle = el("input", { type: "checkbox", class: "stats-transcript-toggle" });
    toggle.checked = true;
    toggle.addEventListener("change", () => {
      this.includeTranscript = toggle.checked;
      void this.refresh();
    });

    const downloadAnnotations = el("button", { class: "stats-dl-annotations" }, [
      "Download annotations CSV",
    ]);
    downloadAnnotations.addEventListener("click", () => void this.downloadAnnotationsCsv());
    const downloadStats = el("button", { class: "stats-dl-stats" }, ["Download stats CSV"]);
    downloadStats.addEventListener("click", () => void this.downloadStatsCsv());

    this.root = el("section", { class: "stats" }, [
      el("h3", {}, ["Statistics"]),
      el("label", { class: "stats-toggle" }, [toggle, " include transcript tiers"]),
      this.body,
      el("div", { class: "stats-actions" }, [downloadAnnotations, downloadStats]),
    ]);
    mount.append(this.root);

    ws.subscribe(() => void this.refresh());
    void this.refresh();
  }

  async refresh(): Promise<void> {
    const ticket = ++this.seq;
    const stats = await this.ws.api.getStats(this.ws.bagId, this.includeTranscript);
    if (ticket !== this.seq) return; // a newer refresh already landed
    this.lastStats = stats;
    this.render(stats);
  }

  async downloadAnnotationsCsv(): Promise<string> {
    const text = await this.ws.api.exportAnnotationsCsv(this.ws.bagId);
    offerDownload(`${this.ws.bagId}-annotations.csv`, text, "text/csv");
    return text;
  }

  async downloadStatsCsv(): Promise<string> {
    const text = await this.ws.api.exportStatsCsv(this.ws.bagId);
    offerDownload(`${this.ws.bagId}-stats.csv`, text, "text/csv");
    return text;
  }

  private render(stats: StatsDoc): void {
    clear(this.body);

    const overall = el("dl", { class: "stats-overall" });
    for (const [key, label] of Object.entries(OVERALL_LABELS)) {
      overall.append(
        el("div", { class: "stats-metric" }, [
          el("dt", {}, [label]),
          el("dd", { "data-metric": key }, [
            cellText(stats.overall[key as keyof typeof stats.overall]),
          ]),
        ]),
      );
    }
    this.body.append(overall);

    const head = el("tr", {}, [el("th", {}, ["Tier"])]);
    for (const label of Object.values(TIER_LABELS)) {
      head.append(el("th", {}, [label]));
    }
    const tbody = el("tbody", {});
    for (const [name, tierStats] of Object.entries(stats.tiers)) {
      const row = el("tr", { "data-tier": name }, [el("th", {}, [name])]);
      for (const key of Object.keys(TIER_LABELS)) {
        row.append(
          el("td", { "data-metric": key }, [
            cellText(tierStats[key as keyof typeof tierStats]),
          ]),
        );
      }
      tbody.append(row);
    }
    this.body.append(
      el("table", { class: "stats-tiers" }, [el("thead", {}, [head]), tbody]),
    );
  }
}
