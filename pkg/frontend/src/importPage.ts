// Import page: pick a bag, optionally transcribe, process, wait.
// Already-processed bags (cache hit) skip straight to the workspace.

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import type { BagRow } from "./types.js";

const POLL_MS = 1000;

export class ImportPage {
  readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly onReady: (bagId: string) => void;
  private readonly pollMs: number;
  private readonly listHost: HTMLElement;
  private readonly statusHost: HTMLElement;
  private readonly transcribeToggle: HTMLInputElement;
  private readonly formatSelect: HTMLSelectElement;
  private busy = false;

  constructor(
    api: ApiClient,
    mount: HTMLElement,
    onReady: (bagId: string) => void,
    pollMs = POLL_MS,
  ) {
    this.api = api;
    this.onReady = onReady;
    this.pollMs = pollMs;
    this.listHost = el("div", { class: "import-list" });
    this.statusHost = el("div", { class: "import-status" });
    this.transcribeToggle = el("input", { type: "checkbox", class: "import-transcribe" });
    this.formatSelect = el("select", { class: "import-format" }, [
      el("option", { value: "mp3" }, ["mp3"]),
      el("option", { value: "pcm16" }, ["pcm 16-bit"]),
      el("option", { value: "wav" }, ["wav"]),
    ]);
    this.root = el("div", { class: "import" }, [
      el("h2", {}, ["Recordings"]),
      el("div", { class: "import-options" }, [
        el("label", {}, [this.transcribeToggle, " transcribe the audio"]),
        el("label", {}, ["audio format ", this.formatSelect]),
      ]),
      this.listHost,
      this.statusHost,
    ]);
    mount.append(this.root);
    void this.loadBags();
  }

  async loadBags(): Promise<void> {
    let bags: BagRow[];
    try {
      bags = await this.api.listBags();
    } catch (err) {
      this.showError(err instanceof Error ? err.message : String(err), null);
      return;
    }
    clear(this.listHost);
    if (bags.length === 0) {
      this.listHost.append(
        el("p", { class: "import-empty" }, ["no recordings in the data directory"]),
      );
      return;
    }
    for (const bag of bags) {
      const open = el("button", { class: "import-open" }, [bag.processed ? "Open" : "Process"]);
      open.addEventListener("click", () => void this.run(bag.name));
      this.listHost.append(
        el("div", { class: "import-row", "data-bag": bag.name }, [
          el("span", { class: "import-name" }, [bag.name]),
          el("span", { class: "import-size" }, [`${(bag.size / 1024).toFixed(1)} KiB`]),
          el("span", { class: `import-state ${bag.processed ? "processed" : "raw"}` }, [
            bag.processed ? "processed" : "not processed",
          ]),
          open,
        ]),
      );
    }
  }

  async run(ident: string): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.showProgress("starting...");
    try {
      const resp = await this.api.processBag(ident, {
        transcribe: this.transcribeToggle.checked,
        audio_format_hint: this.formatSelect.value,
      });
      if (resp.cached) {
        this.onReady(resp.bag_id);
        return;
      }
      // poll until the job settles; the server reports progress 0..1
      let job = resp.job;
      while (job.state === "queued" || job.state === "running") {
        this.showProgress(`processing: ${Math.round(job.progress * 100)}%`);
        await new Promise((resolve) => setTimeout(resolve, this.pollMs));
        job = await this.api.getJob(job.id);
      }
      if (job.state === "failed") {
        this.showError(job.error ?? "processing failed", ident);
        return;
      }
      this.onReady(resp.bag_id);
    } catch (err) {
      const text =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      this.showError(text, ident);
    } finally {
      this.busy = false;
    }
  }

  private showProgress(text: string): void {
    clear(this.statusHost);
    this.statusHost.append(el("div", { class: "import-progress" }, [text]));
  }

  private showError(message: string, retryIdent: string | null): void {
    clear(this.statusHost);
    const banner = el("div", { class: "import-error" }, [
      el("span", { class: "import-error-text" }, [message]),
    ]);
    if (retryIdent !== null) {
      const retry = el("button", { class: "import-retry" }, ["Retry"]);
      retry.addEventListener("click", () => void this.run(retryIdent));
      banner.append(retry);
    }
    this.statusHost.append(banner);
  }
}
