// Transcript viewer: one row per utterance across the transcript
// tiers, in time order. Clicking a row seeks playback there.

import { clear, el } from "./dom.js";
import type { PlaybackSync } from "./player.js";
import { formatClockShort } from "./time.js";
import type { Workspace } from "./workspace.js";

interface Utterance {
  speaker: string;
  startMs: number;
  text: string;
}

export class TranscriptPanel {
  readonly root: HTMLElement;
  private readonly ws: Workspace;
  private readonly playback: PlaybackSync | null;
  private readonly list: HTMLElement;

  constructor(ws: Workspace, playback: PlaybackSync | null, mount: HTMLElement) {
    this.ws = ws;
    this.playback = playback;
    this.list = el("div", { class: "transcript-rows" });
    this.root = el("section", { class: "transcript" }, [
      el("h3", {}, ["Transcript"]),
      this.list,
    ]);
    mount.append(this.root);
    ws.subscribe(() => this.render());
    this.render();
  }

  private utterances(): Utterance[] {
    const out: Utterance[] = [];
    for (const tier of this.ws.project.tiers) {
      if (tier.origin !== "transcript") continue;
      for (const ann of tier.annotations) {
        out.push({ speaker: tier.name, startMs: ann.start_ms, text: ann.value });
      }
    }
    out.sort((a, b) => a.startMs - b.startMs);
    return out;
  }

  private render(): void {
    clear(this.list);
    const utterances = this.utterances();
    if (utterances.length === 0) {
      this.list.append(el("p", { class: "transcript-empty" }, ["no transcript"]));
      return;
    }
    for (const utterance of utterances) {
      const row = el("div", { class: "transcript-row", "data-start": String(utterance.startMs) }, [
        el("span", { class: "transcript-time" }, [formatClockShort(utterance.startMs)]),
        el("span", { class: "transcript-speaker" }, [utterance.speaker]),
        el("span", { class: "transcript-text" }, [utterance.text]),
      ]);
      row.addEventListener("click", () => {
        this.playback?.seekToBagMs(utterance.startMs);
      });
      this.list.append(row);
    }
  }
}
