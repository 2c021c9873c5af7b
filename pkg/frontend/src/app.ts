// Assembles the workspace page: video top-left, toolbar and auxiliary
// tabs top-middle, chatbox on the right, timeline across the bottom.

import type { ApiClient } from "./api.js";
import { ChatPanel } from "./chatPanel.js";
import { CodebookPanel } from "./codebookPanel.js";
import { clear, el } from "./dom.js";
import { ImportPage } from "./importPage.js";
import { PlaybackSync } from "./player.js";
import { StatsPanel } from "./statsPanel.js";
import { TimelinePanel } from "./timelinePanel.js";
import { Toolbar } from "./toolbar.js";
import { TranscriptPanel } from "./transcriptPanel.js";
import { Workspace } from "./workspace.js";

export interface WorkspaceHandles {
  ws: Workspace;
  timeline: TimelinePanel;
  toolbar: Toolbar;
  stats: StatsPanel;
  chat: ChatPanel;
  codebook: CodebookPanel;
  transcript: TranscriptPanel;
  playback: PlaybackSync | null;
  video: HTMLVideoElement | null;
  root: HTMLElement;
}

export async function buildWorkspacePage(
  api: ApiClient,
  bagId: string,
  mount: HTMLElement,
): Promise<WorkspaceHandles> {
  const ws = await Workspace.load(api, bagId);

  const videoHost = el("div", { class: "ws-video" });
  let video: HTMLVideoElement | null = null;
  let playback: PlaybackSync | null = null;
  if (ws.manifest.video && ws.frames) {
    video = el("video", { class: "ws-player", controls: "" });
    video.src = api.mediaUrl(ws.bagId, "video");
    videoHost.append(video);
  } else {
    videoHost.append(el("p", { class: "ws-no-video" }, ["no video stream"]));
  }

  const centerHost = el("div", { class: "ws-center" });
  const chatHost = el("div", { class: "ws-chat" });
  const statusLine = el("div", { class: "status-line" });
  const timelineHost = el("div", { class: "ws-timeline" });

  const root = el("div", { class: "workspace" }, [
    el("div", { class: "ws-top" }, [videoHost, centerHost, chatHost]),
    statusLine,
    timelineHost,
  ]);
  mount.append(root);

  let timelineRef: TimelinePanel | null = null;
  if (video && ws.frames) {
    playback = new PlaybackSync(video, ws.frames, (bagMs) => timelineRef?.setCursorMs(bagMs));
  }
  const timeline = new TimelinePanel(ws, playback, timelineHost);
  timelineRef = timeline;
  const toolbar = new Toolbar(ws, timeline, centerHost);

  // auxiliary tabs under the toolbar
  const tabBar = el("div", { class: "ws-tabs" });
  const panelHost = el("div", { class: "ws-tab-panels" });
  centerHost.append(tabBar, panelHost);
  const statsHost = el("div", { class: "ws-tab", "data-tab": "stats" });
  const codebookHost = el("div", { class: "ws-tab", "data-tab": "codebook" });
  const transcriptHost = el("div", { class: "ws-tab", "data-tab": "transcript" });
  panelHost.append(statsHost, codebookHost, transcriptHost);
  const hosts: Record<string, HTMLElement> = {
    stats: statsHost,
    codebook: codebookHost,
    transcript: transcriptHost,
  };
  for (const name of Object.keys(hosts)) {
    const button = el("button", { class: "ws-tab-button", "data-tab": name }, [name]);
    button.addEventListener("click", () => {
      for (const [tab, host] of Object.entries(hosts)) {
        host.style.display = tab === name ? "" : "none";
      }
    });
    tabBar.append(button);
  }
  codebookHost.style.display = "none";
  transcriptHost.style.display = "none";

  const stats = new StatsPanel(ws, statsHost);
  const codebook = new CodebookPanel(ws, codebookHost);
  const transcript = new TranscriptPanel(ws, playback, transcriptHost);
  const chat = new ChatPanel(ws, chatHost);

  ws.subscribe(() => {
    statusLine.textContent = ws.status ? ws.status.text : "";
    statusLine.className = `status-line ${ws.status ? ws.status.kind : ""}`;
  });

  return { ws, timeline, toolbar, stats, chat, codebook, transcript, playback, video, root };
}

export function buildImportPage(
  api: ApiClient,
  mount: HTMLElement,
  onReady: (bagId: string) => void,
  pollMs?: number,
): ImportPage {
  clear(mount);
  return new ImportPage(api, mount, onReady, pollMs);
}
