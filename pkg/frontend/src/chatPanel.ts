// LLM chatbox. One request may be in flight at a time; the send
// control stays disabled until the reply lands. Replies render the
// assistant text plus the applied/rejected report, and the workspace
// refresh (done by sendChat) makes any created tier appear on the
// timeline without a reload.

import { ApiError } from "./api.js";
import { el } from "./dom.js";
import type { ChatResponse } from "./types.js";
import type { Workspace } from "./workspace.js";

const AUTH_HINT =
  "The chat endpoint rejected the request: set OPENAI_API_KEY on the server " +
  "(and CHAT_BASE_URL when using a local model) and try again.";

interface ChatEntry {
  role: "user" | "assistant" | "error";
  text: string;
  report?: ChatResponse;
}

export class ChatPanel {
  readonly root: HTMLElement;
  pending = false;
  readonly entries: ChatEntry[] = [];

  private readonly ws: Workspace;
  private readonly log: HTMLElement;
  private readonly input: HTMLTextAreaElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly privacySelect: HTMLSelectElement;

  constructor(ws: Workspace, mount: HTMLElement) {
    this.ws = ws;
    this.log = el("div", { class: "chat-log" });
    this.input = el("textarea", {
      class: "chat-input",
      placeholder: "Ask for annotations, e.g. mark every greeting",
      rows: "3",
    });
    this.privacySelect = el("select", { class: "chat-privacy" }, [
      el("option", { value: "deny_all_frames" }, ["no video frames"]),
      el("option", { value: "allow_all_frames" }, ["attach video frames"]),
    ]);
    this.sendButton = el("button", { class: "chat-send" }, ["Send"]);
    this.sendButton.addEventListener("click", () => void this.send());

    this.root = el("section", { class: "chat" }, [
      el("h3", {}, ["Assistant"]),
      this.log,
      el("div", { class: "chat-controls" }, [this.privacySelect, this.input, this.sendButton]),
    ]);
    mount.append(this.root);
  }

  async send(): Promise<void> {
    const instruction = this.input.value.trim();
    if (!instruction || this.pending) return;
    this.pending = true;
    this.sendButton.disabled = true;
    this.push({ role: "user", text: instruction });
    this.input.value = "";
    try {
      const reply = await this.ws.sendChat(instruction, {
        privacy_mode: this.privacySelect.value,
      });
      this.push({ role: "assistant", text: reply.assistant_text, report: reply });
    } catch (err) {
      if (err instanceof ApiError) {
        this.push({ role: "error", text: err.code === "AUTH" ? AUTH_HINT : err.message });
      } else {
        this.push({ role: "error", text: String(err) });
      }
    } finally {
      this.pending = false;
      this.sendButton.disabled = false;
    }
  }

  private push(entry: ChatEntry): void {
    this.entries.push(entry);
    const node = el("div", { class: `chat-entry chat-${entry.role}` }, [
      el("p", { class: "chat-text" }, [entry.text]),
    ]);
    if (entry.report) node.append(renderReport(entry.report));
    this.log.append(node);
    this.log.scrollTop = this.log.scrollHeight;
  }
}

function renderReport(reply: ChatResponse): HTMLElement {
  const parts: string[] = [`applied ${reply.applied}`];
  if (reply.created_tiers.length > 0) {
    parts.push(`created tier(s): ${reply.created_tiers.join(", ")}`);
  }
  if (reply.rejected.length > 0) {
    parts.push(`rejected ${reply.rejected.length}`);
  }
  if (reply.note) parts.push(reply.note);
  const report = el("div", { class: "chat-report" }, [parts.join("; ")]);
  for (const rejection of reply.rejected) {
    report.append(el("div", { class: "chat-rejected" }, [rejection.reason]));
  }
  return report;
}
