// Holds everything the workspace renders. The project field is always
// the most recent server response, never a locally patched copy: every
// mutation round-trips through the API and then re-fetches, so a
// rendered annotation exists on the server by construction.

import { ApiClient, ApiError } from "./api.js";
import { FrameMap } from "./time.js";
import type {
  ChatOptions,
  ChatResponse,
  CodebookDoc,
  Manifest,
  ProjectDoc,
  TierRow,
} from "./types.js";

export type StatusKind = "info" | "error";

export interface StatusLine {
  text: string;
  kind: StatusKind;
}

export type MutationResult = { ok: true } | { ok: false; error: ApiError };

type Listener = () => void;

export class Workspace {
  readonly api: ApiClient;
  readonly bagId: string;
  readonly manifest: Manifest;
  readonly frames: FrameMap | null;
  project: ProjectDoc;
  codebooks: CodebookDoc[];
  status: StatusLine | null = null;
  private listeners: Listener[] = [];

  private constructor(
    api: ApiClient,
    manifest: Manifest,
    frames: FrameMap | null,
    project: ProjectDoc,
    codebooks: CodebookDoc[],
  ) {
    this.api = api;
    this.bagId = manifest.bag_id;
    this.manifest = manifest;
    this.frames = frames;
    this.project = project;
    this.codebooks = codebooks;
  }

  static async load(api: ApiClient, bagId: string): Promise<Workspace> {
    const manifest = await api.getManifest(bagId);
    const { project } = await api.openProject(manifest.bag_id);
    const codebooks = await api.listCodebooks();
    const frames =
      manifest.video === null ? null : new FrameMap(await api.getFrameIndex(manifest.bag_id));
    return new Workspace(api, manifest, frames, project, codebooks);
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  setStatus(text: string, kind: StatusKind = "info"): void {
    this.status = { text, kind };
    this.emit();
  }

  tier(name: string): TierRow | undefined {
    return this.project.tiers.find((t) => t.name === name);
  }

  codebook(name: string | null): CodebookDoc | undefined {
    if (name === null) return undefined;
    return this.codebooks.find((b) => b.name === name);
  }

  async refresh(): Promise<void> {
    this.project = await this.api.getProject(this.bagId);
    this.emit();
  }

  async refreshCodebooks(): Promise<void> {
    this.codebooks = await this.api.listCodebooks();
    this.emit();
  }

  // Mutations: API call, then re-fetch, then notify. Failures surface
  // as a result value so views can react (snap-back, cue) without
  // try/catch noise; non-domain errors still throw.
  private async mutate(op: () => Promise<unknown>): Promise<MutationResult> {
    try {
      await op();
    } catch (err) {
      if (err instanceof ApiError) {
        this.setStatus(`${err.code}: ${err.message}`, "error");
        return { ok: false, error: err };
      }
      throw err;
    }
    await this.refresh();
    return { ok: true };
  }

  addTier(name: string, kind: string, codebookRef: string | null): Promise<MutationResult> {
    return this.mutate(() => this.api.createTier(this.bagId, name, kind, codebookRef));
  }

  addAnnotation(
    tier: string,
    startMs: number,
    endMs: number,
    value: string,
  ): Promise<MutationResult> {
    return this.mutate(() => this.api.createAnnotation(this.bagId, tier, startMs, endMs, value));
  }

  moveAnnotation(annId: string, startMs: number, endMs: number): Promise<MutationResult> {
    return this.mutate(() =>
      this.api.updateAnnotation(this.bagId, annId, { start_ms: startMs, end_ms: endMs }),
    );
  }

  relabelAnnotation(annId: string, value: string): Promise<MutationResult> {
    return this.mutate(() => this.api.updateAnnotation(this.bagId, annId, { value }));
  }

  removeAnnotation(annId: string): Promise<MutationResult> {
    return this.mutate(() => this.api.deleteAnnotation(this.bagId, annId));
  }

  /** One chat turn; on success the project is re-fetched so any new tier renders. */
  async sendChat(instruction: string, options: ChatOptions = {}): Promise<ChatResponse> {
    const reply = await this.api.chat(this.bagId, instruction, options);
    await this.refresh();
    return reply;
  }
}
