// Typed client for the annotation service. Every non-2xx response is
// raised as ApiError carrying the server's machine code, so views can
// branch on codes (OVERLAP, AUTH, ...) instead of status numbers.

import type {
  AnnotationRow,
  BagRow,
  ChatOptions,
  ChatResponse,
  CodebookDoc,
  FrameIndexDoc,
  JobInfo,
  Manifest,
  ProcessOptions,
  ProcessResponse,
  ProjectDoc,
  StatsDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly field: string | null;
  readonly status: number;

  constructor(status: number, code: string, message: string, field: string | null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let code = "HTTP_" + resp.status;
  let message = resp.statusText || "request failed";
  let field: string | null = null;
  try {
    const body = await resp.json();
    if (body && typeof body === "object" && body.error) {
      code = String(body.error.code);
      message = String(body.error.message);
      field = body.error.field ?? null;
    }
  } catch {
    // non-JSON body; keep the status-derived code
  }
  throw new ApiError(resp.status, code, message, field);
}

export class ApiClient {
  readonly baseUrl: string;

  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const resp = await fetch(this.baseUrl + path);
    if (!resp.ok) await raiseFor(resp);
    return resp.text();
  }

  listBags(): Promise<BagRow[]> {
    return this.request("GET", "/api/bags");
  }

  processBag(ident: string, options: ProcessOptions = {}): Promise<ProcessResponse> {
    return this.request("POST", `/api/bags/${encodeURIComponent(ident)}/process`, options);
  }

  getManifest(ident: string): Promise<Manifest> {
    return this.request("GET", `/api/bags/${encodeURIComponent(ident)}/manifest`);
  }

  getFrameIndex(ident: string): Promise<FrameIndexDoc> {
    return this.request("GET", `/api/bags/${encodeURIComponent(ident)}/frame-index`);
  }

  getJob(jobId: string): Promise<JobInfo> {
    return this.request("GET", `/api/jobs/${encodeURIComponent(jobId)}`);
  }

  /** Poll a job until it leaves queued/running. Interval per the 1 Hz contract. */
  async waitForJob(jobId: string, intervalMs = 1000): Promise<JobInfo> {
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.state === "done" || job.state === "failed") return job;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  mediaUrl(bagId: string, kind: "video" | "audio"): string {
    return `${this.baseUrl}/media/${encodeURIComponent(bagId)}/${kind}`;
  }

  openProject(bagId: string): Promise<{ created: boolean; project: ProjectDoc }> {
    return this.request("POST", `/api/projects/${encodeURIComponent(bagId)}`);
  }

  getProject(bagId: string): Promise<ProjectDoc> {
    return this.request("GET", `/api/projects/${encodeURIComponent(bagId)}`);
  }

  createTier(
    bagId: string,
    name: string,
    kind: string,
    codebookRef: string | null = null,
  ): Promise<{ name: string; kind: string; codebook_ref: string | null; origin: string }> {
    return this.request("POST", `/api/projects/${encodeURIComponent(bagId)}/tiers`, {
      name,
      kind,
      codebook_ref: codebookRef,
    });
  }

  createAnnotation(
    bagId: string,
    tier: string,
    startMs: number,
    endMs: number,
    value: string,
  ): Promise<AnnotationRow & { tier: string }> {
    return this.request("POST", `/api/projects/${encodeURIComponent(bagId)}/annotations`, {
      tier,
      start_ms: startMs,
      end_ms: endMs,
      value,
    });
  }

  updateAnnotation(
    bagId: string,
    annId: string,
    patch: { start_ms?: number; end_ms?: number; value?: string; tier?: string },
  ): Promise<AnnotationRow & { tier: string }> {
    return this.request(
      "PUT",
      `/api/projects/${encodeURIComponent(bagId)}/annotations/${encodeURIComponent(annId)}`,
      patch,
    );
  }

  deleteAnnotation(bagId: string, annId: string): Promise<{ deleted: string }> {
    return this.request(
      "DELETE",
      `/api/projects/${encodeURIComponent(bagId)}/annotations/${encodeURIComponent(annId)}`,
    );
  }

  getStats(bagId: string, includeTranscript = true): Promise<StatsDoc> {
    const q = includeTranscript ? "" : "?include_transcript=false";
    return this.request("GET", `/api/projects/${encodeURIComponent(bagId)}/stats${q}`);
  }

  exportAnnotationsCsv(bagId: string): Promise<string> {
    return this.requestText(`/api/projects/${encodeURIComponent(bagId)}/export/csv`);
  }

  exportStatsCsv(bagId: string): Promise<string> {
    return this.requestText(`/api/projects/${encodeURIComponent(bagId)}/export/stats?format=csv`);
  }

  chat(bagId: string, instruction: string, options: ChatOptions = {}): Promise<ChatResponse> {
    return this.request("POST", `/api/projects/${encodeURIComponent(bagId)}/chat`, {
      instruction,
      ...options,
    });
  }

  listCodebooks(): Promise<CodebookDoc[]> {
    return this.request("GET", "/api/codebooks");
  }

  saveCodebook(book: CodebookDoc): Promise<CodebookDoc> {
    return this.request("PUT", `/api/codebooks/${encodeURIComponent(book.name)}`, book);
  }
}
