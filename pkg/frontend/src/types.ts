// Wire shapes, field names exactly as the backend emits them.

export interface BagRow {
  name: string;
  bag_id: string;
  size: number;
  processed: boolean;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobInfo {
  id: string;
  kind: string;
  state: JobState;
  progress: number;
  error: string | null;
  result: ProcessJobResult | null;
}

export interface ProcessJobResult {
  bag_id: string;
  manifest: Manifest;
  cache_hit: boolean;
}

export type ProcessResponse =
  | { cached: true; bag_id: string; manifest: Manifest }
  | { cached: false; bag_id: string; job: JobInfo };

export interface VideoInfo {
  path: string;
  frame_count: number;
  frame_index_path: string;
  width: number;
  height: number;
}

export interface AudioInfo {
  path: string;
  sample_rate: number;
  duration_ms: number;
  decoded: boolean;
}

export interface TranscriptInfo {
  path: string;
  speakers: string[];
}

export interface Manifest {
  bag_id: string;
  timeline_origin: { secs: number; nsecs: number };
  observation_ms: number;
  video: VideoInfo | null;
  audio: AudioInfo | null;
  transcript: TranscriptInfo | null;
  produced_at: number;
  config_fingerprint: string;
  warnings: string[];
}

export interface FrameIndexDoc {
  micro_sec_per_frame: number;
  bag_time_ms: number[];
}

export type TierKind = "codebook" | "free_text" | "transcript";
export type TierOrigin = "manual" | "llm" | "transcript";

export interface AnnotationRow {
  id: string;
  start_ms: number;
  end_ms: number;
  value: string;
}

export interface TierRow {
  name: string;
  kind: TierKind;
  codebook_ref: string | null;
  origin: TierOrigin;
  annotations: AnnotationRow[];
}

export interface ProjectDoc {
  bag_id: string;
  observation_ms: number;
  tiers: TierRow[];
}

export interface OverallStats {
  occurrences: number;
  frequency_per_min: number;
  average_duration_ms: number;
  time_ratio: number;
  latency_ms: number | null;
}

export interface TierStats {
  count: number;
  min_duration_ms: number;
  max_duration_ms: number;
  average_duration_ms: number;
  median_duration_ms: number;
  total_duration_ms: number;
  duration_percentage: number;
  latency_ms: number | null;
}

export interface StatsDoc {
  overall: OverallStats;
  tiers: Record<string, TierStats>;
}

export interface CodebookCode {
  code: string;
  description: string;
  color: string | null;
}

export interface CodebookDoc {
  name: string;
  codes: CodebookCode[];
}

export interface ChatResponse {
  assistant_text: string;
  created_tiers: string[];
  applied: number;
  rejected: { item: unknown; reason: string }[];
  note?: string;
}

export interface ProcessOptions {
  transcribe?: boolean;
  audio_format_hint?: string;
  video_topic?: string;
  audio_topic?: string;
  sample_rate?: number;
  channels?: number;
}

export interface ChatOptions {
  privacy_mode?: string;
  frames_per_minute?: number;
  model?: string;
}
