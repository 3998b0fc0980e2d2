// Wire types mirroring the service's JSON bodies.

export type Method = "shot" | "uniform";
export type Metric = "cosine_deep" | "histmap_l1";

export interface Health {
  status: string;
  days: number;
  frames: number;
  segments: Record<string, number>;
  vectors_available: boolean;
  vector_dim: number | null;
  default_method: Method;
  fps: number;
  concepts: string[];
  locations: string[];
  activities: string[];
  tasks: { task_id: string; duration_s: number; hint_count: number }[];
}

export interface TileCell {
  row: number;
  col: number;
  segment_id: number | null;
  score: number | null;
  empty: boolean;
  keyframe_url: string | null;
  day_id?: string | null;
  keyframe?: number | null;
}

export interface Tile {
  criterion: string;
  method: string;
  level: number;
  levels: number;
  level_rows: number;
  level_cols: number;
  row0: number;
  col0: number;
  rows: number;
  cols: number;
  cells: TileCell[];
}

export interface MapsInfo {
  criteria: string[];
  methods: string[];
  concept_criteria: string[];
  viewport: number;
}

export interface SegmentInfo {
  segment_id: number;
  day_id: string;
  start: number;
  end: number;
  keyframe: number;
  keyframe_url: string;
}

export interface DaySummary {
  day_id: string;
  method: string;
  frame_count: number;
  prev_day: string | null;
  next_day: string | null;
  segments: SegmentInfo[];
}

export interface FramePayload {
  day_id: string;
  index: number;
  width: number;
  height: number;
  rgb_base64: string;
}

export interface FrameMeta {
  index: number;
  timestamp_utc: number;
  tz_offset_min: number;
  local_minutes: number;
  weekday: number;
  sensor: Record<string, unknown> | null;
  concepts: { id: string; confidence: number; bbox: number[] | null }[];
  ocr: string[];
}

export interface DayMeta {
  day_id: string;
  fps: number;
  frame_count: number;
  frames: FrameMeta[];
}

export interface QueryResultEntry extends SegmentInfo {
  frames: number[];
}

export interface QueryResponse {
  method: string;
  total: number;
  results: QueryResultEntry[];
}

export interface NeighborEntry extends SegmentInfo {
  score: number;
  rank: number;
}

export interface NeighborsResponse {
  metric: string;
  method: string;
  results: NeighborEntry[];
}

export interface TaskHints {
  task_id: string;
  elapsed_s: number;
  expired: boolean;
  hints: { t: number; text: string }[];
}

export interface SubmitResponse {
  task_id: string;
  correct: boolean;
  solved: boolean;
  wrong_count: number;
  score: number | null;
  elapsed_s: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown> | null;
}
