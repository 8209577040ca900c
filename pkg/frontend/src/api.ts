/** Typed client for the twin service's REST + SSE surface.
 *
 * Every validation failure the UI shows originates here: the service's
 * `{"error": <TypeName>, "message": <text>}` envelope becomes an ApiError,
 * and callers render that — the browser performs no business logic.
 */

import { baseUrl } from "./config.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly error: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get label(): string {
    return `${this.error}: ${this.message}`;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl()}${path}`, init);
  } catch (cause) {
    throw new ApiError(0, "NetworkError", String(cause));
  }
  const text = await response.text();
  if (!response.ok) {
    let error = "HttpError";
    let message = text || response.statusText;
    try {
      const body = JSON.parse(text);
      if (typeof body.error === "string") error = body.error;
      if (typeof body.message === "string") message = body.message;
    } catch {
      // non-JSON error body: keep the raw text
    }
    throw new ApiError(response.status, error, message);
  }
  return JSON.parse(text) as T;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

function query(
  params: Record<string, string | number | boolean | undefined>,
): string {
  const qs = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) qs.set(key, String(value));
  }
  const flat = qs.toString();
  return flat ? `?${flat}` : "";
}

// ---------------------------------------------------------------- payloads

export interface Space {
  room_category: string;
  room_name: string;
  room_tag: string;
  room_augment_id: string;
  floor_level: string;
}

export interface Equipment {
  omniclass_system: string;
  omniclass_type: string;
  augment_id_type: string;
  augment_id_instance: string;
  space_instance: string;
  discipline: string;
  om_properties: Record<string, unknown>;
  document_ids: string[];
}

export interface DocumentMeta {
  doc_id: string;
  kind: string;
  title: string;
  uri_or_path: string;
  uploaded_at: string | null;
}

export interface Sensor {
  sensor_id: string;
  bound_equipment: string;
  kind: string;
  unit: string;
  interval_s: number;
  low: number;
  high: number;
  live_capable: boolean;
  dashboard_support: boolean;
}

export interface Alarm {
  alarm_id: string;
  sensor_id: string;
  state: "raised" | "acknowledged" | "cleared";
  raised_at: string;
  trigger_value: number;
  acked_at: string | null;
  cleared_at: string | null;
  actor: string | null;
}

export type JobStatus = "open" | "ongoing" | "completed" | "verified";

export interface JobComment {
  at: string;
  actor: string;
  text: string;
}

export interface Job {
  job_id: string;
  status: JobStatus;
  origin: "preventive" | "reactive";
  target: string;
  target_kind: "equipment" | "room";
  description: string;
  assignee_role: string;
  assignee: string | null;
  created_at: string;
  comments: JobComment[];
}

export interface SeriesPoint {
  bucket_start: string;
  value: number | null;
  sample_count: number;
}

export interface Series {
  system: string;
  metric: string;
  kind: string;
  agg: string;
  unit: string;
  points: SeriesPoint[];
}

export type DashboardIndex = Record<string, { title: string; metrics: string[] }>;

export interface TimeWindow {
  from: string;
  to: string;
  bucket: number;
}

export type JobFilter = {
  status?: string;
  role?: string;
  target?: string;
};

export type EquipmentFilter = {
  room_tag?: string;
  discipline?: string;
  omniclass_prefix?: string;
  augment_id?: string;
};

// ------------------------------------------------------------------- calls

export const api = {
  spaces: () => request<Space[]>("/spaces"),
  equipment: (filter: EquipmentFilter = {}) =>
    request<Equipment[]>(`/equipment${query(filter)}`),
  equipmentItem: (id: string) =>
    request<Equipment>(`/equipment/${encodeURIComponent(id)}`),
  documents: (id: string) =>
    request<DocumentMeta[]>(`/equipment/${encodeURIComponent(id)}/documents`),
  sensors: (equipment?: string) =>
    request<Sensor[]>(`/sensors${query({ equipment })}`),
  alarms: (active = false) => request<Alarm[]>(`/alarms${query({ active })}`),
  ackAlarm: (alarmId: string, actor: string) =>
    post<Alarm>(`/alarms/${encodeURIComponent(alarmId)}/ack`, { actor }),
  jobs: (filter: JobFilter = {}) => request<Job[]>(`/jobs${query(filter)}`),
  createJob: (target: string, description: string) =>
    post<Job>("/jobs", { target, description }),
  transitionJob: (jobId: string, toStatus: JobStatus, actor: string, comment?: string) =>
    post<Job>(`/jobs/${encodeURIComponent(jobId)}/transition`, {
      to_status: toStatus,
      actor,
      comment,
    }),
  addComment: (jobId: string, actor: string, text: string) =>
    post<Job>(`/jobs/${encodeURIComponent(jobId)}/comments`, { actor, text }),
  dashboards: () => request<DashboardIndex>("/dashboards"),
  dashboard: (system: string, w: TimeWindow) =>
    request<Series[]>(`/dashboards/${encodeURIComponent(system)}${query({
      from: w.from,
      to: w.to,
      bucket: w.bucket,
    })}`),
};

// ------------------------------------------------------------- live stream

export interface LiveReading {
  sensor_id: string;
  equipment_id: string;
  kind: string;
  at: string;
  value: number;
  source: string;
  seq: number;
}

export interface StreamHandle {
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSource;

let eventSourceFactory: EventSourceFactory = (url) => new EventSource(url);

/** Test hook: swap the EventSource implementation. */
export function setEventSourceFactory(factory: EventSourceFactory): void {
  eventSourceFactory = factory;
}

/** Subscribe to committed readings; auto-reconnect is EventSource-native,
 *  and each reconnect resubscribes with the same filter (no replay). */
export function openStream(
  filter: { equipment?: string },
  onReading: (reading: LiveReading) => void,
  onStateChange?: (state: "open" | "error") => void,
): StreamHandle {
  const source = eventSourceFactory(
    `${baseUrl()}/stream${query({ equipment: filter.equipment })}`,
  );
  source.addEventListener("reading", (event) => {
    onReading(JSON.parse((event as MessageEvent).data) as LiveReading);
  });
  source.onopen = () => onStateChange?.("open");
  source.onerror = () => onStateChange?.("error");
  return { close: () => source.close() };
}
