/** UI state with the server as sole authority.
 *
 * The job board keeps the last *confirmed* server rows and a queue of
 * in-flight optimistic moves; the rendered view is always
 * confirmed-plus-pending, so once every pending action is confirmed or
 * rolled back the view cannot contradict the server.
 */

import { api, ApiError } from "./api.js";
import type { Job, JobFilter, JobStatus, TimeWindow } from "./api.js";

export const JOB_COLUMNS: readonly JobStatus[] = [
  "open", "ongoing", "completed", "verified",
];

export interface ViewState {
  selectedSystem: string;
  window: TimeWindow;
  liveToggle: boolean;
  jobBoardFilter: JobFilter;
}

interface PendingMove {
  jobId: string;
  to: JobStatus;
}

export class JobBoardStore {
  private confirmed = new Map<string, Job>();
  private pending: PendingMove[] = [];
  private errors = new Map<string, string>();
  private listeners = new Set<() => void>();

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async load(filter: JobFilter = {}): Promise<void> {
    const jobs = await api.jobs(filter);
    this.confirmed = new Map(jobs.map((job) => [job.job_id, job]));
    this.pending = [];
    this.errors.clear();
    this.notify();
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  errorFor(jobId: string): string | undefined {
    return this.errors.get(jobId);
  }

  /** Confirmed rows overlaid with in-flight optimistic moves. */
  view(): Job[] {
    const rows = new Map<string, Job>();
    for (const [id, job] of this.confirmed) rows.set(id, job);
    for (const move of this.pending) {
      const job = rows.get(move.jobId);
      if (job) rows.set(move.jobId, { ...job, status: move.to });
    }
    return [...rows.values()].sort((a, b) => a.job_id.localeCompare(b.job_id));
  }

  columns(): Record<JobStatus, Job[]> {
    const out: Record<JobStatus, Job[]> = {
      open: [], ongoing: [], completed: [], verified: [],
    };
    for (const job of this.view()) out[job.status].push(job);
    return out;
  }

  /** Optimistic move: the card shifts immediately, then the server either
   *  confirms (row replaced with its response) or rejects (overlay removed,
   *  error surfaced on the card). Resolves true on confirmation. */
  async move(
    jobId: string,
    to: JobStatus,
    actor: string,
    comment?: string,
  ): Promise<boolean> {
    const job = this.confirmed.get(jobId);
    if (!job || job.status === to) return false;
    const entry: PendingMove = { jobId, to };
    this.pending.push(entry);
    this.errors.delete(jobId);
    this.notify();
    try {
      const updated = await api.transitionJob(jobId, to, actor, comment);
      this.confirmed.set(jobId, updated);
      return true;
    } catch (cause) {
      this.errors.set(jobId, describe(cause));
      return false;
    } finally {
      this.pending = this.pending.filter((p) => p !== entry);
      this.notify();
    }
  }

  async comment(jobId: string, actor: string, text: string): Promise<boolean> {
    try {
      const updated = await api.addComment(jobId, actor, text);
      this.confirmed.set(jobId, updated);
      this.errors.delete(jobId);
      return true;
    } catch (cause) {
      this.errors.set(jobId, describe(cause));
      return false;
    } finally {
      this.notify();
    }
  }
}

function describe(cause: unknown): string {
  if (cause instanceof ApiError) return cause.label;
  return cause instanceof Error ? cause.message : String(cause);
}
