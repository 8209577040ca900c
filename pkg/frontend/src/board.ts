/** Kanban job board over the four workflow columns.
 *
 * Dragging a card issues the transition optimistically; the server's
 * rejection snaps the card back and pins the error message to it. The board
 * itself enforces nothing — legality lives server-side.
 */

import type { Job, JobStatus } from "./api.js";
import { el } from "./dom.js";
import { JOB_COLUMNS, JobBoardStore } from "./state.js";

const STATUS_LABELS: Record<JobStatus, string> = {
  open: "Open",
  ongoing: "Ongoing",
  completed: "Completed",
  verified: "Verified",
};

export class JobBoardView {
  readonly element = el("section", { class: "job-board" });

  constructor(
    private readonly store: JobBoardStore,
    private readonly actor: string,
  ) {
    store.subscribe(() => this.render());
    this.render();
  }

  render(): void {
    const columns = this.store.columns();
    this.element.replaceChildren(
      ...JOB_COLUMNS.map((status) => this.renderColumn(status, columns[status])),
    );
  }

  private renderColumn(status: JobStatus, jobs: Job[]): HTMLElement {
    const column = el("div", { class: "board-column", "data-status": status },
      el("h3", {}, `${STATUS_LABELS[status]} (${jobs.length})`),
      el("div", { class: "cards" }, ...jobs.map((job) => this.renderCard(job))));
    column.addEventListener("dragover", (event) => event.preventDefault());
    column.addEventListener("drop", (event) => {
      event.preventDefault();
      const jobId = (event as DragEvent).dataTransfer?.getData("text/plain");
      if (jobId) void this.store.move(jobId, status, this.actor);
    });
    return column;
  }

  private renderCard(job: Job): HTMLElement {
    const card = el("article",
      { class: `job-card ${job.origin}`, "data-job": job.job_id, draggable: "true" },
      el("h4", {}, job.job_id),
      el("p", { class: "description" }, job.description),
      el("p", { class: "meta" },
        `${job.target} · ${job.assignee ?? `unassigned ${job.assignee_role}`}`));
    card.addEventListener("dragstart", (event) => {
      (event as DragEvent).dataTransfer?.setData("text/plain", job.job_id);
    });

    const error = this.store.errorFor(job.job_id);
    if (error) card.append(el("p", { class: "card-error", role: "alert" }, error));

    if (job.comments.length > 0) {
      card.append(el("ul", { class: "comments" },
        ...job.comments.map((c) => el("li", {}, `${c.actor}: ${c.text}`))));
    }

    const input = el("input", {
      class: "comment-input", type: "text", placeholder: "add a comment",
    });
    const button = el("button", { type: "button" }, "Comment");
    button.addEventListener("click", () => {
      const text = input.value.trim();
      if (text) void this.store.comment(job.job_id, this.actor, text);
    });
    card.append(el("div", { class: "comment-form" }, input, button));
    return card;
  }
}
