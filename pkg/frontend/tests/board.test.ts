/** Job-board view: column rendering, optimistic drag with server-confirmed
 *  moves, rollback while a request is in flight, and the comment form. */

import { afterEach, describe, expect, it, vi } from "vitest";

import { JobBoardView } from "../src/board";
import { JobBoardStore } from "../src/state";
import {
  ApiStub,
  deferred,
  dragStartEvent,
  dropEvent,
  envelope,
  flush,
  jobOf,
  json,
} from "./stub";

afterEach(() => {
  vi.unstubAllGlobals();
});

async function boardWith(stub: ApiStub) {
  stub.install();
  const store = new JobBoardStore();
  const view = new JobBoardView(store, "operator");
  await store.load();
  return { store, view };
}

describe("rendering", () => {
  it("lays jobs out in four status columns with counts", async () => {
    const { view } = await boardWith(
      new ApiStub().get("/jobs", [
        jobOf("JOB-00001", "open"),
        jobOf("JOB-00002", "open"),
        jobOf("JOB-00003", "ongoing", { assignee: "alice" }),
      ]),
    );

    const headers = [...view.element.querySelectorAll("h3")].map(
      (h) => h.textContent,
    );
    expect(headers).toEqual([
      "Open (2)",
      "Ongoing (1)",
      "Completed (0)",
      "Verified (0)",
    ]);
    const card = view.element.querySelector('[data-job="JOB-00003"]')!;
    expect(card.querySelector(".meta")!.textContent).toContain("alice");
  });

  it("marks cards draggable and publishes the job id on dragstart", async () => {
    const { view } = await boardWith(
      new ApiStub().get("/jobs", [jobOf("JOB-00001", "open")]),
    );
    const card = view.element.querySelector('[data-job="JOB-00001"]')!;
    expect(card.getAttribute("draggable")).toBe("true");

    const { event, data } = dragStartEvent();
    card.dispatchEvent(event);
    expect(data.get("text/plain")).toBe("JOB-00001");
  });
});

describe("drag and drop", () => {
  it("moves a card once the server confirms the transition", async () => {
    const stub = new ApiStub()
      .get("/jobs", [jobOf("JOB-00001", "open")])
      .post("/jobs/JOB-00001/transition", (_url: URL, body: unknown) => {
        const payload = body as { to_status: string; actor: string };
        expect(payload.to_status).toBe("ongoing");
        expect(payload.actor).toBe("operator");
        return json(200, jobOf("JOB-00001", "ongoing", { assignee: "operator" }));
      });
    const { view } = await boardWith(stub);

    view.element
      .querySelector('[data-status="ongoing"]')!
      .dispatchEvent(dropEvent("JOB-00001"));
    await flush();

    expect(
      view.element.querySelector('[data-status="ongoing"] [data-job="JOB-00001"]'),
    ).not.toBeNull();
    expect(view.element.querySelector(".card-error")).toBeNull();
  });

  it("shows the move optimistically, then rolls back on rejection", async () => {
    const gate = deferred<Response>();
    const stub = new ApiStub()
      .get("/jobs", [jobOf("JOB-00001", "open")])
      .post("/jobs/JOB-00001/transition", () => gate.promise);
    const { store, view } = await boardWith(stub);

    view.element
      .querySelector('[data-status="completed"]')!
      .dispatchEvent(dropEvent("JOB-00001"));

    // Optimistic: the card is already in the target column while the
    // request is still in flight.
    expect(store.pendingCount).toBe(1);
    expect(
      view.element.querySelector(
        '[data-status="completed"] [data-job="JOB-00001"]',
      ),
    ).not.toBeNull();

    gate.resolve(envelope(409, "IllegalTransition", "open -> completed"));
    await flush();

    expect(store.pendingCount).toBe(0);
    expect(
      view.element.querySelector('[data-status="open"] [data-job="JOB-00001"]'),
    ).not.toBeNull();
    expect(view.element.querySelector(".card-error")!.textContent).toContain(
      "IllegalTransition",
    );
  });

  it("issues no request when dropped on its current column", async () => {
    const stub = new ApiStub().get("/jobs", [jobOf("JOB-00001", "open")]);
    const { view } = await boardWith(stub);
    view.element
      .querySelector('[data-status="open"]')!
      .dispatchEvent(dropEvent("JOB-00001"));
    await flush();
    expect(stub.callsTo("POST", "/jobs/JOB-00001/transition")).toHaveLength(0);
  });

  it("ignores drops carrying an unknown job id", async () => {
    const stub = new ApiStub().get("/jobs", [jobOf("JOB-00001", "open")]);
    const { view } = await boardWith(stub);
    view.element
      .querySelector('[data-status="ongoing"]')!
      .dispatchEvent(dropEvent("JOB-99999"));
    await flush();
    expect(stub.calls.filter((c) => c.method === "POST")).toHaveLength(0);
  });
});

describe("comments", () => {
  it("posts a trimmed comment and renders the server's updated card", async () => {
    const stub = new ApiStub()
      .get("/jobs", [jobOf("JOB-00001", "open")])
      .post("/jobs/JOB-00001/comments", (_url: URL, body: unknown) => {
        const payload = body as { actor: string; text: string };
        return json(
          200,
          jobOf("JOB-00001", "open", {
            comments: [
              { at: "2024-03-01T01:00:00+00:00", actor: payload.actor, text: payload.text },
            ],
          }),
        );
      });
    const { view } = await boardWith(stub);

    const card = view.element.querySelector('[data-job="JOB-00001"]')!;
    const input = card.querySelector<HTMLInputElement>(".comment-input")!;
    input.value = "  checked on site  ";
    card.querySelector("button")!.dispatchEvent(new Event("click"));
    await flush();

    const posted = stub.callsTo("POST", "/jobs/JOB-00001/comments");
    expect(posted).toHaveLength(1);
    expect(posted[0]!.body).toEqual({ actor: "operator", text: "checked on site" });
    expect(
      view.element.querySelector('[data-job="JOB-00001"] .comments li')!
        .textContent,
    ).toBe("operator: checked on site");
  });

  it("sends nothing for a blank comment", async () => {
    const stub = new ApiStub().get("/jobs", [jobOf("JOB-00001", "open")]);
    const { view } = await boardWith(stub);
    const card = view.element.querySelector('[data-job="JOB-00001"]')!;
    card.querySelector<HTMLInputElement>(".comment-input")!.value = "   ";
    card.querySelector("button")!.dispatchEvent(new Event("click"));
    await flush();
    expect(stub.calls.filter((c) => c.method === "POST")).toHaveLength(0);
  });

  it("pins the error to the card when the comment is rejected", async () => {
    const stub = new ApiStub()
      .get("/jobs", [jobOf("JOB-00001", "open")])
      .post("/jobs/JOB-00001/comments", () =>
        envelope(404, "UnknownJob", 'no job "JOB-00001"'),
      );
    const { view } = await boardWith(stub);
    const card = view.element.querySelector('[data-job="JOB-00001"]')!;
    card.querySelector<HTMLInputElement>(".comment-input")!.value = "hello";
    card.querySelector("button")!.dispatchEvent(new Event("click"));
    await flush();
    expect(view.element.querySelector(".card-error")!.textContent).toContain(
      "UnknownJob",
    );
  });
});
