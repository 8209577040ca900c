/** App shell: hash routing between the ten dashboards, the job board, and
 *  the equipment browser. Base URL comes from `window.TWINFM_BASE_URL`
 *  (same-origin when unset) — the single configuration setting. */

import { configure } from "./config.js";
import { el } from "./dom.js";
import { DASHBOARDS, dashboardEntry } from "./registry.js";
import { DashboardView } from "./dashboard.js";
import { JobBoardView } from "./board.js";
import { EquipmentBrowser } from "./browser.js";
import { JobBoardStore } from "./state.js";
import type { ViewState } from "./state.js";

declare global {
  interface Window {
    TWINFM_BASE_URL?: string;
  }
}

const ACTOR = "operator";

function lastDayWindow(): { from: string; to: string; bucket: number } {
  const to = new Date();
  const from = new Date(to.getTime() - 24 * 3600 * 1000);
  return { from: from.toISOString(), to: to.toISOString(), bucket: 3600 };
}

export function startApp(root: HTMLElement): void {
  configure({ baseUrl: window.TWINFM_BASE_URL ?? "" });

  const state: ViewState = {
    selectedSystem: DASHBOARDS[0]?.key ?? "ahu",
    window: lastDayWindow(),
    liveToggle: false,
    jobBoardFilter: {},
  };

  const nav = el("nav", { class: "top-nav" });
  for (const entry of DASHBOARDS) {
    nav.append(el("a", { href: `#/dashboards/${entry.key}` }, entry.title));
  }
  nav.append(
    el("a", { href: "#/board" }, "Job board"),
    el("a", { href: "#/equipment" }, "Equipment"));

  const liveToggle = el("input", { type: "checkbox", id: "live-toggle" });
  liveToggle.addEventListener("change", () => {
    state.liveToggle = liveToggle.checked;
    void route();
  });
  nav.append(el("label", { for: "live-toggle" }, liveToggle, " live"));

  const outlet = el("main", { class: "outlet" });
  root.replaceChildren(nav, outlet);

  let activeDashboard: DashboardView | null = null;

  async function route(): Promise<void> {
    activeDashboard?.stop();
    activeDashboard = null;
    const hash = window.location.hash.replace(/^#\//, "");
    const [section = "dashboards", arg] =
      hash ? hash.split("/") : ["dashboards", state.selectedSystem];

    if (section === "board") {
      const store = new JobBoardStore();
      const view = new JobBoardView(store, ACTOR);
      outlet.replaceChildren(view.element);
      await store.load(state.jobBoardFilter);
    } else if (section === "equipment") {
      const browser = new EquipmentBrowser();
      outlet.replaceChildren(browser.element);
      await browser.load();
      if (arg) await browser.select(arg);
    } else {
      const entry = dashboardEntry(arg ?? state.selectedSystem) ?? DASHBOARDS[0];
      if (!entry) return;
      state.selectedSystem = entry.key;
      const view = new DashboardView(entry);
      activeDashboard = view;
      outlet.replaceChildren(view.element);
      await view.load(state.window, state.liveToggle);
    }
  }

  window.addEventListener("hashchange", () => void route());
  void route();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  startApp(document.getElementById("app") as HTMLElement);
}
