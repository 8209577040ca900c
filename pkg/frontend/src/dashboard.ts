/** One system dashboard: a chart per registered metric, an alarm badge fed
 *  by `GET /alarms`, an optional scheduled-service panel, and — with the
 *  live toggle on — SSE readings appended to the matching charts. */

import { api, openStream } from "./api.js";
import type { LiveReading, StreamHandle, TimeWindow } from "./api.js";
import { activeAlarmCounts } from "./alarms.js";
import { SeriesChart } from "./charts.js";
import { el, errorPanel } from "./dom.js";
import type { DashboardEntry } from "./registry.js";

export class DashboardView {
  readonly element = el("section", { class: "dashboard" });
  private chartsByKind = new Map<string, SeriesChart>();
  private equipmentIds = new Set<string>();
  private stream: StreamHandle | null = null;

  constructor(readonly entry: DashboardEntry) {}

  async load(window: TimeWindow, live: boolean): Promise<void> {
    this.stop();
    this.chartsByKind.clear();
    try {
      const [seriesList, alarms, sensors, equipment] = await Promise.all([
        api.dashboard(this.entry.key, window),
        api.alarms(true),
        api.sensors(),
        api.equipment({ omniclass_prefix: this.entry.equipmentPrefix }),
      ]);
      this.equipmentIds = new Set(equipment.map((e) => e.augment_id_instance));

      const header = el("header", {}, el("h2", {}, this.entry.title));
      const alarmCount =
        activeAlarmCounts(alarms, sensors, equipment).get(this.entry.key) ?? 0;
      if (alarmCount > 0) {
        header.append(el("span", { class: "alarm-badge" },
          `${alarmCount} active alarm${alarmCount === 1 ? "" : "s"}`));
      }

      const grid = el("div", { class: "panel-grid" });
      const byMetric = new Map(seriesList.map((s) => [s.metric, s]));
      for (const panel of this.entry.panels) {
        const series = byMetric.get(panel.metric);
        const chart = new SeriesChart(panel, series);
        if (series) this.chartsByKind.set(series.kind, chart);
        grid.append(chart.element);
      }
      if (this.entry.scheduledService) {
        grid.append(await this.scheduledServicePanel());
      }
      this.element.replaceChildren(header, grid);
      if (live) this.startLive();
    } catch (cause) {
      this.element.replaceChildren(errorPanel(cause));
    }
  }

  /** Open service jobs targeting this system's equipment. */
  private async scheduledServicePanel(): Promise<HTMLElement> {
    const jobs = await api.jobs({ status: "open" });
    const mine = jobs.filter((job) => this.equipmentIds.has(job.target));
    const body = mine.length
      ? el("ul", {},
          ...mine.map((job) => el("li", {}, `${job.job_id}: ${job.description}`)))
      : el("p", { class: "no-data" }, "no open service jobs");
    return el("article", { class: "panel scheduled-service" },
      el("h3", {}, "Scheduled service"), body);
  }

  private startLive(): void {
    this.stream = openStream({}, (reading: LiveReading) => {
      if (!this.equipmentIds.has(reading.equipment_id)) return;
      this.chartsByKind.get(reading.kind)?.append(reading);
    });
  }

  stop(): void {
    this.stream?.close();
    this.stream = null;
  }
}
