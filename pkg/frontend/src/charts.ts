/** Dependency-free SVG line panels.
 *
 * A panel shows its bucketed history and, with the live toggle on, appends
 * stream readings in arrival (commit) order — points are never reordered or
 * dropped. A window with no data says so; it never fakes a zero.
 */

import type { Series } from "./api.js";
import { el } from "./dom.js";
import type { MetricPanel } from "./registry.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 320;
const HEIGHT = 96;

interface Point {
  at: string;
  value: number;
}

export class SeriesChart {
  readonly element: HTMLElement;
  private readonly plot = el("div", { class: "plot" });
  private readonly points: Point[] = [];

  constructor(readonly panel: MetricPanel, series?: Series) {
    for (const p of series?.points ?? []) {
      if (p.value !== null) this.points.push({ at: p.bucket_start, value: p.value });
    }
    this.element = el("article",
      { class: "panel metric-panel", "data-metric": panel.metric },
      el("h3", {}, panel.label),
      this.plot);
    this.redraw();
  }

  get pointCount(): number {
    return this.points.length;
  }

  get lastValue(): number | undefined {
    return this.points[this.points.length - 1]?.value;
  }

  append(reading: { at: string; value: number }): void {
    this.points.push({ at: reading.at, value: reading.value });
    this.redraw();
  }

  private redraw(): void {
    if (this.points.length === 0) {
      this.plot.replaceChildren(
        el("p", { class: "no-data" }, "no data in window"));
      return;
    }
    const values = this.points.map((p) => p.value);
    const low = Math.min(...values);
    const high = Math.max(...values);
    const span = high - low || 1;
    const step = this.points.length > 1 ? WIDTH / (this.points.length - 1) : 0;
    const coords = this.points
      .map((p, i) => {
        const x = this.points.length > 1 ? i * step : WIDTH / 2;
        const y = HEIGHT - ((p.value - low) / span) * (HEIGHT - 8) - 4;
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    svg.setAttribute("class", "series");
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", coords);
    line.setAttribute("fill", "none");
    svg.append(line);

    const last = this.points[this.points.length - 1];
    const readout = el("p", { class: "readout" },
      `${formatValue(last?.value ?? 0)} ${this.panel.unit}`,
      el("small", {}, ` · ${this.points.length} pts`));
    this.plot.replaceChildren(svg, readout);
  }
}

function formatValue(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}
