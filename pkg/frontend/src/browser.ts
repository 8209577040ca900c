/** Equipment browser: a discipline → type → instance tree with a detail
 *  panel showing the required classification properties, O&M properties,
 *  bound sensors, and attached documents. */

import { api, ApiError } from "./api.js";
import type { Equipment } from "./api.js";
import { el, errorPanel } from "./dom.js";

export class EquipmentBrowser {
  readonly element = el("section", { class: "equipment-browser" });
  private readonly tree = el("nav", { class: "tree" });
  private readonly detail = el("div", { class: "detail" },
    el("p", { class: "hint" }, "select an item"));

  constructor() {
    this.element.append(this.tree, this.detail);
  }

  async load(): Promise<void> {
    try {
      const items = await api.equipment();
      this.tree.replaceChildren(...this.buildTree(items));
    } catch (cause) {
      this.tree.replaceChildren(errorPanel(cause));
    }
  }

  private buildTree(items: Equipment[]): HTMLElement[] {
    const byDiscipline = new Map<string, Map<string, Equipment[]>>();
    for (const item of items) {
      const types = byDiscipline.get(item.discipline) ?? new Map();
      byDiscipline.set(item.discipline, types);
      const instances = types.get(item.omniclass_type) ?? [];
      types.set(item.omniclass_type, instances);
      instances.push(item);
    }

    const nodes: HTMLElement[] = [];
    for (const [discipline, types] of [...byDiscipline].sort()) {
      const count = [...types.values()].reduce((n, list) => n + list.length, 0);
      const group = el("details", { class: "discipline", "data-discipline": discipline },
        el("summary", {}, `${discipline} (${count})`));
      for (const [type, instances] of [...types].sort()) {
        const typeNode = el("details", { class: "type" },
          el("summary", {}, `${type} (${instances.length})`));
        const list = el("ul", {});
        for (const item of instances) {
          const link = el("a", {
            href: `#/equipment/${item.augment_id_instance}`,
            "data-instance": item.augment_id_instance,
          }, item.augment_id_instance);
          link.addEventListener("click", (event) => {
            event.preventDefault();
            void this.select(item.augment_id_instance);
          });
          list.append(el("li", {}, link));
        }
        typeNode.append(list);
        group.append(typeNode);
      }
      nodes.push(group);
    }
    return nodes;
  }

  async select(id: string): Promise<void> {
    try {
      const [item, documents, sensors] = await Promise.all([
        api.equipmentItem(id),
        api.documents(id),
        api.sensors(id),
      ]);

      const properties = el("dl", { class: "properties" });
      const required: [string, string][] = [
        ["OMNICLASS_SYSTEM", item.omniclass_system],
        ["OMNICLASS_TYPE", item.omniclass_type],
        ["AugmentID_Type", item.augment_id_type],
        ["AugmentID_Instance", item.augment_id_instance],
        ["Space_Instance", item.space_instance],
        ["Discipline", item.discipline],
      ];
      for (const [name, value] of required) {
        properties.append(el("dt", {}, name), el("dd", {}, value));
      }
      for (const [name, value] of Object.entries(item.om_properties)) {
        properties.append(
          el("dt", { class: "om" }, name),
          el("dd", { class: "om" }, String(value)));
      }

      const sensorList = sensors.length
        ? el("ul", { class: "sensors" }, ...sensors.map((s) =>
            el("li", {},
              `${s.sensor_id} · ${s.kind} (${s.unit}, every ${s.interval_s}s) `,
              el("span", { class: "live-value", "data-sensor": s.sensor_id }, "—"))))
        : el("p", { class: "no-data" }, "no sensors bound");

      const documentList = documents.length
        ? el("ul", { class: "documents" }, ...documents.map((d) =>
            el("li", {}, `${d.title} (${d.kind})`)))
        : el("p", { class: "no-data" }, "no documents");

      this.detail.replaceChildren(
        el("h3", {}, item.augment_id_instance),
        properties,
        el("h4", {}, "Sensors"), sensorList,
        el("h4", {}, "Documents"), documentList);
    } catch (cause) {
      if (cause instanceof ApiError && cause.status === 404) {
        this.detail.replaceChildren(
          el("div", { class: "not-found" }, `no equipment "${id}"`));
      } else {
        this.detail.replaceChildren(errorPanel(cause));
      }
    }
  }
}
