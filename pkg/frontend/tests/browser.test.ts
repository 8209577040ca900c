/** Equipment browser: the discipline -> type -> instance tree, the detail
 *  panel's required properties, and the not-found surface. */

import { afterEach, describe, expect, it, vi } from "vitest";

import type { DocumentMeta } from "../src/api";
import { EquipmentBrowser } from "../src/browser";
import { ApiStub, envelope, equipmentOf, flush, sensorOf } from "./stub";

afterEach(() => {
  vi.unstubAllGlobals();
});

const FLEET = [
  equipmentOf("EQ-00001", "23-33 13 11", { discipline: "mechanical" }),
  equipmentOf("EQ-00002", "23-35 47 11", { discipline: "electrical" }),
  equipmentOf("EQ-00003", "23-35 47 11", { discipline: "electrical" }),
];

describe("tree", () => {
  it("groups instances by discipline, then type, with counts", async () => {
    new ApiStub().get("/equipment", FLEET).install();
    const browser = new EquipmentBrowser();
    await browser.load();

    const disciplines = [
      ...browser.element.querySelectorAll(".tree > details > summary"),
    ].map((s) => s.textContent);
    expect(disciplines).toEqual(["electrical (2)", "mechanical (1)"]);

    const electrical = browser.element.querySelector(
      '[data-discipline="electrical"]',
    )!;
    expect(electrical.querySelector(".type summary")!.textContent).toBe(
      "23-35 47 11 (2)",
    );
    expect(
      [...browser.element.querySelectorAll("[data-instance]")].map((a) =>
        a.getAttribute("data-instance"),
      ),
    ).toEqual(["EQ-00002", "EQ-00003", "EQ-00001"]);
  });

  it("shows an error panel when the inventory cannot be fetched", async () => {
    new ApiStub()
      .get("/equipment", () => envelope(500, "ReplayError", "log unreadable"))
      .install();
    const browser = new EquipmentBrowser();
    await browser.load();
    expect(browser.element.querySelector(".tree .error-panel")).not.toBeNull();
  });
});

describe("detail", () => {
  it("shows the required properties, O&M data, sensors, and documents", async () => {
    const item = equipmentOf("EQ-00001", "23-33 13 11", {
      omniclass_system: "23-33 00 00",
      space_instance: "RM-204",
      discipline: "mechanical",
      om_properties: { filter_size: "20x20x2", cfm_rating: 2000 },
      document_ids: ["DOC-00001"],
    });
    const manual: DocumentMeta = {
      doc_id: "DOC-00001",
      kind: "om_manual",
      title: "Air handler O&M manual",
      uri_or_path: "documents/DOC-00001.pdf",
      uploaded_at: null,
    };
    new ApiStub()
      .get("/equipment", [item])
      .get("/equipment/EQ-00001", item)
      .get("/equipment/EQ-00001/documents", [manual])
      .get("/sensors", [sensorOf("SN-00001", "EQ-00001", "temperature")])
      .install();

    const browser = new EquipmentBrowser();
    await browser.load();
    browser.element
      .querySelector('[data-instance="EQ-00001"]')!
      .dispatchEvent(new Event("click", { cancelable: true }));
    await flush();

    const detail = browser.element.querySelector(".detail")!;
    const names = [...detail.querySelectorAll("dt")].map((dt) => dt.textContent);
    expect(names).toEqual([
      "OMNICLASS_SYSTEM",
      "OMNICLASS_TYPE",
      "AugmentID_Type",
      "AugmentID_Instance",
      "Space_Instance",
      "Discipline",
      "filter_size",
      "cfm_rating",
    ]);
    const values = [...detail.querySelectorAll("dd")].map((dd) => dd.textContent);
    expect(values.slice(0, 6)).toEqual([
      "23-33 00 00",
      "23-33 13 11",
      "23-33-13-11",
      "EQ-00001",
      "RM-204",
      "mechanical",
    ]);
    expect(values.slice(6)).toEqual(["20x20x2", "2000"]);

    const sensorLine = detail.querySelector(".sensors li")!;
    expect(sensorLine.textContent).toContain("SN-00001 · temperature (F, every 60s)");
    expect(
      sensorLine.querySelector('[data-sensor="SN-00001"]')!.textContent,
    ).toBe("—");
    expect(detail.querySelector(".documents li")!.textContent).toBe(
      "Air handler O&M manual (om_manual)",
    );
  });

  it("says when an item has no sensors and no documents", async () => {
    const item = equipmentOf("EQ-00002", "23-35 47 11");
    new ApiStub()
      .get("/equipment/EQ-00002", item)
      .get("/equipment/EQ-00002/documents", [])
      .get("/sensors", [])
      .install();

    const browser = new EquipmentBrowser();
    await browser.select("EQ-00002");
    const notes = [...browser.element.querySelectorAll(".detail .no-data")].map(
      (p) => p.textContent,
    );
    expect(notes).toEqual(["no sensors bound", "no documents"]);
  });

  it("renders a not-found view for an unknown id", async () => {
    new ApiStub()
      .get("/equipment/EQ-09999", () =>
        envelope(404, "UnknownEquipment", 'no equipment "EQ-09999"'),
      )
      .get("/equipment/EQ-09999/documents", () =>
        envelope(404, "UnknownEquipment", 'no equipment "EQ-09999"'),
      )
      .get("/sensors", [])
      .install();

    const browser = new EquipmentBrowser();
    await browser.select("EQ-09999");
    const missing = browser.element.querySelector(".not-found");
    expect(missing).not.toBeNull();
    expect(missing!.textContent).toBe('no equipment "EQ-09999"');
    expect(browser.element.querySelector(".error-panel")).toBeNull();
  });

  it("keeps other failures on the explicit error surface", async () => {
    new ApiStub()
      .get("/equipment/EQ-00001", () => envelope(500, "ReplayError", "boom"))
      .get("/equipment/EQ-00001/documents", [])
      .get("/sensors", [])
      .install();

    const browser = new EquipmentBrowser();
    await browser.select("EQ-00001");
    expect(browser.element.querySelector(".not-found")).toBeNull();
    expect(browser.element.querySelector(".error-panel")).not.toBeNull();
  });
});
