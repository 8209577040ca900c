/** Alarm -> dashboard mapping: alarms carry only a sensor id, so badge
 *  counts walk sensor -> bound equipment -> omniclass type -> system. */

import { describe, expect, it } from "vitest";

import { activeAlarmCounts, isActive } from "../src/alarms";
import { systemForEquipment } from "../src/registry";
import { alarmOf, equipmentOf, sensorOf } from "./stub";

describe("isActive", () => {
  it("treats raised and acknowledged as active, cleared as not", () => {
    expect(isActive(alarmOf("AL-1", "SN-1", "raised"))).toBe(true);
    expect(isActive(alarmOf("AL-2", "SN-1", "acknowledged"))).toBe(true);
    expect(isActive(alarmOf("AL-3", "SN-1", "cleared"))).toBe(false);
  });
});

describe("systemForEquipment", () => {
  it("matches on the omniclass type prefix, collapsing whitespace", () => {
    expect(systemForEquipment("23-33 13 11")?.key).toBe("ahu");
    expect(systemForEquipment("  23-33  13   11 ")?.key).toBe("ahu");
    expect(systemForEquipment("23-35 47 21")?.key).toBe("lighting");
    expect(systemForEquipment("23-31 21 15 11")?.key).toBe("water_closet");
    expect(systemForEquipment("99-99 99")).toBeUndefined();
  });
});

describe("activeAlarmCounts", () => {
  const equipment = [
    equipmentOf("EQ-A", "23-33 13 11"),
    equipmentOf("EQ-B", "23-35 47 21"),
  ];
  const sensors = [
    sensorOf("SN-1", "EQ-A", "temperature"),
    sensorOf("SN-2", "EQ-B", "power"),
  ];

  it("counts active alarms per system and skips cleared ones", () => {
    const counts = activeAlarmCounts(
      [
        alarmOf("AL-1", "SN-1", "raised"),
        alarmOf("AL-2", "SN-1", "acknowledged"),
        alarmOf("AL-3", "SN-2", "cleared"),
        alarmOf("AL-4", "SN-2", "raised"),
      ],
      sensors,
      equipment,
    );
    expect(counts.get("ahu")).toBe(2);
    expect(counts.get("lighting")).toBe(1);
    expect(counts.size).toBe(2);
  });

  it("drops alarms whose sensor or equipment cannot be resolved", () => {
    const counts = activeAlarmCounts(
      [
        alarmOf("AL-1", "SN-UNKNOWN", "raised"),
        alarmOf("AL-2", "SN-3", "raised"),
      ],
      [...sensors, sensorOf("SN-3", "EQ-GONE", "power")],
      equipment,
    );
    expect(counts.size).toBe(0);
  });

  it("is empty with no alarms at all", () => {
    expect(activeAlarmCounts([], sensors, equipment).size).toBe(0);
  });
});
