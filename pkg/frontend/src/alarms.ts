/** Projection of `GET /alarms` onto the dashboard registry.
 *
 * Alarm records carry only a sensor id, so the mapping walks
 * sensor -> bound equipment -> omniclass type -> dashboard system.
 */

import type { Alarm, Equipment, Sensor } from "./api.js";
import { systemForEquipment } from "./registry.js";

export function isActive(alarm: Alarm): boolean {
  return alarm.state === "raised" || alarm.state === "acknowledged";
}

export function activeAlarmCounts(
  alarms: Alarm[],
  sensors: Sensor[],
  equipment: Equipment[],
): Map<string, number> {
  const hostBySensor = new Map(sensors.map((s) => [s.sensor_id, s.bound_equipment]));
  const typeByHost = new Map(
    equipment.map((e) => [e.augment_id_instance, e.omniclass_type]),
  );
  const counts = new Map<string, number>();
  for (const alarm of alarms) {
    if (!isActive(alarm)) continue;
    const host = hostBySensor.get(alarm.sensor_id);
    const type = host === undefined ? undefined : typeByHost.get(host);
    const entry = type === undefined ? undefined : systemForEquipment(type);
    if (entry) counts.set(entry.key, (counts.get(entry.key) ?? 0) + 1);
  }
  return counts;
}
