/** The ten system dashboards and their registered metric panels.
 *
 * Mirrors the service's metric registry (same systems, metrics, and
 * equipment prefixes); the server remains authoritative for the data, this
 * table only decides what panels exist and how they are labelled.
 */

export interface MetricPanel {
  metric: string;
  label: string;
  unit: string;
}

export interface DashboardEntry {
  key: string;
  title: string;
  equipmentPrefix: string;
  panels: MetricPanel[];
  /** Extra non-metric panel: upcoming service jobs for the system. */
  scheduledService?: boolean;
}

export const DASHBOARDS: DashboardEntry[] = [
  {
    key: "ahu",
    title: "Air Handling Units",
    equipmentPrefix: "23-33 13",
    panels: [
      { metric: "airflow", label: "Airflow", unit: "CFM" },
      { metric: "supply_temperature", label: "Supply temperature", unit: "F" },
      { metric: "humidity", label: "Humidity", unit: "%RH" },
    ],
  },
  {
    key: "drinking_fountain",
    title: "Drinking Fountains",
    equipmentPrefix: "23-31 23",
    panels: [
      { metric: "usage", label: "Usage", unit: "GPM" },
      { metric: "filter_condition", label: "Filter condition", unit: "%" },
    ],
  },
  {
    key: "electrical_panel",
    title: "Electrical Distribution Panels",
    equipmentPrefix: "23-35 25",
    panels: [
      { metric: "load_distribution", label: "Load distribution", unit: "%" },
      { metric: "energy_consumption", label: "Energy consumption", unit: "kW" },
    ],
  },
  {
    key: "elevator",
    title: "Elevators",
    equipmentPrefix: "23-23 11",
    panels: [{ metric: "runtime_hours", label: "Runtime hours", unit: "h" }],
  },
  {
    key: "generator",
    title: "Generator",
    equipmentPrefix: "23-35 17",
    panels: [
      { metric: "runtime_hours", label: "Runtime hours", unit: "h" },
      { metric: "fuel_level", label: "Fuel level", unit: "%" },
      { metric: "load", label: "Load", unit: "%" },
    ],
    scheduledService: true,
  },
  {
    key: "lighting",
    title: "Lighting",
    equipmentPrefix: "23-35 47",
    panels: [{ metric: "energy_usage", label: "Energy usage", unit: "kW" }],
  },
  {
    key: "temperature",
    title: "Room Temperature",
    equipmentPrefix: "23-33 41 11",
    panels: [
      { metric: "room_temperature", label: "Room temperature", unit: "F" },
    ],
  },
  {
    key: "transformer",
    title: "Transformers",
    equipmentPrefix: "23-35 23",
    panels: [
      { metric: "voltage", label: "Voltage", unit: "V" },
      { metric: "amperage", label: "Amperage", unit: "A" },
    ],
  },
  {
    key: "water_closet",
    title: "Water Closets",
    equipmentPrefix: "23-31 21 15",
    panels: [{ metric: "water_flow", label: "Water flow", unit: "GPM" }],
  },
  {
    key: "water_pressure",
    title: "Water Pressure",
    equipmentPrefix: "23-33 29",
    panels: [
      { metric: "pressure", label: "Pressure", unit: "psi" },
      { metric: "flow_rate", label: "Flow rate", unit: "GPM" },
    ],
  },
];

export function dashboardEntry(key: string): DashboardEntry | undefined {
  return DASHBOARDS.find((entry) => entry.key === key);
}

/** Which dashboard an equipment item belongs to, by omniclass-type prefix. */
export function systemForEquipment(
  omniclassType: string,
): DashboardEntry | undefined {
  const collapsed = omniclassType.trim().replace(/\s+/g, " ");
  return DASHBOARDS.find((entry) => collapsed.startsWith(entry.equipmentPrefix));
}
