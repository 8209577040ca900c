/** The one configuration knob: where the twin service lives. */

export interface AppConfig {
  baseUrl: string;
}

let current: AppConfig = { baseUrl: "" };

export function configure(overrides: Partial<AppConfig>): void {
  current = { ...current, ...overrides };
}

/** Base URL without a trailing slash; empty string means same-origin. */
export function baseUrl(): string {
  return current.baseUrl.replace(/\/+$/, "");
}
