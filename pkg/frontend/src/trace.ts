/**
 * Playthrough trace export in the pipeline's trace format, so recorded
 * sessions can be replayed with `storysphere simulate --policy script`.
 */

import { TraceEvent } from "./player";

export function traceDocument(events: TraceEvent[]): { events: TraceEvent[] } {
  return { events };
}

/** Stable JSON: sorted keys, two-space indent, trailing newline. */
export function traceToJson(events: TraceEvent[]): string {
  const sortKeys = (value: unknown): unknown => {
    if (Array.isArray(value)) return value.map(sortKeys);
    if (value && typeof value === "object") {
      const entries = Object.entries(value as Record<string, unknown>).sort(([a], [b]) =>
        a < b ? -1 : a > b ? 1 : 0,
      );
      return Object.fromEntries(entries.map(([k, v]) => [k, sortKeys(v)]));
    }
    return value;
  };
  return JSON.stringify(sortKeys(traceDocument(events)), null, 2) + "\n";
}

/** Script form of a trace: one entry per branching-point event. */
export function scriptFromTrace(events: TraceEvent[]): (number | null)[] {
  return events.slice(1).filter((e) => e.cause !== "navigation_jump").map((e) => e.requested);
}
