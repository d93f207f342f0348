import type { Bundle, ViewState } from "./types.js";

export interface FlowLayer {
  /** per-CBG share of traffic, each in [0, 1], summing to at most 1 */
  shading: Map<string, number>;
  /** user-visible message when there is nothing to shade */
  notice: string | null;
}

function inRange(date: string, range: [string, string]): boolean {
  return date >= range[0] && date <= range[1];
}

/**
 * Shading values for the map.
 *
 * Outgoing: share of the selected origin's total visits (self-loops
 * included, shaded on the origin itself) that went to each tract over the
 * date range. Incoming: share of all visits arriving at the selected tract
 * contributed by each origin.
 */
export function renderFlowLayer(state: ViewState, bundle: Bundle): FlowLayer {
  const origin = state.selectedCbg;
  if (origin === null) {
    return { shading: new Map(), notice: "select a tract to see its flows" };
  }

  const totals = new Map<string, number>();
  if (state.direction === "outgoing") {
    for (const entry of bundle.flows[origin] ?? []) {
      if (!inRange(entry.date, state.dateRange)) continue;
      for (const [destination, count] of Object.entries(entry.destinations)) {
        totals.set(destination, (totals.get(destination) ?? 0) + count);
      }
    }
  } else {
    for (const [source, entries] of Object.entries(bundle.flows)) {
      for (const entry of entries) {
        if (!inRange(entry.date, state.dateRange)) continue;
        const count = entry.destinations[origin];
        if (count !== undefined) {
          totals.set(source, (totals.get(source) ?? 0) + count);
        }
      }
    }
  }

  let grandTotal = 0;
  for (const count of totals.values()) grandTotal += count;
  if (grandTotal <= 0) {
    return {
      shading: new Map(),
      notice: `no ${state.direction} traffic for ${origin} in the selected dates`,
    };
  }

  const shading = new Map<string, number>();
  for (const [cbg, count] of totals) shading.set(cbg, count / grandTotal);
  return { shading, notice: null };
}
