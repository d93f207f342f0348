import type { Bundle, ViewState } from "./types.js";

export interface HoverSeries {
  /** hovered id echoed back even when it is unknown to the bundle */
  cbgId: string | null;
  /** true when the hovered id has no data at all in the bundle */
  missing: boolean;
  days: string[];
  /** daily visits between the selected origin and the hovered tract;
   * null marks days without a recorded flow (a gap, not zero) */
  visits: (number | null)[];
  /** hovered tract's daily fraction of time spent at home, with gaps */
  homeFraction: (number | null)[];
}

const EMPTY: HoverSeries = {
  cbgId: null,
  missing: false,
  days: [],
  visits: [],
  homeFraction: [],
};

/**
 * The two linked panels for the hovered tract, clipped to the date range:
 * visit counts from the selected origin (or to it, in incoming mode) on
 * top, the hovered tract's stay-home fraction below. Hovering the selected
 * origin itself makes the top panel the self-loop series.
 */
export function hoverTimeseries(state: ViewState, bundle: Bundle): HoverSeries {
  const hovered = state.hoveredCbg;
  if (hovered === null) return EMPTY;

  const known =
    hovered in bundle.series ||
    hovered in bundle.flows ||
    hovered in bundle.cbgs;
  if (!known) {
    return { ...EMPTY, cbgId: hovered, missing: true };
  }

  const [start, end] = state.dateRange;
  const days = bundle.days.filter((d) => d >= start && d <= end);
  const dayIndex = new Map(days.map((d, i) => [d, i]));

  const visits: (number | null)[] = days.map(() => null);
  const origin = state.selectedCbg;
  if (origin !== null) {
    const [source, target] =
      state.direction === "outgoing" ? [origin, hovered] : [hovered, origin];
    for (const entry of bundle.flows[source] ?? []) {
      const index = dayIndex.get(entry.date);
      if (index === undefined) continue;
      const count = entry.destinations[target];
      if (count !== undefined) visits[index] = count;
    }
  }

  const series = bundle.series[hovered];
  const bundleIndex = new Map(bundle.days.map((d, i) => [d, i]));
  const homeFraction: (number | null)[] = days.map((day) => {
    if (!series) return null;
    const index = bundleIndex.get(day);
    return index === undefined ? null : series.home_fraction[index];
  });

  return { cbgId: hovered, missing: false, days, visits, homeFraction };
}
