import type { Bundle, Direction, ViewState } from "./types.js";

/** Initial state: nothing selected, outgoing flows, full day coverage. */
export function createViewState(bundle: Bundle): ViewState {
  const days = bundle.days;
  return {
    selectedCbg: null,
    direction: "outgoing",
    dateRange: [days[0], days[days.length - 1]],
    hoveredCbg: null,
  };
}

function clampDate(bundle: Bundle, date: string): string {
  const days = bundle.days;
  if (date < days[0]) return days[0];
  if (date > days[days.length - 1]) return days[days.length - 1];
  return date;
}

/** Clamp into coverage and reorder so start <= end. */
export function setDateRange(
  state: ViewState,
  bundle: Bundle,
  start: string,
  end: string,
): ViewState {
  let lo = clampDate(bundle, start);
  let hi = clampDate(bundle, end);
  if (lo > hi) [lo, hi] = [hi, lo];
  return { ...state, dateRange: [lo, hi] };
}

export function selectCbg(state: ViewState, cbgId: string | null): ViewState {
  return { ...state, selectedCbg: cbgId };
}

export function setDirection(state: ViewState, direction: Direction): ViewState {
  return { ...state, direction };
}

export function toggleDirection(state: ViewState): ViewState {
  return {
    ...state,
    direction: state.direction === "outgoing" ? "incoming" : "outgoing",
  };
}

export function setHover(state: ViewState, cbgId: string | null): ViewState {
  return { ...state, hoveredCbg: cbgId };
}
