import type { Bundle, CbgInfo, FlowEntry } from "../src/types.js";

export const A = "420030000000";
export const B = "420030000001";
export const C = "420030000002";

export const DAYS = [
  "2020-02-03",
  "2020-02-04",
  "2020-02-05",
  "2020-02-06",
  "2020-02-07",
  "2020-02-08",
  "2020-02-09",
];

function info(older50: number, income: number): CbgInfo {
  return {
    race: { white: 0.6, black: 0.2, hispanic: 0.1, asian: 0.05, natives_others: 0.05 },
    older50,
    median_income: income,
    population: 1000,
  };
}

function entries(perDay: Record<string, number>, days: string[] = DAYS): FlowEntry[] {
  return days.map((date) => ({
    date,
    destinations: { ...perDay },
    self_loop: perDay[A] ?? 0,
  }));
}

/**
 * Three tracts, seven days. Every day: A sends 10 to itself, 30 to B and
 * 60 to C; B sends 5 to A; C records no outgoing flows. B's home-fraction
 * series has a gap on the third day.
 */
export function threeCbgBundle(): Bundle {
  const flowsA = entries({ [A]: 10, [B]: 30, [C]: 60 });
  const flowsB = DAYS.map((date) => ({
    date,
    destinations: { [A]: 5 },
    self_loop: 0,
  }));
  return {
    days: [...DAYS],
    cbgs: { [A]: info(0.4, 52000), [B]: info(0.3, 61000), [C]: info(0.5, 38000) },
    flows: { [A]: flowsA, [B]: flowsB, [C]: [] },
    series: {
      [A]: {
        home_fraction: [0.7, 0.71, 0.72, 0.73, 0.74, 0.75, 0.76],
        incoming_visits: [15, 15, 15, 15, 15, 15, 15],
      },
      [B]: {
        home_fraction: [0.6, 0.61, null, 0.63, 0.64, 0.65, 0.66],
        incoming_visits: [30, 30, 30, 30, 30, 30, 30],
      },
      [C]: {
        home_fraction: [0.5, 0.51, 0.52, 0.53, 0.54, 0.55, 0.56],
        incoming_visits: [60, 60, 60, 60, 60, 60, 60],
      },
    },
    geometry: null,
  };
}
