export interface CbgInfo {
  race: Record<string, number>;
  older50: number;
  median_income: number;
  population: number;
}

export interface FlowEntry {
  date: string;
  destinations: Record<string, number>;
  self_loop: number;
}

export interface CbgSeries {
  home_fraction: (number | null)[];
  incoming_visits: (number | null)[];
}

/** The three exported JSON files merged into one in-memory object. */
export interface Bundle {
  days: string[];
  cbgs: Record<string, CbgInfo>;
  flows: Record<string, FlowEntry[]>;
  series: Record<string, CbgSeries>;
  geometry: GeoFeatureCollection | null;
}

export type Direction = "outgoing" | "incoming";

export interface ViewState {
  selectedCbg: string | null;
  direction: Direction;
  /** inclusive ISO date range, always inside the bundle's day coverage */
  dateRange: [string, string];
  hoveredCbg: string | null;
}

export interface GeoFeature {
  type: "Feature";
  properties: Record<string, unknown>;
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface GeoFeatureCollection {
  type: "FeatureCollection";
  features: GeoFeature[];
}
