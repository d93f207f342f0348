import type { Bundle, GeoFeatureCollection } from "./types.js";

const SUPPORTED_SCHEMA = 1;

interface RawCbgs {
  schema_version: number;
  cbgs: Bundle["cbgs"];
}
interface RawFlows {
  schema_version: number;
  days: string[];
  flows: Bundle["flows"];
}
interface RawSeries {
  schema_version: number;
  days: string[];
  series: Bundle["series"];
}

async function fetchJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`failed to load ${url}: ${response.status}`);
  }
  return (await response.json()) as T;
}

export function assembleBundle(
  cbgs: RawCbgs,
  flows: RawFlows,
  series: RawSeries,
  geometry: GeoFeatureCollection | null,
): Bundle {
  for (const payload of [cbgs, flows, series]) {
    if (payload.schema_version !== SUPPORTED_SCHEMA) {
      throw new Error(
        `unsupported bundle schema ${payload.schema_version}, expected ${SUPPORTED_SCHEMA}`,
      );
    }
  }
  if (flows.days.length === 0) {
    throw new Error("bundle covers no days");
  }
  return {
    days: flows.days,
    cbgs: cbgs.cbgs,
    flows: flows.flows,
    series: series.series,
    geometry,
  };
}

/** Load the three bundle files plus optional tract polygons. */
export async function loadBundle(baseUrl: string): Promise<Bundle> {
  const [cbgs, flows, series] = await Promise.all([
    fetchJson<RawCbgs>(`${baseUrl}/cbgs.json`),
    fetchJson<RawFlows>(`${baseUrl}/flows.json`),
    fetchJson<RawSeries>(`${baseUrl}/timeseries.json`),
  ]);
  let geometry: GeoFeatureCollection | null = null;
  try {
    geometry = await fetchJson<GeoFeatureCollection>(`${baseUrl}/tracts.geojson`);
  } catch {
    geometry = null; // optional file; fall back to the grid layout
  }
  return assembleBundle(cbgs, flows, series, geometry);
}
