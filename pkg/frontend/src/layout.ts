import type { GeoFeatureCollection } from "./types.js";

export interface Cell {
  /** SVG path in a 0..1000 x 0..1000 viewBox */
  path: string;
  /** label anchor */
  cx: number;
  cy: number;
}

export const VIEW = 1000;

/**
 * Fallback geometry: a deterministic near-square grid keyed by sorted CBG
 * id, used whenever no tract polygons accompany the bundle.
 */
export function gridLayout(cbgIds: string[]): Map<string, Cell> {
  const ids = [...cbgIds].sort();
  const columns = Math.max(1, Math.ceil(Math.sqrt(ids.length)));
  const rows = Math.ceil(ids.length / columns);
  const width = VIEW / columns;
  const height = VIEW / rows;
  const pad = Math.min(width, height) * 0.04;

  const cells = new Map<string, Cell>();
  ids.forEach((id, i) => {
    const col = i % columns;
    const row = Math.floor(i / columns);
    const x0 = col * width + pad;
    const y0 = row * height + pad;
    const x1 = (col + 1) * width - pad;
    const y1 = (row + 1) * height - pad;
    cells.set(id, {
      path: `M${x0},${y0} L${x1},${y0} L${x1},${y1} L${x0},${y1} Z`,
      cx: (x0 + x1) / 2,
      cy: (y0 + y1) / 2,
    });
  });
  return cells;
}

function ringsOf(feature: {
  geometry: { type: string; coordinates: unknown };
}): number[][][] {
  const geometry = feature.geometry;
  if (geometry.type === "Polygon") {
    return geometry.coordinates as number[][][];
  }
  const parts = geometry.coordinates as number[][][][];
  return parts.flat();
}

/**
 * Choropleth geometry from tract polygons: plate-carree projection of all
 * rings, fitted into the shared viewBox with the y axis flipped. Features
 * are matched to CBGs through a `cbg_id` (or `GEOID`) property.
 */
export function geoLayout(collection: GeoFeatureCollection): Map<string, Cell> {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const feature of collection.features) {
    for (const ring of ringsOf(feature)) {
      for (const [x, y] of ring) {
        minX = Math.min(minX, x);
        maxX = Math.max(maxX, x);
        minY = Math.min(minY, y);
        maxY = Math.max(maxY, y);
      }
    }
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = (VIEW * 0.96) / Math.max(spanX, spanY);
  const offsetX = (VIEW - spanX * scale) / 2;
  const offsetY = (VIEW - spanY * scale) / 2;
  const px = (x: number) => offsetX + (x - minX) * scale;
  const py = (y: number) => VIEW - (offsetY + (y - minY) * scale);

  const cells = new Map<string, Cell>();
  for (const feature of collection.features) {
    const id = String(feature.properties["cbg_id"] ?? feature.properties["GEOID"] ?? "");
    if (!id) continue;
    let path = "";
    let sumX = 0;
    let sumY = 0;
    let points = 0;
    for (const ring of ringsOf(feature)) {
      ring.forEach(([x, y], i) => {
        path += `${i === 0 ? "M" : "L"}${px(x).toFixed(2)},${py(y).toFixed(2)} `;
        sumX += px(x);
        sumY += py(y);
        points += 1;
      });
      path += "Z ";
    }
    cells.set(id, { path: path.trim(), cx: sumX / points, cy: sumY / points });
  }
  return cells;
}
