import type { Cell } from "./layout.js";
import type { Bundle, ViewState } from "./types.js";
import type { FlowLayer } from "./flows.js";
import type { HoverSeries } from "./timeseries.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function shade(value: number): string {
  // white -> deep blue ramp on the square root, so small shares stay visible
  const t = Math.sqrt(Math.min(1, Math.max(0, value)));
  const r = Math.round(255 - 215 * t);
  const g = Math.round(255 - 185 * t);
  const b = Math.round(255 - 95 * t);
  return `rgb(${r},${g},${b})`;
}

export interface MapHandlers {
  onSelect: (cbgId: string) => void;
  onHover: (cbgId: string | null) => void;
}

/**
 * Full map rebuild for structural changes (selection, direction, dates).
 * Returns the per-CBG path elements so hover changes can restyle them in
 * place: rebuilding under the pointer would swallow mouseenter events.
 */
export function renderMap(
  svg: SVGSVGElement,
  cells: Map<string, Cell>,
  layer: FlowLayer,
  state: ViewState,
  handlers: MapHandlers,
): Map<string, SVGPathElement> {
  svg.innerHTML = "";
  const elements = new Map<string, SVGPathElement>();
  for (const [id, cell] of cells) {
    const path = document.createElementNS(SVG_NS, "path") as SVGPathElement;
    path.setAttribute("d", cell.path);
    const value = layer.shading.get(id);
    path.setAttribute(
      "fill",
      id === state.selectedCbg ? "#d33" : value !== undefined ? shade(value) : "#f4f4f0",
    );
    path.addEventListener("click", () => handlers.onSelect(id));
    path.addEventListener("mouseenter", () => handlers.onHover(id));
    path.addEventListener("mouseleave", () => handlers.onHover(null));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent =
      value !== undefined ? `${id}: ${(100 * value).toFixed(1)}%` : id;
    path.appendChild(title);
    svg.appendChild(path);
    elements.set(id, path);
  }
  updateHoverStrokes(elements, state);
  return elements;
}

/** Restyle hover strokes without rebuilding the map. */
export function updateHoverStrokes(
  elements: Map<string, SVGPathElement>,
  state: ViewState,
): void {
  for (const [id, path] of elements) {
    const hovered = id === state.hoveredCbg;
    path.setAttribute("stroke", hovered ? "#222" : "#999");
    path.setAttribute("stroke-width", hovered ? "3" : "1");
  }
}

/** Polyline chart that breaks its stroke at null values (gaps, not zeros). */
export function renderLineChart(
  svg: SVGSVGElement,
  values: (number | null)[],
  color: string,
): void {
  svg.innerHTML = "";
  const width = 460;
  const height = 120;
  const present = values.filter((v): v is number => v !== null);
  if (present.length === 0) return;
  let low = Math.min(...present);
  let high = Math.max(...present);
  if (high === low) {
    high += 1;
    low -= 1;
  }
  const n = values.length;
  const x = (i: number) => (n === 1 ? width / 2 : (i / (n - 1)) * (width - 10) + 5);
  const y = (v: number) => height - 8 - ((v - low) / (high - low)) * (height - 16);

  let segment: string[] = [];
  const flush = () => {
    if (segment.length >= 2) {
      const poly = document.createElementNS(SVG_NS, "polyline");
      poly.setAttribute("points", segment.join(" "));
      poly.setAttribute("fill", "none");
      poly.setAttribute("stroke", color);
      poly.setAttribute("stroke-width", "2");
      svg.appendChild(poly);
    } else if (segment.length === 1) {
      const [px, py] = segment[0].split(",").map(Number);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(px));
      dot.setAttribute("cy", String(py));
      dot.setAttribute("r", "2.5");
      dot.setAttribute("fill", color);
      svg.appendChild(dot);
    }
    segment = [];
  };
  values.forEach((v, i) => {
    if (v === null) {
      flush();
    } else {
      segment.push(`${x(i)},${y(v)}`);
    }
  });
  flush();
}

export function renderHoverPanel(
  container: HTMLElement,
  visitsSvg: SVGSVGElement,
  homeSvg: SVGSVGElement,
  series: HoverSeries,
  state: ViewState,
): void {
  const heading = container.querySelector(".hover-title") as HTMLElement;
  if (series.cbgId === null) {
    heading.textContent = "hover over a tract";
    visitsSvg.innerHTML = "";
    homeSvg.innerHTML = "";
    return;
  }
  if (series.missing) {
    heading.textContent = `${series.cbgId}: not in this bundle`;
    visitsSvg.innerHTML = "";
    homeSvg.innerHTML = "";
    return;
  }
  const selfLoop =
    state.selectedCbg !== null && series.cbgId === state.selectedCbg;
  heading.textContent = selfLoop
    ? `${series.cbgId} (self-loops)`
    : series.cbgId;
  renderLineChart(visitsSvg, series.visits, "#2b6cb0");
  renderLineChart(homeSvg, series.homeFraction, "#2f855a");
}

export function renderDemographics(table: HTMLElement, bundle: Bundle, state: ViewState): void {
  const id = state.selectedCbg;
  table.innerHTML = "";
  if (id === null) return;
  const info = bundle.cbgs[id];
  if (!info) {
    table.innerHTML = `<tr><td>no demographics for ${id}</td></tr>`;
    return;
  }
  const rows: [string, string][] = [
    ["population", String(info.population)],
    ["median income", `$${Math.round(info.median_income).toLocaleString()}`],
    ["older than 50", `${(100 * info.older50).toFixed(1)}%`],
  ];
  for (const [race, share] of Object.entries(info.race)) {
    rows.push([race.replace("_", " + "), `${(100 * share).toFixed(1)}%`]);
  }
  for (const [label, value] of rows) {
    const tr = document.createElement("tr");
    tr.innerHTML = `<td>${label}</td><td>${value}</td>`;
    table.appendChild(tr);
  }
}
