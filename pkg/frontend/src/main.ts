import { loadBundle } from "./bundle.js";
import { renderFlowLayer } from "./flows.js";
import { geoLayout, gridLayout } from "./layout.js";
import {
  renderDemographics,
  renderHoverPanel,
  renderMap,
  updateHoverStrokes,
} from "./render.js";
import {
  createViewState,
  selectCbg,
  setDateRange,
  setDirection,
  setHover,
} from "./state.js";
import { hoverTimeseries } from "./timeseries.js";
import type { Bundle, ViewState } from "./types.js";

function el<T extends Element>(selector: string): T {
  const found = document.querySelector(selector);
  if (!found) throw new Error(`missing element ${selector}`);
  return found as T;
}

function start(bundle: Bundle): void {
  let state: ViewState = createViewState(bundle);

  const cbgIds = Object.keys(bundle.series);
  const cells = bundle.geometry
    ? geoLayout(bundle.geometry)
    : gridLayout(cbgIds);
  if (bundle.geometry) {
    // any tract without a polygon still needs geometry: grid-fill the rest
    const missing = cbgIds.filter((id) => !cells.has(id));
    if (missing.length > 0) {
      for (const [id, cell] of gridLayout(missing)) cells.set(id, cell);
    }
  }

  const map = el<SVGSVGElement>("#map");
  const visitsSvg = el<SVGSVGElement>("#visits-chart");
  const homeSvg = el<SVGSVGElement>("#home-chart");
  const hoverPanel = el<HTMLElement>("#hover-panel");
  const demographicsTable = el<HTMLElement>("#demographics");
  const notice = el<HTMLElement>("#notice");
  const outgoingButton = el<HTMLButtonElement>("#btn-outgoing");
  const incomingButton = el<HTMLButtonElement>("#btn-incoming");
  const startSlider = el<HTMLInputElement>("#range-start");
  const endSlider = el<HTMLInputElement>("#range-end");
  const rangeLabel = el<HTMLElement>("#range-label");

  for (const slider of [startSlider, endSlider]) {
    slider.min = "0";
    slider.max = String(bundle.days.length - 1);
  }
  startSlider.value = "0";
  endSlider.value = String(bundle.days.length - 1);

  let mapElements = new Map<string, SVGPathElement>();
  let mapKey = "";

  const update = (next: ViewState): void => {
    state = next;
    const layer = renderFlowLayer(state, bundle);
    // rebuild the map only when its structure changes; hover restyles only
    const key = `${state.selectedCbg}|${state.direction}|${state.dateRange.join("/")}`;
    if (key !== mapKey) {
      mapElements = renderMap(map, cells, layer, state, {
        onSelect: (id) => update(selectCbg(state, id)),
        onHover: (id) => update(setHover(state, id)),
      });
      mapKey = key;
    } else {
      updateHoverStrokes(mapElements, state);
    }
    notice.textContent = layer.notice ?? "";
    renderHoverPanel(hoverPanel, visitsSvg, homeSvg, hoverTimeseries(state, bundle), state);
    renderDemographics(demographicsTable, bundle, state);
    outgoingButton.classList.toggle("active", state.direction === "outgoing");
    incomingButton.classList.toggle("active", state.direction === "incoming");
    rangeLabel.textContent = `${state.dateRange[0]} to ${state.dateRange[1]}`;
  };

  outgoingButton.addEventListener("click", () =>
    update(setDirection(state, "outgoing")),
  );
  incomingButton.addEventListener("click", () =>
    update(setDirection(state, "incoming")),
  );
  const onSlider = (): void => {
    const lo = bundle.days[Number(startSlider.value)];
    const hi = bundle.days[Number(endSlider.value)];
    update(setDateRange(state, bundle, lo, hi));
  };
  startSlider.addEventListener("input", onSlider);
  endSlider.addEventListener("input", onSlider);

  update(state);
}

const params = new URLSearchParams(window.location.search);
const base = params.get("bundle") ?? "data";
loadBundle(base)
  .then(start)
  .catch((error: Error) => {
    el<HTMLElement>("#notice").textContent = error.message;
  });
