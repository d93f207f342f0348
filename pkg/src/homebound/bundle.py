"""Static JSON bundle backing the exploration dashboard.

Three files, each carrying ``schema_version`` 1:

* ``cbgs.json`` -- per-CBG demographics (race and age composition, median
  income, population).
* ``flows.json`` -- per-origin dated entries with destination visit counts;
  the origin-to-itself count is surfaced separately as ``self_loop`` in
  addition to appearing among the destinations.
* ``timeseries.json`` -- per-CBG daily stay-home fraction (fraction of the
  day spent at home) and total incoming visits, aligned to the bundle's
  ``days`` axis with ``null`` marking days without data.

Serialization is key-sorted and compact, so re-exporting unchanged inputs
produces byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import DataError
from .ingest import RACE_KEYS

SCHEMA_VERSION = 1

BUNDLE_FILES = ("cbgs.json", "flows.json", "timeseries.json")


def build_bundle(mobility, demographics) -> dict[str, dict]:
    """Assemble the three bundle payloads from parsed records."""
    mobility = list(mobility)
    if not mobility:
        raise DataError("cannot export a dashboard bundle with no CBGs")

    days = sorted({r.date for r in mobility})
    day_isos = [d.isoformat() for d in days]
    day_index = {d: i for i, d in enumerate(days)}
    cbg_ids = sorted({r.cbg_id for r in mobility})

    demographics_payload = {
        "schema_version": SCHEMA_VERSION,
        "cbgs": {
            demo.cbg_id: {
                "race": {k: demo.race_fractions[k] for k in RACE_KEYS},
                "older50": demo.older50_fraction,
                "median_income": demo.median_income,
                "population": demo.population,
            }
            for demo in demographics
        },
    }

    flows_by_origin: dict[str, list] = {cbg: [] for cbg in cbg_ids}
    home_fraction = {cbg: [None] * len(days) for cbg in cbg_ids}
    incoming: dict[str, list] = {cbg: [None] * len(days) for cbg in cbg_ids}

    for record in sorted(mobility, key=lambda r: (r.cbg_id, r.date)):
        i = day_index[record.date]
        destinations = {k: int(v) for k, v in sorted(record.destination_flows.items())}
        flows_by_origin[record.cbg_id].append(
            {
                "date": record.date.isoformat(),
                "destinations": destinations,
                "self_loop": destinations.get(record.cbg_id, 0),
            }
        )
        home_fraction[record.cbg_id][i] = record.median_pct_time_home
        for destination, count in destinations.items():
            if destination not in incoming:
                continue
            current = incoming[destination][i]
            incoming[destination][i] = count + (current or 0)

    # A day with any mobility data counts as observed: missing inflow is 0,
    # whereas a day absent from the data stays null (a gap, not a zero).
    for cbg in cbg_ids:
        for i in range(len(days)):
            if incoming[cbg][i] is None:
                incoming[cbg][i] = 0

    flows_payload = {
        "schema_version": SCHEMA_VERSION,
        "days": day_isos,
        "flows": flows_by_origin,
    }
    series_payload = {
        "schema_version": SCHEMA_VERSION,
        "days": day_isos,
        "series": {
            cbg: {
                "home_fraction": home_fraction[cbg],
                "incoming_visits": incoming[cbg],
            }
            for cbg in cbg_ids
        },
    }
    return {
        "cbgs.json": demographics_payload,
        "flows.json": flows_payload,
        "timeseries.json": series_payload,
    }


def export_dashboard_bundle(mobility, demographics, out_dir) -> list[Path]:
    """Write the bundle files into ``out_dir`` and return their paths."""
    payloads = build_bundle(mobility, demographics)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in BUNDLE_FILES:
        path = out_dir / name
        text = json.dumps(payloads[name], sort_keys=True, separators=(",", ":"))
        path.write_text(text + "\n", encoding="utf-8")
        written.append(path)
    return written
