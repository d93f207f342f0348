"""Mobility and fatality ingestion: CSV parsing, daily pooling, weekly series.

File formats (comma-separated, UTF-8, header required, ISO-8601 dates):

* mobility: ``cbg_id,date,device_count,completely_home_device_count,
  median_pct_time_home,median_distance_from_home,destination_flows`` where
  ``destination_flows`` is a quoted JSON object mapping destination CBG ids
  to visit counts (possibly ``{}``).
* fatalities: ``date,cumulative_deaths`` with a nondecreasing cumulative
  count.
* demographics: ``cbg_id,white,black,hispanic,asian,natives_others,older50,
  median_income,population`` with the five race fractions summing to one.

Rows that violate a record invariant are rejected individually and reported
with their line number through the module logger; pass ``strict=True`` to
turn the first rejection into an error.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AggregationError,
    DataError,
    DomainError,
    MonotonicityError,
    SchemaError,
)

log = logging.getLogger(__name__)

MOBILITY_COLUMNS = (
    "cbg_id",
    "date",
    "device_count",
    "completely_home_device_count",
    "median_pct_time_home",
    "median_distance_from_home",
    "destination_flows",
)
FATALITY_COLUMNS = ("date", "cumulative_deaths")
RACE_KEYS = ("white", "black", "hispanic", "asian", "natives_others")
DEMOGRAPHICS_COLUMNS = ("cbg_id", *RACE_KEYS, "older50", "median_income", "population")

RACE_SIMPLEX_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DailyCbgRecord:
    """One census-block-group day of mobility."""

    cbg_id: str
    date: dt.date
    device_count: int
    completely_home_count: int
    median_pct_time_home: float
    median_distance_from_home: float
    destination_flows: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.device_count < 0:
            raise DomainError(f"device_count must be nonnegative, got {self.device_count}")
        if self.completely_home_count < 0:
            raise DomainError(
                f"completely_home_count must be nonnegative, got {self.completely_home_count}"
            )
        if self.completely_home_count > self.device_count:
            raise DomainError(
                f"completely_home_count ({self.completely_home_count}) exceeds "
                f"device_count ({self.device_count})"
            )
        if not 0.0 <= self.median_pct_time_home <= 1.0:
            raise DomainError(
                f"median_pct_time_home must lie in [0, 1], got {self.median_pct_time_home}"
            )
        if self.median_distance_from_home < 0.0:
            raise DomainError("median_distance_from_home must be nonnegative")
        for dest, count in self.destination_flows.items():
            if count < 0:
                raise DomainError(f"negative visit count for destination {dest}")


@dataclass(frozen=True)
class FatalityRecord:
    """Cumulative death count as of one calendar day."""

    date: dt.date
    cumulative_deaths: int

    def __post_init__(self):
        if self.cumulative_deaths < 0:
            raise DomainError("cumulative_deaths must be nonnegative")


@dataclass(frozen=True)
class CbgDemographics:
    """Census block group composition used as regression covariates."""

    cbg_id: str
    race_fractions: dict[str, float]
    older50_fraction: float
    median_income: float
    population: int

    def __post_init__(self):
        missing = [k for k in RACE_KEYS if k not in self.race_fractions]
        if missing:
            raise DomainError(f"race_fractions missing keys: {missing}")
        for key in RACE_KEYS:
            value = self.race_fractions[key]
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"race fraction {key}={value} outside [0, 1]")
        total = sum(self.race_fractions[k] for k in RACE_KEYS)
        if abs(total - 1.0) > RACE_SIMPLEX_TOLERANCE:
            raise DomainError(f"race fractions sum to {total}, expected 1")
        if not 0.0 <= self.older50_fraction <= 1.0:
            raise DomainError("older50_fraction must lie in [0, 1]")
        if self.population < 0:
            raise DomainError("population must be nonnegative")


@dataclass(frozen=True, eq=False)
class WeeklyPair:
    """Aligned weekly series: national stay-home fraction and new deaths."""

    week_starts: tuple[dt.date, ...]
    h_us: np.ndarray
    deaths: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h_us, dtype=float)
        d = np.asarray(self.deaths, dtype=float)
        if not (len(self.week_starts) == h.shape[0] == d.shape[0]):
            raise DomainError("week_starts, h_us, and deaths must have equal length")
        if h.size and (h.min() < 0.0 or h.max() > 1.0):
            raise DomainError("every h_us entry must lie in [0, 1]")
        if d.size and d.min() < 0.0:
            raise DomainError("weekly death counts must be nonnegative")
        object.__setattr__(self, "h_us", h)
        object.__setattr__(self, "deaths", d)

    def __len__(self) -> int:
        return len(self.week_starts)

    def head(self, n_weeks: int) -> "WeeklyPair":
        """First ``n_weeks`` weeks as a new pair."""
        return WeeklyPair(
            self.week_starts[:n_weeks],
            self.h_us[:n_weeks].copy(),
            self.deaths[:n_weeks].copy(),
        )


def _parse_destination_flows(raw: str) -> dict[str, int]:
    text = (raw or "").strip()
    if not text:
        return {}
    parsed = json.loads(text)
    if not isinstance(parsed, dict):
        raise DomainError("destination_flows must be a JSON object")
    flows = {}
    for dest, count in parsed.items():
        if isinstance(count, float) and not count.is_integer():
            raise DomainError(f"visit count for {dest} is not an integer: {count}")
        flows[str(dest)] = int(count)
    return flows


def _require_columns(fieldnames, required, kind: str) -> None:
    if fieldnames is None:
        raise SchemaError(f"{kind} CSV has no header row")
    missing = [c for c in required if c not in fieldnames]
    if missing:
        raise SchemaError(f"{kind} CSV is missing column(s): {', '.join(missing)}")


def parse_mobility_csv(path, strict: bool = False) -> list[DailyCbgRecord]:
    """Parse a mobility CSV into one record per row.

    Malformed rows are rejected and logged with their line number; with
    ``strict=True`` the first rejection raises instead.
    """
    records: list[DailyCbgRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, MOBILITY_COLUMNS, "mobility")
        for line_no, row in enumerate(reader, start=2):
            try:
                records.append(
                    DailyCbgRecord(
                        cbg_id=row["cbg_id"].strip(),
                        date=dt.date.fromisoformat(row["date"].strip()),
                        device_count=int(row["device_count"]),
                        completely_home_count=int(row["completely_home_device_count"]),
                        median_pct_time_home=float(row["median_pct_time_home"]),
                        median_distance_from_home=float(row["median_distance_from_home"]),
                        destination_flows=_parse_destination_flows(row["destination_flows"]),
                    )
                )
            except (DataError, ValueError, json.JSONDecodeError) as exc:
                if strict:
                    raise DataError(f"mobility row at line {line_no}: {exc}") from exc
                log.warning("rejected mobility row at line %d: %s", line_no, exc)
    return records


def parse_fatalities_csv(path) -> list[FatalityRecord]:
    """Parse a cumulative fatality CSV, sorted ascending by date.

    Duplicate dates and decreasing cumulative counts are errors.
    """
    rows: list[FatalityRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, FATALITY_COLUMNS, "fatalities")
        for line_no, row in enumerate(reader, start=2):
            try:
                rows.append(
                    FatalityRecord(
                        date=dt.date.fromisoformat(row["date"].strip()),
                        cumulative_deaths=int(row["cumulative_deaths"]),
                    )
                )
            except (DataError, ValueError) as exc:
                raise DataError(f"fatality row at line {line_no}: {exc}") from exc
    rows.sort(key=lambda r: r.date)
    for previous, current in zip(rows, rows[1:]):
        if current.date == previous.date:
            raise DataError(f"duplicate fatality date {current.date}")
        if current.cumulative_deaths < previous.cumulative_deaths:
            raise MonotonicityError(
                f"cumulative deaths decrease on {current.date} "
                f"({previous.cumulative_deaths} -> {current.cumulative_deaths})"
            )
    return rows


def parse_demographics_csv(path, strict: bool = False) -> list[CbgDemographics]:
    """Parse per-CBG demographics; invalid rows are rejected like mobility rows."""
    records: list[CbgDemographics] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, DEMOGRAPHICS_COLUMNS, "demographics")
        for line_no, row in enumerate(reader, start=2):
            try:
                records.append(
                    CbgDemographics(
                        cbg_id=row["cbg_id"].strip(),
                        race_fractions={k: float(row[k]) for k in RACE_KEYS},
                        older50_fraction=float(row["older50"]),
                        median_income=float(row["median_income"]),
                        population=int(row["population"]),
                    )
                )
            except (DataError, ValueError) as exc:
                if strict:
                    raise DataError(f"demographics row at line {line_no}: {exc}") from exc
                log.warning("rejected demographics row at line %d: %s", line_no, exc)
    return records


def national_home_fraction(records) -> float:
    """Pooled stay-home fraction for one day: sum(home) / sum(devices).

    Pooling the counts equals the device-count-weighted mean of per-CBG
    fractions and is numerically stabler. All records must share one date.
    """
    records = list(records)
    if not records:
        raise AggregationError("no records supplied for the day")
    day = records[0].date
    if any(r.date != day for r in records):
        raise DomainError("records span more than one day")
    total_devices = sum(r.device_count for r in records)
    if total_devices == 0:
        raise AggregationError(f"undefined day {day}: zero devices reported")
    total_home = sum(r.completely_home_count for r in records)
    return total_home / total_devices


def weekly_aggregate(mobility, fatalities, anchor: dt.date | None = None) -> WeeklyPair:
    """Aggregate daily records into aligned weekly series.

    Weeks are consecutive 7-day blocks starting at ``anchor`` (default: the
    first date covered by both inputs). For each retained week,

    * ``h_us`` is the mean of the seven daily pooled stay-home fractions, and
    * ``deaths`` is the cumulative count at the week's last day minus the
      count at the week's start boundary (the day before the week for all
      weeks after the first; the anchor day itself for the first week), so
      the weekly counts telescope to last-minus-first over the retained span.

    A trailing partial week is dropped. A week with a missing day or zero
    total devices raises :class:`AggregationError` naming the week.
    """
    mobility = list(mobility)
    fatalities = sorted(fatalities, key=lambda r: r.date)
    if not mobility:
        raise AggregationError("no mobility records supplied")
    if not fatalities:
        raise AggregationError("no fatality records supplied")

    by_day: dict[dt.date, list[DailyCbgRecord]] = {}
    for record in mobility:
        by_day.setdefault(record.date, []).append(record)

    mobility_first = min(by_day)
    mobility_last = max(by_day)
    fatality_first = fatalities[0].date
    fatality_last = fatalities[-1].date

    if anchor is None:
        anchor = max(mobility_first, fatality_first)
    if anchor < mobility_first or anchor < fatality_first:
        raise AggregationError(f"anchor {anchor} precedes the data coverage")

    span_end = min(mobility_last, fatality_last)
    n_weeks = ((span_end - anchor).days + 1) // 7
    if n_weeks < 1:
        raise AggregationError("inputs do not cover one complete week after the anchor")

    cumulative: dict[dt.date, int] = {}
    level = None
    pointer = 0
    day = anchor
    while day <= span_end:
        while pointer < len(fatalities) and fatalities[pointer].date <= day:
            level = fatalities[pointer].cumulative_deaths
            pointer += 1
        if level is None:
            raise AggregationError(f"no fatality record on or before {day}")
        cumulative[day] = level
        day += dt.timedelta(days=1)

    week_starts: list[dt.date] = []
    h_values: list[float] = []
    death_values: list[float] = []
    for week_index in range(n_weeks):
        week_start = anchor + dt.timedelta(days=7 * week_index)
        daily_fractions = []
        for offset in range(7):
            day = week_start + dt.timedelta(days=offset)
            day_records = by_day.get(day)
            if not day_records:
                raise AggregationError(
                    f"week {week_index} starting {week_start} has no mobility data on {day}"
                )
            try:
                daily_fractions.append(national_home_fraction(day_records))
            except AggregationError as exc:
                raise AggregationError(
                    f"week {week_index} starting {week_start}: {exc}"
                ) from exc
        week_end = week_start + dt.timedelta(days=6)
        if week_index == 0:
            start_level = cumulative[anchor]
        else:
            start_level = cumulative[week_start - dt.timedelta(days=1)]
        week_starts.append(week_start)
        h_values.append(float(np.mean(daily_fractions)))
        death_values.append(float(cumulative[week_end] - start_level))

    return WeeklyPair(tuple(week_starts), np.array(h_values), np.array(death_values))


def write_mobility_csv(records, path) -> None:
    """Inverse of :func:`parse_mobility_csv`; floats keep full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MOBILITY_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.cbg_id,
                    r.date.isoformat(),
                    r.device_count,
                    r.completely_home_count,
                    repr(r.median_pct_time_home),
                    repr(r.median_distance_from_home),
                    json.dumps(r.destination_flows, sort_keys=True),
                ]
            )


def write_fatalities_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FATALITY_COLUMNS)
        for r in records:
            writer.writerow([r.date.isoformat(), r.cumulative_deaths])


def write_demographics_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(DEMOGRAPHICS_COLUMNS)
        for r in records:
            writer.writerow(
                [r.cbg_id]
                + [repr(r.race_fractions[k]) for k in RACE_KEYS]
                + [repr(r.older50_fraction), repr(r.median_income), r.population]
            )


def write_weekly_csv(weekly: WeeklyPair, path) -> None:
    """Write a weekly pair as ``week_start,h_us,deaths``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week_start", "h_us", "deaths"])
        for week, h, d in zip(weekly.week_starts, weekly.h_us, weekly.deaths):
            writer.writerow([week.isoformat(), repr(float(h)), repr(float(d))])


def read_weekly_csv(path) -> WeeklyPair:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, ("week_start", "h_us", "deaths"), "weekly")
        weeks, h, d = [], [], []
        for row in reader:
            weeks.append(dt.date.fromisoformat(row["week_start"]))
            h.append(float(row["h_us"]))
            d.append(float(row["deaths"]))
    return WeeklyPair(tuple(weeks), np.array(h), np.array(d))
