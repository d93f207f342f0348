"""Command-line surface for the full pipeline.

Subcommands: synth, ingest, kpss, granger, forecast, betareg, did,
export-dashboard. Every subcommand writes machine-readable artifacts into
the output directory (flag ``--out-dir``, overridable with the
``HOMEBOUND_OUT_DIR`` environment variable) and prints a human-readable
summary. Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import betareg, bundle, did, forecast, granger, ingest, stationarity, synth
from .errors import DataError, HomeboundError, NumericalError

OUT_DIR_ENV = "HOMEBOUND_OUT_DIR"


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for the regression/resampling subcommands."""

    mobility_path: Path
    demographics_path: Path
    pre_start: dt.date
    pre_end: dt.date
    post_start: dt.date
    post_end: dt.date
    out_dir: Path
    covariates: str = "race"
    income_unit: str = "dollars"
    seed: int = 0

    def __post_init__(self):
        if self.pre_end < self.pre_start or self.post_end < self.post_start:
            raise DataError("each period must end on or after its start")
        if self.pre_end >= self.post_start and self.post_end >= self.pre_start:
            raise DataError("pre and post periods must not overlap")


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from exc


def _out_dir(args) -> Path:
    out = Path(os.environ.get(OUT_DIR_ENV, args.out_dir))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _weekly_from_args(args) -> ingest.WeeklyPair:
    mobility = ingest.parse_mobility_csv(args.mobility)
    fatalities = ingest.parse_fatalities_csv(args.fatalities)
    anchor = getattr(args, "anchor", None)
    return ingest.weekly_aggregate(mobility, fatalities, anchor)


def _cmd_synth(args) -> int:
    config = synth.SynthConfig(
        n_cbgs=args.cbgs,
        n_days=args.days,
        coupling_lag=args.coupling_lag,
        coupling_strength=args.coupling_strength,
        seed=args.seed,
    )
    mobility, fatalities, demographics = synth.synthesize_dataset(config)
    out = _out_dir(args)
    ingest.write_mobility_csv(mobility, out / "mobility.csv")
    ingest.write_fatalities_csv(fatalities, out / "fatalities.csv")
    ingest.write_demographics_csv(demographics, out / "demographics.csv")
    print(
        f"wrote {len(mobility)} mobility rows, {len(fatalities)} fatality rows, "
        f"{len(demographics)} demographics rows to {out}"
    )
    return 0


def _cmd_ingest(args) -> int:
    weekly = _weekly_from_args(args)
    out = _out_dir(args)
    ingest.write_weekly_csv(weekly, out / "weekly.csv")
    print(f"{'week_start':<12}{'h_us':>10}{'deaths':>10}")
    for week, h, d in zip(weekly.week_starts, weekly.h_us, weekly.deaths):
        print(f"{week.isoformat():<12}{h:>10.4f}{d:>10.0f}")
    print(f"wrote {len(weekly)} weeks to {out / 'weekly.csv'}")
    return 0


def _cmd_kpss(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or args.column not in reader.fieldnames:
            raise DataError(f"column {args.column!r} not found in {args.input}")
        series = [float(row[args.column]) for row in reader]
    lag = None if args.lag < 0 else args.lag
    result = stationarity.kpss_test(series, lag)
    out = _out_dir(args)
    payload = {
        "column": args.column,
        "statistic": result.statistic,
        "truncation_lag": result.truncation_lag,
        "critical_values": {str(k): v for k, v in result.critical_values.items()},
        "reject_at_5pct": result.reject_at_5pct,
    }
    (out / "kpss.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
    )
    verdict = "reject stationarity at 5%" if result.reject_at_5pct else "no rejection at 5%"
    print(f"KPSS statistic {result.statistic:.4f} (truncation lag {result.truncation_lag})")
    for level, value in sorted(result.critical_values.items()):
        print(f"  {level * 100:>4.1f}% critical value: {value}")
    print(verdict)
    print(f"wrote {out / 'kpss.json'}")
    return 0


def _cmd_granger(args) -> int:
    weekly = _weekly_from_args(args)
    scans = granger.granger_scan(weekly, max_lag=args.max_lag, direction=args.direction)
    out = _out_dir(args)
    (out / "granger.json").write_text(granger.scans_to_json(scans), encoding="utf-8")
    for scan in scans:
        print(granger.format_scan_table(scan))
        print()
    print(f"wrote {out / 'granger.json'}")
    return 0


def _cmd_forecast(args) -> int:
    weekly = _weekly_from_args(args)
    model = forecast.var_fit(weekly)
    points = forecast.rolling_backtest(weekly, args.holdout)
    out = _out_dir(args)
    forecast.write_backtest_csv(points, out / "backtest.csv")
    model_payload = {
        "intercept": model.intercept,
        "death_coefficients": list(model.death_coefficients),
        "mobility_coefficients": list(model.mobility_coefficients),
        "r2": model.r2,
        "residual_se": model.residual_se,
        "p_values": list(model.p_values),
    }
    (out / "var_model.json").write_text(
        json.dumps(model_payload, indent=2, sort_keys=True), encoding="utf-8"
    )
    print(f"{'week_start':<12}{'actual':>10}{'predicted':>12}")
    for point in points:
        print(f"{point.week_start.isoformat():<12}{point.actual:>10.0f}{point.predicted:>12.1f}")
    print(f"in-sample R2 {model.r2:.3f}, residual SE {model.residual_se:.1f}")
    print(f"wrote {out / 'backtest.csv'} and {out / 'var_model.json'}")
    return 0


def _fit_window(mobility, demographics, start, end, config: RunConfig):
    design = betareg.covariate_design_from_records(
        mobility,
        demographics,
        start,
        end,
        covariates=config.covariates,
        income_unit=config.income_unit,
    )
    return betareg.betareg_fit(design)


def _cmd_betareg(args) -> int:
    out = _out_dir(args)
    config = RunConfig(
        mobility_path=Path(args.mobility),
        demographics_path=Path(args.demographics),
        pre_start=args.pre_start,
        pre_end=args.pre_end,
        post_start=args.post_start,
        post_end=args.post_end,
        out_dir=out,
        covariates=args.covariates,
        income_unit=args.income_unit,
    )
    mobility = ingest.parse_mobility_csv(config.mobility_path)
    demographics = ingest.parse_demographics_csv(config.demographics_path)
    pre_fit = _fit_window(mobility, demographics, config.pre_start, config.pre_end, config)
    post_fit = _fit_window(mobility, demographics, config.post_start, config.post_end, config)
    (out / "betareg_pre.json").write_text(betareg.fit_to_json(pre_fit), encoding="utf-8")
    (out / "betareg_post.json").write_text(betareg.fit_to_json(post_fit), encoding="utf-8")
    print("pre-period model")
    print(betareg.format_fit_table(pre_fit))
    print()
    print("post-period model")
    print(betareg.format_fit_table(post_fit))
    print(f"wrote {out / 'betareg_pre.json'} and {out / 'betareg_post.json'}")
    return 0


def _parse_covariates(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise DataError(f"covariate vector {text!r} is not comma-separated floats") from exc


def _cmd_did(args) -> int:
    pre_fit = betareg.fit_from_dict(json.loads(Path(args.pre_fit).read_text(encoding="utf-8")))
    post_fit = betareg.fit_from_dict(json.loads(Path(args.post_fit).read_text(encoding="utf-8")))
    p1 = _parse_covariates(args.p1)
    p2 = _parse_covariates(args.p2)
    result = did.did_test(
        pre_fit,
        post_fit,
        p1,
        p2,
        n_samples=args.n_samples,
        seed=args.seed,
        batch_size=args.batch_size,
    )
    out = _out_dir(args)
    (out / "did.json").write_text(did.result_to_json(result), encoding="utf-8")
    print(did.format_result(result))
    print(f"wrote {out / 'did.json'}")
    return 0


def _cmd_export_dashboard(args) -> int:
    mobility = ingest.parse_mobility_csv(args.mobility)
    demographics = ingest.parse_demographics_csv(args.demographics)
    out = _out_dir(args)
    written = bundle.export_dashboard_bundle(mobility, demographics, out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homebound",
        description="Mobility vs. fatality analysis pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cbgs", type=int, default=40)
    p.add_argument("--days", type=int, default=196)
    p.add_argument("--coupling-lag", type=int, default=3)
    p.add_argument("--coupling-strength", type=float, default=-2500.0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="aggregate daily inputs to weekly series")
    p.add_argument("--mobility", required=True)
    p.add_argument("--fatalities", required=True)
    p.add_argument("--anchor", type=_date, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("kpss", help="level-stationarity test on a CSV column")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--lag", type=int, default=-1, help="truncation lag; negative = auto")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_kpss)

    p = sub.add_parser("granger", help="per-lag predictive-causality scan")
    p.add_argument("--mobility", required=True)
    p.add_argument("--fatalities", required=True)
    p.add_argument("--anchor", type=_date, default=None)
    p.add_argument("--max-lag", type=int, default=6)
    p.add_argument("--direction", choices=["both", "forward", "reverse"], default="both")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_granger)

    p = sub.add_parser("forecast", help="one-week-ahead rolling backtest")
    p.add_argument("--mobility", required=True)
    p.add_argument("--fatalities", required=True)
    p.add_argument("--anchor", type=_date, default=None)
    p.add_argument("--holdout", type=int, default=5)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("betareg", help="pre/post stay-home regressions")
    p.add_argument("--mobility", required=True)
    p.add_argument("--demographics", required=True)
    p.add_argument("--pre-start", type=_date, required=True)
    p.add_argument("--pre-end", type=_date, required=True)
    p.add_argument("--post-start", type=_date, required=True)
    p.add_argument("--post-end", type=_date, required=True)
    p.add_argument("--covariates", choices=["race", "race+income", "age"], default="race")
    p.add_argument("--income-unit", choices=["dollars", "thousands"], default="dollars")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_betareg)

    p = sub.add_parser("did", help="difference-in-differences resampling test")
    p.add_argument("--pre-fit", required=True, help="JSON fit from the betareg subcommand")
    p.add_argument("--post-fit", required=True)
    p.add_argument("--p1", required=True, help="comma-separated covariates for population 1")
    p.add_argument("--p2", required=True, help="comma-separated covariates for population 2")
    p.add_argument("--n-samples", type=int, default=did.DEFAULT_N_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=did.DEFAULT_BATCH_SIZE)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_did)

    p = sub.add_parser("export-dashboard", help="write the dashboard JSON bundle")
    p.add_argument("--mobility", required=True)
    p.add_argument("--demographics", required=True)
    p.add_argument("--out-dir", default="bundle")
    p.set_defaults(func=_cmd_export_dashboard)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except HomeboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
