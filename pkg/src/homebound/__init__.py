"""homebound: does staying home precede fewer deaths, and who manages to stay?

A statistical toolkit around weekly national mobility and fatality series:
CSV ingestion and weekly aggregation, KPSS stationarity testing,
per-lag predictive-causality scans, a one-week-ahead forecaster with rolling
backtests, beta regression of stay-home behavior on demographics, and a
resampled difference-in-differences comparison between populations, plus a
static JSON export consumed by the interactive dashboard.
"""

from .betareg import (
    BetaRegFit,
    CovariateDesign,
    adjust_boundary_responses,
    beta_density_params,
    betareg_fit,
    covariate_design_from_records,
    predict_mean,
)
from .bundle import build_bundle, export_dashboard_bundle
from .did import DidResult, did_test, hypothetical_block_report
from .errors import (
    AggregationError,
    BoundaryResponseError,
    ConfigError,
    ConvergenceError,
    DataError,
    DomainError,
    HomeboundError,
    InsufficientObservationsError,
    MonotonicityError,
    NonstationaryError,
    NumericalError,
    SchemaError,
    SingularDesignError,
    ZeroVarianceError,
)
from .forecast import VarModel, rolling_backtest, var_fit, var_predict_one
from .granger import (
    GrangerLagResult,
    GrangerScan,
    format_scan_table,
    granger_scan,
    granger_test,
    joint_differencing_order,
)
from .ingest import (
    CbgDemographics,
    DailyCbgRecord,
    FatalityRecord,
    WeeklyPair,
    national_home_fraction,
    parse_demographics_csv,
    parse_fatalities_csv,
    parse_mobility_csv,
    weekly_aggregate,
)
from .special import f_cdf, f_quantile, regularized_incomplete_beta, t_cdf, t_quantile
from .stationarity import KPSS_CRITICAL_VALUES, KpssResult, kpss_test
from .stats_core import (
    NestedFTest,
    OlsFit,
    difference,
    inv_logit,
    logit,
    nested_f_test,
    ols_fit,
)
from .synth import SynthConfig, synthesize_dataset

__version__ = "0.1.0"

__all__ = [
    "AggregationError",
    "BetaRegFit",
    "BoundaryResponseError",
    "CbgDemographics",
    "ConfigError",
    "ConvergenceError",
    "CovariateDesign",
    "DailyCbgRecord",
    "DataError",
    "DidResult",
    "DomainError",
    "FatalityRecord",
    "GrangerLagResult",
    "GrangerScan",
    "HomeboundError",
    "InsufficientObservationsError",
    "KPSS_CRITICAL_VALUES",
    "KpssResult",
    "MonotonicityError",
    "NestedFTest",
    "NonstationaryError",
    "NumericalError",
    "OlsFit",
    "SchemaError",
    "SingularDesignError",
    "SynthConfig",
    "VarModel",
    "WeeklyPair",
    "ZeroVarianceError",
    "adjust_boundary_responses",
    "beta_density_params",
    "betareg_fit",
    "build_bundle",
    "covariate_design_from_records",
    "did_test",
    "difference",
    "export_dashboard_bundle",
    "f_cdf",
    "f_quantile",
    "format_scan_table",
    "granger_scan",
    "granger_test",
    "hypothetical_block_report",
    "inv_logit",
    "joint_differencing_order",
    "kpss_test",
    "logit",
    "national_home_fraction",
    "nested_f_test",
    "ols_fit",
    "parse_demographics_csv",
    "parse_fatalities_csv",
    "parse_mobility_csv",
    "predict_mean",
    "regularized_incomplete_beta",
    "rolling_backtest",
    "synthesize_dataset",
    "t_cdf",
    "t_quantile",
    "var_fit",
    "var_predict_one",
    "weekly_aggregate",
]
