"""Schema-compatible synthetic datasets for desk-scale experiments.

The generator produces the same record types the parsers emit, with a known
causal structure: the national weekly stay-home level follows a drifting
random walk, and weekly deaths are an affine function of that level lagged
by ``coupling_lag`` weeks plus Gaussian noise,

    deaths(w) = base + strength * (h(w - lag) - h_start) + noise.

``coupling_strength = 0`` therefore yields a fatality series independent of
mobility. For observed weeks before the lag horizon the latent lead-in path
stands in for the (unobserved) earlier realized series. Everything is drawn
from one seeded generator, so outputs are byte-identical for equal configs.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ingest import RACE_KEYS, CbgDemographics, DailyCbgRecord, FatalityRecord

_RACE_DIRICHLET = np.array([5.5, 1.5, 1.5, 0.8, 0.7])


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for :func:`synthesize_dataset`; defaults give a detectable
    lag-3 coupling on roughly half a year of data."""

    n_cbgs: int = 40
    n_days: int = 196
    coupling_lag: int = 3
    coupling_strength: float = -2500.0
    base_weekly_deaths: float = 600.0
    death_noise: float = 10.0
    mobility_noise: float = 0.02
    home_fraction_start: float = 0.30
    weekly_drift: float = 0.005
    weekly_step_sd: float = 0.01
    device_count_mean: float = 180.0
    start_date: dt.date = dt.date(2020, 1, 6)
    seed: int = 0

    def validate(self) -> None:
        if self.n_cbgs <= 0:
            raise ConfigError(f"n_cbgs must be positive, got {self.n_cbgs}")
        if self.n_days <= 0:
            raise ConfigError(f"n_days must be positive, got {self.n_days}")
        if self.device_count_mean <= 0:
            raise ConfigError("device_count_mean must be positive")
        if self.coupling_lag < 0:
            raise ConfigError(f"coupling_lag must be nonnegative, got {self.coupling_lag}")
        if not 0.0 < self.home_fraction_start < 1.0:
            raise ConfigError("home_fraction_start must lie in (0, 1)")
        if self.death_noise < 0 or self.mobility_noise < 0 or self.weekly_step_sd < 0:
            raise ConfigError("noise scales must be nonnegative")


def _demographics(rng: np.random.Generator, config: SynthConfig) -> list[CbgDemographics]:
    races = rng.dirichlet(_RACE_DIRICHLET, size=config.n_cbgs)
    older50 = rng.beta(5.0, 7.0, size=config.n_cbgs)
    income = np.clip(rng.normal(65_000.0, 25_000.0, size=config.n_cbgs), 12_000.0, None)
    population = rng.integers(600, 3_000, size=config.n_cbgs)
    out = []
    for i in range(config.n_cbgs):
        out.append(
            CbgDemographics(
                cbg_id=_cbg_id(i),
                race_fractions=dict(zip(RACE_KEYS, races[i].tolist())),
                older50_fraction=float(older50[i]),
                median_income=float(round(income[i], 2)),
                population=int(population[i]),
            )
        )
    return out


def _cbg_id(index: int) -> str:
    return f"420030{index:06d}"


def synthesize_dataset(
    config: SynthConfig,
) -> tuple[list[DailyCbgRecord], list[FatalityRecord], list[CbgDemographics]]:
    """Generate (mobility records, fatality records, demographics).

    Mobility: each CBG gets a persistent stay-home offset mildly tied to its
    demographics; daily per-CBG stay probabilities wobble around the latent
    weekly level and drive binomial completely-home counts. Fatalities: the
    weekly death totals defined in the module docstring are spread across
    each week's days multinomially (skipping the anchor day, which the
    weekly aggregation excludes by its boundary convention) and accumulated.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)

    demographics = _demographics(rng, config)
    older50 = np.array([d.older50_fraction for d in demographics])
    income = np.array([d.median_income for d in demographics])
    offsets = (
        0.10 * (income / 100_000.0 - 0.65)
        - 0.08 * (older50 - 0.42)
        + rng.normal(0.0, 0.02, size=config.n_cbgs)
    )

    n_weeks = int(np.ceil(config.n_days / 7))
    lag = config.coupling_lag
    path = (
        config.home_fraction_start
        + config.weekly_drift * np.arange(n_weeks + lag)
        + np.cumsum(rng.normal(0.0, config.weekly_step_sd, size=n_weeks + lag))
    )
    path = np.clip(path, 0.05, 0.95)

    mobility: list[DailyCbgRecord] = []
    day_home_totals = np.zeros(config.n_days)
    day_device_totals = np.zeros(config.n_days)
    for day_index in range(config.n_days):
        week = day_index // 7
        date = config.start_date + dt.timedelta(days=day_index)
        stay_prob = np.clip(
            path[week + lag] + offsets + rng.normal(0.0, config.mobility_noise, config.n_cbgs),
            0.01,
            0.99,
        )
        devices = np.maximum(1, rng.poisson(config.device_count_mean, config.n_cbgs))
        home = rng.binomial(devices, stay_prob)
        time_home = np.clip(
            0.45 + 0.8 * stay_prob + rng.normal(0.0, 0.02, config.n_cbgs), 0.02, 0.98
        )
        distance = np.round(
            np.exp(rng.normal(7.2, 0.4, config.n_cbgs)) * (1.2 - stay_prob), 1
        )
        self_visits = 1 + rng.poisson(0.30 * devices * (1.0 - stay_prob))
        near = rng.poisson(0.12 * devices * (1.0 - stay_prob))
        far = rng.poisson(0.06 * devices * (1.0 - stay_prob))

        day_home_totals[day_index] = home.sum()
        day_device_totals[day_index] = devices.sum()

        for i in range(config.n_cbgs):
            flows = {_cbg_id(i): int(self_visits[i])}
            if config.n_cbgs > 1:
                if near[i] > 0:
                    flows[_cbg_id((i + 1) % config.n_cbgs)] = int(near[i])
                if far[i] > 0:
                    flows[_cbg_id((i + 2) % config.n_cbgs)] = int(far[i])
            mobility.append(
                DailyCbgRecord(
                    cbg_id=_cbg_id(i),
                    date=date,
                    device_count=int(devices[i]),
                    completely_home_count=int(home[i]),
                    median_pct_time_home=float(round(time_home[i], 6)),
                    median_distance_from_home=float(max(distance[i], 0.0)),
                    destination_flows=flows,
                )
            )

    daily_fraction = day_home_totals / day_device_totals
    realized_weekly = np.array(
        [
            daily_fraction[7 * w : 7 * w + 7].mean()
            for w in range(config.n_days // 7)
        ]
    )

    weekly_deaths = np.zeros(n_weeks, dtype=int)
    for week in range(n_weeks):
        if week >= lag and week - lag < realized_weekly.shape[0]:
            h_lagged = realized_weekly[week - lag]
        else:
            # lead-in weeks are only available as the latent path
            h_lagged = path[week]
        level = (
            config.base_weekly_deaths
            + config.coupling_strength * (h_lagged - config.home_fraction_start)
            + rng.normal(0.0, config.death_noise)
        )
        weekly_deaths[week] = max(0, int(round(level)))

    daily_new = np.zeros(config.n_days, dtype=int)
    for week in range(n_weeks):
        first = 7 * week + (1 if week == 0 else 0)
        days = [d for d in range(first, 7 * week + 7) if d < config.n_days]
        if not days:
            continue
        split = rng.multinomial(weekly_deaths[week], np.full(len(days), 1.0 / len(days)))
        for day, count in zip(days, split):
            daily_new[day] = count

    cumulative = np.cumsum(daily_new)
    fatalities = [
        FatalityRecord(
            date=config.start_date + dt.timedelta(days=i),
            cumulative_deaths=int(cumulative[i]),
        )
        for i in range(config.n_days)
    ]
    return mobility, fatalities, demographics
