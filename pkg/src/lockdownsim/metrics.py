"""Aggregate household outcomes: poverty, recovery, quintiles, tracts.

Every statistic is person-weighted (households count by size) and every
sum goes through ``math.fsum``, so results do not depend on the order in
which outcomes are combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class EmptyPopulationError(ValueError):
    pass


PHASES = ("initial", "end_of_crisis")


@dataclass(frozen=True)
class PovertyThresholds:
    poverty_annual: float = 25844.0
    deep_annual: float = 12922.0

    def __post_init__(self):
        if not (self.poverty_annual > 0 and self.deep_annual > 0):
            raise ValueError("poverty thresholds must be > 0")

    @property
    def poverty_monthly(self) -> float:
        return self.poverty_annual / 12.0

    @property
    def deep_monthly(self) -> float:
        return self.deep_annual / 12.0


@dataclass(frozen=True)
class HouseholdOutcome:
    """Result of one household's crisis. Money in household dollars, time in months.

    ``c_end`` is (floored) consumption just before the crisis ends,
    ``c_crisis`` its time mean over the crisis. ``lumps`` are the
    (arrival time, amount) pairs paid into savings.
    """

    household_id: str
    tract_id: str
    size: int
    income0: float
    c_o: float
    S_o: float
    n_affected: int
    crisis_months: float
    benefits: float
    lumps: tuple[tuple[float, float], ...]
    S_f: float
    T_R: float
    W: float
    W_o: float
    c_end: float
    c_crisis: float
    S_target: float  # savings level once recovered
    fallback: bool = False

    @property
    def affected(self) -> bool:
        return self.n_affected > 0

    @property
    def stimulus(self) -> float:
        return math.fsum(x for _, x in self.lumps)

    @property
    def objective(self) -> float:
        return self.W - self.W_o

    def savings_at(self, t: float) -> float:
        T_C = self.crisis_months
        if t < T_C:
            received = math.fsum(x for s, x in self.lumps if s <= t)
            return self.S_o + received - max(t, 0.0) * (self.S_o - self.S_f) / T_C
        end_savings = self.S_f + self.stimulus
        if self.T_R > 0:
            if t < T_C + self.T_R:
                return end_savings + (t - T_C) / self.T_R * (self.S_target - end_savings)
            return self.S_target
        return end_savings


def _check(outcomes: Sequence[HouseholdOutcome]):
    if not outcomes:
        raise EmptyPopulationError("no households in population")


def _persons(outcomes) -> float:
    return float(sum(o.size for o in outcomes))


def weighted_mean(values: Iterable[float], weights: Iterable[float]) -> float:
    v, w = list(values), list(weights)
    total = math.fsum(w)
    if total <= 0:
        return math.nan
    return math.fsum(a * b for a, b in zip(v, w)) / total


def weighted_quantile(values, weights, q) -> float:
    return float(np.quantile(np.asarray(values, dtype=float), q,
                             weights=np.asarray(weights, dtype=float), method="inverted_cdf"))


@dataclass(frozen=True)
class PovertyRates:
    phase: str
    poverty_rate: float
    deep_poverty_rate: float
    poor_persons: float
    deep_poor_persons: float
    persons: float

    def headcount_increase(self, initial: PovertyRates) -> float:
        return self.poor_persons - initial.poor_persons


def per_capita_consumption(o: HouseholdOutcome, phase: str) -> float:
    if phase == "initial":
        return o.c_o / o.size
    if phase == "end_of_crisis":
        return o.c_end / o.size
    raise ValueError(f"unknown phase {phase!r}; expected one of {PHASES}")


def poverty_rates(outcomes: Sequence[HouseholdOutcome], thresholds: PovertyThresholds | None = None,
                  phase: str = "end_of_crisis") -> PovertyRates:
    """Share of persons whose per-capita monthly consumption is below threshold/12."""
    _check(outcomes)
    th = thresholds or PovertyThresholds()
    poor = deep = 0
    for o in outcomes:
        c = per_capita_consumption(o, phase)
        if c < th.poverty_monthly:
            poor += o.size
        if c < th.deep_monthly:
            deep += o.size
    n = _persons(outcomes)
    return PovertyRates(phase, poor / n, deep / n, float(poor), float(deep), n)


@dataclass(frozen=True)
class RecoveryStats:
    n_households: int
    persons: float
    mean: float
    q1: float
    median: float
    q3: float
    histogram: tuple[tuple[float, float, float], ...]  # (lo, hi, persons)

    @property
    def empty(self) -> bool:
        return self.n_households == 0

    def as_dict(self) -> dict:
        return {"n_households": self.n_households, "persons": self.persons, "mean": self.mean,
                "q1": self.q1, "median": self.median, "q3": self.q3}


EMPTY_RECOVERY = RecoveryStats(0, 0.0, math.nan, math.nan, math.nan, math.nan, ())


def recovery_stats(outcomes: Sequence[HouseholdOutcome], affected_only: bool = True,
                   bin_width: float = 1.0) -> RecoveryStats:
    """Person-weighted recovery-time statistics; EMPTY_RECOVERY if nobody qualifies."""
    sel = [o for o in outcomes if o.affected or not affected_only]
    if not sel:
        return EMPTY_RECOVERY
    t = [o.T_R for o in sel]
    w = [o.size for o in sel]
    n_bins = max(1, math.ceil(max(t) / bin_width + 1e-12))
    counts = [0.0] * n_bins
    for ti, wi in zip(t, w):
        counts[min(int(ti // bin_width), n_bins - 1)] += wi
    hist = tuple((k * bin_width, (k + 1) * bin_width, counts[k]) for k in range(n_bins))
    return RecoveryStats(len(sel), float(sum(w)), weighted_mean(t, w), weighted_quantile(t, w, 0.25),
                         weighted_quantile(t, w, 0.5), weighted_quantile(t, w, 0.75), hist)


def recovery_curve(outcomes: Sequence[HouseholdOutcome], horizon: float,
                   step: float = 0.25) -> list[tuple[float, float]]:
    """Aggregate savings as a percentage of the pre-crisis total on a time grid."""
    _check(outcomes)
    if not step > 0:
        raise ValueError("step must be > 0")
    if not horizon > max(o.crisis_months for o in outcomes):
        raise ValueError("horizon must exceed the crisis duration")
    base = math.fsum(o.S_o for o in outcomes)
    if base <= 0:
        raise ValueError("population holds no savings")
    n = int(math.floor(horizon / step + 1e-9))
    grid = [k * step for k in range(n + 1)]
    return [(t, 100.0 * (math.fsum(o.savings_at(t) for o in outcomes) / base)) for t in grid]


@dataclass(frozen=True)
class QuintileRow:
    quintile: int
    households: int
    persons: float
    income_pc_min: float
    income_pc_max: float
    consumption_loss: float  # $/month per capita
    consumption_loss_pct: float
    savings_loss: float  # $ per capita
    mean_recovery: float  # months, affected only

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def quintile_groups(outcomes: Sequence[HouseholdOutcome]) -> list[list[HouseholdOutcome]]:
    """Split into five person-weighted groups by pre-crisis per-capita income.

    A household falls in the quintile containing the midpoint of its
    persons in the cumulative distribution; ties are broken by id.
    """
    if len(outcomes) < 5:
        raise ValueError("need at least 5 households for quintiles")
    order = sorted(outcomes, key=lambda o: (o.income0 / o.size, o.household_id))
    total = _persons(order)
    groups: list[list[HouseholdOutcome]] = [[] for _ in range(5)]
    cum = 0.0
    for o in order:
        mid = cum + 0.5 * o.size
        groups[min(4, int(5.0 * mid / total))].append(o)
        cum += o.size
    return groups


def quintile_table(outcomes: Sequence[HouseholdOutcome]) -> list[QuintileRow]:
    rows = []
    for q, grp in enumerate(quintile_groups(outcomes), start=1):
        if not grp:
            rows.append(QuintileRow(q, 0, 0.0, *([math.nan] * 6)))
            continue
        w = [o.size for o in grp]
        aff = [o for o in grp if o.affected]
        rows.append(QuintileRow(
            quintile=q, households=len(grp), persons=float(sum(w)),
            income_pc_min=min(o.income0 / o.size for o in grp),
            income_pc_max=max(o.income0 / o.size for o in grp),
            consumption_loss=weighted_mean(((o.c_o - o.c_crisis) / o.size for o in grp), w),
            consumption_loss_pct=weighted_mean((100.0 * (o.c_o - o.c_crisis) / o.c_o for o in grp), w),
            savings_loss=weighted_mean(((o.S_o - o.S_f) / o.size for o in grp), w),
            mean_recovery=weighted_mean((o.T_R for o in aff), (o.size for o in aff)),
        ))
    return rows


@dataclass(frozen=True)
class TractRow:
    tract_id: str
    households: int
    persons: float
    consumption_change_pct: float
    mean_recovery: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def tract_summary(outcomes: Sequence[HouseholdOutcome]) -> list[TractRow]:
    """Per tract: mean relative consumption change over the crisis and mean recovery of the affected."""
    _check(outcomes)
    by_tract: dict[str, list[HouseholdOutcome]] = {}
    for o in outcomes:
        if not o.tract_id:
            raise ValueError(f"household {o.household_id} has no tract id")
        by_tract.setdefault(o.tract_id, []).append(o)
    rows = []
    for tid in sorted(by_tract):
        grp = by_tract[tid]
        w = [o.size for o in grp]
        aff = [o for o in grp if o.affected]
        rows.append(TractRow(
            tid, len(grp), float(sum(w)),
            weighted_mean((100.0 * (o.c_crisis - o.c_o) / o.c_o for o in grp), w),
            weighted_mean((o.T_R for o in aff), (o.size for o in aff)),
        ))
    return rows


def summarize(outcomes: Sequence[HouseholdOutcome],
              thresholds: PovertyThresholds | None = None) -> dict:
    """Headline numbers for one run as a JSON-ready dict."""
    th = thresholds or PovertyThresholds()
    init = poverty_rates(outcomes, th, "initial")
    end = poverty_rates(outcomes, th, "end_of_crisis")
    rec = recovery_stats(outcomes, affected_only=True)
    persons = _persons(outcomes)
    affected_persons = float(sum(o.size for o in outcomes if o.affected))
    return {
        "households": len(outcomes),
        "persons": persons,
        "affected_households": sum(o.affected for o in outcomes),
        "affected_persons": affected_persons,
        "affected_workers": sum(o.n_affected for o in outcomes),
        "poverty": {
            "initial_rate": init.poverty_rate,
            "end_of_crisis_rate": end.poverty_rate,
            "increase_pp": 100.0 * (end.poverty_rate - init.poverty_rate),
            "headcount_increase": end.headcount_increase(init),
            "deep_initial_rate": init.deep_poverty_rate,
            "deep_end_of_crisis_rate": end.deep_poverty_rate,
            "deep_increase_pp": 100.0 * (end.deep_poverty_rate - init.deep_poverty_rate),
            "deep_headcount_increase": end.deep_poor_persons - init.deep_poor_persons,
        },
        "recovery": rec.as_dict(),
        "benefits_total": math.fsum(o.benefits for o in outcomes),
        "savings_loss_total": math.fsum(o.S_o - o.S_f for o in outcomes),
        "optimizer_fallbacks": sum(o.fallback for o in outcomes),
    }
