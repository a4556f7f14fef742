"""Social-protection cash flows: state UI, CARES supplements and stimulus checks.

Durations are in months unless a name says weeks. Weekly amounts convert to
monthly ones with 52/12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .population import Worker

WEEKS_PER_MONTH = 52.0 / 12.0

UI_MIN_QUARTERLY = 900.0
UI_FLOOR_WEEKLY = 40.0
UI_CAP_WEEKLY = 450.0
UI_DIVISOR = 26.0
PUC_WEEKLY = 600.0

STIMULUS_FULL = 1200.0
STIMULUS_PHASEOUT_START = 75000.0
STIMULUS_CUTOFF = 99000.0
STIMULUS_SLOPE = 5.0 / 100.0  # dollars of check lost per dollar above the threshold

CASES = ("A", "B", "C")
_DEFAULT_UI_MONTHS = {"A": 0.0, "B": 6.0, "C": 9.0}


def weeks_to_months(weeks: float) -> float:
    return weeks / WEEKS_PER_MONTH


@dataclass(frozen=True)
class PolicyCase:
    """One social-protection regime.

    ``case`` is "A" (no benefits), "B" (state UI) or "C" (UI plus CARES).
    ``ui_max_duration`` defaults to 6 months for B and 9 for C.
    """

    case: str = "A"
    exclusion_rate: float = 0.40
    puc_expiry: float = 4.5
    ui_max_duration: float | None = None
    delay_mean: float = 6.0
    delay_sd: float = 3.0

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if not 0 <= self.exclusion_rate <= 1:
            raise ValueError("exclusion_rate must be in [0, 1]")
        if not self.puc_expiry >= 0:
            raise ValueError("puc_expiry must be >= 0")
        if self.ui_max_duration is not None and not self.ui_max_duration >= 0:
            raise ValueError("ui_max_duration must be >= 0")
        if not (self.delay_mean > 0 and self.delay_sd >= 0):
            raise ValueError("delay mean must be > 0 and sd >= 0")

    @property
    def ui_months(self) -> float:
        if self.ui_max_duration is not None:
            return self.ui_max_duration
        return _DEFAULT_UI_MONTHS[self.case]


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    amount: float
    kind: str = "ui"


@dataclass(frozen=True)
class CashflowSchedule:
    """Monthly benefit rates over time, one list of segments per benefit kind.

    Segments of the same kind never overlap; different kinds (base UI and the
    flat supplement) may run concurrently and add up.
    """

    segments: tuple[Segment, ...] = ()

    def rate(self, t: float) -> float:
        return math.fsum(s.amount for s in self.segments if s.start <= t < s.end)

    def total(self) -> float:
        return math.fsum(s.amount * (s.end - s.start) for s in self.segments)

    def breakpoints(self) -> list[float]:
        return sorted({x for s in self.segments for x in (s.start, s.end)})

    def __bool__(self):
        return bool(self.segments)


def ui_weekly_benefit(quarterly_income: float) -> float:
    """Weekly state UI benefit for a given quarterly gross income.

    Benefits are paid in whole dollars, rounded up, so the $450 cap is
    reached at $11,676 a quarter.
    """
    if quarterly_income < UI_MIN_QUARTERLY:
        return 0.0
    weekly = float(math.ceil(quarterly_income / UI_DIVISOR - 1e-9))
    return min(max(weekly, UI_FLOOR_WEEKLY), UI_CAP_WEEKLY)


def stimulus_check(annual_income: float) -> float:
    """Individual stimulus check with a linear phase-out above $75,000."""
    if annual_income <= STIMULUS_PHASEOUT_START:
        return STIMULUS_FULL
    if annual_income > STIMULUS_CUTOFF:
        return 0.0
    return max(STIMULUS_FULL - STIMULUS_SLOPE * (annual_income - STIMULUS_PHASEOUT_START), 0.0)


def lognormal_params(mean: float, sd: float) -> tuple[float, float]:
    """(mu, sigma) of the underlying normal for a lognormal with given mean and sd."""
    sigma2 = math.log1p((sd / mean) ** 2)
    return math.log(mean) - sigma2 / 2.0, math.sqrt(sigma2)


def sample_delay(rng: np.random.Generator, mean: float = 6.0, sd: float = 3.0) -> float:
    """Benefit payment delay in weeks, lognormal with the given arithmetic moments."""
    mu, sigma = lognormal_params(mean, sd)
    return float(rng.lognormal(mu, sigma))


def sample_exclusion(rng: np.random.Generator, w: Worker, rate: float) -> bool:
    """Whether a worker is excluded from both UI and CARES.

    Undocumented workers are always excluded. For documented workers the
    draw compares one uniform variate against ``rate``, so the excluded set
    grows monotonically with the rate under shared randomness.
    """
    u = rng.random()
    if not w.documented:
        return True
    return bool(u < rate)


def benefit_schedule(w: Worker, case: PolicyCase, crisis_months: float, delay: float,
                     excluded: bool) -> CashflowSchedule:
    """Benefit income for one worker during the crisis.

    ``delay`` is in months. Benefits start at ``min(delay, crisis_months)``
    and all stop at ``crisis_months`` when income is restored. The stimulus
    check is not part of this schedule; it is paid into savings.
    """
    if case.case == "A" or excluded or not w.affected:
        return CashflowSchedule()
    start = min(delay, crisis_months)
    segments = []
    weekly = ui_weekly_benefit(3.0 * w.labor_income)
    ui_end = min(crisis_months, delay + case.ui_months)
    if weekly > 0 and ui_end > start:
        segments.append(Segment(start, ui_end, weekly * WEEKS_PER_MONTH, "ui"))
    if case.case == "C":
        puc_end = min(crisis_months, case.puc_expiry)
        if puc_end > start:
            segments.append(Segment(start, puc_end, PUC_WEEKLY * WEEKS_PER_MONTH, "puc"))
    return CashflowSchedule(tuple(segments))


def stimulus_payment(w: Worker, case: PolicyCase, excluded: bool) -> float:
    if case.case != "C" or excluded:
        return 0.0
    return stimulus_check(12.0 * w.labor_income)


def total_benefits(schedules: Sequence[CashflowSchedule], stimulus: float = 0.0) -> float:
    return math.fsum([*(s.total() for s in schedules), stimulus])
