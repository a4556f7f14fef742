"""Income, consumption and savings paths over the crisis and recovery periods.

Time is in months from the start of the crisis. During the crisis
consumption is piecewise constant, changing only where benefits start or
stop; savings fall linearly from the initial stock to the final one, plus
lump sums (stimulus checks) that land directly in savings. ``S_f`` is the
household's own end-of-crisis savings and lump sums come on top of it.
During recovery the household saves a fixed share ``gamma`` of its
pre-crisis consumption until the depletion S_o - S_f is rebuilt; with
``credit=1`` lump sums count towards that depletion instead.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .policy import CashflowSchedule
from .population import Household


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewisePath:
    """A path on [breakpoints[0], breakpoints[-1]].

    ``starts[k]``/``ends[k]`` are the values at the left and right end of
    segment k; they are equal for piecewise-constant paths. Evaluation is
    right-continuous, except at the final breakpoint.
    """

    breakpoints: tuple[float, ...]
    starts: tuple[float, ...]
    ends: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.starts) + 1 or len(self.starts) != len(self.ends):
            raise ValueError("need one more breakpoint than segments")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def constant(cls, breakpoints: Sequence[float], values: Sequence[float]) -> PiecewisePath:
        return cls(tuple(breakpoints), tuple(values), tuple(values))

    def segment(self, t: float) -> int:
        if not self.breakpoints[0] <= t <= self.breakpoints[-1]:
            raise ValueError(f"t={t} outside [{self.breakpoints[0]}, {self.breakpoints[-1]}]")
        return min(bisect.bisect_right(self.breakpoints, t) - 1, len(self.starts) - 1)

    def __call__(self, t: float) -> float:
        k = self.segment(t)
        a, b = self.breakpoints[k], self.breakpoints[k + 1]
        return self.starts[k] + (self.ends[k] - self.starts[k]) * (t - a) / (b - a)

    def left_limit(self, t: float) -> float:
        """Value approached from the left at ``t`` (used for T_C-)."""
        k = max(bisect.bisect_left(self.breakpoints, t) - 1, 0)
        a, b = self.breakpoints[k], self.breakpoints[k + 1]
        return self.starts[k] + (self.ends[k] - self.starts[k]) * (min(t, b) - a) / (b - a)

    def floored(self, floor: float) -> PiecewisePath:
        """Elementwise max with ``floor``; only valid for piecewise-constant paths."""
        if self.starts != self.ends:
            raise ValueError("floor only applies to piecewise-constant paths")
        values = tuple(max(v, floor) for v in self.starts)
        return PiecewisePath(self.breakpoints, values, values)

    def minimum(self) -> float:
        return min(min(self.starts), min(self.ends))

    def time_mean(self, t0: float, t1: float) -> float:
        """Time average over [t0, t1] (exact for piecewise-linear paths)."""
        acc = []
        for k in range(len(self.starts)):
            a = max(t0, self.breakpoints[k])
            b = min(t1, self.breakpoints[k + 1])
            if b > a:
                acc.append(0.5 * (self._value_in(k, a) + self._value_in(k, b)) * (b - a))
        return math.fsum(acc) / (t1 - t0)

    def _value_in(self, k: int, t: float) -> float:
        a, b = self.breakpoints[k], self.breakpoints[k + 1]
        return self.starts[k] + (self.ends[k] - self.starts[k]) * (t - a) / (b - a)

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [(self.breakpoints[k], self.breakpoints[k + 1], self.starts[k], self.ends[k])
                for k in range(len(self.starts))]


@dataclass(frozen=True)
class HouseholdProblem:
    """Everything the well-being kernel needs for one household, in household dollars."""

    household_id: str
    size: int
    c_o: float
    S_o: float
    crisis_months: float
    seg_t: np.ndarray
    seg_loss: np.ndarray
    step_t: np.ndarray
    step_x: np.ndarray

    def scaled(self, factor: float) -> HouseholdProblem:
        return HouseholdProblem(self.household_id, self.size, self.c_o * factor, self.S_o * factor,
                                self.crisis_months, self.seg_t, self.seg_loss * factor,
                                self.step_t, self.step_x * factor)

    def per_capita(self) -> HouseholdProblem:
        return self.scaled(1.0 / self.size)

    @property
    def stimulus(self) -> float:
        return math.fsum(self.step_x)


def crisis_profile(h: Household, schedules: Sequence[CashflowSchedule], crisis_months: float,
                   loss_fraction: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints on [0, T_C] and the net income loss on each segment.

    Net loss is lost labor income minus benefit income; it is negative when
    benefits exceed the wages they replace.
    """
    if not crisis_months > 0:
        raise ParameterError("crisis duration must be > 0")
    cuts = {0.0, float(crisis_months)}
    for s in schedules:
        cuts.update(x for x in s.breakpoints() if 0.0 < x < crisis_months)
    seg_t = np.array(sorted(cuts))
    lost = math.fsum(loss_fraction * w.labor_income for w in h.workers if w.affected)
    loss = []
    for a, b in zip(seg_t[:-1], seg_t[1:]):
        mid = 0.5 * (a + b)
        loss.append(lost - math.fsum(s.rate(mid) for s in schedules))
    return seg_t, np.array(loss)


def net_income_loss(h: Household, schedules: Sequence[CashflowSchedule], t: float,
                    crisis_months: float, loss_fraction: float = 1.0) -> float:
    """Monthly income loss at time ``t`` net of benefits; zero after the crisis."""
    if not 0.0 <= t < crisis_months:
        return 0.0
    lost = math.fsum(loss_fraction * w.labor_income for w in h.workers if w.affected)
    return lost - math.fsum(s.rate(t) for s in schedules)


def build_problem(h: Household, c_o: float, schedules: Sequence[CashflowSchedule],
                  lump_sums: Sequence[tuple[float, float]], crisis_months: float,
                  loss_fraction: float = 1.0) -> HouseholdProblem:
    """Assemble the kernel input. ``lump_sums`` are (delay in months, amount) pairs."""
    seg_t, seg_loss = crisis_profile(h, schedules, crisis_months, loss_fraction)
    steps = sorted((min(max(t, 0.0), crisis_months), x) for t, x in lump_sums if x > 0)
    return HouseholdProblem(
        household_id=h.id, size=h.size, c_o=c_o, S_o=h.savings0, crisis_months=float(crisis_months),
        seg_t=seg_t, seg_loss=seg_loss,
        step_t=np.array([t for t, _ in steps], dtype=float),
        step_x=np.array([x for _, x in steps], dtype=float),
    )


def recovery_time(S_o: float, S_f: float, c_o: float, gamma: float) -> float:
    """Months needed to rebuild savings from ``S_f`` to ``S_o`` saving ``gamma * c_o`` a month."""
    if not c_o > 0:
        raise ParameterError("initial consumption must be > 0")
    depletion = S_o - S_f
    return depletion / (gamma * c_o) if depletion > 0 else 0.0


def recovery_target(prob: HouseholdProblem, credit: float = 0.0) -> float:
    """Savings level at which recovery ends."""
    return prob.S_o + (1.0 - credit) * prob.stimulus


def consumption_path(prob: HouseholdProblem, S_f: float, gamma: float,
                     credit: float = 0.0) -> PiecewisePath:
    """Unfloored consumption over crisis and recovery for final savings ``S_f``."""
    T_C = prob.crisis_months
    if not T_C > 0:
        raise ParameterError("crisis duration must be > 0")
    dissave = (prob.S_o - S_f) / T_C
    values = [prob.c_o - loss + dissave for loss in prob.seg_loss]
    breaks = list(prob.seg_t)
    end_savings, target = S_f + prob.stimulus, recovery_target(prob, credit)
    T_R = recovery_time(target, end_savings, prob.c_o, gamma)
    if T_C + T_R > T_C:
        values.append(prob.c_o - (target - end_savings) / T_R)
        breaks.append(T_C + T_R)
    return PiecewisePath.constant([float(b) for b in breaks], [float(v) for v in values])


def savings_path(prob: HouseholdProblem, S_f: float, gamma: float,
                 credit: float = 0.0) -> PiecewisePath:
    """Savings over crisis and recovery, with lump sums as upward jumps.

    The jump from a lump sum arriving at time tau appears at the boundary
    between the segments ending and starting at tau.
    """
    T_C = prob.crisis_months
    dissave = (prob.S_o - S_f) / T_C
    cuts = sorted({0.0, T_C, *(float(t) for t in prob.step_t if 0.0 < t < T_C)})
    starts, ends = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        offset = math.fsum(x for t, x in zip(prob.step_t, prob.step_x) if t <= a)
        starts.append(prob.S_o + offset - a * dissave)
        ends.append(prob.S_o + offset - b * dissave)
    end_savings, target = S_f + prob.stimulus, recovery_target(prob, credit)
    T_R = recovery_time(target, end_savings, prob.c_o, gamma)
    if T_C + T_R > T_C:
        starts.append(end_savings)
        ends.append(target)
        cuts.append(T_C + T_R)
    return PiecewisePath(tuple(cuts), tuple(starts), tuple(ends))
