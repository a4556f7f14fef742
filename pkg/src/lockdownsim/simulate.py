"""Run the household model over a population for one scenario."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import rng as _rng
from .policy import (PolicyCase, benefit_schedule, sample_delay, sample_exclusion,
                     stimulus_payment, weeks_to_months)
from .metrics import HouseholdOutcome
from .population import (EconomyParams, Household, InvalidHouseholdError, initial_consumption,
                         initial_income)
from .shock import ShockTable, assign_shock
from .trajectory import build_problem, consumption_path, recovery_target
from .wellbeing import (DEFAULT_N_CHECK, NumericalError, SavingsUtilityParams, calibrate,
                        optimize_final_savings)

log = logging.getLogger(__name__)

#: A run aborts when more than this share of households fail numerically.
MAX_FAILURE_SHARE = 0.001


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Scenario:
    crisis_months: float = 3.0
    policy: PolicyCase = field(default_factory=PolicyCase)
    economy: EconomyParams = field(default_factory=EconomyParams)
    shock: ShockTable = field(default_factory=ShockTable)
    seed: int = 0
    n_check: int = DEFAULT_N_CHECK

    def __post_init__(self):
        if not self.crisis_months > 0:
            raise ValueError("crisis_months must be > 0")


@dataclass(frozen=True)
class WorkerDraws:
    excluded: bool
    ui_delay: float  # months
    stimulus_delay: float  # months


def worker_draws(seed: int, household_id: str, index: int, worker, policy: PolicyCase) -> WorkerDraws:
    excluded = sample_exclusion(_rng.stream(seed, _rng.EXCLUSION, household_id, index), worker,
                                policy.exclusion_rate)
    ui = sample_delay(_rng.stream(seed, _rng.UI_DELAY, household_id, index),
                      policy.delay_mean, policy.delay_sd)
    stim = sample_delay(_rng.stream(seed, _rng.STIMULUS_DELAY, household_id, index),
                        policy.delay_mean, policy.delay_sd)
    return WorkerDraws(excluded, weeks_to_months(ui), weeks_to_months(stim))


def household_inputs(h: Household, scenario: Scenario):
    """Benefit schedules, lump sums and problem for a shocked household."""
    policy, T_C = scenario.policy, scenario.crisis_months
    c_o = initial_consumption(h, scenario.economy)
    schedules, lumps = [], []
    if policy.case != "A":
        for j, w in enumerate(h.workers):
            d = worker_draws(scenario.seed, h.id, j, w, policy)
            schedules.append(benefit_schedule(w, policy, T_C, d.ui_delay, d.excluded))
            amount = stimulus_payment(w, policy, d.excluded)
            if amount > 0:
                lumps.append((d.stimulus_delay, amount))
    prob = build_problem(h, c_o, schedules, lumps, T_C, scenario.shock.loss_fraction)
    return prob, schedules


def simulate_household(h: Household, scenario: Scenario,
                       params: SavingsUtilityParams) -> HouseholdOutcome:
    econ = scenario.economy
    prob, schedules = household_inputs(h, scenario)
    res = optimize_final_savings(prob, econ, params, n_check=scenario.n_check)
    T_C = scenario.crisis_months
    credit = 1.0 if econ.stimulus_credit else 0.0
    cons = consumption_path(prob, res.S_f_star, econ.gamma, credit).floored(econ.c_min)
    lumps = tuple((float(t), float(x)) for t, x in zip(prob.step_t, prob.step_x))
    benefits = math.fsum([*(s.total() for s in schedules), *(x for _, x in lumps)])
    return HouseholdOutcome(
        household_id=h.id, tract_id=h.tract_id, size=h.size,
        income0=initial_income(h, econ), c_o=prob.c_o, S_o=prob.S_o,
        n_affected=sum(w.affected for w in h.workers), crisis_months=T_C, benefits=benefits,
        lumps=lumps, S_f=res.S_f_star, T_R=res.T_R, W=res.W, W_o=res.W_o,
        c_end=cons.left_limit(T_C), c_crisis=cons.time_mean(0.0, T_C),
        S_target=recovery_target(prob, credit), fallback=res.fallback,
    )


def _run_chunk(args):
    households, scenario, params = args
    out = []
    for h in households:
        try:
            out.append(simulate_household(h, scenario, params))
        except (NumericalError, InvalidHouseholdError, ArithmeticError) as exc:
            out.append(f"household {h.id}: {exc}")
    return out


def calibrate_population(households: Sequence[Household], econ: EconomyParams,
                         by_tract: bool = True) -> SavingsUtilityParams:
    """Calibrate savings utility on per-capita values, one point per tract."""
    c, s, w, g = [], [], [], []
    for h in households:
        c.append(initial_consumption(h, econ) / h.size)
        s.append(h.savings0 / h.size)
        w.append(h.size)
        g.append(h.tract_id)
    return calibrate(c, s, econ.eta, econ.rho, weights=w, groups=g if by_tract else None)


@dataclass
class SimulationResult:
    scenario: Scenario
    outcomes: list[HouseholdOutcome]
    calibration: SavingsUtilityParams
    diagnostics: list[str]
    n_invalid: int
    n_failed: int

    @property
    def n_fallback(self) -> int:
        return sum(o.fallback for o in self.outcomes)


def simulate(households: Sequence[Household], scenario: Scenario,
             params: SavingsUtilityParams | None = None, workers: int = 1,
             chunk_size: int = 500) -> SimulationResult:
    """Shock, benefits and optimization for every household, in input order.

    Households with non-positive initial consumption are dropped with a
    diagnostic. Per-household numerical failures are reported; the run
    raises SimulationError when they exceed 0.1% of households.
    """
    econ = scenario.economy
    valid, diagnostics = [], []
    for h in households:
        try:
            initial_consumption(h, econ)
        except InvalidHouseholdError as exc:
            diagnostics.append(str(exc))
            continue
        valid.append(h)
    n_invalid = len(diagnostics)
    if not valid:
        raise SimulationError("no valid households to simulate")
    if params is None:
        params = calibrate_population(valid, econ)
    shocked = assign_shock(valid, scenario.shock, scenario.seed)

    chunks = [(shocked[i:i + chunk_size], scenario, params)
              for i in range(0, len(shocked), chunk_size)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]

    outcomes, n_failed = [], 0
    for part in parts:
        for item in part:
            if isinstance(item, str):
                diagnostics.append(item)
                n_failed += 1
            else:
                outcomes.append(item)
    for msg in diagnostics:
        log.warning(msg)
    if n_failed > MAX_FAILURE_SHARE * len(valid):
        raise SimulationError(f"{n_failed} of {len(valid)} households failed numerically")
    return SimulationResult(scenario, outcomes, params, diagnostics, n_invalid, n_failed)
