"""Utility, calibration and the per-household final-savings optimization.

Utility is evaluated on per-capita consumption and savings. Consumption
utility is CRRA with elasticity ``eta``; savings utility has the same form
with scale ``alpha`` and exponent ``beta``, both calibrated from the
cross-sectional relation between savings and consumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .population import EconomyParams, weighted_median
from .trajectory import HouseholdProblem

#: Savings below this many dollars are valued as if they were this level.
SAVINGS_FLOOR = 1.0
DEFAULT_N_CHECK = 16


class CalibrationError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SavingsUtilityParams:
    a: float
    b: float
    alpha: float
    beta: float
    r2: float = float("nan")
    c_ref: float = float("nan")
    s_ref: float = float("nan")
    n_points: int = 0

    def __post_init__(self):
        if not self.b > 0:
            raise CalibrationError(f"savings exponent must be > 0, got {self.b}")
        if not self.alpha > 0:
            raise CalibrationError("alpha must be > 0")
        if self.beta == 1.0:
            raise CalibrationError("beta = 1 is not supported")

    def report(self) -> dict:
        return {"a": self.a, "b": self.b, "alpha": self.alpha, "beta": self.beta, "r2": self.r2,
                "median_consumption": self.c_ref, "median_savings": self.s_ref,
                "n_points": self.n_points}


@dataclass(frozen=True)
class WellbeingResult:
    S_f_star: float
    W: float
    W_o: float
    T_R: float
    n_eval: int = 0
    fallback: bool = False

    @property
    def delta_W(self) -> float:
        return self.W_o - self.W


def utility_consumption(c: float, eta: float) -> float:
    if not c > 0:
        raise ValueError(f"consumption must be > 0 (floor it first), got {c}")
    return c ** (1.0 - eta) / (1.0 - eta)


def utility_savings(S: float, params: SavingsUtilityParams, floor: float = SAVINGS_FLOOR) -> float:
    """Savings utility; savings below ``floor`` are valued at the floor."""
    S = max(S, floor)
    return params.alpha / (1.0 - params.beta) * S ** (1.0 - params.beta)


def savings_alpha(c_ref: float, s_ref: float, eta: float, beta: float, rho: float) -> float:
    """Scale making marginal savings utility equal ``rho`` times marginal consumption utility."""
    return rho * c_ref ** (-eta) / s_ref ** (-beta)


def fit_power_law(consumption, savings) -> tuple[float, float, float]:
    """Least-squares fit of log S = log a + b log c; returns (a, b, R^2)."""
    x = np.log(np.asarray(consumption, dtype=float))
    y = np.log(np.asarray(savings, dtype=float))
    if len(x) < 2 or np.ptp(x) == 0:
        raise CalibrationError("need at least two distinct consumption levels")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    b = float(np.sum((x - xm) * (y - ym)) / sxx)
    a = float(math.exp(ym - b * xm))
    resid = y - (ym + b * (x - xm))
    syy = np.sum((y - ym) ** 2)
    r2 = float(1.0 - np.sum(resid ** 2) / syy) if syy > 0 else 1.0
    return a, b, r2


def calibrate(consumption: Sequence[float], savings: Sequence[float], eta: float, rho: float,
              weights: Sequence[float] | None = None,
              groups: Sequence[str] | None = None) -> SavingsUtilityParams:
    """Calibrate savings utility from per-capita consumption and savings.

    The power law is fitted on logs. When ``groups`` is given (tract ids),
    the fit uses one point per group, the geometric mean of each variable,
    which is how tract-level census data enter the model. ``alpha`` is set
    at the (person-weighted) medians of the individual data.
    """
    c = np.asarray(consumption, dtype=float)
    s = np.asarray(savings, dtype=float)
    w = np.ones_like(c) if weights is None else np.asarray(weights, dtype=float)
    keep = (c > 0) & (s > 0)
    if keep.sum() < 2:
        raise CalibrationError("need at least two positive (consumption, savings) pairs")
    c, s, w = c[keep], s[keep], w[keep]
    if groups is not None:
        g = np.asarray(groups)[keep]
        labels, inverse = np.unique(g, return_inverse=True)
        if len(labels) >= 2:
            n = np.bincount(inverse).astype(float)
            fit_c = np.exp(np.bincount(inverse, np.log(c)) / n)
            fit_s = np.exp(np.bincount(inverse, np.log(s)) / n)
        else:
            fit_c, fit_s = c, s
    else:
        fit_c, fit_s = c, s
    a, b, r2 = fit_power_law(fit_c, fit_s)
    if not b > 0:
        raise CalibrationError(f"fitted savings exponent {b:.4g} is not positive")
    beta = eta / b
    c_ref = weighted_median(c, w)
    s_ref = weighted_median(s, w)
    alpha = savings_alpha(c_ref, s_ref, eta, beta, rho)
    return SavingsUtilityParams(a, b, alpha, beta, r2, c_ref, s_ref, len(fit_c))


def _kernel_args(prob: HouseholdProblem, econ: EconomyParams, params: SavingsUtilityParams):
    return (prob.c_o, prob.S_o, prob.crisis_months, prob.seg_t, prob.seg_loss, prob.step_t,
            prob.step_x, econ.gamma, econ.eta, econ.rho, params.alpha, params.beta, econ.c_min,
            SAVINGS_FLOOR, 1.0 if econ.stimulus_credit else 0.0)


def wellbeing(prob: HouseholdProblem, S_f: float, econ: EconomyParams,
              params: SavingsUtilityParams) -> tuple[float, float, float]:
    """(W, W_o, T_R) for final savings ``S_f``; ``prob`` must be per capita.

    W integrates discounted consumption and savings utility over the crisis
    and the recovery of length T_R(S_f); W_o is the no-crisis well-being
    over the same horizon.
    """
    W, W_o, T_R = kernels.wellbeing_terms(float(S_f), *_kernel_args(prob, econ, params))
    if not (math.isfinite(W) and math.isfinite(W_o)):
        raise NumericalError(f"household {prob.household_id}: non-finite well-being at S_f={S_f}")
    return W, W_o, T_R


def objective_grid(prob: HouseholdProblem, xs, econ: EconomyParams,
                   params: SavingsUtilityParams) -> np.ndarray:
    """W - W_o at each candidate final savings level (per capita)."""
    return kernels.objective_grid(np.asarray(xs, dtype=float), *_kernel_args(prob, econ, params))


def baseline_wellbeing(c_o: float, S_o: float, params: SavingsUtilityParams, eta: float,
                       rho: float, horizon: float) -> float:
    """Discounted well-being of the unperturbed path over ``horizon`` months."""
    u = c_o ** (1.0 - eta) / (1.0 - eta)
    v = utility_savings(S_o, params)
    return (1.0 - math.exp(-rho * horizon)) / rho * (u + v)


def default_tolerance(S_o: float) -> float:
    return max(0.01, 1e-6 * S_o)


def optimize_final_savings(prob: HouseholdProblem, econ: EconomyParams,
                           params: SavingsUtilityParams, n_check: int = DEFAULT_N_CHECK,
                           tol: float | None = None) -> WellbeingResult:
    """Choose end-of-crisis savings in [0, S_o] to maximize W - W_o.

    ``prob`` is in household dollars; utility is evaluated per capita and
    ``S_f_star`` is returned in household dollars. Comparing W with the
    baseline over the same horizon keeps candidates with different recovery
    times on a common footing. Tolerance is absolute, in household dollars.
    """
    pc = prob.per_capita()
    tol = default_tolerance(prob.S_o) if tol is None else tol
    S_f, W, W_o, T_R, n_eval, fallback = kernels.optimize(
        *_kernel_args(pc, econ, params), tol / prob.size, int(n_check))
    if not (math.isfinite(W) and math.isfinite(W_o)):
        raise NumericalError(f"household {prob.household_id}: well-being not evaluable")
    S_f_hh = prob.S_o if S_f >= pc.S_o else min(max(S_f * prob.size, 0.0), prob.S_o)
    return WellbeingResult(S_f_hh, W, W_o, T_R, n_eval, bool(fallback))
