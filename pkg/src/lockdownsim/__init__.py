"""Household micro-simulation of lockdown income shocks and social protection."""

__version__ = "0.1.0"

from .config import ConfigError, ScenarioConfig, load_config  # noqa: E402
from .metrics import (HouseholdOutcome, PovertyThresholds, poverty_rates,  # noqa: E402
                      quintile_table, recovery_curve, recovery_stats, tract_summary)
from .policy import PolicyCase, benefit_schedule, stimulus_check, ui_weekly_benefit  # noqa: E402
from .population import (EconomyParams, Household, Population, SynthesisTargets,  # noqa: E402
                         Worker, ingest_population, synthesize_population)
from .scenario import compare_runs, run_scenario, run_sweep  # noqa: E402
from .shock import ShockTable, assign_shock  # noqa: E402
from .simulate import Scenario, simulate  # noqa: E402
from .trajectory import consumption_path, recovery_time, savings_path  # noqa: E402
from .wellbeing import (SavingsUtilityParams, baseline_wellbeing, calibrate,  # noqa: E402
                        optimize_final_savings)

__all__ = [
    "ConfigError", "EconomyParams", "Household", "HouseholdOutcome", "PolicyCase", "Population",
    "PovertyThresholds", "SavingsUtilityParams", "Scenario", "ScenarioConfig", "ShockTable",
    "SynthesisTargets", "Worker", "assign_shock", "baseline_wellbeing", "benefit_schedule",
    "calibrate", "compare_runs", "consumption_path", "ingest_population", "load_config",
    "optimize_final_savings", "poverty_rates", "quintile_table", "recovery_curve",
    "recovery_stats", "recovery_time", "run_scenario", "run_sweep", "savings_path", "simulate",
    "stimulus_check", "synthesize_population", "tract_summary", "ui_weekly_benefit",
]
