"""Run scenarios end to end and write their output files.

All files are written deterministically: floats use ``repr`` (shortest
round-trip form), rows come in a fixed order, and nothing depends on the
wall clock, the output location or the number of worker processes.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from . import metrics as M
from .config import ScenarioConfig
from .population import (Population, load_population_file, split_valid, synthesize_population,
                         write_households)
from .simulate import Scenario, SimulationResult, calibrate_population, simulate
from .wellbeing import SavingsUtilityParams

log = logging.getLogger(__name__)

HOUSEHOLD_OUTPUT_COLUMNS = (
    "household_id", "tract_id", "size", "income0", "c_o", "S_o", "n_affected", "benefits",
    "stimulus", "S_f", "T_R", "W", "W_o", "c_end", "c_crisis", "S_target", "fallback",
)
QUINTILE_COLUMNS = ("quintile", "households", "persons", "income_pc_min", "income_pc_max",
                    "consumption_loss", "consumption_loss_pct", "savings_loss", "mean_recovery")
TRACT_COLUMNS = ("tract_id", "households", "persons", "consumption_change_pct", "mean_recovery")
SWEEP_COLUMNS = ("label", "crisis_months", "case", "exclusion_rate", "initial_rate",
                 "end_of_crisis_rate", "increase_pp", "deep_initial_rate",
                 "deep_end_of_crisis_rate", "deep_increase_pp", "recovery_mean", "recovery_q1",
                 "recovery_median", "recovery_q3")
COMPARE_METRICS = (
    ("poverty.initial_rate", "initial poverty rate"),
    ("poverty.end_of_crisis_rate", "end-of-crisis poverty rate"),
    ("poverty.increase_pp", "poverty increase (pp)"),
    ("poverty.headcount_increase", "poverty headcount increase"),
    ("poverty.deep_initial_rate", "initial deep poverty rate"),
    ("poverty.deep_end_of_crisis_rate", "end-of-crisis deep poverty rate"),
    ("poverty.deep_increase_pp", "deep poverty increase (pp)"),
    ("recovery.mean", "mean recovery (months)"),
    ("recovery.q1", "recovery Q1 (months)"),
    ("recovery.median", "recovery median (months)"),
    ("recovery.q3", "recovery Q3 (months)"),
)


class RunError(RuntimeError):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _clean(obj):
    """Replace NaN with None so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, allow_nan=False) + "\n", encoding="utf-8")


def write_csv(path: Path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def load_population(cfg: ScenarioConfig) -> Population:
    src = cfg.population
    if src.synthetic:
        return synthesize_population(src.households, src.targets, seed=src.seed)
    pop = load_population_file(src.file)
    for msg in pop.diagnostics:
        log.warning(msg)
    return pop


def scenario_of(cfg: ScenarioConfig) -> Scenario:
    return Scenario(crisis_months=cfg.crisis_months, policy=cfg.policy, economy=cfg.economy,
                    shock=cfg.shock, seed=cfg.seed)


@dataclass
class RunOutput:
    directory: Path
    summary: dict
    result: SimulationResult


def outcome_row(o: M.HouseholdOutcome) -> tuple:
    return (o.household_id, o.tract_id, o.size, o.income0, o.c_o, o.S_o, o.n_affected,
            o.benefits, o.stimulus, o.S_f, o.T_R, o.W, o.W_o, o.c_end, o.c_crisis, o.S_target,
            o.fallback)


def write_outputs(out: Path, cfg: ScenarioConfig, population: Population,
                  result: SimulationResult) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    outcomes = result.outcomes
    summary = M.summarize(outcomes)
    summary["case"] = cfg.policy.case
    summary["exclusion_rate"] = cfg.policy.exclusion_rate
    summary["crisis_months"] = cfg.crisis_months
    summary["population_sha256"] = population.digest()
    summary["invalid_households"] = result.n_invalid
    summary["failed_households"] = result.n_failed
    summary["config"] = cfg.resolved()
    write_json(out / "summary.json", summary)

    write_csv(out / "quintiles.csv", QUINTILE_COLUMNS,
              ([getattr(r, c) for c in QUINTILE_COLUMNS] for r in M.quintile_table(outcomes)))
    write_csv(out / "tracts.csv", TRACT_COLUMNS,
              ([getattr(r, c) for c in TRACT_COLUMNS] for r in M.tract_summary(outcomes)))
    curve = M.recovery_curve(outcomes, cfg.crisis_months + cfg.recovery_horizon, cfg.recovery_step)
    write_csv(out / "recovery_curve.csv", ("t_months", "savings_pct"), curve)
    write_csv(out / "households.csv", HOUSEHOLD_OUTPUT_COLUMNS, (outcome_row(o) for o in outcomes))
    write_households(out / "population.csv", population.households)
    write_json(out / "run_meta.json", {
        "code_version": __version__,
        "seed": cfg.seed,
        "population_sha256": summary["population_sha256"],
        "config": cfg.resolved(),
        "calibration": result.calibration.report(),
        "diagnostics": list(population.diagnostics) + list(result.diagnostics),
    })
    return summary


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path | None = None, workers: int = 1,
                 population: Population | None = None,
                 params: SavingsUtilityParams | None = None) -> RunOutput:
    """Population, shock, policy, optimization and metrics for one scenario."""
    out = Path(out_dir if out_dir is not None else cfg.output)
    population = population if population is not None else load_population(cfg)
    if not population.households:
        raise RunError("population is empty")
    result = simulate(population.households, scenario_of(cfg), params=params, workers=workers)
    summary = write_outputs(out, cfg, population, result)
    return RunOutput(out, summary, result)


def _tc_label(t: float) -> str:
    return f"tc_{t:g}"


def sweep_row(label: str, summary: dict) -> tuple:
    p, r = summary["poverty"], summary["recovery"]
    return (label, summary["crisis_months"], summary["case"], summary["exclusion_rate"],
            p["initial_rate"], p["end_of_crisis_rate"], p["increase_pp"], p["deep_initial_rate"],
            p["deep_end_of_crisis_rate"], p["deep_increase_pp"],
            *(math.nan if r[k] is None else r[k] for k in ("mean", "q1", "median", "q3")))


def run_sweep(cfg: ScenarioConfig, out_dir: str | Path | None = None, workers: int = 1,
              over: str = "crisis") -> list[RunOutput]:
    """One sub-run per crisis duration (or per exclusion bound), plus ``sweep.csv``.

    The population and the savings-utility calibration are shared by all
    sub-runs, so they differ only in the swept parameter.
    """
    out = Path(out_dir if out_dir is not None else cfg.output)
    population = load_population(cfg)
    params = calibrate_population(split_valid(population.households, cfg.economy)[0], cfg.economy)
    runs, rows = [], []
    if over == "crisis":
        items = [(_tc_label(t), cfg.with_overrides(crisis_months=t)) for t in cfg.sweep]
    elif over == "exclusion":
        items = [(name, cfg.with_overrides(case="C", exclusion_rate=cfg.exclusion_bounds[name]))
                 for name in ("worst", "median", "best")]
    else:
        raise ValueError(f"unknown sweep dimension {over!r}")
    for label, sub in items:
        run = run_scenario(sub, out / label, workers=workers, population=population, params=params)
        runs.append(run)
        rows.append(sweep_row(label, run.summary))
    write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    return runs


def _lookup(summary: dict, dotted: str):
    v = summary
    for part in dotted.split("."):
        v = v[part]
    return math.nan if v is None else v


def _run_label(summary: dict) -> str:
    label = f"{summary['case']}"
    if summary["case"] != "A":
        label += f"@{100 * summary['exclusion_rate']:g}%"
    return label + f" Tc={summary['crisis_months']:g}"


def compare_runs(run_dirs: Sequence[str | Path]) -> tuple[list[str], list[list]]:
    """Side-by-side table of headline metrics; deltas are against the first run.

    Runs must share a population (same sha256). When three or more case C
    runs differ only in exclusion rate, their low/high range is added as an
    envelope, labelled by the runs at the highest and lowest rates.
    """
    if len(run_dirs) < 2:
        raise RunError("compare needs at least two runs")
    summaries = []
    for d in run_dirs:
        path = Path(d) / "summary.json"
        try:
            summaries.append(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError) as exc:
            raise RunError(f"cannot read {path}: {exc}") from exc
    hashes = {s["population_sha256"] for s in summaries}
    if len(hashes) != 1:
        raise RunError("runs use different populations (population hash mismatch); refusing to compare")
    labels = [_run_label(s) for s in summaries]
    header = ["metric", *labels, *(f"delta {lab}" for lab in labels[1:])]
    c_runs = [s for s in summaries if s["case"] == "C"]
    envelope = (len(c_runs) >= 3 and len({s["exclusion_rate"] for s in c_runs}) >= 3
                and len({s["crisis_months"] for s in c_runs}) == 1)
    if envelope:
        worst = max(c_runs, key=lambda s: s["exclusion_rate"])
        best = min(c_runs, key=lambda s: s["exclusion_rate"])
        header += [f"C worst ({100 * worst['exclusion_rate']:g}%)",
                   f"C best ({100 * best['exclusion_rate']:g}%)"]
    rows = []
    for key, name in COMPARE_METRICS:
        vals = [_lookup(s, key) for s in summaries]
        row = [name, *vals, *(v - vals[0] for v in vals[1:])]
        if envelope:
            row += [_lookup(worst, key), _lookup(best, key)]
        rows.append(row)
    return header, rows


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(header)] + [[r[0], *(f"{v:.4f}" if isinstance(v, float) else str(v)
                                       for v in r[1:])] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))
             for row in cells]
    return "\n".join(lines)
