"""Scenario configuration files.

A scenario is a YAML mapping. Every key is optional; anything left out
takes the documented default and is echoed back by ``resolved()`` so that
a run records every value it used. Durations accept a unit suffix
(``6 weeks``, ``1.5 months``, ``3mo``, ``6w``); bare numbers are months,
except for the benefit delay parameters, which are weeks. Rates accept
``/year`` or ``/month``; bare numbers are per year.

Precedence: built-in defaults, then the file, then command-line flags.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .policy import CASES, WEEKS_PER_MONTH, PolicyCase
from .population import SECTORS, EconomyParams, SynthesisTargets
from .shock import ShockTable

DEFAULT_SWEEP = (2.0, 3.0, 6.0, 9.0)
DEFAULT_EXCLUSION_BOUNDS = {"worst": 0.55, "median": 0.40, "best": 0.10}
DEFAULT_HOUSEHOLDS = 10_000


class ConfigError(ValueError):
    """The scenario file is malformed or fails validation."""


_DURATION = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([a-zA-Z]*)\s*$")
_WEEK_UNITS = {"w", "wk", "wks", "week", "weeks"}
_MONTH_UNITS = {"mo", "mos", "month", "months"}


def parse_duration(value: Any, default_unit: str = "months") -> float:
    """Duration in months from a number or a string with a unit suffix."""
    if isinstance(value, bool):
        raise ConfigError(f"invalid duration {value!r}")
    if isinstance(value, (int, float)):
        number, unit = float(value), ""
    elif isinstance(value, str):
        m = _DURATION.match(value)
        if not m:
            raise ConfigError(f"invalid duration {value!r}")
        number, unit = float(m.group(1)), m.group(2).lower()
    else:
        raise ConfigError(f"invalid duration {value!r}")
    unit = unit or default_unit
    if unit in _WEEK_UNITS:
        return number / WEEKS_PER_MONTH
    if unit in _MONTH_UNITS:
        return number
    raise ConfigError(f"unknown duration unit {unit!r} in {value!r}")


def parse_rate(value: Any) -> float:
    """Rate per month from a number (per year) or ``'<x>/year'``, ``'<x>/month'``."""
    if isinstance(value, bool):
        raise ConfigError(f"invalid rate {value!r}")
    if isinstance(value, (int, float)):
        return float(value) / 12.0
    if isinstance(value, str):
        m = re.match(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(?:/\s*(\w+))?\s*$", value)
        if m:
            number, unit = float(m.group(1)), (m.group(2) or "year").lower()
            if unit in ("year", "yr", "y", "annum"):
                return number / 12.0
            if unit in ("month", "mo", "m"):
                return number
    raise ConfigError(f"invalid rate {value!r}")


def _check_keys(section: str, data: Mapping, allowed) -> None:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{section}: expected a mapping")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(map(str, unknown))}")


@dataclass(frozen=True)
class PopulationSource:
    file: str | None = None
    households: int = DEFAULT_HOUSEHOLDS
    seed: int = 0
    targets: SynthesisTargets = field(default_factory=SynthesisTargets)

    @property
    def synthetic(self) -> bool:
        return self.file is None


@dataclass(frozen=True)
class ScenarioConfig:
    population: PopulationSource = field(default_factory=PopulationSource)
    policy: PolicyCase = field(default_factory=PolicyCase)
    economy: EconomyParams = field(default_factory=EconomyParams)
    shock: ShockTable = field(default_factory=ShockTable)
    crisis_months: float = 3.0
    sweep: tuple[float, ...] = DEFAULT_SWEEP
    exclusion_bounds: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_EXCLUSION_BOUNDS))
    seed: int = 0
    output: str = "runs/scenario"
    recovery_horizon: float = 24.0  # months after the crisis ends
    recovery_step: float = 0.25

    def __post_init__(self):
        problems = []
        if not self.crisis_months > 0:
            problems.append("crisis_duration must be > 0")
        if any(not t > 0 for t in self.sweep):
            problems.append("sweep values must be > 0")
        if len(set(self.sweep)) != len(self.sweep):
            problems.append("sweep values must be distinct")
        if set(self.exclusion_bounds) != set(DEFAULT_EXCLUSION_BOUNDS):
            problems.append("exclusion_bounds needs exactly worst, median and best")
        elif any(not 0 <= v <= 1 for v in self.exclusion_bounds.values()):
            problems.append("exclusion bounds must be in [0, 1]")
        if not (self.recovery_horizon > 0 and self.recovery_step > 0):
            problems.append("recovery curve horizon and step must be > 0")
        if problems:
            raise ConfigError("; ".join(problems))

    def with_overrides(self, case: str | None = None, crisis_months: float | None = None,
                       seed: int | None = None, output: str | None = None,
                       exclusion_rate: float | None = None) -> ScenarioConfig:
        cfg = self
        try:
            if case is not None or exclusion_rate is not None:
                cfg = replace(cfg, policy=replace(
                    cfg.policy, case=case if case is not None else cfg.policy.case,
                    exclusion_rate=(exclusion_rate if exclusion_rate is not None
                                    else cfg.policy.exclusion_rate)))
            if crisis_months is not None:
                cfg = replace(cfg, crisis_months=float(crisis_months))
            if seed is not None:
                cfg = replace(cfg, seed=int(seed))
            if output is not None:
                cfg = replace(cfg, output=str(output))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    def resolved(self) -> dict:
        """Every setting in canonical units (months, per-month rates, dollars)."""
        pop = self.population
        if pop.synthetic:
            t = asdict(pop.targets)
            t["size_distribution"] = {str(k): v for k, v in sorted(t["size_distribution"].items())}
            t["sector_shares"] = {s: t["sector_shares"][s] for s in SECTORS}
            population = {"source": "synthesize", "households": pop.households, "seed": pop.seed,
                          "targets": t}
        else:
            population = {"source": "file", "file": pop.file}
        policy = asdict(self.policy)
        policy["ui_max_duration_months"] = self.policy.ui_months
        policy.pop("ui_max_duration")
        policy["delay_mean_weeks"] = policy.pop("delay_mean")
        policy["delay_sd_weeks"] = policy.pop("delay_sd")
        policy["puc_expiry_months"] = policy.pop("puc_expiry")
        economy = asdict(self.economy)
        economy["pi_per_year"] = economy.pop("pi")
        economy["rho_per_month"] = economy.pop("rho")
        return {
            "population": population,
            "policy": policy,
            "economy": economy,
            "shock": {"affected_share": {s: self.shock.affected_share[s] for s in SECTORS},
                      "loss_fraction": self.shock.loss_fraction},
            "crisis_months": self.crisis_months,
            "sweep_months": list(self.sweep),
            "exclusion_bounds": dict(self.exclusion_bounds),
            "seed": self.seed,
            "recovery_horizon_months": self.recovery_horizon,
            "recovery_step_months": self.recovery_step,
        }


_TOP_KEYS = {"population", "scenario", "policy", "economy", "shock", "sweep", "exclusion_bounds",
             "seed", "output", "recovery_curve"}


def _population(data: Mapping, base: Path | None) -> PopulationSource:
    _check_keys("population", data, {"file", "synthesize"})
    if ("file" in data) == ("synthesize" in data):
        raise ConfigError("population: give exactly one of 'file' or 'synthesize'")
    if "file" in data:
        path = Path(str(data["file"]))
        if base is not None and not path.is_absolute():
            path = base / path
        return PopulationSource(file=str(path))
    syn = data["synthesize"] or {}
    _check_keys("population.synthesize", syn, {"households", "seed", "targets"})
    targets_raw = dict(syn.get("targets") or {})
    allowed = {f.name for f in fields(SynthesisTargets)}
    _check_keys("population.synthesize.targets", targets_raw, allowed)
    if "size_distribution" in targets_raw:
        targets_raw["size_distribution"] = {int(k): float(v)
                                            for k, v in targets_raw["size_distribution"].items()}
    try:
        targets = SynthesisTargets(**targets_raw)
        targets.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"population.synthesize.targets: {exc}") from exc
    households = syn.get("households", DEFAULT_HOUSEHOLDS)
    if not isinstance(households, int) or households < 1:
        raise ConfigError("population.synthesize.households must be a positive integer")
    return PopulationSource(None, households, int(syn.get("seed", 0)), targets)


def _policy(data: Mapping) -> tuple[PolicyCase, float | None]:
    _check_keys("scenario", data, {"case", "crisis_duration", "exclusion_rate", "puc_expiry",
                                   "ui_max_duration", "delay_mean", "delay_sd"})
    kw: dict[str, Any] = {}
    if "case" in data:
        case = str(data["case"]).upper()
        if case not in CASES:
            raise ConfigError(f"scenario.case must be one of {', '.join(CASES)}")
        kw["case"] = case
    if "exclusion_rate" in data:
        kw["exclusion_rate"] = float(data["exclusion_rate"])
    if "puc_expiry" in data:
        kw["puc_expiry"] = parse_duration(data["puc_expiry"])
    if data.get("ui_max_duration") is not None:
        kw["ui_max_duration"] = parse_duration(data["ui_max_duration"])
    for key in ("delay_mean", "delay_sd"):
        if key in data:
            kw[key] = parse_duration(data[key], default_unit="weeks") * WEEKS_PER_MONTH
    tc = parse_duration(data["crisis_duration"]) if "crisis_duration" in data else None
    try:
        return PolicyCase(**kw), tc
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def _economy(data: Mapping) -> EconomyParams:
    _check_keys("economy", data, {"pi", "eta", "rho", "gamma", "c_min", "stimulus_credit"})
    kw: dict[str, Any] = {}
    if "pi" in data:
        kw["pi"] = parse_rate(data["pi"]) * 12.0
    if "rho" in data:
        kw["rho"] = parse_rate(data["rho"])
    for key in ("eta", "gamma", "c_min"):
        if key in data:
            kw[key] = float(data[key])
    if "stimulus_credit" in data:
        kw["stimulus_credit"] = bool(data["stimulus_credit"])
    try:
        return EconomyParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"economy: {exc}") from exc


def _shock(data: Mapping) -> ShockTable:
    _check_keys("shock", data, {"affected_share", "loss_fraction"})
    base = ShockTable()
    shares = dict(base.affected_share)
    if "affected_share" in data:
        given = data["affected_share"]
        _check_keys("shock.affected_share", given, SECTORS)
        shares.update({k: float(v) for k, v in given.items()})
    try:
        return ShockTable(shares, float(data.get("loss_fraction", base.loss_fraction)))
    except ValueError as exc:
        raise ConfigError(f"shock: {exc}") from exc


def config_from_dict(data: Mapping | None, base_dir: str | Path | None = None) -> ScenarioConfig:
    data = data or {}
    _check_keys("config", data, _TOP_KEYS)
    base = Path(base_dir) if base_dir is not None else None
    kw: dict[str, Any] = {}
    try:
        if "population" in data:
            kw["population"] = _population(data["population"] or {}, base)
        scenario = dict(data.get("scenario") or {})
        if "policy" in data:
            scenario.update(data["policy"] or {})
        policy, tc = _policy(scenario)
        kw["policy"] = policy
        if tc is not None:
            kw["crisis_months"] = tc
        if "economy" in data:
            kw["economy"] = _economy(data["economy"] or {})
        if "shock" in data:
            kw["shock"] = _shock(data["shock"] or {})
        if "sweep" in data:
            if not isinstance(data["sweep"], (list, tuple)) or not data["sweep"]:
                raise ConfigError("sweep must be a non-empty list of durations")
            kw["sweep"] = tuple(parse_duration(v) for v in data["sweep"])
        if "exclusion_bounds" in data:
            bounds = data["exclusion_bounds"] or {}
            _check_keys("exclusion_bounds", bounds, DEFAULT_EXCLUSION_BOUNDS)
            kw["exclusion_bounds"] = {**DEFAULT_EXCLUSION_BOUNDS,
                                      **{k: float(v) for k, v in bounds.items()}}
        if "seed" in data:
            if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
                raise ConfigError("seed must be an integer")
            kw["seed"] = data["seed"]
        if "output" in data:
            kw["output"] = str(data["output"])
        if "recovery_curve" in data:
            rc = data["recovery_curve"] or {}
            _check_keys("recovery_curve", rc, {"horizon", "step"})
            if "horizon" in rc:
                kw["recovery_horizon"] = parse_duration(rc["horizon"])
            if "step" in rc:
                kw["recovery_step"] = parse_duration(rc["step"])
        return ScenarioConfig(**kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Read a scenario file; ``None`` gives the all-defaults scenario."""
    if path is None:
        return ScenarioConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if data is not None and not isinstance(data, Mapping):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(data, base_dir=path.parent)
