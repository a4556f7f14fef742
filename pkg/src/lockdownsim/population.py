"""Household records, tract-file ingestion and synthetic populations.

Money is in dollars, flows are dollars per month. Capital stocks earn
``pi / 12`` per month, where ``pi`` is the annual productivity of capital.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import rng as _rng

log = logging.getLogger(__name__)

# BEA aggregated sectors, in the order of the published shock table
SECTORS = (
    "AGR", "MIN", "UTI", "CON", "MAN", "WHO", "RET", "TRA",
    "INF", "FIN", "PRO", "EDU", "ART", "OTH", "GOV",
)

# Low-to-high typical wage ordering, used to correlate sector with income
# when synthesizing workers.
SECTOR_WAGE_ORDER = (
    "ART", "RET", "OTH", "AGR", "EDU", "TRA", "CON", "MAN",
    "WHO", "GOV", "FIN", "PRO", "UTI", "INF", "MIN",
)


class SchemaError(ValueError):
    """Input file does not follow the documented column schema."""


class InvalidHouseholdError(ValueError):
    """A household violates a model invariant (e.g. non-positive consumption)."""


class SynthesisError(ValueError):
    """Synthesis targets are infeasible."""


@dataclass(frozen=True)
class Worker:
    sector: str
    labor_income: float
    documented: bool = True
    affected: bool = False

    def __post_init__(self):
        if self.sector not in SECTORS:
            raise ValueError(f"unknown sector {self.sector!r}")
        if not self.labor_income >= 0:
            raise ValueError(f"labor income must be >= 0, got {self.labor_income}")


@dataclass(frozen=True)
class Household:
    id: str
    tract_id: str
    size: int
    workers: tuple[Worker, ...] = ()
    k_oth: float = 0.0
    k_h: float = 0.0
    rent: float = 0.0
    mortgage: float = 0.0
    savings0: float = 0.0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"household {self.id}: size must be >= 1")
        for name in ("k_oth", "k_h", "rent", "mortgage", "savings0"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"household {self.id}: {name} must be >= 0, got {value}")
        if not isinstance(self.workers, tuple):
            object.__setattr__(self, "workers", tuple(self.workers))

    @property
    def labor_income(self) -> float:
        return math.fsum(w.labor_income for w in self.workers)


@dataclass(frozen=True)
class EconomyParams:
    """Economy-wide constants. ``rho`` is per month, ``pi`` per year."""

    pi: float = 0.05
    eta: float = 1.5
    rho: float = 0.06 / 12
    gamma: float = 0.10
    c_min: float = 1e-3
    # count stimulus checks towards rebuilding savings (shortens recovery)
    stimulus_credit: bool = False

    def __post_init__(self):
        if not self.eta > 1:
            raise ValueError("eta must be > 1")
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must be in (0, 1)")
        if not self.c_min > 0:
            raise ValueError("c_min must be > 0")
        if not self.pi > 0:
            raise ValueError("pi must be > 0")


def initial_income(h: Household, p: EconomyParams) -> float:
    """Monthly pre-crisis income: labor plus the return on both capital stocks."""
    return h.labor_income + p.pi / 12.0 * (h.k_oth + h.k_h)


def initial_consumption(h: Household, p: EconomyParams) -> float:
    """Pre-crisis consumption, income net of rent and mortgage.

    Raises InvalidHouseholdError when the result is not positive.
    """
    c = initial_income(h, p) - h.rent - h.mortgage
    if not c > 0:
        raise InvalidHouseholdError(
            f"household {h.id}: initial consumption {c:.2f} <= 0 "
            f"(income {initial_income(h, p):.2f}, rent {h.rent:.2f}, mortgage {h.mortgage:.2f})"
        )
    return c


@dataclass
class Population:
    households: tuple[Household, ...]
    diagnostics: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.households)

    def __iter__(self):
        return iter(self.households)

    def digest(self) -> str:
        """sha256 of the canonical household file contents."""
        buf = io.StringIO()
        _write_households(buf, self.households)
        return hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()


def split_valid(population: Iterable[Household], p: EconomyParams) -> tuple[list[Household], list[str]]:
    """Separate households with positive initial consumption from invalid ones."""
    valid, diagnostics = [], []
    for h in population:
        try:
            initial_consumption(h, p)
        except InvalidHouseholdError as exc:
            diagnostics.append(str(exc))
            continue
        valid.append(h)
    return valid, diagnostics


# ---------------------------------------------------------------------------
# Tract-level ingestion
# ---------------------------------------------------------------------------

#: Logical field -> default column name in the tract file.
TRACT_SCHEMA = {
    "tract_id": "tract_id",
    "households": "households",
    "population": "population",
    "labor_income": "labor_income",
    "investment_capital": "investment_capital",
    "housing_capital": "housing_capital",
    "savings": "savings",
    "rent": "rent",
    "mortgage": "mortgage",
    "undocumented_workers": "undocumented_workers",
    **{f"employed_{s}": f"employed_{s}" for s in SECTORS},
}
_OPTIONAL = {"undocumented_workers"}
_MONEY = ("labor_income", "investment_capital", "housing_capital", "savings", "rent", "mortgage")


def _split_even(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def ingest_population(path: str | Path, schema: Mapping[str, str] | None = None) -> Population:
    """Read a comma-delimited tract file and disaggregate it into households.

    Each row describes one tract with totals (dollars for stocks, dollars per
    month for flows), household and person counts, and worker counts per
    sector. Totals are split evenly across the tract's households and labor
    income evenly across its workers, so tract sums are preserved.

    Rows with negative money values or inconsistent counts are rejected and
    reported in ``Population.diagnostics``; a missing column raises
    SchemaError naming it.
    """
    columns = dict(TRACT_SCHEMA)
    if schema:
        unknown = set(schema) - set(columns)
        if unknown:
            raise SchemaError(f"unknown schema fields: {sorted(unknown)}")
        columns.update(schema)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if not header:
            raise SchemaError(f"{path}: empty file")
        missing = [columns[k] for k in columns if k not in _OPTIONAL and columns[k] not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")

    households: list[Household] = []
    diagnostics: list[str] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows, start=2):
        try:
            tract = row[columns["tract_id"]].strip()
            if not tract or tract in seen:
                raise ValueError(f"missing or duplicate tract id {tract!r}")
            n_hh = int(row[columns["households"]])
            n_pop = int(row[columns["population"]])
            money = {k: float(row[columns[k]]) for k in _MONEY}
            employed = {s: int(row[columns[f"employed_{s}"]]) for s in SECTORS}
            undoc_col = columns["undocumented_workers"]
            n_undoc = int(row[undoc_col]) if row.get(undoc_col) not in (None, "") else 0
        except (ValueError, TypeError) as exc:
            diagnostics.append(f"line {lineno}: rejected: {exc}")
            continue
        bad = [k for k, v in money.items() if not v >= 0]
        if bad:
            diagnostics.append(f"line {lineno} (tract {tract}): rejected: negative {', '.join(bad)}")
            continue
        if n_hh < 1 or n_pop < n_hh or min(employed.values()) < 0:
            diagnostics.append(f"line {lineno} (tract {tract}): rejected: inconsistent counts")
            continue
        n_workers = sum(employed.values())
        if not 0 <= n_undoc <= n_workers:
            diagnostics.append(f"line {lineno} (tract {tract}): rejected: undocumented count out of range")
            continue
        if n_workers == 0 and money["labor_income"] > 0:
            diagnostics.append(f"line {lineno} (tract {tract}): rejected: labor income without workers")
            continue
        seen.add(tract)

        sectors = [s for s in SECTORS for _ in range(employed[s])]
        wage = money["labor_income"] / n_workers if n_workers else 0.0
        sizes = _split_even(n_pop, n_hh)
        per_hh_workers = _split_even(n_workers, n_hh)
        k = 0
        for j in range(n_hh):
            ws = []
            for _ in range(per_hh_workers[j]):
                ws.append(Worker(sectors[k], wage, documented=k >= n_undoc))
                k += 1
            households.append(
                Household(
                    id=f"{tract}-{j:04d}",
                    tract_id=tract,
                    size=sizes[j],
                    workers=tuple(ws),
                    k_oth=money["investment_capital"] / n_hh,
                    k_h=money["housing_capital"] / n_hh,
                    rent=money["rent"] / n_hh,
                    mortgage=money["mortgage"] / n_hh,
                    savings0=money["savings"] / n_hh,
                )
            )
    for msg in diagnostics:
        log.warning(msg)
    if not households:
        raise SchemaError(f"{path}: every row was rejected")
    return Population(tuple(households), diagnostics)


def tract_totals(population: Iterable[Household]) -> dict[str, dict[str, float]]:
    """Aggregate households back to tract rows in the tract-file schema."""
    out: dict[str, dict[str, list]] = {}
    for h in population:
        row = out.setdefault(h.tract_id, {k: [] for k in ("households", "population", *_MONEY,
                                                           "undocumented_workers",
                                                           *(f"employed_{s}" for s in SECTORS))})
        row["households"].append(1)
        row["population"].append(h.size)
        row["labor_income"].append(h.labor_income)
        row["investment_capital"].append(h.k_oth)
        row["housing_capital"].append(h.k_h)
        row["savings"].append(h.savings0)
        row["rent"].append(h.rent)
        row["mortgage"].append(h.mortgage)
        row["undocumented_workers"].append(sum(not w.documented for w in h.workers))
        for s in SECTORS:
            row[f"employed_{s}"].append(sum(w.sector == s for w in h.workers))
    return {t: {k: math.fsum(v) for k, v in cols.items()} for t, cols in out.items()}


def write_tract_file(path: str | Path, population: Iterable[Household]) -> None:
    totals = tract_totals(population)
    fields = list(TRACT_SCHEMA.values())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for tract in sorted(totals):
            row = totals[tract]
            out = [tract]
            for key in fields[1:]:
                v = row[key]
                out.append(int(v) if key in ("households", "population", "undocumented_workers")
                           or key.startswith("employed_") else repr(v))
            writer.writerow(out)


# ---------------------------------------------------------------------------
# Canonical household file
# ---------------------------------------------------------------------------

HOUSEHOLD_COLUMNS = ("household_id", "tract_id", "size", "k_oth", "k_h", "rent", "mortgage",
                     "savings", "workers")


def _encode_workers(workers: Sequence[Worker]) -> str:
    return ";".join(f"{w.sector}:{w.labor_income!r}:{int(w.documented)}" for w in workers)


def _decode_workers(text: str) -> tuple[Worker, ...]:
    if not text:
        return ()
    out = []
    for item in text.split(";"):
        sector, income, doc = item.split(":")
        out.append(Worker(sector, float(income), documented=doc == "1"))
    return tuple(out)


def _write_households(fh, households: Iterable[Household]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HOUSEHOLD_COLUMNS)
    for h in households:
        writer.writerow([h.id, h.tract_id, h.size, repr(h.k_oth), repr(h.k_h), repr(h.rent),
                         repr(h.mortgage), repr(h.savings0), _encode_workers(h.workers)])


def write_households(path: str | Path, population: Iterable[Household]) -> None:
    """Write the canonical one-row-per-household file (exact float round-trip)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_households(fh, population)


def read_households(path: str | Path) -> Population:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in HOUSEHOLD_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        households, diagnostics = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                households.append(Household(
                    id=row["household_id"], tract_id=row["tract_id"], size=int(row["size"]),
                    workers=_decode_workers(row["workers"]), k_oth=float(row["k_oth"]),
                    k_h=float(row["k_h"]), rent=float(row["rent"]),
                    mortgage=float(row["mortgage"]), savings0=float(row["savings"]),
                ))
            except (ValueError, KeyError) as exc:
                diagnostics.append(f"line {lineno}: rejected: {exc}")
    if not households:
        raise SchemaError(f"{path}: no valid households")
    return Population(tuple(households), diagnostics)


def load_population_file(path: str | Path) -> Population:
    """Load either a canonical household file or a tract file, by header."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise SchemaError(f"{path}: empty file")
    if "household_id" in header:
        return read_households(path)
    return ingest_population(path)


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

DEFAULT_SECTOR_SHARES = {
    "AGR": 0.010, "MIN": 0.002, "UTI": 0.003, "CON": 0.060, "MAN": 0.090,
    "WHO": 0.030, "RET": 0.090, "TRA": 0.040, "INF": 0.050, "FIN": 0.060,
    "PRO": 0.190, "EDU": 0.170, "ART": 0.110, "OTH": 0.040, "GOV": 0.055,
}

DEFAULT_SIZE_DISTRIBUTION = {1: 0.25, 2: 0.31, 3: 0.17, 4: 0.15, 5: 0.07, 6: 0.05}


@dataclass(frozen=True)
class SynthesisTargets:
    """Targets and structural assumptions for a synthetic population.

    Consumption and savings medians are person-weighted, per capita. The
    per-capita consumption dispersion is set by ``gini`` when given, otherwise
    fitted so that ``initial_poverty_rate`` of persons fall below the poverty
    line.
    """

    median_consumption: float = 3989.0
    median_savings: float = 6092.0
    initial_poverty_rate: float = 0.171
    gini: float | None = None
    poverty_annual: float = 25844.0
    sector_shares: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SECTOR_SHARES))
    undocumented_share: float = 0.09
    size_distribution: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_SIZE_DISTRIBUTION))
    households_per_tract: int = 50
    tract_variance_share: float = 0.3
    savings_exponent: float = 0.638
    savings_scale: float | None = None
    savings_noise: float = 0.3
    no_worker_share: float = 0.05
    second_earner_prob: float = 0.9
    owner_share: float = 0.55
    owner_gradient: float = 0.3  # change in ownership odds per sd of log consumption
    mortgage_prob: float = 0.65
    rent_share: float = 0.30
    mortgage_share: float = 0.25
    home_value_years: float = 6.0
    investment_share: float = 0.08
    investment_gradient: float = 1.5  # log slope of the investment share
    sector_sorting_noise: float = 2.5
    pi: float = 0.05

    def validate(self) -> None:
        problems = []
        if not self.median_consumption > 0:
            problems.append("median_consumption must be > 0")
        if not self.median_savings > 0:
            problems.append("median_savings must be > 0")
        if self.gini is not None and not 0 < self.gini < 1:
            problems.append("gini must be in (0, 1)")
        if self.gini is None:
            if not 0 < self.initial_poverty_rate < 0.5:
                problems.append("initial_poverty_rate must be in (0, 0.5)")
            elif not self.poverty_annual / 12 < self.median_consumption:
                problems.append("poverty line must lie below the median consumption")
        shares = dict(self.sector_shares)
        if set(shares) != set(SECTORS):
            problems.append("sector_shares must cover exactly the 15 sectors")
        elif min(shares.values()) < 0 or not math.isclose(sum(shares.values()), 1.0, abs_tol=1e-9):
            problems.append("sector_shares must be >= 0 and sum to 1")
        if not 0 <= self.undocumented_share <= 1:
            problems.append("undocumented_share must be in [0, 1]")
        sizes = dict(self.size_distribution)
        if not sizes or min(sizes) < 1 or min(sizes.values()) < 0 or not math.isclose(
                sum(sizes.values()), 1.0, abs_tol=1e-9):
            problems.append("size_distribution must map sizes >= 1 to probabilities summing to 1")
        if self.households_per_tract < 1:
            problems.append("households_per_tract must be >= 1")
        if not 0 <= self.tract_variance_share < 1:
            problems.append("tract_variance_share must be in [0, 1)")
        for name in ("savings_exponent", "pi", "home_value_years"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0")
        if self.savings_scale is not None and not self.savings_scale > 0:
            problems.append("savings_scale must be > 0")
        for name in ("no_worker_share", "second_earner_prob", "owner_share", "mortgage_prob"):
            if not 0 <= getattr(self, name) <= 1:
                problems.append(f"{name} must be in [0, 1]")
        if not self.savings_noise >= 0 or not self.sector_sorting_noise >= 0:
            problems.append("noise parameters must be >= 0")
        if not (0 <= self.rent_share < 0.9 and 0 <= self.mortgage_share < 0.9):
            problems.append("housing payment shares must be in [0, 0.9)")
        if not 0 <= self.investment_share < 0.5:
            problems.append("investment_share must be in [0, 0.5)")
        if problems:
            raise SynthesisError("; ".join(problems))

    def consumption_sigma(self) -> float:
        if self.gini is not None:
            # lognormal Gini = 2 Phi(sigma / sqrt 2) - 1
            return math.sqrt(2.0) * NormalDist().inv_cdf((1.0 + self.gini) / 2.0)
        z = NormalDist().inv_cdf(self.initial_poverty_rate)
        return math.log(self.poverty_annual / 12 / self.median_consumption) / z


def weighted_median(values, weights) -> float:
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return float(np.quantile(values, 0.5, weights=weights, method="inverted_cdf"))


def _allocate(total: int, shares: Sequence[float]) -> np.ndarray:
    """Largest-remainder integer allocation of ``total`` by ``shares``."""
    raw = np.asarray(shares, dtype=float) * total
    counts = np.floor(raw).astype(int)
    rest = total - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[:rest]] += 1
    return counts


def synthesize_population(n_households: int, targets: SynthesisTargets | None = None,
                          seed: int = 0) -> Population:
    """Generate a synthetic population calibrated to published medians.

    Per-capita consumption is lognormal with a tract random effect; housing
    payments, capital stocks and labor income are derived so that each
    household's budget reproduces its consumption exactly. Sectors are
    assigned by matching workers sorted on noisy log income against
    sector counts ordered by typical wage, which hits the sector shares to
    within rounding. Per-capita savings follow ``a * c**b`` with lognormal
    noise, ``a`` chosen to hit the median savings target unless given.
    """
    targets = targets or SynthesisTargets()
    if n_households < 1:
        raise SynthesisError("n_households must be >= 1")
    targets.validate()
    g = _rng.stream(seed, _rng.SYNTHESIS)
    n = int(n_households)
    normal = g.standard_normal

    sizes_keys = sorted(targets.size_distribution)
    sizes_p = np.array([targets.size_distribution[k] for k in sizes_keys])
    size = np.array(sizes_keys)[g.choice(len(sizes_keys), size=n, p=sizes_p / sizes_p.sum())]

    n_tracts = max(1, round(n / targets.households_per_tract))
    tract_of = np.repeat(np.arange(n_tracts), _split_even(n, n_tracts))

    sigma = targets.consumption_sigma()
    sd_between = sigma * math.sqrt(targets.tract_variance_share)
    sd_within = sigma * math.sqrt(1.0 - targets.tract_variance_share)
    z = sd_between * normal(n_tracts)[tract_of] + sd_within * normal(n)
    # person-weighted quantiles are preserved by the monotone map exp(mu + k z):
    # pin the median and, without a Gini target, the poverty line quantile
    z_med = weighted_median(z, size)
    k = 1.0
    if targets.gini is None and n > 1:
        z_pov = float(np.quantile(z, targets.initial_poverty_rate, weights=size,
                                  method="inverted_cdf"))
        if z_pov < z_med:
            k = sigma * NormalDist().inv_cdf(targets.initial_poverty_rate) / (z_pov - z_med)
    z = k * (z - z_med)
    mu = math.log(targets.median_consumption)
    c_pc = np.exp(mu + z)
    c_hh = c_pc * size
    zs = z / sigma

    owner = g.random(n) < np.clip(targets.owner_share + targets.owner_gradient * zs, 0.05, 0.95)
    has_mortgage = owner & (g.random(n) < targets.mortgage_prob)
    rent_share = np.where(owner, 0.0, targets.rent_share * np.exp(0.2 * normal(n) - 0.1 * zs))
    mort_share = np.where(has_mortgage, targets.mortgage_share * np.exp(0.2 * normal(n)), 0.0)
    rent_share = np.clip(rent_share, 0.0, 0.6)
    mort_share = np.clip(mort_share, 0.0, 0.6)
    income = c_hh / (1.0 - rent_share - mort_share)

    monthly_return = targets.pi / 12.0
    home_value = np.where(owner, targets.home_value_years * 12.0 * income
                          * np.exp(0.25 * normal(n)), 0.0)
    housing_income = monthly_return * home_value
    # keep imputed rent below the household's total income
    housing_income = np.minimum(housing_income, 0.6 * income)
    home_value = housing_income / monthly_return

    no_workers = g.random(n) < targets.no_worker_share
    inv_share = np.clip(targets.investment_share
                        * np.exp(targets.investment_gradient * zs + 0.3 * normal(n)), 0.0, 0.35)
    invest_income = np.where(no_workers, income - housing_income, inv_share * income)
    labor = np.where(no_workers, 0.0, income - housing_income - invest_income)
    labor = np.maximum(labor, 0.0)
    k_oth = invest_income / monthly_return

    n_workers = np.where(no_workers, 0,
                         1 + ((size > 1) & (g.random(n) < targets.second_earner_prob)))
    split = g.uniform(0.5, 0.8, n)
    worker_hh = np.repeat(np.arange(n), n_workers)
    first = np.ones(len(worker_hh), dtype=bool)
    first[1:] = worker_hh[1:] != worker_hh[:-1]
    share = np.where(n_workers[worker_hh] == 1, 1.0, np.where(first, split[worker_hh],
                                                                1.0 - split[worker_hh]))
    w_income = labor[worker_hh] * share
    n_w = len(worker_hh)

    # sector assignment by noisy income rank
    sectors = np.empty(n_w, dtype=object)
    if n_w:
        key = np.log(np.maximum(w_income, 1.0)) + targets.sector_sorting_noise * normal(n_w)
        order = np.argsort(key, kind="stable")
        shares = [targets.sector_shares[s] for s in SECTOR_WAGE_ORDER]
        counts = _allocate(n_w, shares)
        sectors[order] = np.repeat(np.array(SECTOR_WAGE_ORDER, dtype=object), counts)
    documented = np.ones(n_w, dtype=bool)
    n_undoc = int(round(targets.undocumented_share * n_w))
    if n_undoc:
        documented[g.permutation(n_w)[:n_undoc]] = False

    noise = np.exp(targets.savings_noise * normal(n))
    base = c_pc ** targets.savings_exponent * noise
    if targets.savings_scale is None:
        scale = targets.median_savings / weighted_median(base, size)
    else:
        scale = targets.savings_scale
    s_hh = scale * base * size

    households = []
    wi = 0
    for i in range(n):
        ws = []
        for _ in range(n_workers[i]):
            ws.append(Worker(str(sectors[wi]), float(w_income[wi]), documented=bool(documented[wi])))
            wi += 1
        households.append(Household(
            id=f"H{i:07d}", tract_id=f"T{tract_of[i]:05d}", size=int(size[i]), workers=tuple(ws),
            k_oth=float(k_oth[i]), k_h=float(home_value[i]),
            rent=float(rent_share[i] * income[i]), mortgage=float(mort_share[i] * income[i]),
            savings0=float(s_hh[i]),
        ))
    return Population(tuple(households))


def with_workers(h: Household, workers: Sequence[Worker]) -> Household:
    return replace(h, workers=tuple(workers))
