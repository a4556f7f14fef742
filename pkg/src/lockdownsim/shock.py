"""Sector income shock: who loses their labor income during the lockdown."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from . import rng as _rng
from .population import DEFAULT_SECTOR_SHARES, SECTORS, Household, Worker

# Share of workers in each sector who lose their job for the whole crisis.
DEFAULT_AFFECTED_SHARE = {
    "AGR": 0.0, "MIN": 0.0, "UTI": 0.0, "CON": 0.5, "MAN": 0.1,
    "WHO": 0.1, "RET": 0.5, "TRA": 0.5, "INF": 0.1, "FIN": 0.1,
    "PRO": 0.1, "EDU": 0.1, "ART": 0.8, "OTH": 0.8, "GOV": 0.0,
}


@dataclass(frozen=True)
class ShockTable:
    affected_share: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_AFFECTED_SHARE))
    loss_fraction: float = 1.0

    def __post_init__(self):
        if set(self.affected_share) != set(SECTORS):
            raise ValueError("affected_share must cover exactly the 15 sectors")
        if any(not 0 <= v <= 1 for v in self.affected_share.values()):
            raise ValueError("affected shares must be in [0, 1]")
        if not 0 <= self.loss_fraction <= 1:
            raise ValueError("loss_fraction must be in [0, 1]")


def expected_affected_share(table: ShockTable, sector_weights: Mapping[str, float] | None = None) -> float:
    """Employment-weighted expected share of affected workers."""
    weights = sector_weights or DEFAULT_SECTOR_SHARES
    total = math.fsum(weights.values())
    return math.fsum(weights[s] * table.affected_share[s] for s in SECTORS) / total


def draw_affected(seed: int, household_id: str, index: int, worker: Worker, table: ShockTable) -> bool:
    share = table.affected_share[worker.sector]
    if share <= 0.0:
        return False
    return bool(_rng.stream(seed, _rng.SHOCK, household_id, index).random() < share)


def assign_shock(population: Iterable[Household], table: ShockTable, seed: int) -> list[Household]:
    """Return a copy of the population with each worker's ``affected`` flag drawn.

    The draw for worker ``j`` of household ``h`` uses a stream keyed by
    ``(seed, h.id, j)`` only, so the result does not depend on iteration order.
    """
    out = []
    for h in population:
        workers = tuple(
            replace(w, affected=draw_affected(seed, h.id, j, w, table)) for j, w in enumerate(h.workers)
        )
        out.append(replace(h, workers=workers))
    return out


def labor_income_loss(w: Worker, t: float, crisis_months: float, loss_fraction: float = 1.0) -> float:
    """Monthly labor income lost at time ``t``; income is restored from ``crisis_months`` on."""
    if w.affected and 0.0 <= t < crisis_months:
        return loss_fraction * w.labor_income
    return 0.0
