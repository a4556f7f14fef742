import math

import pytest
from hypothesis import given, strategies as st

from lockdownsim.metrics import (
    EMPTY_RECOVERY, EmptyPopulationError, HouseholdOutcome, PovertyThresholds, poverty_rates,
    quintile_table, recovery_curve, recovery_stats, summarize, tract_summary, weighted_quantile,
)


def outcome(hid="H", size=1, c_o=3000.0, c_end=None, S_o=6000.0, S_f=None, T_R=0.0, affected=1,
            tract="T1", income=None, lumps=()):
    c_end = c_o if c_end is None else c_end
    S_f = S_o if S_f is None else S_f
    stim = math.fsum(x for _, x in lumps)
    return HouseholdOutcome(hid, tract, size, income or c_o, c_o, S_o, affected, 3.0, stim, tuple(lumps),
                            S_f, T_R, -1.0, -1.0, c_end, c_end, S_o + stim)


def test_thresholds():
    th = PovertyThresholds()
    assert th.poverty_monthly == pytest.approx(2153.6667, abs=1e-4)
    assert th.deep_annual == th.poverty_annual / 2
    with pytest.raises(ValueError):
        PovertyThresholds(poverty_annual=0)


def test_poverty_examples():
    rich = [outcome(f"H{i}", c_o=3000.0) for i in range(4)]
    assert poverty_rates(rich).poverty_rate == 0.0
    poor = [outcome("P", c_o=3000.0, c_end=2100.0)]
    end = poverty_rates(poor, phase="end_of_crisis")
    assert end.poverty_rate == 1.0 and end.deep_poverty_rate == 0.0
    assert poverty_rates(poor, phase="initial").poverty_rate == 0.0
    with pytest.raises(EmptyPopulationError):
        poverty_rates([])
    with pytest.raises(ValueError):
        poverty_rates(poor, phase="later")


@given(st.lists(st.tuples(st.integers(1, 6), st.floats(100, 9000)), min_size=1, max_size=30))
def test_person_weighting_is_split_invariant(rows):
    whole = [outcome(f"H{i}", size=2 * n, c_o=2 * n * c) for i, (n, c) in enumerate(rows)]
    halves = [outcome(f"H{i}{k}", size=n, c_o=n * c) for i, (n, c) in enumerate(rows) for k in "ab"]
    a, b = poverty_rates(whole, phase="initial"), poverty_rates(halves, phase="initial")
    assert a.poverty_rate == pytest.approx(b.poverty_rate, abs=1e-12)
    assert 0.0 <= a.poverty_rate <= 1.0
    assert a.deep_poverty_rate <= a.poverty_rate


def test_headcount_matches_rate_delta():
    outs = [outcome(f"H{i}", size=i % 4 + 1, c_o=2500.0 * (i % 4 + 1), c_end=1800.0 * (i % 4 + 1))
            for i in range(10)] + [outcome("R", size=3, c_o=9000.0)]
    s = summarize(outs)["poverty"]
    persons = sum(o.size for o in outs)
    assert s["headcount_increase"] == pytest.approx(s["increase_pp"] / 100 * persons, abs=1e-9)


def test_recovery_stats():
    same = [outcome(f"H{i}", T_R=10.0, size=i + 1) for i in range(5)]
    r = recovery_stats(same)
    assert (r.mean, r.q1, r.median, r.q3) == (10.0, 10.0, 10.0, 10.0)
    assert sum(c for _, _, c in r.histogram) == r.persons
    assert recovery_stats([outcome(affected=0)]) is EMPTY_RECOVERY
    assert EMPTY_RECOVERY.empty and math.isnan(EMPTY_RECOVERY.mean)
    assert recovery_stats([outcome(affected=0, T_R=2.0)], affected_only=False).mean == 2.0


def test_weighted_quantile_weights_persons():
    assert weighted_quantile([1.0, 5.0], [1.0, 3.0], 0.5) == 5.0
    assert weighted_quantile([1.0, 5.0], [3.0, 1.0], 0.5) == 1.0


def test_recovery_curve():
    flat = [outcome(f"H{i}") for i in range(3)]
    curve = recovery_curve(flat, horizon=12.0, step=0.5)
    assert curve[0] == (0.0, 100.0)
    assert all(v == 100.0 for _, v in curve)
    dip = [outcome("H", S_o=6000.0, S_f=3000.0, T_R=10.0)]
    pts = dict(recovery_curve(dip, horizon=20.0, step=0.5))
    assert pts[1.5] == pytest.approx(75.0)
    assert pts[3.0] == pytest.approx(50.0)
    assert pts[8.0] == pytest.approx(75.0)
    assert pts[13.0] == pytest.approx(100.0)
    with pytest.raises(ValueError):
        recovery_curve(dip, horizon=2.0)


def test_recovery_curve_with_stimulus_step():
    o = outcome("H", S_o=6000.0, S_f=3000.0, T_R=10.0, lumps=((1.5, 1200.0),))
    pts = dict(recovery_curve([o], horizon=20.0, step=0.5))
    assert pts[1.0] == pytest.approx(100.0 * (6000.0 - 1000.0) / 6000.0)
    assert pts[2.0] == pytest.approx(100.0 * (6000.0 - 2000.0 + 1200.0) / 6000.0)
    assert pts[20.0] == pytest.approx(120.0)


def test_quintiles():
    uniform = [outcome(f"H{i:02d}", c_end=2700.0) for i in range(20)]
    rows = quintile_table(uniform)
    assert [r.households for r in rows] == [4] * 5
    assert len({round(r.consumption_loss_pct, 12) for r in rows}) == 1
    assert rows[0].consumption_loss_pct == pytest.approx(10.0)
    with pytest.raises(ValueError):
        quintile_table(uniform[:4])


def test_quintiles_order_by_per_capita_income():
    outs = [outcome(f"H{i}", size=2, income=1000.0 * (i + 1), c_o=1000.0 * (i + 1)) for i in range(10)]
    rows = quintile_table(outs)
    assert [r.income_pc_min for r in rows] == sorted(r.income_pc_min for r in rows)
    assert all(a.income_pc_max <= b.income_pc_min for a, b in zip(rows, rows[1:]))


def test_tract_summary():
    outs = [outcome("A", size=2, c_o=4000.0, c_end=3000.0, T_R=4.0),
            outcome("B", size=1, c_o=2000.0, c_end=2200.0, T_R=1.0)]
    (row,) = tract_summary(outs)
    assert row.persons == 3.0
    assert row.consumption_change_pct == pytest.approx((2 * -25.0 + 10.0) / 3)
    assert row.mean_recovery == pytest.approx(3.0)
    with pytest.raises(ValueError):
        tract_summary([outcome(tract="")])
