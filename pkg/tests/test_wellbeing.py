import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from lockdownsim import _kernels_py
from lockdownsim.policy import PolicyCase
from lockdownsim.shock import assign_shock
from lockdownsim.simulate import Scenario, household_inputs
from lockdownsim.wellbeing import (
    CalibrationError, SavingsUtilityParams, baseline_wellbeing, calibrate, default_tolerance,
    fit_power_law, objective_grid, optimize_final_savings, savings_alpha, utility_consumption,
    utility_savings, wellbeing,
)


def test_consumption_utility_examples():
    assert utility_consumption(1.0, 1.5) == 1 / (1 - 1.5)
    assert utility_consumption(4.0, 1.5) == -1.0
    assert utility_consumption(2.0, 1.5) > utility_consumption(1.0, 1.5)
    with pytest.raises(ValueError):
        utility_consumption(0.0, 1.5)


def test_savings_utility_floor_and_monotonicity(median_params):
    assert utility_savings(2000.0, median_params) > utility_savings(1000.0, median_params)
    assert utility_savings(0.0, median_params) == utility_savings(1.0, median_params)
    assert math.isfinite(utility_savings(0.0, median_params))


def test_beta_and_marginal_equality(econ):
    beta = econ.eta / 0.638
    assert beta == pytest.approx(2.3511, abs=1e-4)
    alpha = savings_alpha(3989.0, 6092.0, econ.eta, beta, econ.rho)
    v_prime = alpha * 6092.0 ** -beta
    u_prime = 3989.0 ** -econ.eta
    assert v_prime == pytest.approx(econ.rho * u_prime, rel=1e-12)


def test_noiseless_calibration_round_trip(econ):
    c = np.geomspace(800, 20000, 200)
    p = calibrate(c, 3.710 * c ** 0.638, econ.eta, econ.rho)
    assert p.a == pytest.approx(3.710, rel=5e-7)
    assert p.b == pytest.approx(0.638, rel=5e-7)
    assert p.r2 == pytest.approx(1.0, abs=1e-12)
    assert p.beta == econ.eta / p.b
    # scale coherence at the calibration point
    assert p.alpha * p.s_ref ** -p.beta == pytest.approx(econ.rho * p.c_ref ** -econ.eta, rel=1e-12)


def test_noisy_calibration(econ):
    g = np.random.default_rng(42)
    c = np.exp(g.normal(math.log(3989.0), 0.6, 10_000))
    s = 3.710 * c ** 0.638 * np.exp(g.normal(0, 0.3, c.size))
    p = calibrate(c, s, econ.eta, econ.rho)
    assert abs(p.b / 0.638 - 1) < 0.03
    assert abs(p.a / 3.710 - 1) < 0.10


def test_grouped_fit_uses_one_point_per_group(econ):
    c = np.repeat([1000.0, 2000.0, 4000.0], 4)
    s = 3.710 * c ** 0.638
    p = calibrate(c, s, econ.eta, econ.rho, groups=np.repeat(["a", "b", "c"], 4))
    assert p.n_points == 3
    assert p.b == pytest.approx(0.638, rel=1e-9)


def test_degenerate_calibration_rejected(econ):
    with pytest.raises(CalibrationError):
        calibrate([1000.0] * 5, [10.0, 20.0, 30.0, 40.0, 50.0], econ.eta, econ.rho)
    with pytest.raises(CalibrationError):
        calibrate([1000.0, 2000.0], [500.0, 100.0], econ.eta, econ.rho)
    with pytest.raises(CalibrationError):
        fit_power_law([1.0], [1.0])


def test_baseline_closed_form(median_params, econ):
    c_o, S_o, T = 3989.0, 6092.0, 14.0
    closed = baseline_wellbeing(c_o, S_o, median_params, econ.eta, econ.rho, T)
    flow = utility_consumption(c_o, econ.eta) + utility_savings(S_o, median_params)
    quad, _ = integrate.quad(lambda t: math.exp(-econ.rho * t) * flow, 0.0, T, epsabs=0, epsrel=1e-13)
    assert closed == pytest.approx(quad, rel=1e-10)
    # doubling the horizon scales by (1 - e^{-2 rho T}) / (1 - e^{-rho T})
    twice = baseline_wellbeing(c_o, S_o, median_params, econ.eta, econ.rho, 2 * T)
    x = math.exp(-econ.rho * T)
    assert twice / closed == pytest.approx((1 - x * x) / (1 - x), rel=1e-12)
    # large discounting approaches the flow over rho
    assert baseline_wellbeing(c_o, S_o, median_params, econ.eta, 50.0, T) == pytest.approx(flow / 50.0)


@pytest.fixture(scope="module")
def affected_problems(small_pop):
    out = []
    for case in "ABC":
        sc = Scenario(policy=PolicyCase(case), seed=9)
        for h in assign_shock(small_pop.households, sc.shock, 9):
            if any(w.affected for w in h.workers):
                out.append((case, household_inputs(h, sc)[0]))
    return out


def test_golden_section_matches_grid(affected_problems, econ, small_params):
    for _, prob in affected_problems[::6]:
        res = optimize_final_savings(prob, econ, small_params)
        pc = prob.per_capita()
        xs = np.linspace(0.0, pc.S_o, 10_001)
        f = objective_grid(pc, xs, econ, small_params)
        spacing = prob.S_o / 10_000
        assert abs(res.S_f_star - xs[np.argmax(f)] * prob.size) <= spacing + default_tolerance(prob.S_o)
        assert 0.0 <= res.S_f_star <= prob.S_o


def test_unaffected_household_keeps_savings(small_pop, econ, small_params):
    sc = Scenario(policy=PolicyCase("B"), seed=9)
    quiet = [h for h in assign_shock(small_pop.households, sc.shock, 9)
             if not any(w.affected for w in h.workers)][:20]
    for h in quiet:
        prob, _ = household_inputs(h, sc)
        res = optimize_final_savings(prob, econ, small_params)
        assert abs(res.S_f_star - prob.S_o) <= 0.01
        assert res.T_R == 0.0
        assert res.delta_W == pytest.approx(0.0, abs=1e-12)


def test_case_a_welfare_loss_is_nonnegative(affected_problems, econ, small_params):
    for case, prob in affected_problems:
        if case == "A":
            res = optimize_final_savings(prob, econ, small_params)
            assert res.W - res.W_o <= 1e-12


def test_objective_is_unimodal_on_random_pairs(affected_problems, econ, small_params):
    g = np.random.default_rng(5)
    for _ in range(300):
        _, prob = affected_problems[g.integers(len(affected_problems))]
        pc = prob.per_capita()
        x, y = np.sort(g.uniform(0, pc.S_o, 2))
        fx, fm, fy = objective_grid(pc, [x, 0.5 * (x + y), y], econ, small_params)
        assert fm >= min(fx, fy) - 1e-9 * abs(fm)


def test_optimizer_is_idempotent(affected_problems, econ, small_params):
    _, prob = affected_problems[3]
    a = optimize_final_savings(prob, econ, small_params)
    b = optimize_final_savings(prob, econ, small_params)
    assert a.S_f_star == b.S_f_star and a.W == b.W


def test_wellbeing_reports_horizon(affected_problems, econ, small_params):
    _, prob = affected_problems[0]
    pc = prob.per_capita()
    W, W_o, T_R = wellbeing(pc, 0.0, econ, small_params)
    assert T_R == pytest.approx(pc.S_o / (econ.gamma * pc.c_o))
    assert W_o == pytest.approx(baseline_wellbeing(pc.c_o, pc.S_o, small_params, econ.eta, econ.rho,
                                                   pc.crisis_months + T_R), rel=1e-12)


def test_grid_fallback_rescues_bimodal_objective(monkeypatch):
    # narrow peak near S_o that golden-section search on [0, 100] misses
    def fake_terms(S_f, *args):
        broad = -((S_f - 20.0) / 50.0) ** 2
        narrow = 5.0 - ((S_f - 90.0) / 2.0) ** 2
        return max(broad, narrow), 0.0, 0.0

    monkeypatch.setattr(_kernels_py, "_terms", fake_terms)
    args = (1000.0, 100.0, 3.0, [0.0, 3.0], [0.0], [], [], 0.1, 1.5, 0.005, 1.0, 2.0, 1e-3, 1.0, 0.0)
    x, _, _, _, _, fallback = _kernels_py.optimize(*args, 1e-6, 0)
    assert abs(x - 20.0) < 1e-3 and not fallback
    x, f, _, _, _, fallback = _kernels_py.optimize(*args, 1e-6, 16)
    assert fallback
    assert x == pytest.approx(90.0, abs=1e-3)


@given(st.floats(0.2, 3.0), st.floats(1.01, 4.0))
def test_params_validation(b, beta):
    SavingsUtilityParams(1.0, b, 1.0, beta)
    with pytest.raises(CalibrationError):
        SavingsUtilityParams(1.0, -b, 1.0, beta)
    with pytest.raises(CalibrationError):
        SavingsUtilityParams(1.0, b, 0.0, beta)
