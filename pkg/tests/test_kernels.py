import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import integrate

from lockdownsim import _kernels_py, kernels
from lockdownsim.policy import PolicyCase
from lockdownsim.simulate import Scenario, household_inputs
from lockdownsim.shock import assign_shock
from lockdownsim.trajectory import consumption_path, savings_path
from lockdownsim.wellbeing import SAVINGS_FLOOR, _kernel_args

try:
    from lockdownsim import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


@pytest.fixture(scope="module")
def problems(small_pop, econ):
    out = []
    for case in "ABC":
        sc = Scenario(policy=PolicyCase(case), seed=2)
        for h in assign_shock(small_pop.households, sc.shock, 2):
            if any(w.affected for w in h.workers):
                out.append(household_inputs(h, sc)[0].per_capita())
    return out[::7]


def _oracle_W(prob, S_f, econ, params):
    """Adaptive quadrature over the explicit paths, segment by segment."""
    eta, rho = econ.eta, econ.rho
    cmin = econ.c_min

    def u(c):
        if c >= cmin:
            return c ** (1 - eta) / (1 - eta)
        return cmin ** (1 - eta) / (1 - eta) + cmin ** -eta * (c - cmin)

    def v(s):
        return params.alpha / (1 - params.beta) * max(s, SAVINGS_FLOOR) ** (1 - params.beta)

    cons = consumption_path(prob, S_f, econ.gamma)
    sav = savings_path(prob, S_f, econ.gamma)
    total = 0.0
    for a, b, c0, _ in cons.rows():
        total += u(c0) * (math.exp(-rho * a) - math.exp(-rho * b)) / rho
    for a, b, s0, s1 in sav.rows():
        if b <= a:
            continue
        f = lambda t: math.exp(-rho * t) * v(s0 + (s1 - s0) * (t - a) / (b - a))
        pts = None
        if min(s0, s1) < SAVINGS_FLOOR < max(s0, s1):
            pts = [a + (SAVINGS_FLOOR - s0) / (s1 - s0) * (b - a)]
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=500, points=pts)
        total += val
    return total


def test_wellbeing_matches_adaptive_oracle(problems, econ, small_params):
    g = np.random.default_rng(0)
    for prob in problems[:60]:
        for S_f in (0.0, g.uniform(0, prob.S_o), prob.S_o):
            W, _, _ = kernels.wellbeing_terms(S_f, *_kernel_args(prob, econ, small_params))
            ref = _oracle_W(prob, S_f, econ, small_params)
            assert W == pytest.approx(ref, rel=1e-8)


def test_no_crisis_equals_baseline(econ, small_params, problems):
    prob = problems[0]
    quiet = type(prob)(prob.household_id, 1, prob.c_o, prob.S_o, 3.0, np.array([0.0, 3.0]),
                       np.array([0.0]), np.array([]), np.array([]))
    W, W_o, T_R = kernels.wellbeing_terms(prob.S_o, *_kernel_args(quiet, econ, small_params))
    assert T_R == 0.0
    assert W == pytest.approx(W_o, rel=1e-9)


def test_floor_lowers_wellbeing(econ, small_params):
    # a household whose crisis consumption would be negative is worse off than the unshocked one
    args = dict(c_o=1000.0, S_o=10.0, T_C=3.0)
    shocked = kernels.wellbeing_terms(10.0, args["c_o"], args["S_o"], 3.0, [0.0, 3.0], [3500.0], [], [],
                                      econ.gamma, econ.eta, econ.rho, small_params.alpha,
                                      small_params.beta, econ.c_min, SAVINGS_FLOOR, 0.0)
    calm = kernels.wellbeing_terms(10.0, args["c_o"], args["S_o"], 3.0, [0.0, 3.0], [0.0], [], [],
                                   econ.gamma, econ.eta, econ.rho, small_params.alpha,
                                   small_params.beta, econ.c_min, SAVINGS_FLOOR, 0.0)
    assert shocked[0] < calm[0]


def test_savings_piece_against_quad():
    alpha, beta, rho = 2.0, 2.35, 0.005
    for a, b, Sa, Sb in [(0.0, 3.0, 6000.0, 10.0), (3.0, 40.0, 0.0, 6000.0), (0.0, 1.0, 0.5, 0.7),
                         (1.0, 2.0, 5.0, 5.0), (0.0, 2.0, 3.0, 0.0)]:
        got = _kernels_py._savings_piece(a, b, Sa, Sb, rho, alpha, beta, SAVINGS_FLOOR)
        f = lambda t: math.exp(-rho * t) * alpha / (1 - beta) * max(
            Sa + (Sb - Sa) * (t - a) / (b - a), SAVINGS_FLOOR) ** (1 - beta)
        pts = None
        if min(Sa, Sb) < SAVINGS_FLOOR < max(Sa, Sb):
            pts = [a + (SAVINGS_FLOOR - Sa) / (Sb - Sa) * (b - a)]
        ref, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=500, points=pts)
        assert got == pytest.approx(ref, rel=1e-10)


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
def test_compiled_and_python_agree(problems, econ, small_params):
    g = np.random.default_rng(1)
    for prob in problems[:80]:
        args = _kernel_args(prob, econ, small_params)
        xs = g.uniform(0, prob.S_o, 5)
        a = compiled.objective_grid(xs, *args)
        b = _kernels_py.objective_grid(xs, *args)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=0)
        tol = max(0.01, 1e-6 * prob.S_o)
        ra = compiled.optimize(*args, tol, 16)
        rb = _kernels_py.optimize(*args, tol, 16)
        assert ra[0] == pytest.approx(rb[0], rel=1e-9, abs=1e-9)
        assert ra[5] == rb[5]


def test_pure_python_switch():
    env = dict(os.environ, LOCKDOWNSIM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from lockdownsim import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_inconsistent_arrays_rejected(econ):
    impl = compiled or _kernels_py
    with pytest.raises((ValueError, IndexError)):
        impl.wellbeing_terms(1.0, 1000.0, 10.0, 3.0, [0.0, 1.0, 3.0], [1.0], [], [],
                             0.1, 1.5, 0.005, 1.0, 2.0, 1e-3, 1.0, 0.0)
