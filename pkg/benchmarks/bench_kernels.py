"""Compiled vs pure-Python well-being kernel.

    python3 benchmarks/bench_kernels.py [--households 300] [--repeat 3]

Times the per-household optimizer and a dense objective grid on the same
shocked households with both backends, and reports the largest difference
in the optimum so the speedup is not bought with a different answer.
"""

import argparse
import time

import numpy as np

from lockdownsim import _kernels_py
from lockdownsim.policy import PolicyCase
from lockdownsim.population import EconomyParams, split_valid, synthesize_population
from lockdownsim.shock import assign_shock
from lockdownsim.simulate import Scenario, calibrate_population, household_inputs
from lockdownsim.wellbeing import _kernel_args, default_tolerance

try:
    from lockdownsim import _kernels as compiled
except ImportError:
    compiled = None


def problems(n, seed):
    econ = EconomyParams()
    pop = synthesize_population(n, seed=seed)
    params = calibrate_population(split_valid(pop.households, econ)[0], econ)
    sc = Scenario(policy=PolicyCase("C"), seed=seed)
    out = []
    for h in assign_shock(pop.households, sc.shock, seed):
        if any(w.affected for w in h.workers):
            prob = household_inputs(h, sc)[0].per_capita()
            out.append((prob, _kernel_args(prob, econ, params)))
    return out


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--households", type=int, default=300)
    ap.add_argument("--grid", type=int, default=1001, help="points per objective grid")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    probs = problems(args.households, args.seed)
    print(f"{len(probs)} affected households, grid {args.grid} points, best of {args.repeat}")
    backends = {"python": _kernels_py}
    if compiled is not None:
        backends["cython"] = compiled
    else:
        print("compiled extension not built; timing python only")

    results = {}
    for name, impl in backends.items():
        opt = lambda: [impl.optimize(*a, default_tolerance(p.S_o), 16)[0] for p, a in probs]
        grid = lambda: [impl.objective_grid(np.linspace(0, p.S_o, args.grid), *a) for p, a in probs]
        t_opt, xs = best_of(opt, args.repeat)
        t_grid, _ = best_of(grid, args.repeat)
        results[name] = (t_opt, t_grid, np.array(xs))
        print(f"{name:>7}: optimize {1e3 * t_opt / len(probs):8.3f} ms/household   "
              f"grid {1e3 * t_grid / len(probs):8.3f} ms/household")

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup: optimize x{py[0] / cy[0]:.1f}, grid x{py[1] / cy[1]:.1f}; "
              f"max |S_f difference| {np.max(np.abs(py[2] - cy[2])):.3g} dollars")


if __name__ == "__main__":
    main()
