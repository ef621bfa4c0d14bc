"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

from mmimo_alloc import kernels
from mmimo_alloc.channel import SystemParams
from mmimo_alloc.oracle import GridSpec, _term_table, budget_split_powers, default_grid
from mmimo_alloc.solver import DualState, SolverConfig, multiplier_unit


def cases():
    params = SystemParams()
    cfg = SolverConfig(max_iterations=2000)
    start = DualState.initial(params)
    s1, s2 = cfg.steps(params)
    dual_args = (start.lam, start.beta, params.n_f, params.subcarrier_bandwidth,
                 params.bandwidth_total, params.epsilon, params.p_ac, params.p_0, params.p_max,
                 params.p_pg, params.n_min, params.n_max, s1, s2, multiplier_unit(params), True,
                 cfg.step_floor, cfg.multiplier_floor, cfg.max_iterations, 0.0)  # never stop early

    grid = default_grid(params, 200)
    powers, antennas = grid.powers(), grid.antennas()
    chunk_args = (_term_table(params, 1e-13, powers, antennas), powers, antennas, params.n_f,
                  params.epsilon, params.p_ac, params.p_0, params.p_max, params.p_pg, 1e-9)

    small = SystemParams(n_f=2, n_min=10, n_max=40, p_pg=60.0, p_max=20.0)
    ants = list(range(10, 41))
    g2 = GridSpec(20, (0.01, 10.0), ants, budget_split_powers(small, ants))
    p2, a2 = g2.powers(), g2.antennas()
    full_args = (_term_table(small, 1e-13, p2, a2), p2, a2, small.n_f, small.epsilon,
                 small.p_ac, small.p_0, small.p_max, small.p_pg, 1e-9)
    return {
        "dual_iterations (2000 iters)": ("dual_iterations", dual_args),
        "chunk_search (200 x 491)": ("chunk_search", chunk_args),
        f"full_search (n_f = 2, {p2.size * a2.size} points)": ("full_search", full_args),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = sorted(kernels.BACKENDS)
    print(f"{'kernel':38s}" + "".join(f"{n:>14s}" for n in names) + f"{'speed-up':>10s}")
    for label, (fn, fargs) in cases().items():
        best = {}
        for name in names:
            f = getattr(kernels.get_backend(name), fn)
            number = 1 if fn == "full_search" and name == "python" else 3
            best[name] = min(timeit.repeat(lambda: f(*fargs), number=number,
                                           repeat=args.repeat)) / number
        ratio = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:38s}" + "".join(f"{best[n] * 1e3:12.3f}ms" for n in names) + f"{ratio:9.1f}x")


if __name__ == "__main__":
    main()
