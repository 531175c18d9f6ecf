"""Compiled vs. pure-Python task kernel.

Times applicability and the three delete-relaxation heuristics on a fixed
sample of reachable states for each task, checks both backends agree, and
prints per-call times plus the speedup.

    python benchmarks/bench_kernels.py --tasks hanoi:6,hanoi:9,grid:12x12
"""
import argparse
import random
import sys
import timeit

from treeplan.bench import resolve_task
from treeplan.kernels import BACKENDS, kernel_for


def sample_states(task, n, seed):
    rng = random.Random(seed)
    states = [task.init]
    s = task.init
    while len(states) < n:
        succ = task.successors(s)
        if not succ:
            s = task.init
            continue
        s = rng.choice(succ)[1]
        states.append(s)
    return states


def best_time(fn, states, repeat):
    timer = timeit.Timer(lambda: [fn(s) for s in states])
    return min(timer.repeat(repeat=repeat, number=1)) / len(states)


def fmt(dt):
    if dt >= 1e-3:
        return f"{dt * 1e3:.2f} ms"
    return f"{dt * 1e6:.1f} us"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tasks", default="hanoi:5,hanoi:7,hanoi:9,grid:12x12,random:7:40:120")
    ap.add_argument("--states", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "cython" not in BACKENDS:
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
        return 1

    print(f"{'task':<22} {'op':<11} {'python':>10} {'cython':>10} {'speedup':>8}")
    for spec in args.tasks.split(","):
        task = resolve_task(spec)
        states = sample_states(task, args.states, args.seed)
        py, cy = kernel_for(task, "python"), kernel_for(task, "cython")
        for op in ("applicable", "hmax", "hadd", "hff"):
            f_py, f_cy = getattr(py, op), getattr(cy, op)
            if [f_py(s) for s in states] != [f_cy(s) for s in states]:
                print(f"{task.name}: backends disagree on {op}", file=sys.stderr)
                return 2
            t_py = best_time(f_py, states, args.repeat)
            t_cy = best_time(f_cy, states, args.repeat)
            print(f"{task.name:<22} {op:<11} {fmt(t_py):>10} {fmt(t_cy):>10} {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
