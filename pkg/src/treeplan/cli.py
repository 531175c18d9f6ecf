"""``plan`` command line: run, suite, probe, score.

Exit codes: 0 completed, 1 usage error, 2 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import bench
from .heuristics import HEURISTICS
from .probe import PROBE_CONFIGS, probe_csv, probe_theorems
from .search import BANDITS, SEARCHES, SearchConfig, run_search
from .task import TaskFormatError, validate_plan


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_search_flags(p):
    p.add_argument("--search", choices=SEARCHES, default="guctn2")
    p.add_argument("--heuristic", choices=sorted(HEURISTICS), default="hff")
    p.add_argument("--bandit", choices=BANDITS, default=None,
                   help="tree policy; defaults to ucb1 for guct and normal2 otherwise")
    p.add_argument("--ucb1-c", type=float, default=1.0)
    p.add_argument("--queue", choices=("bucket", "heap"), default="bucket")
    p.add_argument("--budget", default="depth", help="depth | fixed:N")
    p.add_argument("--collapse", default="off", help="off | theta:N | dtc")
    p.add_argument("--eval", choices=("eager", "lazy"), default="eager")
    p.add_argument("--reopen", action="store_true")
    p.add_argument("--graft", action="store_true")
    p.add_argument("--novelty", choices=("off", "w2"), default="off")
    p.add_argument("--novelty-partition", default="hff", help="hff | hff,goalcount")
    p.add_argument("--config", choices=("nebula-lite",), default=None)
    p.add_argument("--boost", type=int, default=10)
    p.add_argument("--alternate", default=None,
                   help="comma-separated open lists KIND:HEURISTIC, KIND in h,w,pr,tree,n2")
    p.add_argument("--max-nodes", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(
            search=args.search, heuristic=args.heuristic, bandit=args.bandit, ucb1_c=args.ucb1_c,
            queue=args.queue, budget=args.budget, collapse=args.collapse, eval=args.eval,
            reopen=args.reopen, graft=args.graft, novelty=args.novelty,
            novelty_partition=args.novelty_partition, config=args.config, boost=args.boost,
            alternate=args.alternate, max_nodes=args.max_nodes, time_limit=args.time_limit,
            seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="solve one task")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("task", nargs="?", help="task file")
    src.add_argument("--gen", help="generator spec: hanoi:K | grid:WxH[:SEED] | random:SEED:FACTS:OPS")
    _add_search_flags(run)
    run.add_argument("--out", help="append the run record to this CSV file")
    run.add_argument("--plan", action="store_true", help="print the plan's operator names")

    suite = sub.add_parser("suite", help="run the built-in suite")
    suite.add_argument("--instances", default=None, help="comma-separated generator specs or files")
    suite.add_argument("--configs", default=",".join(bench.SUITE_CONFIGS),
                       help=f"comma-separated subset of {','.join(bench.SUITE_CONFIGS)}")
    suite.add_argument("--seeds", type=int, default=5)
    suite.add_argument("--time-limit", type=float, default=60.0)
    suite.add_argument("--jobs", type=int, default=1)
    suite.add_argument("--out", default="results.csv")

    probe = sub.add_parser("probe", help="selection-cost scaling on balanced trees")
    probe.add_argument("--branching", type=int, default=3)
    probe.add_argument("--depths", default="6,8,10,12")
    probe.add_argument("--configs", default=",".join(PROBE_CONFIGS))
    probe.add_argument("--expansions", type=int, default=150)
    probe.add_argument("--seeds", type=int, default=3)
    probe.add_argument("--with-oracles", action="store_true",
                       help="also cross-check the engines against the reference oracles")
    probe.add_argument("--out", default=None)

    score = sub.add_parser("score", help="coverage and agile score from a results CSV")
    score.add_argument("csv")
    score.add_argument("--limit", type=float, default=bench.DEFAULT_LIMIT)
    return parser


def _cmd_run(args) -> int:
    cfg = _config(args)
    source = args.gen if args.gen else args.task
    try:
        task = bench.resolve_task(source)
    except (ValueError, FileNotFoundError, TaskFormatError) as e:
        raise UsageError(str(e)) from None
    result = run_search(task, cfg)
    m = result.metrics
    summary = {
        "instance": task.name, "config": cfg.label(), "outcome": result.status,
        "reason": result.reason, "plan_length": len(result.plan) if result.plan is not None else None,
        "valid": validate_plan(task, result.plan) if result.plan is not None else None,
        "expansions": m.expansions, "evaluations": m.evaluations,
        "wall_time": round(m.wall_time, 6), "evals_per_sec": round(m.evals_per_sec, 1),
        "mean_eval_depth": round(m.mean_eval_depth, 3), "descent_edges": m.descent_edges,
        "peak_tree_size": m.peak_tree_size, "collapses": m.collapses,
    }
    print(json.dumps(summary))
    if args.plan and result.plan is not None:
        for op in result.plan:
            print(task.operators[op].name)
    if args.out:
        rec = bench.RunRecord(task.name, cfg.label(), cfg.seed, result.status, m.wall_time,
                              m.expansions, m.evaluations, m.evals_per_sec, m.mean_eval_depth,
                              m.descent_edges, m.scan_steps,
                              len(result.plan) if result.plan is not None else -1)
        _append_csv(args.out, [rec])
    return 0


def _append_csv(path, records):
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    with open(path, "a", newline="") as fh:
        if exists:
            w = csv.writer(fh, lineterminator="\n")
            for r in records:
                w.writerow([bench._fmt(getattr(r, c)) for c in bench.COLUMNS])
        else:
            bench.write_csv(records, fh)


def _cmd_suite(args) -> int:
    names = [c for c in args.configs.split(",") if c]
    unknown = [c for c in names if c not in bench.SUITE_CONFIGS]
    if unknown:
        raise UsageError(f"unknown suite configs {unknown}")
    if args.seeds < 1 or args.jobs < 1 or args.time_limit <= 0:
        raise UsageError("seeds, jobs and time limit must be positive")
    instances = args.instances.split(",") if args.instances else bench.BUILTIN_SUITE
    for inst in instances:
        try:
            bench.resolve_task(inst)
        except (ValueError, FileNotFoundError, TaskFormatError) as e:
            raise UsageError(str(e)) from None
    records = bench.run_suite(instances, {c: bench.SUITE_CONFIGS[c] for c in names},
                              seeds=args.seeds, time_limit=args.time_limit, jobs=args.jobs)
    with open(args.out, "w", newline="") as fh:
        bench.write_csv(records, fh)
    for config, s in bench.score_by_config(records, args.time_limit).items():
        print(f"{config}: coverage={s.coverage:.2f}/{s.instances} agile={s.agile:.3f}")
    return 0


def _cmd_probe(args) -> int:
    try:
        depths = [int(d) for d in args.depths.split(",")]
    except ValueError:
        raise UsageError(f"bad depth list {args.depths!r}") from None
    configs = [c for c in args.configs.split(",") if c]
    if any(c not in PROBE_CONFIGS for c in configs):
        raise UsageError(f"probe configs must be among {sorted(PROBE_CONFIGS)}")
    if args.branching < 2 or any(d < 1 for d in depths):
        raise UsageError("branching must be >= 2 and depths positive")
    records = probe_theorems(args.branching, depths, configs, args.expansions, args.seeds)
    text = probe_csv(records)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if args.with_oracles:
        ok = _oracle_crosscheck()
        print(f"oracle cross-check: {'ok' if ok else 'MISMATCH'}")
        if not ok:
            return 2
    return 0


def _oracle_crosscheck() -> bool:
    from .generators import gen_hanoi, gen_random_tree
    from .heuristics import TableHeuristic
    from .oracles import bfs_oracle, gbfs_reference
    from .task import make_state

    for k in range(1, 6):
        if bfs_oracle(gen_hanoi(k)).length != 2 ** k - 1:
            return False
    for seed in range(10):
        task, table = gen_random_tree(seed, 40)
        trace, _ = gbfs_reference(task, lambda s: table[make_state(s)])
        cfg = SearchConfig(search="guctn2", bandit="greedy", trace=True)
        res = run_search(task, cfg, heuristics=[TableHeuristic(task, table)])
        if res.metrics.trace != [make_state(s) for s in trace]:
            return False
    return True


def _cmd_score(args) -> int:
    try:
        with open(args.csv, newline="") as fh:
            records = bench.read_csv(fh)
    except (OSError, ValueError) as e:
        raise UsageError(str(e)) from None
    if args.limit <= 1:
        raise UsageError("--limit must exceed 1 second")
    for config, s in bench.score_by_config(records, args.limit).items():
        print(f"{config}: coverage={s.coverage:.2f}/{s.instances} agile={s.agile:.3f}")
    return 0


COMMANDS = {"run": _cmd_run, "suite": _cmd_suite, "probe": _cmd_probe, "score": _cmd_score}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"plan {args.command}: error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as e:  # noqa: BLE001 - top-level guard
        print(f"plan {args.command}: internal error: {e!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
