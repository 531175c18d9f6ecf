"""Run records, the built-in suite, CSV I/O and agile scores."""
from __future__ import annotations

import csv
import io
import math
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from .generators import gen_grid, gen_hanoi, gen_random_strips
from .search import SearchConfig, run_search
from .task import Task, load_task, validate_plan

DEFAULT_LIMIT = 300.0
EXTENDED_LIMIT = 1800.0


@dataclass
class RunRecord:
    instance: str
    config: str
    seed: int
    outcome: str
    wall_time: float
    expansions: int
    evaluations: int
    evals_per_sec: float
    mean_depth: float
    descent_edges: int
    scan_steps: int
    plan_length: int  # -1 when no plan was found

    @property
    def solved(self) -> bool:
        return self.outcome == "solved"


COLUMNS = tuple(f.name for f in fields(RunRecord))
_TYPES = {f.name: f.type for f in fields(RunRecord)}


@dataclass(frozen=True)
class SuiteScore:
    coverage: float
    agile: float
    instances: int


def resolve_task(source) -> Task:
    """A task from a file path, a ``Task`` or a generator spec.

    Generator specs: ``hanoi:K``, ``grid:WxH`` or ``grid:WxH:SEED``,
    ``random:SEED:FACTS:OPS``.
    """
    if isinstance(source, Task):
        return source
    text = str(source)
    kind, _, rest = text.partition(":")
    if kind == "hanoi" and rest:
        return gen_hanoi(int(rest))
    if kind == "grid" and rest:
        dims, _, seed = rest.partition(":")
        w, _, h = dims.partition("x")
        return gen_grid(int(w), int(h), int(seed) if seed else None)
    if kind == "random" and rest:
        parts = rest.split(":")
        if len(parts) != 3:
            raise ValueError(f"random spec needs SEED:FACTS:OPS, got {text!r}")
        seed, n, m = map(int, parts)
        return gen_random_strips(seed, n, m)
    path = Path(text)
    if not path.exists():
        raise FileNotFoundError(f"no task file or generator spec {text!r}")
    return load_task(path)


def run_one(source, config: SearchConfig | None = None, seed: int = 0,
            time_limit: float | None = None, max_nodes: int | None = None) -> RunRecord:
    """Run one search and summarize it. Limits given here override the config's."""
    task = resolve_task(source)
    cfg = config or SearchConfig()
    overrides = {"seed": seed}
    if time_limit is not None:
        overrides["time_limit"] = time_limit
    if max_nodes is not None:
        overrides["max_nodes"] = max_nodes
    cfg = SearchConfig(**{**cfg.as_dict(), **overrides})
    result = run_search(task, cfg)
    m = result.metrics
    outcome = result.status
    if result.solved and not validate_plan(task, result.plan):
        outcome = "invalid-plan"
    return RunRecord(
        instance=task.name,
        config=cfg.label(),
        seed=seed,
        outcome=outcome,
        wall_time=m.wall_time,
        expansions=m.expansions,
        evaluations=m.evaluations,
        evals_per_sec=m.evals_per_sec,
        mean_depth=m.mean_eval_depth,
        descent_edges=m.descent_edges,
        scan_steps=m.scan_steps,
        plan_length=len(result.plan) if result.plan is not None else -1,
    )


# -- CSV ------------------------------------------------------------------------


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def write_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def records_to_csv(records) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(fh) -> list[RunRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for row in reader:
        if not row:
            continue
        vals = {}
        for name, raw in zip(COLUMNS, row):
            typ = _TYPES[name]
            vals[name] = int(raw) if typ in (int, "int") else float(raw) if typ in (float, "float") else raw
        out.append(RunRecord(**vals))
    return out


def csv_to_records(text: str) -> list[RunRecord]:
    return read_csv(io.StringIO(text))


class RecordSink:
    """Append-only record collector shared by worker threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self.records: list[RunRecord] = []

    def append(self, record: RunRecord) -> None:
        with self._lock:
            self.records.append(record)

    def sorted(self) -> list[RunRecord]:
        with self._lock:
            return sorted(self.records, key=lambda r: (r.instance, r.config, r.seed))


# -- scores -------------------------------------------------------------------


def agile_score(t: float, limit: float = DEFAULT_LIMIT) -> float:
    """min{1, 1 - log t / log L}; a run slower than the limit counts as unsolved."""
    if limit <= 1:
        raise ValueError("the time limit must exceed one second")
    if t > limit:
        return 0.0
    if t <= 1.0:
        return 1.0
    return min(1.0, 1.0 - math.log(t) / math.log(limit))


def score_suite(records, limit: float = DEFAULT_LIMIT) -> SuiteScore:
    """Coverage and agile score; each instance is averaged over its seeds first."""
    per_instance: dict[str, list[tuple[float, float]]] = {}
    for r in records:
        solved = r.outcome == "solved"
        score = agile_score(r.wall_time, limit) if solved else 0.0
        covered = 1.0 if solved and r.wall_time <= limit else 0.0
        per_instance.setdefault(r.instance, []).append((covered, score))
    coverage = agile = 0.0
    for runs in per_instance.values():
        coverage += sum(c for c, _ in runs) / len(runs)
        agile += sum(s for _, s in runs) / len(runs)
    return SuiteScore(coverage, agile, len(per_instance))


def score_by_config(records, limit: float = DEFAULT_LIMIT) -> dict[str, SuiteScore]:
    groups: dict[str, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.config, []).append(r)
    return {c: score_suite(rs, limit) for c, rs in sorted(groups.items())}


# -- suite --------------------------------------------------------------------

BUILTIN_SUITE = (
    "hanoi:3", "hanoi:4", "hanoi:5", "hanoi:6", "hanoi:7",
    "grid:5x5", "grid:8x8", "grid:12x12", "grid:10x10:1", "grid:10x10:3",
    "random:11:12:30", "random:23:12:30", "random:42:16:40",
)

SUITE_CONFIGS = {
    "gbfs": dict(search="gbfs"),
    "guctn2": dict(search="guctn2"),
    "bilevel": dict(search="bilevel"),
    "bilevel-dtc": dict(search="bilevel", collapse="dtc"),
    "nebula-lite": dict(config="nebula-lite"),
}


def _run_job(job):
    source, cfg_dict, seed, limit = job
    return run_one(source, SearchConfig(**cfg_dict), seed, time_limit=limit)


def run_suite(instances=BUILTIN_SUITE, configs=None, seeds: int = 5, time_limit: float = 60.0,
              jobs: int = 1, sink: RecordSink | None = None, base: dict | None = None) -> list[RunRecord]:
    """All (instance, config, seed) runs, merged in sorted order."""
    if configs is None:
        configs = SUITE_CONFIGS
    sink = sink or RecordSink()
    work = []
    for inst in instances:
        for name, cfg in configs.items():
            merged = {**(base or {}), **cfg}
            for seed in range(seeds):
                work.append((inst, merged, seed, time_limit))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rec in pool.map(_run_job, work):
                sink.append(rec)
    else:
        for job in work:
            sink.append(_run_job(job))
    return sink.sorted()
