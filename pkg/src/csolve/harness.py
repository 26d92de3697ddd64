"""Benchmark plumbing: run records, CSV files, suites over config grids, e-sweeps."""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import pathlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, NamedTuple, Optional, Sequence

from .branching import BranchingPolicy, Rule, Scheme
from .heuristics import Heuristic
from .model import Problem, InstanceError, generate_nqueens, generate_rb, generate_tables, load_instance
from .search import Mode, SearchConfig, SearchReport, solve

log = logging.getLogger(__name__)

NA = "NA"
ERROR = "ERROR"

VOH_NAMES = {
    "lex": Heuristic.LEX,
    "dom": Heuristic.DOM,
    "ddeg": Heuristic.DOM_DDEG,
    "wdeg": Heuristic.DOM_WDEG,
    "alldel": Heuristic.DOM_ALLDEL,
}
_VOH_LABELS = {h: name for name, h in VOH_NAMES.items()}
SECONDARY_NAMES = {"wdeg": Heuristic.WDEG, "dom": Heuristic.DOM_ADVISOR}
BRANCHING_NAMES = ("dway", "2way", "r2way", "hsdiff", "hcadv", "hand", "hor")
_RULE_NAMES = {Rule.SDIFF: "hsdiff", Rule.CADV: "hcadv", Rule.CONJ: "hand", Rule.DISJ: "hor"}

# e values calibrated for dom/wdeg and dom/alldel respectively
DEFAULT_E = {Heuristic.DOM_ALLDEL: 0.001}
FALLBACK_E = 0.1


def make_config(
    branching: str,
    voh: str,
    e: Optional[float] = None,
    secondary: str = "wdeg",
    mode: str = "first",
    timeout: Optional[float] = None,
    node_limit: Optional[int] = None,
    trace: bool = False,
) -> SearchConfig:
    """Build a SearchConfig from the CLI vocabulary."""
    if branching not in BRANCHING_NAMES:
        raise ValueError(f"unknown branching {branching!r}")
    if voh not in VOH_NAMES:
        raise ValueError(f"unknown voh {voh!r}")
    if secondary not in SECONDARY_NAMES:
        raise ValueError(f"unknown secondary advisor {secondary!r}")
    h = VOH_NAMES[voh]
    h2 = SECONDARY_NAMES[secondary]
    if e is None:
        e = DEFAULT_E.get(h, FALLBACK_E)
    policy = {
        "dway": BranchingPolicy.dway,
        "2way": BranchingPolicy.two_way,
        "r2way": BranchingPolicy.restricted,
        "hsdiff": lambda: BranchingPolicy.sdiff(e),
        "hcadv": lambda: BranchingPolicy.cadv(h2),
        "hand": lambda: BranchingPolicy.conj(e, h2),
        "hor": lambda: BranchingPolicy.disj(e, h2),
    }[branching]()
    return SearchConfig(
        voh=h, policy=policy, mode=Mode(mode), node_limit=node_limit, time_limit=timeout, trace=trace
    )


def config_labels(config: SearchConfig) -> tuple[str, str, Optional[float]]:
    """(scheme, voh, e) as written to CSV."""
    policy = config.policy
    voh = _VOH_LABELS.get(config.voh, config.voh.value)
    if policy.scheme is not Scheme.ADAPTIVE:
        return policy.scheme.value, voh, None
    scheme = _RULE_NAMES[policy.rule]
    if policy.uses_secondary and policy.secondary is not Heuristic.WDEG:
        scheme += "(dom)"
    return scheme, voh, policy.e if policy.uses_e else None


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class RunRecord:
    instance: str
    scheme: str
    voh: str
    e: Optional[float]
    verdict: str
    time_ms: Optional[int]
    nodes: Optional[int]
    vc: Optional[int]
    vc_blocked: Optional[int]
    dis_mean: Optional[float]
    dwo_count: Optional[int]
    deletion_events: Optional[int]
    solutions: Optional[int]

    @classmethod
    def from_report(cls, instance: str, config: SearchConfig, report: SearchReport) -> "RunRecord":
        scheme, voh, e = config_labels(config)
        return cls(
            instance, scheme, voh, e, report.verdict.value,
            int(report.wall_time * 1000), report.nodes, report.vc, report.vc_blocked,
            report.dis_mean, report.dwo_count, report.deletion_event_count, report.solution_count,
        )

    @classmethod
    def error(cls, instance: str, config: SearchConfig) -> "RunRecord":
        scheme, voh, e = config_labels(config)
        return cls(instance, scheme, voh, e, ERROR, None, None, None, None, None, None, None, None)


CSV_HEADER = [f.name for f in fields(RunRecord)]
_FLOAT_FIELDS = {"e", "dis_mean"}
_TEXT_FIELDS = {"instance", "scheme", "voh", "verdict"}


def _cell(v) -> str:
    if v is None:
        return NA
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _uncell(name: str, s: str):
    if name in _TEXT_FIELDS:
        return s
    if s == NA:
        return None
    return float(s) if name in _FLOAT_FIELDS else int(s)


def write_records(records: Iterable[RunRecord], out) -> None:
    """Write records to a path or an open text stream."""
    if isinstance(out, (str, pathlib.Path)):
        with open(out, "w", newline="") as fh:
            write_records(records, fh)
        return
    w = csv.writer(out)
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_cell(v) for v in astuple(r)])


def read_records(src) -> list[RunRecord]:
    if isinstance(src, (str, pathlib.Path)):
        with open(src, newline="") as fh:
            return read_records(fh)
    reader = csv.DictReader(src)
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [RunRecord(**{k: _uncell(k, row[k]) for k in CSV_HEADER}) for row in reader]


def records_to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# instance sources

_GENERATORS = {
    "rb": (generate_rb, {"n": int, "alpha": float, "r": float, "p": float, "seed": int}),
    "queens": (generate_nqueens, {"n": int}),
    "tables": (
        generate_tables,
        {"n": int, "d": int, "m": int, "max_arity": int, "tightness": float, "seed": int},
    ),
}


def load_source(source: str) -> Problem:
    """Load a ``.cspi`` path or build a generator spec such as ``rb:n=8,alpha=0.8,r=1.5,p=0.3,seed=1``."""
    kind, sep, args = source.partition(":")
    if sep and kind in _GENERATORS:
        gen, types = _GENERATORS[kind]
        kwargs = {}
        for item in filter(None, args.split(",")):
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in types:
                raise InstanceError(f"generator {kind} has no parameter {key!r}")
            try:
                kwargs[key] = types[key](val)
            except ValueError:
                raise InstanceError(f"bad value {val!r} for {kind} parameter {key}") from None
        try:
            problem = gen(**kwargs)
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"cannot generate {source}: {exc}") from None
        return Problem(source, problem.variables, problem.constraints)
    return load_instance(source)


def list_sources(spec: str) -> list[str]:
    """Expand a directory (its ``*.cspi`` files) or a list file (one source per line)."""
    path = pathlib.Path(spec)
    if path.is_dir():
        return [str(p) for p in sorted(path.glob("*.cspi"))]
    sources = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind = line.partition(":")[0]
        if kind in _GENERATORS:
            sources.append(line)
        else:
            p = pathlib.Path(line)
            sources.append(str(p if p.is_absolute() else path.parent / p))
    return sources


def load_grid(path) -> list[SearchConfig]:
    """Read a JSON grid: an object or list of objects whose list-valued keys expand as a product."""
    data = json.loads(pathlib.Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    configs = []
    for entry in data:
        keys = list(entry)
        axes = [v if isinstance(v, list) else [v] for v in entry.values()]
        for combo in itertools.product(*axes):
            configs.append(make_config(**dict(zip(keys, combo))))
    return configs


# ---------------------------------------------------------------------------
# suites and sweeps


def _run_one(args) -> RunRecord:
    name, problem, config = args
    return RunRecord.from_report(name, config, solve(problem, config))


def run_suite(
    instances: Sequence,
    configs: Sequence[SearchConfig],
    out=None,
    jobs: int = 1,
) -> list[RunRecord]:
    """Solve every (instance, config) pair; records come back ordered by instance, then config.

    ``instances`` holds sources (paths or generator specs) or ready Problems.
    An instance that fails to load yields one ERROR record per config.
    """
    loaded: list[tuple[str, Optional[Problem]]] = []
    for inst in instances:
        if isinstance(inst, Problem):
            loaded.append((inst.name, inst))
            continue
        try:
            loaded.append((str(inst), load_source(str(inst))))
        except (OSError, InstanceError, ValueError) as exc:
            log.warning("cannot load %s: %s", inst, exc)
            loaded.append((str(inst), None))

    tasks = [(name, p, c) for name, p in loaded if p is not None for c in configs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = iter(list(pool.map(_run_one, tasks)))
    else:
        done = map(_run_one, tasks)

    records = []
    for name, p in loaded:
        for c in configs:
            records.append(RunRecord.error(name, c) if p is None else next(done))
    if out is not None:
        write_records(records, out)
    return records


class SweepRow(NamedTuple):
    e: float
    nodes: int
    vc: int
    time_ms: int


def e_sweep(
    problem: Problem,
    voh: Heuristic,
    e_from: float,
    e_to: float,
    step: float,
    out=None,
    mode: Mode = Mode.FIRST,
    node_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> list[SweepRow]:
    """Solve with score-difference branching for increasing e; stop at the first vc == 0 or at e_to."""
    if e_from > e_to:
        raise ValueError("e_from must not exceed e_to")
    if step <= 0:
        raise ValueError("step must be positive")
    rows = []
    for k in itertools.count():
        # index-based to avoid accumulating float error
        e = round(e_from + k * step, 12)
        if e > e_to + 1e-12:
            break
        config = SearchConfig(
            voh=voh, policy=BranchingPolicy.sdiff(e), mode=mode,
            node_limit=node_limit, time_limit=time_limit,
        )
        report = solve(problem, config)
        rows.append(SweepRow(e, report.nodes, report.vc, int(report.wall_time * 1000)))
        if report.vc == 0:
            break
    if out is not None:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SweepRow._fields)
            for row in rows:
                w.writerow([repr(row.e), row.nodes, row.vc, row.time_ms])
    return rows
