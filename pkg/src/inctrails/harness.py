"""Seeded experiment sweeps and their CSV/JSON output.

A sweep is a grid of ``(n, p)`` or ``(n, m)`` points times a number of
trials.  Cell ``(grid index g, trial t)`` draws everything from
``Seed(root).child(HARNESS, g, t)``, so a row can be recomputed on its own and
the output does not depend on how many workers ran the sweep.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

from . import seeding
from .analytics import sparse_threshold
from .graphs import (Graph, OrderedGraph, gen_gnm, gen_gnp, pair_count, random_ordered)
from .highgirth import PruneConfig, extract_high_girth_core
from .seeding import Seed
from .solvers import (SearchBudget, longest_increasing_path_exact, longest_increasing_trail,
                      probe_segments)
from .stitching import ScheduleConfig, round_rows, run_stitching

__all__ = [
    "COLUMNS",
    "ExperimentConfig",
    "ExperimentRecord",
    "ALGORITHMS",
    "run_experiment",
    "emit",
    "format_records",
    "parse_json_records",
    "parse_grid",
    "sig6",
]

COLUMNS = ["experiment", "n", "p", "seed", "trial", "algorithm", "length", "ratio", "ms", "aux"]


def sig6(x):
    """Round a float to 6 significant digits (the precision of every emitted float)."""
    if x is None or isinstance(x, bool) or not isinstance(x, float):
        return x
    if math.isnan(x) or math.isinf(x):
        return x
    return float(f"{x:.6g}")


def _round_floats(obj):
    if isinstance(obj, float):
        return sig6(obj)
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


@dataclass(frozen=True)
class ExperimentRecord:
    """One trial of one grid point.  ``length`` is ``None`` for a failed cell."""

    experiment: str
    n: int
    p: float
    seed: int
    trial: int
    algorithm: str
    length: Optional[int]
    ratio: Optional[float]
    ms: Optional[float] = None
    aux: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return "error" in self.aux

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """A sweep: algorithm, grid, trials, root seed.

    Exactly one of ``ps`` and ``ms`` is given.  ``params`` holds
    algorithm-specific knobs (``k`` for the sparse probe, ``mode`` for
    stitching, ...).
    """

    experiment: str
    algorithm: str
    ns: Sequence[int]
    ps: Optional[Sequence[float]] = None
    ms: Optional[Sequence[int]] = None
    trials: int = 1
    seed: int = 0
    threads: int = 1
    budget: int = 1_000_000
    timing: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.ps is None) == (self.ms is None):
            raise ValueError("give exactly one of ps and ms")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        for n in self.ns:
            if n < 1:
                raise ValueError("every n must be at least 1")
        for p in self.ps or ():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p must lie in [0, 1], got {p}")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    def grid(self) -> list[tuple[int, str, float]]:
        """``(n, kind, value)`` for every grid point in emission order."""
        if self.ps is not None:
            return [(n, "p", float(p)) for n in self.ns for p in self.ps]
        return [(n, "m", int(m)) for n in self.ns for m in self.ms]


@dataclass
class Cell:
    config: ExperimentConfig
    grid_index: int
    trial: int
    n: int
    kind: str
    value: float

    @property
    def seed(self) -> Seed:
        return Seed(self.config.seed).child(seeding.HARNESS, self.grid_index, self.trial)

    @property
    def p(self) -> float:
        if self.kind == "p":
            return self.value
        total = pair_count(self.n)
        return self.value / total if total else 0.0

    def graph(self) -> Graph:
        if self.kind == "p":
            return gen_gnp(self.n, self.value, self.seed)
        return gen_gnm(self.n, int(self.value), self.seed)

    def ordered(self) -> OrderedGraph:
        return random_ordered(self.graph(), self.seed)


def _trail_dp(cell: Cell):
    og = cell.ordered()
    return longest_increasing_trail(og).length, {"m": og.m}


def _path_search(cell: Cell):
    og = cell.ordered()
    path, exact = longest_increasing_path_exact(og, SearchBudget(cell.config.budget, "best"))
    return path.length, {"m": og.m, "exact": exact}


def _stitch(cell: Cell):
    og = cell.ordered()
    params = dict(cell.config.params)
    mode = params.pop("mode", "trail")
    keep_rounds = params.pop("keep_rounds", False)
    cfg = ScheduleConfig.defaults(og.n, og.m, mode=mode,
                                  search_budget=SearchBudget(cell.config.budget, "best"), **params)
    walk, outcomes = run_stitching(og, cfg)
    stages: dict[str, int] = {}
    for o in outcomes:
        if o.status == "failure":
            stages[o.failure_stage] = stages.get(o.failure_stage, 0) + 1
    aux = {
        "m": og.m, "mode": mode, "t": cfg.t, "a": cfg.a, "b": cfg.b,
        "successful_rounds": sum(o.status == "success" for o in outcomes),
        "failures": stages,
    }
    if keep_rounds:
        aux["rounds"] = round_rows(f"{cell.grid_index}:{cell.trial}", outcomes)
    return walk.length, aux


def _sparse_probe(cell: Cell):
    og = cell.ordered()
    k = int(cell.config.params.get("k", 4))
    hits, segments = probe_segments(og, k)
    return hits, {"m": og.m, "k": k, "segments": segments,
                  "expected": segments * 2.0 / math.factorial(k) if k > 1 else float(segments)}


def _girth_prune(cell: Cell):
    g = cell.graph()
    params = cell.config.params
    cfg = PruneConfig(girth_target=int(params.get("girth", 6)), eps=float(params.get("eps", 0.1)),
                      degree_floor=params.get("degree_floor"))
    core = extract_high_girth_core(g, cfg)
    return core.size, {"m": g.m, **core.report.summary()}


ALGORITHMS: dict[str, Callable[[Cell], tuple[int, dict]]] = {
    "trail-dp": _trail_dp,
    "path-search": _path_search,
    "stitch": _stitch,
    "sparse-probe": _sparse_probe,
    "girth-prune": _girth_prune,
}


def _run_cell(cell: Cell) -> ExperimentRecord:
    cfg = cell.config
    start = time.perf_counter()
    try:
        length, aux = ALGORITHMS[cfg.algorithm](cell)
        ratio = length / (math.e * cell.n * cell.p) if cell.p > 0 else None
    except Exception as exc:  # a failed cell becomes a row, never a missing one
        length, ratio = None, None
        aux = {"error": f"{type(exc).__name__}: {exc}",
               "where": traceback.extract_tb(exc.__traceback__)[-1].name}
    ms = (time.perf_counter() - start) * 1e3 if cfg.timing else None
    if cell.kind == "m":
        aux = {"m_target": int(cell.value), **aux}
    return ExperimentRecord(
        experiment=cfg.experiment, n=cell.n, p=sig6(cell.p), seed=cfg.seed, trial=cell.trial,
        algorithm=cfg.algorithm, length=length, ratio=sig6(ratio), ms=sig6(ms),
        aux=_round_floats(aux),
    )


def run_experiment(config: ExperimentConfig) -> list[ExperimentRecord]:
    """Run every ``grid point x trial`` cell; rows come back sorted by (grid index, trial)."""
    cells = [Cell(config, gi, t, n, kind, value)
             for gi, (n, kind, value) in enumerate(config.grid())
             for t in range(config.trials)]
    if config.threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(_run_cell, cells))
    return [_run_cell(c) for c in cells]


# --------------------------------------------------------------------------
# emission


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _aux_json(aux: dict) -> str:
    return json.dumps(aux, sort_keys=True, separators=(",", ":"))


def format_records(records: Sequence[ExperimentRecord], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in records:
            d = r.as_dict()
            w.writerow([_aux_json(d[c]) if c == "aux" else _fmt(d[c]) for c in COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        rows = [{c: r.as_dict()[c] for c in COLUMNS} for r in records]
        return json.dumps(rows, sort_keys=False, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(records: Sequence[ExperimentRecord], fmt: str = "csv", path: Optional[str] = None) -> str:
    """Write records as CSV or JSON to ``path`` (or just return the text when ``path`` is None)."""
    text = format_records(records, fmt)
    if path is not None and path != "-":
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {fmt} output to {path}: {exc.strerror or exc}") from exc
    return text


def parse_json_records(text: str) -> list[ExperimentRecord]:
    return [ExperimentRecord(**{c: row[c] for c in COLUMNS}) for row in json.loads(text)]


# --------------------------------------------------------------------------
# grid syntax


def parse_grid(spec: str, cast=float) -> list:
    """``"250,500,1000"``, ``"250:2000:x2"`` (geometric) or ``"10:50:+10"`` (arithmetic).

    Ranges include the stop value when the progression lands on it.
    """
    spec = str(spec).strip()
    if not spec:
        raise ValueError("empty grid")
    out = []
    for part in spec.split(","):
        part = part.strip()
        if ":" not in part:
            out.append(cast(part))
            continue
        pieces = part.split(":")
        if len(pieces) != 3:
            raise ValueError(f"range {part!r} must look like start:stop:xF or start:stop:+S")
        start, stop, step = cast(pieces[0]), cast(pieces[1]), pieces[2].strip()
        if step[:1] not in ("x", "+") or len(step) < 2:
            raise ValueError(f"range step {step!r} must be xF (geometric) or +S (arithmetic)")
        amount = float(step[1:])
        if (step[0] == "x" and (amount <= 1 or start <= 0)) or (step[0] == "+" and amount <= 0):
            raise ValueError(f"range {part!r} does not progress")
        x = start
        slack = 1e-9 * max(abs(stop), 1.0)
        while x <= stop + slack:
            out.append(cast(round(x)) if cast is int else cast(x))
            x = x * amount if step[0] == "x" else x + amount
    return out


def sparse_k_default(n: int) -> int:
    return max(2, round(sparse_threshold(max(n, 3))))
