"""Command line entry point ``inctrails``.

Exit codes: 0 on success, 1 on a configuration error, 2 when ``--strict`` is
given and some cell failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from . import analytics, graphs, harness, treelemma, worstcase
from .stitching import ROUND_COLUMNS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CELL_FAILURE = 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# --------------------------------------------------------------------------
# config file


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment, ``[section]`` headers are ignored.

    Keys use flag spelling with ``-`` or ``_``.  Values may be quoted;
    ``true``/``false`` become booleans.
    """
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#") or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if value[:1] in ("'", '"'):
            end = value.find(value[0], 1)
            if end < 0:
                raise ConfigError(f"{path}:{lineno}: unterminated quote")
            value = value[1:end]
        else:
            value = value.split("#", 1)[0].strip()
            if value.lower() in ("true", "false"):
                value = value.lower() == "true"
        out[key.replace("-", "_")] = value
    return out


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, *, grid: bool = True) -> None:
    if grid:
        p.add_argument("--n", help="vertex counts, e.g. 250,500 or 250:2000:x2")
        p.add_argument("--p", help="edge probabilities (grid syntax)")
        p.add_argument("--m", help="edge counts (grid syntax); alternative to --p")
    p.add_argument("--trials", type=int, help="trials per grid point")
    p.add_argument("--seed", type=int, help="root seed (64-bit)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--budget", type=int, help="search budget in node expansions")
    p.add_argument("--config", help="key = value file mirroring these flags")
    p.add_argument("--strict", action="store_true", default=None,
                   help="exit with status 2 if any cell fails")
    p.add_argument("--timing", action="store_true", default=None,
                   help="fill the ms column (makes output run-dependent)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inctrails",
                     description="Increasing trails and paths in randomly ordered graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate-trail", help="exact longest increasing trail on G(n,p) or G(n,m)")
    _common(p)
    p = sub.add_parser("simulate-path", help="budgeted exact longest increasing path")
    _common(p)
    p = sub.add_parser("construct", help="round-based stitching construction")
    _common(p)
    p.add_argument("--mode", choices=("trail", "path"))
    p.add_argument("--eps", type=float)
    p.add_argument("--rounds-out", help="write the per-round CSV here")
    p = sub.add_parser("sparse-probe", help="count increasing segments on a long path")
    _common(p)
    p.add_argument("--k", type=int, help="segment length (default round(ln n / ln ln n))")
    p = sub.add_parser("girth-prune", help="extract a high-girth core")
    _common(p)
    p.add_argument("--girth", type=int, help="girth target (default 6)")
    p.add_argument("--eps", type=float, help="absorption fraction (default 0.1)")
    p.add_argument("--degree-floor", type=float)

    p = sub.add_parser("tree-lemma", help="increasing root-to-leaf paths in random D-ary trees")
    _common(p, grid=False)
    p.add_argument("--D", dest="D", help="branching factors (grid syntax)")
    p.add_argument("--k", help="depths (grid syntax); default round(0.8 e D)")
    p.add_argument("--delta", type=float, help="good-path window parameter for Q (default 0.1)")
    p.add_argument("--cap", type=int, help="node-expansion cap per trial (default 1e8)")

    p = sub.add_parser("worst-case", help="m*(G) or m(G) by exhaustive or sampled orderings")
    _common(p, grid=False)
    p.add_argument("--graph", help="graph: K<n>, C<n>, P<n>, S<n> (star) or a graph file")
    p.add_argument("--paths", action="store_true", default=None, help="minimize paths instead of trails")
    p.add_argument("--sampled", action="store_true", default=None,
                   help="sample --trials orderings instead of enumerating all")
    p.add_argument("--symmetry", choices=("none", "complete"))
    p.add_argument("--checkpoint", help="JSON file for resumable enumeration")

    p = sub.add_parser("expectations", help="first-moment table over a (n, p, k) grid")
    _common(p)
    p.add_argument("--k", help="path/trail lengths (grid syntax)")
    p.add_argument("--eps", type=float)
    return parser


DEFAULTS = {
    "trials": 1, "seed": 0, "format": "csv", "out": None, "threads": 1, "budget": 1_000_000,
    "strict": False, "timing": False, "n": None, "p": None, "m": None,
}


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for key, value in vars(args).items():
        if value is not None:
            values[key] = value
    return argparse.Namespace(**values)


def _int(ns, key, default=None):
    v = getattr(ns, key, None)
    if v is None:
        return default
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"--{key.replace('_', '-')} must be an integer, got {v!r}") from None


def _float(ns, key, default=None):
    v = getattr(ns, key, None)
    if v is None:
        return default
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"--{key.replace('_', '-')} must be a number, got {v!r}") from None


def _grid(ns, key, cast, required=False):
    v = getattr(ns, key, None)
    if v is None:
        if required:
            raise ConfigError(f"--{key} is required")
        return None
    try:
        return harness.parse_grid(str(v), cast)
    except ValueError as exc:
        raise ConfigError(f"--{key}: {exc}") from None


def _bool(ns, key):
    v = getattr(ns, key, False)
    if isinstance(v, str):
        return v.lower() in ("1", "true", "yes")
    return bool(v)


def _write(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc.strerror}") from exc


def _table(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([harness._fmt(harness.sig6(r[c]) if isinstance(r[c], float) else r[c])
                    for c in columns])
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands


_SWEEP_ALGORITHMS = {
    "simulate-trail": "trail-dp",
    "simulate-path": "path-search",
    "construct": "stitch",
    "sparse-probe": "sparse-probe",
    "girth-prune": "girth-prune",
}


def _sweep(ns) -> int:
    params = {}
    if ns.command == "construct":
        params["mode"] = getattr(ns, "mode", None) or "trail"
        if getattr(ns, "eps", None) is not None:
            params["eps"] = _float(ns, "eps")
        if getattr(ns, "rounds_out", None):
            params["keep_rounds"] = True
    elif ns.command == "sparse-probe" and getattr(ns, "k", None) is not None:
        params["k"] = _int(ns, "k")
    elif ns.command == "girth-prune":
        params["girth"] = _int(ns, "girth", 6)
        params["eps"] = _float(ns, "eps", 0.1)
        if getattr(ns, "degree_floor", None) is not None:
            params["degree_floor"] = _float(ns, "degree_floor")
    n_grid = _grid(ns, "n", int, required=True)
    p_grid = _grid(ns, "p", float)
    m_grid = _grid(ns, "m", int)
    if (p_grid is None) == (m_grid is None):
        raise ConfigError("give exactly one of --p and --m")
    if ns.command == "sparse-probe" and "k" not in params:
        params["k"] = harness.sparse_k_default(max(n_grid))
    try:
        config = harness.ExperimentConfig(
            experiment=ns.command, algorithm=_SWEEP_ALGORITHMS[ns.command], ns=n_grid,
            ps=p_grid, ms=m_grid, trials=_int(ns, "trials"), seed=_int(ns, "seed"),
            threads=_int(ns, "threads"), budget=_int(ns, "budget"),
            timing=_bool(ns, "timing"), params=params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    records = harness.run_experiment(config)
    if params.get("keep_rounds"):
        rows = [row for r in records for row in r.aux.get("rounds", [])]
        _write(_table(rows, ROUND_COLUMNS, "csv"), ns.rounds_out)
        records = [replace(r, aux={k: v for k, v in r.aux.items() if k != "rounds"}) for r in records]
    _write(harness.format_records(records, ns.format), ns.out)
    failed = [r for r in records if r.failed]
    for r in failed:
        print(f"cell n={r.n} p={r.p} trial={r.trial} failed: {r.aux['error']}", file=sys.stderr)
    return EXIT_CELL_FAILURE if failed and _bool(ns, "strict") else EXIT_OK


TREE_COLUMNS = ["D", "k", "delta", "trials", "successes", "capped", "estimate", "stderr", "Q"]


def _tree(ns) -> int:
    Ds = _grid(ns, "D", int, required=True)
    ks = _grid(ns, "k", int)
    delta = _float(ns, "delta", 0.1)
    trials = _int(ns, "trials")
    cap = _int(ns, "cap", treelemma.DEFAULT_EXPANSION_CAP)
    rows = []
    failed = False
    for D in Ds:
        for k in (ks if ks is not None else [max(1, round(0.8 * math.e * D))]):
            try:
                cfg = treelemma.TreeSearchConfig(D, k, trials, _int(ns, "seed"), cap)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            est = treelemma.estimate_root_leaf_probability(cfg)
            failed |= est.capped > 0
            rows.append({"D": D, "k": k, "delta": delta, "trials": trials,
                         "successes": est.successes, "capped": est.capped,
                         "estimate": est.estimate, "stderr": est.stderr,
                         "Q": treelemma.q_ratio(D, k, delta)})
    _write(_table(rows, TREE_COLUMNS, ns.format), ns.out)
    return EXIT_CELL_FAILURE if failed and _bool(ns, "strict") else EXIT_OK


def _named_graph(spec: str) -> graphs.Graph:
    kind, rest = spec[:1].upper(), spec[1:]
    if kind in "KCPS" and rest.isdigit():
        size = int(rest)
        return {"K": graphs.gen_complete, "C": graphs.gen_cycle,
                "P": graphs.gen_path, "S": graphs.gen_star}[kind](size)
    from .graphio import read_graph
    g = read_graph(spec)
    return g.graph if isinstance(g, graphs.OrderedGraph) else g


WORST_COLUMNS = ["graph", "n", "m", "objective", "value", "exhaustive", "orderings", "gk_bound",
                 "seconds", "witness"]


def _worst(ns) -> int:
    spec = getattr(ns, "graph", None)
    if not spec:
        raise ConfigError("--graph is required (e.g. K5)")
    try:
        g = _named_graph(str(spec))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"--graph: {exc}") from None
    paths = _bool(ns, "paths")
    start = time.perf_counter()
    try:
        if _bool(ns, "sampled"):
            if paths:
                raise ConfigError("sampling is only available for trails")
            value = worstcase.m_star_sampled_upper(g, _int(ns, "trials"), _int(ns, "seed"))
            exhaustive, count, witness = False, _int(ns, "trials"), ""
        else:
            fn = worstcase.m_path_exhaustive if paths else worstcase.m_star_exhaustive
            res = fn(g, symmetry=getattr(ns, "symmetry", None) or "none",
                     threads=_int(ns, "threads"), checkpoint=getattr(ns, "checkpoint", None))
            value, exhaustive, count = res.value, res.exhaustive, res.orderings_examined
            witness = " ".join(map(str, res.witness_ordering.labels.tolist()))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    row = {"graph": str(spec), "n": g.n, "m": g.m, "objective": "path" if paths else "trail",
           "value": value, "exhaustive": exhaustive, "orderings": count,
           "gk_bound": worstcase.gk_bound(g) if g.n else 0.0,
           "seconds": time.perf_counter() - start, "witness": witness}
    _write(_table([row], WORST_COLUMNS, ns.format), ns.out)
    return EXIT_OK


EXPECT_COLUMNS = ["n", "p", "k", "log_paths", "paths", "log_trails_upper", "trails_upper",
                  "trail_threshold", "sparse_threshold", "first_moment_cutoff"]


def _expectations(ns) -> int:
    n_grid = _grid(ns, "n", int, required=True)
    p_grid = _grid(ns, "p", float, required=True)
    k_grid = _grid(ns, "k", int, required=True)
    if any(n < 1 for n in n_grid) or any(not 0 <= p <= 1 for p in p_grid) or any(k < 1 for k in k_grid):
        raise ConfigError("need n >= 1, 0 <= p <= 1 and k >= 1")
    rows = analytics.expectation_rows(n_grid, p_grid, k_grid, _float(ns, "eps", 0.0))
    _write(_table(rows, EXPECT_COLUMNS, ns.format), ns.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_CONFIG
        ns = _merge(args)
        if ns.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {ns.format!r}")
        if ns.command in _SWEEP_ALGORITHMS:
            return _sweep(ns)
        if ns.command == "tree-lemma":
            return _tree(ns)
        if ns.command == "worst-case":
            return _worst(ns)
        return _expectations(ns)
    except ConfigError as exc:
        print(f"inctrails: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
