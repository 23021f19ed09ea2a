"""Command-line front end.

    homolink sample   --edges E --max-nodes N [--start LABEL] --out S
    homolink weights  --edges E --attributes A [--attrs a,b] [--estimator ...]
    homolink impute   --edges E --attributes A --attr a [--f F --t T | --tune]
    homolink score    --edges E --pairs P [scorer flags]
    homolink metrics  --edges E --pairs P [--attributes A]
    homolink evaluate --edges E [--attributes A] [scorer flags] [--reps R]

Exit status is 0 on success, 2 for bad input and 3 when a computation is
degenerate; failures also print a one-line JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import secrets
import sys

import numpy as np

from . import __version__
from .aggregate import COMPUTED, SKIP_TERM, UNIFORM, ZERO, PairScorer, ScorerConfig, resolve_weights
from .attributes import AttributeTable, ImputationPolicy, impute, tune_thresholds
from .errors import DegenerateError, InputError
from .evaluation import LATEST, RANDOM, evaluate
from .graph import bfs_sample
from .homophily import HomophilyMetricKind
from .io import (load_graph, read_attributes, read_pairs, write_attributes,
                 write_edge_list)
from .structural import StructuralMetricKind
from .weights import StructuralEstimator, WeightSet, compute_weights

logger = logging.getLogger("homolink")

EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _csv_list(text):
    return [s.strip() for s in text.split(",") if s.strip()] if text else []


def _seed(args, what="run"):
    """Use ``--seed`` or synthesize one and announce it on stderr."""
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"{what}: using seed {args.seed}", file=sys.stderr)
    return args.seed


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(text, path):
    fh, close = _open_out(path)
    try:
        fh.write(text if text.endswith("\n") else text + "\n")
    finally:
        if close:
            fh.close()


def format_table(rows, columns):
    """Aligned plain-text table; floats printed with 4 decimals."""
    def cell(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4f}"
        return str(v)

    body = [[cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(b[i]) for b in body]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def format_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else r.get(c) for c in columns])
    return buf.getvalue()


def _render(rows, columns, fmt, payload=None):
    if fmt == "json":
        return json.dumps(payload if payload is not None else rows, indent=2, sort_keys=True)
    if fmt == "csv":
        return format_csv(rows, columns)
    return format_table(rows, columns)


def _load(args, need_attrs=False):
    g = load_graph(args.edges, directed=args.directed)
    tab = None
    if getattr(args, "attributes", None):
        tab = read_attributes(args.attributes, g)
    elif need_attrs:
        raise InputError("--attributes is required for this command")
    return g, tab


def _attr_names(args, tab):
    names = _csv_list(getattr(args, "attrs", None))
    if tab is None:
        if names:
            raise InputError("--attrs given without --attributes")
        return []
    for a in names:
        if a not in tab.names:
            raise InputError(f"unknown attribute {a!r}; file has {', '.join(tab.names)}")
    return names


def _scorer_config(args, tab):
    attrs = _attr_names(args, tab) or (list(tab.names) if tab is not None else [])
    structural = None if args.structural == "none" else args.structural
    if args.weights == "file":
        if not args.weights_file:
            raise InputError("--weights file needs --weights-file PATH")
        try:
            with open(args.weights_file, encoding="utf-8") as fh:
                weights = WeightSet.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.weights_file}:{exc.lineno}: {exc.msg}") from None
    elif args.weights is None:
        # a lone term's weight cancels out; uniform avoids a zero-weight failure
        n_terms = len(attrs) + (structural is not None)
        weights = UNIFORM if n_terms == 1 else COMPUTED
    else:
        weights = args.weights
    return ScorerConfig(structural_kind=structural, homophily_kind=args.homophily,
                        attributes=tuple(attrs), weights=weights,
                        missing_policy=args.missing, estimator=args.estimator)


def oldest_node(g) -> int:
    """Endpoint with the smaller label of the earliest-stamped edge, else node 0."""
    if g.timestamps is None or g.edge_count == 0:
        return 0
    e = int(np.argmin(g.timestamps))
    return int(g.edges[e].min())


# --- subcommands -----------------------------------------------------------

def cmd_sample(args):
    g = load_graph(args.edges, directed=args.directed)
    start = g.node_id(args.start) if args.start is not None else oldest_node(g)
    sub = bfs_sample(g, start, args.max_nodes)
    if args.out is None:
        raise InputError("sample needs --out PATH")
    write_edge_list(sub, args.out)
    print(f"sampled {sub.node_count} nodes, {sub.edge_count} edges from {g.labels[start]}",
          file=sys.stderr)
    if args.attributes:
        tab = read_attributes(args.attributes, g)
        if args.attributes_out:
            ids = [g.node_id(lab) for lab in sub.labels]
            sub_tab = AttributeTable(sub.node_count, {a: tab.codes(a)[ids] for a in tab.names},
                                     tab.categories)
            write_attributes(sub_tab, sub, args.attributes_out)
    return 0


def cmd_weights(args):
    g, tab = _load(args)
    attrs = _attr_names(args, tab) or (list(tab.names) if tab is not None else [])
    kw = {}
    if StructuralEstimator.parse(args.estimator) is StructuralEstimator.MOTIF_Z:
        kw = dict(seed=_seed(args, "weights"), replicas=args.replicas,
                  swaps_per_edge=args.swaps_per_edge, workers=args.workers or 1)
    ws = compute_weights(g, tab, attrs, args.estimator, **kw)
    payload = ws.to_dict()
    rows = [{"term": a, "weight": w} for a, w in ws.homophily.items()]
    rows.append({"term": "structural", "weight": ws.structural})
    _emit(_render(rows, ["term", "weight"], args.format, payload), args.out)
    return 0


IMPUTE_COLUMNS = ["attribute", "f", "t", "predicted", "precision", "missing_before",
                  "pct_missing_after"]


def cmd_impute(args):
    g, tab = _load(args, need_attrs=True)
    attrs = _csv_list(args.attr) or list(tab.names)
    for a in attrs:
        if a not in tab.names:
            raise InputError(f"unknown attribute {a!r}")
    rows, tuning = [], {}
    out = tab
    for a in attrs:
        tuned_precision = None
        if args.tune:
            f_grid = [int(x) for x in _csv_list(args.f_grid)]
            t_grid = [float(x) for x in _csv_list(args.t_grid)]
            policy, grid = tune_thresholds(g, out, a, f_grid, t_grid,
                                           holdout_fraction=args.holdout_fraction,
                                           seed=_seed(args, "impute"))
            tuning[a] = grid
            tuned_precision = next(r["precision"] for r in grid
                                   if r["f"] == policy.f_min and r["t"] == policy.t_min)
        else:
            policy = ImputationPolicy(args.f, args.t)
        out, rep = impute(g, out, a, policy, passes=args.passes)
        d = rep.to_dict()
        if tuned_precision is not None:
            d["precision"] = tuned_precision
        rows.append(d)
    if args.completed:
        write_attributes(out, g, args.completed)
    payload = {"rows": rows, "seed": args.seed if args.tune else None}
    if args.tune:
        payload["grid"] = tuning
    _emit(_render(rows, IMPUTE_COLUMNS, args.format, payload), args.out)
    return 0


def _pair_rows(g, pairs, columns_fn):
    rows = []
    for x, y in pairs:
        row = {"u": g.labels[x], "v": g.labels[y]}
        row.update(columns_fn(x, y))
        rows.append(row)
    return rows


def cmd_score(args):
    g, tab = _load(args)
    cfg = resolve_weights(g, tab, _scorer_config(args, tab))
    scorer = PairScorer(g, tab, cfg)
    pairs = read_pairs(args.pairs, g)
    rows = _pair_rows(g, pairs, lambda x, y: {"score": scorer(x, y)})
    fmt = args.format or "csv"
    payload = {"weights": cfg.weights.to_dict() if not isinstance(cfg.weights, str) else cfg.weights,
               "scores": rows}
    _emit(_render(rows, ["u", "v", "score"], fmt, payload), args.out)
    return 0


def cmd_metrics(args):
    g, tab = _load(args)
    attrs = _attr_names(args, tab) or (list(tab.names) if tab is not None else [])
    pairs = read_pairs(args.pairs, g)
    scorers = {k.value: PairScorer(g, None, ScorerConfig(structural_kind=k, weights=UNIFORM))
               for k in StructuralMetricKind}
    hom = {}
    for a in attrs:
        for h in HomophilyMetricKind:
            hom[f"{a}:{h.value}"] = PairScorer(
                g, tab, ScorerConfig(structural_kind=None, homophily_kind=h,
                                     attributes=(a,), weights=UNIFORM))

    def cols(x, y):
        d = {name: s.structural(x, y) for name, s in scorers.items()}
        for name, s in hom.items():
            # raw categorical similarity, undefined when a value is missing
            d[name] = s.terms(x, y)[0][1]
        return d

    rows = _pair_rows(g, pairs, cols)
    columns = ["u", "v", *scorers, *hom]
    _emit(_render(rows, columns, args.format or "csv"), args.out)
    return 0


def cmd_evaluate(args):
    g, tab = _load(args)
    cfg = _scorer_config(args, tab)
    seed = _seed(args, "evaluate")
    mode = None if args.mode == "auto" else args.mode
    rep = evaluate(g, tab, cfg, repetitions=args.reps, fraction=args.fraction,
                   n_rounds=args.rounds, master_seed=seed, mode=mode, workers=args.workers)
    if args.report:
        _emit(rep.to_json(), args.report)
    if args.format == "json":
        _emit(rep.to_json(), args.out)
    else:
        rows = [{"trial": i, "seed": t.seed, "auc": t.auc, "n": t.n,
                 "greater": t.n_greater, "ties": t.n_ties} for i, t in enumerate(rep.trials)]
        rows.append({"trial": "mean", "auc": rep.mean_auc})
        _emit(_render(rows, ["trial", "seed", "auc", "n", "greater", "ties"], args.format), args.out)
    return 0


# --- parser ----------------------------------------------------------------

def _add_common(p, attributes=True):
    p.add_argument("--edges", required=True, help="edge list (u v [timestamp])")
    p.add_argument("--directed", action="store_true",
                   help="input lists directed arcs; reciprocal pairs become one edge")
    if attributes:
        p.add_argument("--attributes", help="attribute CSV with header node,<attrs>")
    p.add_argument("--out", help="output path (default stdout)")


def _add_scorer(p):
    p.add_argument("--structural", default="ns",
                   choices=[k.value for k in StructuralMetricKind] + ["none"])
    p.add_argument("--homophily", default="of", choices=[k.value for k in HomophilyMetricKind])
    p.add_argument("--attrs", help="comma-separated attribute subset (default all)")
    p.add_argument("--weights", choices=[COMPUTED, UNIFORM, "file"],
                   help="default: computed, or uniform when only one term is scored")
    p.add_argument("--weights-file", help="JSON from the weights subcommand")
    p.add_argument("--missing", default=SKIP_TERM, choices=[SKIP_TERM, ZERO],
                   help="treatment of a term whose attribute value is missing")
    p.add_argument("--estimator", default="avg-local-cc",
                   choices=[e.value for e in StructuralEstimator])


def build_parser():
    ap = argparse.ArgumentParser(prog="homolink", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="BFS sample from the oldest (or given) node")
    _add_common(p)
    p.add_argument("--max-nodes", type=int, required=True)
    p.add_argument("--start", help="start node label (default: oldest node)")
    p.add_argument("--attributes-out", help="write the sampled nodes' attributes here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("weights", help="homophily and structural weights as JSON")
    _add_common(p)
    p.add_argument("--attrs")
    p.add_argument("--estimator", default="avg-local-cc",
                   choices=[e.value for e in StructuralEstimator])
    p.add_argument("--replicas", type=int, default=20)
    p.add_argument("--swaps-per-edge", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", default="json", choices=["json", "table", "csv"])
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("impute", help="fill missing attribute values by neighbor vote")
    _add_common(p)
    p.add_argument("--attr", help="attribute(s) to impute, comma-separated (default all)")
    p.add_argument("--f", type=int, default=1, help="minimum votes for the winner")
    p.add_argument("--t", type=float, default=0.5, help="minimum vote share for the winner")
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--tune", action="store_true", help="grid-search f and t first")
    p.add_argument("--f-grid", default="1,2,3,4,5")
    p.add_argument("--t-grid", default="0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--holdout-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int)
    p.add_argument("--completed", help="write the completed attribute CSV here")
    p.add_argument("--format", default="table", choices=["json", "table", "csv"])
    p.set_defaults(func=cmd_impute)

    p = sub.add_parser("score", help="fused score for each pair in a list")
    _add_common(p)
    _add_scorer(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--format", choices=["json", "table", "csv"])
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("metrics", help="every single metric for each pair in a list")
    _add_common(p)
    p.add_argument("--attrs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--format", choices=["json", "table", "csv"])
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("evaluate", help="repeated holdout AUC")
    _add_common(p)
    _add_scorer(p)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--fraction", type=float, default=0.10)
    p.add_argument("--rounds", type=int, help="comparisons per trial")
    p.add_argument("--mode", default="auto", choices=["auto", RANDOM, LATEST])
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("--format", default="json", choices=["json", "table", "csv"])
    p.set_defaults(func=cmd_evaluate)
    return ap


def _fail(exc, code):
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DegenerateError as exc:
        return _fail(exc, EXIT_DEGENERATE)
    except (ValueError, OSError) as exc:
        return _fail(exc, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
