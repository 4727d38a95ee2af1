"""Command-line front-end: fitting, violation reporting, and the Monte-Carlo
violation-frequency study.

Input is JSON ({"points": [{"id", "y", "x"?}], "edges"?: [{"from", "to"}]},
with exactly one of explicit edges or coordinates on every point) or CSV with
header id,y,x1..xd, coordinates implying the componentwise dominance order.

The simulation harness draws its own normal and Poisson variates from raw
Philox uniforms (Box-Muller; Knuth's product method below mean 12 and
transformed rejection above), so counts for a given seed are stable across
platforms and library versions.  Replicates run in a process pool whose size
is capped by ISO_GIRP_THREADS, and results are merged in replicate order, so
output bytes do not depend on the worker count.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (CycleError, DomainError, DuplicatePointError,
                     IsoGirpError, NoMinimizerError, TooLargeError)
from .losses import HingeLoss, HuberLoss, LogisticLoss, make_loss
from .oracle import MAX_ORACLE_NODES, default_grid, grid_optimum
from .order import PartialOrderDag, dominance_order, is_isotonic
from .solver import Mode, fit, tree_to_dict, tree_to_dot

__all__ = [
    "SimConfig",
    "load_input",
    "tree_leaf_values",
    "run_simulation",
    "main",
]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_VIOLATION = 3


class CliError(Exception):
    """Input or configuration problem; reported on stderr with exit 1."""


# ---------------------------------------------------------------- ingestion

def _parse_points(raw_points):
    if not isinstance(raw_points, list) or not raw_points:
        raise CliError("'points' must be a nonempty list")
    ids, ys, coords = [], [], []
    seen = set()
    for p in raw_points:
        if not isinstance(p, dict) or "id" not in p or "y" not in p:
            raise CliError("every point needs 'id' and 'y'")
        pid = p["id"]
        key = str(pid)
        if key in seen:
            raise CliError("duplicate point id %r" % (pid,))
        seen.add(key)
        ids.append(pid)
        try:
            ys.append(float(p["y"]))
        except (TypeError, ValueError):
            raise CliError("response of point %r is not a number" % (pid,))
        coords.append(p.get("x"))
    return ids, np.array(ys, dtype=np.float64), coords


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc))
    except ValueError as exc:
        raise CliError("invalid JSON in %s: %s" % (path, exc))
    if not isinstance(doc, dict):
        raise CliError("top-level JSON value must be an object")
    ids, values, coords = _parse_points(doc.get("points"))
    raw_edges = doc.get("edges")
    have_coords = [c is not None for c in coords]
    if raw_edges is not None and any(have_coords):
        raise CliError("give either 'edges' or coordinates, not both")
    if raw_edges is None and not all(have_coords):
        raise CliError("without 'edges', every point needs coordinates 'x'")
    n = len(ids)
    if raw_edges is not None:
        index = {str(pid): i for i, pid in enumerate(ids)}
        pairs = []
        for e in raw_edges:
            if not isinstance(e, dict) or "from" not in e or "to" not in e:
                raise CliError("every edge needs 'from' and 'to'")
            try:
                pairs.append((index[str(e["from"])], index[str(e["to"])]))
            except KeyError as exc:
                raise CliError("edge endpoint %s is not a point id" % (exc,))
        edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        return ids, values, PartialOrderDag(n, edges)
    pts = np.array([[float(v) for v in c] for c in coords], dtype=np.float64)
    if pts.ndim != 2:
        raise CliError("coordinate vectors must share one length")
    return ids, values, dominance_order(pts)


def _load_csv(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc))
    if not rows or len(rows) < 2:
        raise CliError("CSV needs a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if len(header) < 3 or header[0] != "id" or header[1] != "y":
        raise CliError("CSV header must be id,y,x1..xd")
    d = len(header) - 2
    ids, ys, pts = [], [], []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CliError("line %d has %d fields, expected %d"
                           % (lineno, len(row), len(header)))
        pid = row[0].strip()
        if pid in seen:
            raise CliError("duplicate point id %r" % (pid,))
        seen.add(pid)
        ids.append(pid)
        try:
            ys.append(float(row[1]))
            pts.append([float(v) for v in row[2:]])
        except ValueError:
            raise CliError("non-numeric value on line %d" % (lineno,))
    pts = np.array(pts, dtype=np.float64).reshape(-1, d)
    return ids, np.array(ys, dtype=np.float64), dominance_order(pts)


def load_input(path):
    """Read an input document; returns (ids, responses, dag)."""
    if str(path).lower().endswith(".csv"):
        return _load_csv(path)
    return _load_json(path)


def tree_leaf_values(record):
    """Fitted value per external id from an exported tree record."""
    out = {}
    stack = [record]
    while stack:
        node = stack.pop()
        if node.get("children"):
            stack.extend(node["children"])
        else:
            for label in node["subset"]:
                out[label] = node["fit"]
    return out


# ------------------------------------------------------------------ fitting

def _cmd_fit(args):
    ids, values, dag = load_input(args.input)
    loss = make_loss(args.loss)
    try:
        result = fit(values, dag, loss, mode=args.mode, root=args.root,
                     max_depth=args.max_depth)
    except NoMinimizerError as exc:
        subset = getattr(exc, "subset", None)
        if subset is not None:
            labels = ", ".join(str(ids[int(i)]) for i in subset)
            print("error: no minimizer exists on subset {%s}" % labels,
                  file=sys.stderr)
        else:
            print("error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    for pid, v in zip(ids, result.g_hat):
        print("fit\t%s\t%.12g" % (pid, v))
    print("objective\t%.12g" % result.objective)
    print("isotonic\t%s" % ("true" if result.isotonic else "false"))
    ok, violations = is_isotonic(dag, result.g_hat)
    if not ok:
        for a, b in violations:
            print("violation\t%s\t%s" % (ids[int(a)], ids[int(b)]))
    if args.tree_out:
        with open(args.tree_out, "w", encoding="utf-8") as fh:
            json.dump(tree_to_dict(result.tree, labels=ids), fh, indent=2,
                      sort_keys=True)
            fh.write("\n")
    if args.dot_out:
        with open(args.dot_out, "w", encoding="utf-8") as fh:
            fh.write(tree_to_dot(result.tree, labels=ids))
            fh.write("\n")
    return EXIT_OK if result.isotonic else EXIT_VIOLATION


# --------------------------------------------------------------- simulation

@dataclass(frozen=True)
class SimConfig:
    """One cell of the violation-frequency study."""

    model: int
    n: int
    delta: float
    reps: int = 100
    seed: int = 0
    d: int = 2

    def __post_init__(self):
        if self.model not in (1, 2, 3, 4):
            raise CliError("model must be 1..4")
        if self.n < 1 or self.reps < 1 or self.d < 1:
            raise CliError("n, reps and d must be positive")
        if not (self.delta > 0):
            raise CliError("delta must be positive")


_COVARIATE_RANGE = {1: (0.0, 10.0), 2: (5.0, 10.0), 3: (0.0, 3.0),
                    4: (0.0, 5.0)}


def _normals(rng, n):
    # Box-Muller on raw uniforms; 1-u keeps the log argument positive
    u1 = 1.0 - rng.random(n)
    u2 = rng.random(n)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def _poisson(rng, lam):
    if lam <= 0.0:
        return 0
    if lam < 12.0:
        # Knuth's product method
        limit = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= rng.random()
            if p <= limit:
                return k
            k += 1
    # transformed rejection with squeeze for large means
    b = 0.931 + 2.53 * math.sqrt(lam)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_lam = math.log(lam)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = int(math.floor((2.0 * a / us + b) * u + lam + 0.43))
        if us >= 0.07 and v <= v_r:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v * inv_alpha / (a / (us * us) + b))
                <= k * log_lam - lam - math.lgamma(k + 1)):
            return k


def _draw_responses(rng, model, x):
    prod = np.prod(x, axis=1)
    if model == 1:
        return np.array([float(_poisson(rng, lam))
                         for lam in np.sqrt(prod)], dtype=np.float64)
    if model == 2:
        return np.array([float(_poisson(rng, lam))
                         for lam in prod * prod], dtype=np.float64)
    if model == 3:
        return prod + 2.0 * _normals(rng, x.shape[0])
    return prod * prod + 3.0 * _normals(rng, x.shape[0])


def _simulate_replicate(task):
    seed, rep, model, n, d, delta, modes = task
    key = np.array([seed, rep], dtype=np.uint64)
    rng = np.random.default_rng(np.random.Philox(key=key))
    lo, hi = _COVARIATE_RANGE[model]
    redraws = 0
    while True:
        x = lo + (hi - lo) * rng.random((n, d))
        try:
            dag = dominance_order(x)
        except DuplicatePointError:
            redraws += 1
            continue
        break
    y = _draw_responses(rng, model, x)
    loss = HuberLoss(delta)
    violated = {}
    for mode in modes:
        violated[mode] = not fit(y, dag, loss, mode=mode).isotonic
    return rep, violated, redraws


def _worker_count(reps):
    env = os.environ.get("ISO_GIRP_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise CliError("ISO_GIRP_THREADS must be an integer")
        if cap < 1:
            raise CliError("ISO_GIRP_THREADS must be >= 1")
        return min(reps, cap)
    return min(reps, os.cpu_count() or 1)


def run_simulation(config, modes=("original", "modified")):
    """Violation counts for one (model, n, delta) cell.

    Returns (counts, redraws): counts maps mode -> number of replicates with
    at least one violated order edge.  Replicate r draws from an independent
    Philox stream keyed by (seed, r), so the counts do not depend on the
    worker pool size.
    """
    modes = tuple(modes)
    tasks = [(int(config.seed) % (2 ** 64), rep, config.model, config.n,
              config.d, config.delta, modes) for rep in range(config.reps)]
    workers = _worker_count(config.reps)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_replicate, tasks, chunksize=8))
    else:
        results = [_simulate_replicate(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    counts = {mode: sum(1 for _, v, _ in results if v[mode])
              for mode in modes}
    redraws = sum(r[2] for r in results)
    return counts, redraws


def _cmd_simulate(args):
    config = SimConfig(model=args.model, n=args.n, delta=args.delta,
                       reps=args.reps, seed=args.seed)
    modes = ("original", "modified") if args.mode == "both" else (args.mode,)
    counts, redraws = run_simulation(config, modes)
    print("simulate model=%d n=%d d=%d delta=%g reps=%d seed=%d"
          % (config.model, config.n, config.d, config.delta, config.reps,
             config.seed))
    for mode in modes:
        print("replicates_with_violations %s=%d/%d"
              % (mode, counts[mode], config.reps))
    print("redraws=%d" % redraws)
    return EXIT_OK


# -------------------------------------------------------------- oracle check

def _random_instance(rng, size, loss):
    pairs = [(i, j) for i in range(size) for j in range(i + 1, size)]
    edges = [p for p in pairs if rng.random() < 0.45]
    dag = PartialOrderDag(size, np.array(edges, dtype=np.int64).reshape(-1, 2))
    if isinstance(loss, (LogisticLoss, HingeLoss)):
        values = rng.integers(0, 2, size) * 2.0 - 1.0
    else:
        values = np.round(3.0 * _normals(rng, size), 2)
    return values.astype(np.float64), dag


def _cmd_oracle_check(args):
    if args.size < 1 or args.size > MAX_ORACLE_NODES:
        raise CliError("size must be in 1..%d" % MAX_ORACLE_NODES)
    if args.trials < 1:
        raise CliError("trials must be positive")
    loss = make_loss(args.loss)
    key = np.array([int(args.seed) % (2 ** 64), 1], dtype=np.uint64)
    rng = np.random.default_rng(np.random.Philox(key=key))
    step = 0.05
    max_gap = 0.0
    skipped = 0
    for trial in range(args.trials):
        values, dag = _random_instance(rng, args.size, loss)
        try:
            result = fit(values, dag, loss)
        except NoMinimizerError:
            skipped += 1
            continue
        _, oracle_obj = grid_optimum(values, dag, loss,
                                     default_grid(values, loss, step=step))
        gap = oracle_obj - result.objective
        # rounding each fitted value to the nearest grid point moves it by
        # at most half a step; convexity bounds the objective increase by
        # the worse of the two endpoint evaluations
        h = 0.5 * step
        base = loss.value(values, result.g_hat)
        worst = np.maximum(loss.value(values, result.g_hat + h),
                           loss.value(values, result.g_hat - h))
        bound = float((worst - base).sum()) + 1e-9
        ok = (result.isotonic
              and result.objective <= oracle_obj + 1e-9
              and gap <= bound)
        if not ok:
            doc = {
                "points": [{"id": i, "y": float(v)}
                           for i, v in enumerate(values)],
                "edges": [{"from": int(a), "to": int(b)}
                          for a, b in dag.edges],
            }
            print("oracle-check FAILED at trial %d: solver=%.12g "
                  "oracle=%.12g bound=%.3g" % (trial, result.objective,
                                               oracle_obj, bound),
                  file=sys.stderr)
            print(json.dumps(doc, sort_keys=True), file=sys.stderr)
            return EXIT_SOLVER
        max_gap = max(max_gap, gap)
    print("oracle-check loss=%s size=%d trials=%d passed=%d skipped=%d "
          "max_gap=%.3e" % (args.loss, args.size, args.trials,
                            args.trials - skipped, skipped, max_gap))
    return EXIT_OK


# ------------------------------------------------------------------- driver

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    parser = _Parser(prog="isogirp",
                     description="isotonic regression over partial orders "
                                 "by recursive partitioning")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one input file")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--loss", required=True,
                       help="squared | huber:<delta> | eps:<epsilon> | "
                            "logistic | hinge")
    p_fit.add_argument("--mode", choices=["modified", "original"],
                       default="modified")
    p_fit.add_argument("--root", choices=["mid", "lo", "hi"], default="mid")
    p_fit.add_argument("--max-depth", type=int, default=None)
    p_fit.add_argument("--tree-out")
    p_fit.add_argument("--dot-out")
    p_fit.set_defaults(func=_cmd_fit)

    p_sim = sub.add_parser("simulate",
                           help="violation-frequency study for one cell")
    p_sim.add_argument("--model", type=int, choices=[1, 2, 3, 4],
                       required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--delta", type=float, required=True)
    p_sim.add_argument("--reps", type=int, default=100)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--mode", choices=["modified", "original", "both"],
                       default="both")
    p_sim.set_defaults(func=_cmd_simulate)

    p_chk = sub.add_parser("oracle-check",
                           help="certify the solver against the grid oracle")
    p_chk.add_argument("--size", type=int, required=True)
    p_chk.add_argument("--loss", required=True)
    p_chk.add_argument("--trials", type=int, default=200)
    p_chk.add_argument("--seed", type=int, default=0)
    p_chk.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (CycleError, DomainError, DuplicatePointError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (NoMinimizerError, TooLargeError, IsoGirpError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
