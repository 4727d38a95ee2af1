"""Brute-force reference solvers for certifying fits on small instances.

``grid_optimum`` enumerates every isotonic assignment of grid values to nodes
by backtracking in a topological order, so its result is an unconditional
lower bound witness at the grid resolution.  ``pava`` is the classical
pool-adjacent-violators sweep for total orders.  Both are deliberately
independent of the cut/solver machinery they are used to check.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import njit_or_python
from .errors import NotAChainError, TooLargeError
from .fitting import closest_fit, constant_fit_interval, root_fit
from .order import PartialOrderDag

__all__ = [
    "MAX_ORACLE_NODES",
    "GridSpec",
    "default_grid",
    "grid_optimum",
    "pava",
]

MAX_ORACLE_NODES = 10


@dataclass(frozen=True)
class GridSpec:
    """Arithmetic value grid {lo, lo+step, ...} with hi always included."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError("grid needs lo <= hi")
        if not (self.step > 0):
            raise ValueError("grid step must be positive")

    def points(self):
        pts = np.arange(self.lo, self.hi, self.step, dtype=np.float64)
        return np.append(pts, self.hi)


def default_grid(values, loss, step=0.05):
    """Grid that makes piecewise-linear losses exactly optimizable.

    An arithmetic grid over the response range padded by max(2, loss scale),
    augmented with every loss breakpoint and every finite endpoint of a
    single-node constant-fit interval, so that for piecewise-linear losses
    some exact optimum lies entirely on the grid.
    """
    values = np.asarray(values, dtype=np.float64)
    margin = max(2.0, float(getattr(loss, "delta", 0.0)),
                 float(getattr(loss, "epsilon", 0.0)))
    base = GridSpec(float(values.min()) - margin,
                    float(values.max()) + margin, step).points()
    extras = [loss.breakpoints(values)]
    for a in values:
        cf = constant_fit_interval(np.array([a]), loss)
        if cf.attained:
            for end in (cf.interval.lo, cf.interval.hi):
                if np.isfinite(end):
                    extras.append(np.array([end]))
    return np.unique(np.concatenate([base] + extras))


@njit_or_python
def _grid_search(lmat, desc, row_argmin):
    # desc[i, t] == 1 iff t is a strict descendant of i, both in topological
    # position space, so choosing value j at i forces every such t to j or
    # above.  The bound at a candidate j is the partial cost plus each
    # remaining row's minimum clamped to its floor; by row convexity that
    # clamped minimum is the row evaluated at max(floor, row argmin), and it
    # is nondecreasing in j, so scanning can stop once past the argmin with
    # the bound at the incumbent.
    n, n_grid = lmat.shape
    best = np.empty(n, dtype=np.int64)
    choice = np.empty(n, dtype=np.int64)
    j_next = np.empty(n, dtype=np.int64)
    partial = np.empty(n + 1, dtype=np.float64)
    partial[0] = 0.0
    # flo[L, t]: floor index of node t given the choices at levels < L
    flo = np.zeros((n + 1, n), dtype=np.int64)
    # greedy feasible incumbent: per-node minimizer lifted to its floor
    best_obj = 0.0
    gflo = np.zeros(n, dtype=np.int64)
    for k in range(n):
        j = row_argmin[k]
        if j < gflo[k]:
            j = gflo[k]
        best[k] = j
        best_obj += lmat[k, j]
        for t in range(k + 1, n):
            if desc[k, t] and j > gflo[t]:
                gflo[t] = j
    # polish by single-coordinate moves: each node slides to its row argmin
    # clamped between its ancestors and descendants, strictly improving, so
    # the sweep terminates and feasibility is preserved move by move
    changed = True
    sweeps = 0
    while changed and sweeps < 64:
        changed = False
        sweeps += 1
        for k in range(n):
            lo = 0
            hi = n_grid - 1
            for t in range(n):
                if desc[t, k] and best[t] > lo:
                    lo = best[t]
                if desc[k, t] and best[t] < hi:
                    hi = best[t]
            j = row_argmin[k]
            if j < lo:
                j = lo
            if j > hi:
                j = hi
            if lmat[k, j] < lmat[k, best[k]]:
                best_obj += lmat[k, j] - lmat[k, best[k]]
                best[k] = j
                changed = True
    k = 0
    j_next[0] = 0
    while k >= 0:
        j = j_next[k]
        taken = False
        while j < n_grid:
            val = partial[k] + lmat[k, j]
            if val >= best_obj and j >= row_argmin[k]:
                break
            if val < best_obj:
                rest = 0.0
                for t in range(k + 1, n):
                    f = flo[k, t]
                    if desc[k, t] and j > f:
                        f = j
                    if row_argmin[t] > f:
                        f = row_argmin[t]
                    rest += lmat[t, f]
                if val + rest < best_obj:
                    choice[k] = j
                    j_next[k] = j + 1
                    partial[k + 1] = val
                    for t in range(k + 1, n):
                        f = flo[k, t]
                        if desc[k, t] and j > f:
                            f = j
                        flo[k + 1, t] = f
                    taken = True
                    break
                if j >= row_argmin[k]:
                    break  # convex row: the bound only grows from here
            j += 1
        if not taken:
            k -= 1
            continue
        if k == n - 1:
            best_obj = partial[n]
            for i in range(n):
                best[i] = choice[i]
            continue
        k += 1
        j_next[k] = flo[k, k]
    return best, best_obj


def grid_optimum(values, dag, loss, grid):
    """Exhaustive minimum of the summed loss over isotonic grid assignments.

    Parameters
    ----------
    values : responses, one per node.
    dag : PartialOrderDag, at most MAX_ORACLE_NODES nodes.
    loss : Loss instance.
    grid : GridSpec or an array of candidate values.

    Returns
    -------
    (g_hat, objective): the minimizing assignment (always isotonic) and its
    exact summed loss.  With every breakpoint of a piecewise-linear loss on
    the grid the objective is the true optimum; in general it is optimal
    within the objective variation across one grid cell.
    """
    n = dag.n
    if n > MAX_ORACLE_NODES:
        raise TooLargeError("grid oracle accepts at most %d nodes, got %d"
                            % (MAX_ORACLE_NODES, n))
    values = np.asarray(values, dtype=np.float64)
    pts = grid.points() if isinstance(grid, GridSpec) else np.asarray(
        grid, dtype=np.float64)
    pts = np.unique(pts)
    if pts.size == 0:
        raise ValueError("empty grid")
    topo = dag.topo_order()
    pos = np.empty(n, dtype=np.int64)
    pos[topo] = np.arange(n)
    lmat = loss.value(values[topo][:, None], pts[None, :])
    lmat = np.ascontiguousarray(lmat, dtype=np.float64)
    # transitive descendants in topological position space
    desc = np.zeros((n, n), dtype=np.uint8)
    if dag.m:
        desc[pos[dag.edges[:, 0]], pos[dag.edges[:, 1]]] = 1
        for i in range(n - 1, -1, -1):
            for s in np.nonzero(desc[i])[0]:
                desc[i] |= desc[s]
    row_argmin = lmat.argmin(axis=1)
    best, _ = _grid_search(lmat, desc, row_argmin.astype(np.int64))
    g_hat = np.empty(n, dtype=np.float64)
    g_hat[topo] = pts[best]
    objective = float(lmat[np.arange(n), best].sum())
    return g_hat, objective


def _chain_order(dag):
    topo = dag.topo_order()
    if dag.n > 1:
        need = dag.n * topo[:-1] + topo[1:]
        have = dag.n * dag.edges[:, 0] + dag.edges[:, 1]
        if not np.all(np.isin(need, have)):
            raise NotAChainError("order is not a chain")
    return topo


def pava(values, dag, loss):
    """Pool-adjacent-violators along a total order.

    Blocks carry their constant-fit interval; when a violation merges two
    blocks the pooled value is the point of the merged interval closest to
    the value of the block that triggered the merge.  For the squared loss
    the intervals are single points and the result is the unique optimum.
    """
    topo = _chain_order(dag)
    values = np.asarray(values, dtype=np.float64)
    chain_vals = values[topo]
    # blocks as (start, end) index ranges of the chain, plus their fit
    starts, ends, fits = [], [], []
    for i in range(dag.n):
        start = i
        cf = constant_fit_interval(chain_vals[i:i + 1], loss)
        fit_b = root_fit(cf, policy="mid")
        while starts and fits[-1] > fit_b:
            start = starts.pop()
            ends.pop()
            fits.pop()
            cf = constant_fit_interval(chain_vals[start:i + 1], loss)
            fit_b = closest_fit(fit_b, cf)
        starts.append(start)
        ends.append(i + 1)
        fits.append(fit_b)
    g_hat = np.empty(dag.n, dtype=np.float64)
    for start, end, fit_b in zip(starts, ends, fits):
        g_hat[topo[start:end]] = fit_b
    return g_hat
